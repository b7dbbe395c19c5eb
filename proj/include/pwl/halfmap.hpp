#pragma once

// First returns to x = 0 inside one half-plane, the half-return maps they
// induce, and the displacement function whose zeros are crossing cycles.

#include <algorithm>
#include <cmath>
#include <optional>

#include "pwl/flow.hpp"
#include "pwl/roots.hpp"

namespace pwl {

enum class TimeSign : int { Forward = 1, Backward = -1 };

constexpr double sign_of(TimeSign s) { return static_cast<double>(static_cast<int>(s)); }

enum class Orientation {
  ForwardRight,  // x_R(t+) = 0, x_L(-t-) = 0, y_L(-t-) = y_R(t+)
  ForwardLeft,   // x_L(t-) = 0, x_R(-t+) = 0, y_R(-t+) = y_L(t-)
};

constexpr std::string_view to_string(Orientation o) {
  return o == Orientation::ForwardRight ? "FORWARD_RIGHT" : "FORWARD_LEFT";
}

struct HalfMapConfig {
  double focus_horizon = 8.0 * kPi;
  double node_horizon_scale = 50.0;  // horizon = scale / max(gap, min_gap)
  double min_gap = 0.1;
  int grid = 4096;
  double tangency_tol = 1e-12;
  FlowMode mode = FlowMode::ClosedForm;
};

/// Search horizon in |t| for one side.
inline double crossing_horizon(const CanonicalParams& p, Side side, const HalfMapConfig& cfg = {}) {
  switch (side_class(p, side)) {
    case EquilibriumClass::FocusCenter: return cfg.focus_horizon;
    case EquilibriumClass::DegenerateNode: return cfg.node_horizon_scale / cfg.min_gap;
    case EquilibriumClass::SaddleOrDiagonalNode:
      // eigenvalues trace +- 1
      return cfg.node_horizon_scale / std::max(2.0, cfg.min_gap);
  }
  return cfg.focus_horizon;
}

/// x-velocity of one side's field at (0, y).
inline double boundary_velocity(const CanonicalParams& p, Side side, double y) {
  return side == Side::Left ? -y : p.b - y;
}

enum class CrossingStatus { Ok, TangentStart, WrongDirection, HorizonExceeded };

constexpr std::string_view to_string(CrossingStatus s) {
  switch (s) {
    case CrossingStatus::Ok: return "OK";
    case CrossingStatus::TangentStart: return "TANGENT_START";
    case CrossingStatus::WrongDirection: return "WRONG_DIRECTION";
    case CrossingStatus::HorizonExceeded: return "HORIZON_EXCEEDED";
  }
  return "?";
}

struct Crossing {
  CrossingStatus status = CrossingStatus::HorizonExceeded;
  double tau = 0.0;  // positive crossing time when status == Ok
  explicit operator bool() const { return status == CrossingStatus::Ok; }
};

/// Smallest tau > 0 at which the orbit of (0, y0) under `side`, run at
/// signed time sign*tau, returns to x = 0 without leaving its half-plane
/// in between (at grid resolution). The arrival must be transversal.
inline Crossing first_crossing_time(const CanonicalParams& p, Side side, double y0, TimeSign sign,
                                    const HalfMapConfig& cfg = {}) {
  const double v = boundary_velocity(p, side, y0);
  if (std::abs(v) < cfg.tangency_tol) return {CrossingStatus::TangentStart, 0.0};
  const double inward = side_sign(side);
  if (sign_of(sign) * v * inward <= 0.0) return {CrossingStatus::WrongDirection, 0.0};

  const double s = sign_of(sign);
  auto x_at = [&](double tau) { return inward * flow(p, side, y0, s * tau, cfg.mode).x; };

  const double horizon = crossing_horizon(p, side, cfg);
  const double h = horizon / cfg.grid;

  // A true return arrives transversally. An orbit creeping into an
  // equilibrium on x = 0 only reaches it through rounding.
  auto arrival = [&](double tau) -> Crossing {
    const double y1 = flow(p, side, y0, s * tau, cfg.mode).y;
    const double v1 = boundary_velocity(p, side, y1);
    const double tol = cfg.tangency_tol * std::max({1.0, std::abs(y0), std::abs(p.b)});
    if (!(s * v1 * inward < -tol)) return {CrossingStatus::HorizonExceeded, 0.0};
    return {CrossingStatus::Ok, tau};
  };

  // The first sample may already lie beyond a quick return; move it towards
  // zero until it is inside the half-plane.
  double lo = h;
  double xlo = x_at(lo);
  for (int i = 0; i < 60 && !(xlo > 0.0); ++i) {
    const double nxt = 0.5 * lo;
    const double xn = x_at(nxt);
    if (xn > 0.0) {
      const auto root = polish_root(x_at, nxt, lo, xn, xlo);
      if (!root) return {CrossingStatus::HorizonExceeded, 0.0};
      return arrival(*root);
    }
    lo = nxt;
    xlo = xn;
  }
  if (!(xlo > 0.0)) return {CrossingStatus::TangentStart, 0.0};

  const bool stepping = cfg.mode == FlowMode::Numeric || !has_closed_form(p, side);
  std::optional<AffineStepper> stepper;
  Vec2 state{};
  if (stepping) {
    stepper.emplace(piece(p, side), s * h);
    state = flow(p, side, y0, s * lo, FlowMode::Numeric);
  }
  double prev = lo;
  for (int k = 2; k <= cfg.grid; ++k) {
    const double hi = k * h;
    double xhi;
    if (stepping) {
      state = stepper->advance(state);
      xhi = inward * state.x;
    } else {
      xhi = x_at(hi);
    }
    if (!std::isfinite(xhi)) break;
    if (xhi <= 0.0) {
      const double exact_hi = stepping ? x_at(hi) : xhi;
      const double exact_lo = stepping ? x_at(lo) : xlo;
      std::optional<double> root;
      if (exact_lo > 0.0) {
        root = polish_root(x_at, lo, hi, exact_lo, exact_hi);
      } else if (prev < lo) {
        // stepping drift hid a crossing just before lo
        root = polish_root(x_at, prev, lo, x_at(prev), exact_lo);
      }
      if (root) return arrival(*root);
      // stepping drift produced a false bracket; keep scanning
    }
    prev = lo;
    lo = hi;
    xlo = xhi;
  }
  return {CrossingStatus::HorizonExceeded, 0.0};
}

struct HalfMap {
  CrossingStatus status = CrossingStatus::HorizonExceeded;
  double y1 = 0.0;
  double tau = 0.0;
  explicit operator bool() const { return status == CrossingStatus::Ok; }
};

inline HalfMap half_return_map(const CanonicalParams& p, Side side, double y0, TimeSign sign,
                               const HalfMapConfig& cfg = {}) {
  const Crossing c = first_crossing_time(p, side, y0, sign, cfg);
  if (!c) return {c.status, 0.0, 0.0};
  return {CrossingStatus::Ok, flow(p, side, y0, sign_of(sign) * c.tau, cfg.mode).y, c.tau};
}

struct DisplacementValue {
  double d = 0.0;
  double t_minus = 0.0;
  double t_plus = 0.0;
  double y1 = 0.0;  // common far-end height
};

/// ForwardRight: d = y_L(-t-) - y_R(t+) for y0 below the sliding set.
/// ForwardLeft:  d = y_R(-t+) - y_L(t-) for y0 above it.
inline std::optional<DisplacementValue> displacement(const CanonicalParams& p, double y0,
                                                     Orientation o, const HalfMapConfig& cfg = {}) {
  const TimeSign right_sign = o == Orientation::ForwardRight ? TimeSign::Forward : TimeSign::Backward;
  const TimeSign left_sign = o == Orientation::ForwardRight ? TimeSign::Backward : TimeSign::Forward;
  const HalfMap R = half_return_map(p, Side::Right, y0, right_sign, cfg);
  if (!R) return std::nullopt;
  const HalfMap L = half_return_map(p, Side::Left, y0, left_sign, cfg);
  if (!L) return std::nullopt;
  if (o == Orientation::ForwardRight) return DisplacementValue{L.y1 - R.y1, L.tau, R.tau, R.y1};
  return DisplacementValue{R.y1 - L.y1, L.tau, R.tau, L.y1};
}

/// Full forward return map: right leg then left leg for ForwardRight, left
/// leg then right leg for ForwardLeft.
inline std::optional<double> full_return_map(const CanonicalParams& p, double y0, Orientation o,
                                             const HalfMapConfig& cfg = {}) {
  const Side first = o == Orientation::ForwardRight ? Side::Right : Side::Left;
  const HalfMap m1 = half_return_map(p, first, y0, TimeSign::Forward, cfg);
  if (!m1) return std::nullopt;
  const HalfMap m2 = half_return_map(p, other(first), m1.y1, TimeSign::Forward, cfg);
  if (!m2) return std::nullopt;
  return m2.y1;
}

}  // namespace pwl
