#pragma once

// Exact flows of the canonical pieces started on x = 0, and an independent
// oracle for any affine piece built on the 3x3 augmented matrix exponential.

#include <array>
#include <cmath>

#include "pwl/canonical.hpp"

namespace pwl {

struct HalfPlaneFlowResult {
  Vec2 point;
  double time = 0.0;
};

// ---------------------------------------------------------------------------
// Matrix exponential oracle

/// Row-major 3x3 matrix.
using Mat3 = std::array<double, 9>;

namespace detail {

inline Mat3 mat3_identity() { return {1, 0, 0, 0, 1, 0, 0, 0, 1}; }

inline Mat3 mat3_mul(const Mat3& A, const Mat3& B) {
  Mat3 C{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += A[3 * i + k] * B[3 * k + j];
      C[3 * i + j] = s;
    }
  }
  return C;
}

inline double mat3_norm1(const Mat3& A) {
  double best = 0.0;
  for (int j = 0; j < 3; ++j) {
    best = std::max(best, std::abs(A[j]) + std::abs(A[3 + j]) + std::abs(A[6 + j]));
  }
  return best;
}

}  // namespace detail

/// exp(A) by scaling and squaring with a Taylor core. The scaled matrix has
/// norm <= 1/2 and the series runs until the next term is below 1e-17 of the
/// partial sum.
inline Mat3 expm(const Mat3& A) {
  const double norm = detail::mat3_norm1(A);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const double scale = std::ldexp(1.0, -squarings);
  Mat3 S{};
  for (int i = 0; i < 9; ++i) S[i] = A[i] * scale;

  Mat3 sum = detail::mat3_identity();
  Mat3 term = sum;
  for (int k = 1; k < 40; ++k) {
    term = detail::mat3_mul(term, S);
    for (double& v : term) v /= k;
    for (int i = 0; i < 9; ++i) sum[i] += term[i];
    if (detail::mat3_norm1(term) <= 1e-17 * detail::mat3_norm1(sum)) break;
  }
  for (int i = 0; i < squarings; ++i) sum = detail::mat3_mul(sum, sum);
  return sum;
}

/// Propagator of x' = M x + k over time t as the augmented exponential
/// exp([[M, k], [0, 0]] t). Singular M needs no special case in this form.
inline Mat3 affine_propagator(const GeneralAffinePiece& pc, double t) {
  const auto& m = pc.matrix;
  return expm({m[0] * t, m[1] * t, pc.constant.x * t,  //
               m[2] * t, m[3] * t, pc.constant.y * t,  //
               0.0, 0.0, 0.0});
}

inline Vec2 apply_propagator(const Mat3& P, Vec2 p) {
  return {P[0] * p.x + P[1] * p.y + P[2], P[3] * p.x + P[4] * p.y + P[5]};
}

inline HalfPlaneFlowResult flow_numeric(const GeneralAffinePiece& pc, Vec2 start, double t) {
  return {apply_propagator(affine_propagator(pc, t), start), t};
}

/// Fixed-step sampler along one orbit: repeated application of exp(M h).
class AffineStepper {
 public:
  AffineStepper(const GeneralAffinePiece& pc, double step)
      : step_(affine_propagator(pc, step)) {}

  Vec2 advance(Vec2 p) const { return apply_propagator(step_, p); }

 private:
  Mat3 step_;
};

// ---------------------------------------------------------------------------
// Closed forms, all started at (0, y0) at t = 0.

namespace detail {

// expm1(z)/z with the removable singularity filled in.
inline double phi1(double z) { return z == 0.0 ? 1.0 : std::expm1(z) / z; }

// (e^z - 1 - z e^z) / z^2 = sum_{n>=2} (1-n)/n! z^(n-2)
inline double dnode_g(double z) {
  if (std::abs(z) < 0.25) {
    double sum = 0.0, pw = 1.0, fact = 2.0;
    for (int n = 2; n < 26; ++n) {
      if (n > 2) {
        pw *= z;
        fact *= n;
      }
      sum += (1.0 - n) / fact * pw;
    }
    return sum;
  }
  return (std::expm1(z) - z * std::exp(z)) / (z * z);
}

// (2 + (z-2) e^z) / z = sum_{n>=1} (n-2)/n! z^(n-1)
inline double dnode_h(double z) {
  if (std::abs(z) < 0.25) {
    double sum = 0.0, pw = 1.0, fact = 1.0;
    for (int n = 1; n < 26; ++n) {
      if (n > 1) {
        pw *= z;
        fact *= n;
      }
      sum += (n - 2.0) / fact * pw;
    }
    return sum;
  }
  return (2.0 + (z - 2.0) * std::exp(z)) / z;
}

}  // namespace detail

/// Left focus/center (alpha = i).
inline HalfPlaneFlowResult flow_left_focus(double ell, double a, double y0, double t) {
  const double e = std::exp(ell * t);
  const double s = std::sin(t);
  const double c = std::cos(t);
  const double d = ell * ell + 1.0;
  const double x = (e * (a * c - (y0 + ell * (a + ell * y0)) * s) - a) / d;
  const double y =
      (e * ((y0 * ell * ell + 2.0 * a * ell + y0) * c - (a * (ell * ell - 1.0) + ell * d * y0) * s) -
       2.0 * a * ell) /
      d;
  return {{x, y}, t};
}

/// Right focus/center (beta = i) for x' = 2 r x - y + b, y' = (r^2+1) x + c.
inline HalfPlaneFlowResult flow_right_focus(double r, double b, double c, double y0, double t) {
  const double e = std::exp(r * t);
  const double s = std::sin(t);
  const double co = std::cos(t);
  const double d = r * r + 1.0;
  const double u = y0 - b;  // height relative to the right equilibrium when c = 0
  const double x = (e * (c * co - (d * u + r * c) * s) - c) / d;
  const double y =
      -(2.0 * c * r - b * d + e * ((c * (r * r - 1.0) + r * d * u) * s - (d * u + 2.0 * c * r) * co)) / d;
  return {{x, y}, t};
}

/// Left degenerate node (alpha = 0, ell != 0), arranged so that nothing
/// cancels as ell * t -> 0.
inline HalfPlaneFlowResult flow_left_dnode(double ell, double a, double y0, double t) {
  const double z = ell * t;
  const double e = std::exp(z);
  const double x = a * t * t * detail::dnode_g(z) - y0 * t * e;
  const double y = -a * t * detail::dnode_h(z) - e * (z - 1.0) * y0;
  return {{x, y}, t};
}

/// Left saddle or diagonal node (alpha = 1, ell != +-1), written through
/// expm1 so that it stays accurate as ell -> +-1.
inline HalfPlaneFlowResult flow_left_saddle(double ell, double a, double y0, double t) {
  const double p_plus = detail::phi1((ell + 1.0) * t);
  const double p_minus = detail::phi1((ell - 1.0) * t);
  const double e = std::exp(ell * t);
  const double x = -e * std::sinh(t) * y0 - 0.5 * a * t * (p_plus - p_minus);
  const double y = e * (std::cosh(t) - ell * std::sinh(t)) * y0 +
                   0.5 * a * (std::exp((ell - 1.0) * t) - std::exp((ell + 1.0) * t) +
                              2.0 * t * (p_minus + p_plus));
  return {{x, y}, t};
}

enum class FlowMode {
  ClosedForm,  // closed form where one exists, oracle otherwise
  Numeric,     // always the matrix-exponential oracle
};

/// Right pieces with beta in {0, 1} have no closed form here.
inline bool has_closed_form(const CanonicalParams& p, Side side) {
  return side == Side::Left || p.right_class == EquilibriumClass::FocusCenter;
}

/// Flow of one canonical piece from (0, y0) for signed time t.
inline Vec2 flow(const CanonicalParams& p, Side side, double y0, double t,
                 FlowMode mode = FlowMode::ClosedForm) {
  if (mode == FlowMode::ClosedForm && has_closed_form(p, side)) {
    if (side == Side::Right) return flow_right_focus(p.r, p.b, p.c, y0, t).point;
    switch (p.left_class) {
      case EquilibriumClass::FocusCenter: return flow_left_focus(p.ell, p.a, y0, t).point;
      case EquilibriumClass::DegenerateNode: return flow_left_dnode(p.ell, p.a, y0, t).point;
      case EquilibriumClass::SaddleOrDiagonalNode: return flow_left_saddle(p.ell, p.a, y0, t).point;
    }
  }
  return flow_numeric(piece(p, side), {0.0, y0}, t).point;
}

}  // namespace pwl
