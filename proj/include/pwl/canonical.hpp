#pragma once

// Canonical two-piece family
//
//   x <= 0:  x' = 2*ell*x - y,          y' = (ell^2 - alpha^2) x + a
//   x >= 0:  x' = 2*r*x   - y + b,      y' = (r^2   - beta^2)  x + c
//
// with alpha^2, beta^2 in {-1, 0, +1}, plus Filippov classification of the
// discontinuity line x = 0.

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pwl/core.hpp"

namespace pwl {

/// Linear class of a piece. The stored value is alpha^2 (resp. beta^2):
/// focus/center (alpha = i) -> -1, degenerate node (alpha = 0) -> 0,
/// saddle or diagonal node (alpha = 1) -> +1. Star nodes cannot be expressed.
enum class EquilibriumClass : int {
  FocusCenter = -1,
  DegenerateNode = 0,
  SaddleOrDiagonalNode = 1,
};

constexpr double class_square(EquilibriumClass c) { return static_cast<double>(static_cast<int>(c)); }

constexpr std::string_view to_string(EquilibriumClass c) {
  switch (c) {
    case EquilibriumClass::FocusCenter: return "focus";
    case EquilibriumClass::DegenerateNode: return "dnode";
    case EquilibriumClass::SaddleOrDiagonalNode: return "saddle_node";
  }
  return "?";
}

inline EquilibriumClass parse_equilibrium_class(std::string_view s) {
  if (s == "focus") return EquilibriumClass::FocusCenter;
  if (s == "dnode") return EquilibriumClass::DegenerateNode;
  if (s == "saddle_node") return EquilibriumClass::SaddleOrDiagonalNode;
  throw Error(ErrorCode::Config, "unknown equilibrium class '" + std::string(s) +
                                     "' (expected focus, dnode or saddle_node)");
}

struct CanonicalParams {
  double ell = 0.0;
  double r = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  EquilibriumClass left_class = EquilibriumClass::FocusCenter;
  EquilibriumClass right_class = EquilibriumClass::FocusCenter;

  friend bool operator==(const CanonicalParams&, const CanonicalParams&) = default;
};

/// Throws Error(InvalidParams) unless the type invariants hold.
inline void validate(const CanonicalParams& p) {
  for (double v : {p.ell, p.r, p.a, p.b, p.c}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidParams, "parameters must be finite");
  }
  auto check = [](EquilibriumClass k, double trace, const char* name) {
    if (k == EquilibriumClass::DegenerateNode && trace == 0.0) {
      throw Error(ErrorCode::InvalidParams, std::string("degenerate node needs ") + name + " != 0");
    }
    if (k == EquilibriumClass::SaddleOrDiagonalNode && std::abs(trace) == 1.0) {
      throw Error(ErrorCode::InvalidParams,
                  std::string("saddle/diagonal node needs ") + name + " != +-1");
    }
  };
  check(p.left_class, p.ell, "ell");
  check(p.right_class, p.r, "r");
}

inline bool is_valid(const CanonicalParams& p) {
  try {
    validate(p);
    return true;
  } catch (const Error&) {
    return false;
  }
}

/// x' = M (x, y) + k on one side of x = 0. Row-major matrix (a11, a12, a21, a22).
struct GeneralAffinePiece {
  std::array<double, 4> matrix{};
  Vec2 constant{};
  Side side = Side::Left;

  Vec2 operator()(Vec2 p) const {
    return {matrix[0] * p.x + matrix[1] * p.y + constant.x,
            matrix[2] * p.x + matrix[3] * p.y + constant.y};
  }
  double trace() const { return matrix[0] + matrix[3]; }
  double det() const { return matrix[0] * matrix[3] - matrix[1] * matrix[2]; }
};

inline GeneralAffinePiece piece(const CanonicalParams& p, Side side) {
  if (side == Side::Left) {
    return {{2.0 * p.ell, -1.0, p.ell * p.ell - class_square(p.left_class), 0.0}, {0.0, p.a}, side};
  }
  return {{2.0 * p.r, -1.0, p.r * p.r - class_square(p.right_class), 0.0}, {p.b, p.c}, side};
}

inline EquilibriumClass side_class(const CanonicalParams& p, Side side) {
  return side == Side::Left ? p.left_class : p.right_class;
}

inline Vec2 vector_field(const CanonicalParams& p, Vec2 point, Side side) {
  return piece(p, side)(point);
}

struct EquilibriumInfo {
  Vec2 location;
  bool is_real = false;
  bool on_boundary = false;
};

/// Equilibrium of a general piece; nullopt when its matrix is singular.
inline std::optional<EquilibriumInfo> equilibrium(const GeneralAffinePiece& pc) {
  const double d = pc.det();
  if (d == 0.0) return std::nullopt;
  const auto& m = pc.matrix;
  // Cramer on M p = -k.
  double x = (-pc.constant.x * m[3] + pc.constant.y * m[1]) / d;
  double y = (-pc.constant.y * m[0] + pc.constant.x * m[2]) / d;
  if (x == 0.0) x = 0.0;  // drop the sign of -0.0
  if (y == 0.0) y = 0.0;
  const bool on_boundary = x == 0.0;
  const bool is_real = pc.side == Side::Left ? x <= 0.0 : x >= 0.0;
  return EquilibriumInfo{{x, y}, is_real, on_boundary};
}

/// Canonical equilibrium in closed form. Throws SingularPiece when
/// ell^2 - alpha^2 (resp. r^2 - beta^2) vanishes, which valid params exclude.
inline EquilibriumInfo equilibrium(const CanonicalParams& p, Side side) {
  const double trace = side == Side::Left ? p.ell : p.r;
  const double det = trace * trace - class_square(side_class(p, side));
  if (det == 0.0) throw Error(ErrorCode::SingularPiece, "piece matrix is singular");
  const double k = side == Side::Left ? p.a : p.c;
  double x = -k / det;
  if (x == 0.0) x = 0.0;
  const double y = 2.0 * trace * x + (side == Side::Left ? 0.0 : p.b);
  return {{x, y}, side == Side::Left ? x <= 0.0 : x >= 0.0, k == 0.0};
}

enum class RegionLabel { Sewing, Sliding, Escaping };

constexpr std::string_view to_string(RegionLabel l) {
  switch (l) {
    case RegionLabel::Sewing: return "SEWING";
    case RegionLabel::Sliding: return "SLIDING";
    case RegionLabel::Escaping: return "ESCAPING";
  }
  return "?";
}

/// Open interval (lo, hi) of heights on x = 0; lo/hi may be infinite.
struct BoundaryInterval {
  double lo;
  double hi;
  RegionLabel label;

  bool contains(double y) const { return lo < y && y < hi; }
};

struct BoundaryClassification {
  std::vector<BoundaryInterval> intervals;  // ordered by lo
  std::vector<double> tangency_points;      // ascending, excluded from every interval

  /// Label at y, or nullopt for a tangency point.
  std::optional<RegionLabel> label_at(double y) const {
    for (const auto& iv : intervals) {
      if (iv.contains(y)) return iv.label;
    }
    return std::nullopt;
  }
};

namespace detail {

// Linear x-velocity p*y + q of a piece on the line x = 0.
struct LineVelocity {
  double p;
  double q;
  double operator()(double y) const { return p * y + q; }
};

inline RegionLabel label_from(double v_left, double v_right) {
  // Left field points toward the line when v_left > 0, right field when v_right < 0.
  if (v_left > 0.0 && v_right < 0.0) return RegionLabel::Sliding;
  if (v_left < 0.0 && v_right > 0.0) return RegionLabel::Escaping;
  return RegionLabel::Sewing;
}

}  // namespace detail

/// Filippov partition of x = 0 for two general pieces. A piece whose
/// x-velocity vanishes identically on the line has no isolated tangency and
/// is rejected.
inline BoundaryClassification classify_boundary(const GeneralAffinePiece& left,
                                                const GeneralAffinePiece& right) {
  const detail::LineVelocity vl{left.matrix[1], left.constant.x};
  const detail::LineVelocity vr{right.matrix[1], right.constant.x};
  BoundaryClassification out;
  for (const auto& v : {vl, vr}) {
    if (v.p == 0.0) {
      if (v.q == 0.0) throw Error(ErrorCode::InvalidParams, "field is tangent along the whole line");
      continue;
    }
    double y = -v.q / v.p;
    if (y == 0.0) y = 0.0;
    out.tangency_points.push_back(y);
  }
  std::sort(out.tangency_points.begin(), out.tangency_points.end());
  out.tangency_points.erase(std::unique(out.tangency_points.begin(), out.tangency_points.end()),
                            out.tangency_points.end());

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cuts{-inf};
  cuts.insert(cuts.end(), out.tangency_points.begin(), out.tangency_points.end());
  cuts.push_back(inf);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    double probe;
    if (std::isinf(lo) && std::isinf(hi)) probe = 0.0;
    else if (std::isinf(lo)) probe = hi - 1.0;
    else if (std::isinf(hi)) probe = lo + 1.0;
    else probe = 0.5 * (lo + hi);
    out.intervals.push_back({lo, hi, detail::label_from(vl(probe), vr(probe))});
  }
  return out;
}

/// On x = 0 the canonical x-velocities are -y (left) and b - y (right), so
/// the partition depends on b alone.
inline BoundaryClassification classify_boundary(const CanonicalParams& p) {
  return classify_boundary(piece(p, Side::Left), piece(p, Side::Right));
}

/// Closed sliding set [min(0,b), max(0,b)]: closure of the sliding and
/// escaping intervals together with both tangency points.
struct ClosedInterval {
  double lo;
  double hi;
  bool contains(double y) const { return lo <= y && y <= hi; }
};

inline ClosedInterval sliding_set(const CanonicalParams& p) {
  return {std::min(0.0, p.b), std::max(0.0, p.b)};
}

/// Time-reversed system reflected by y -> -y. It is again canonical with
/// (ell, r, a, b, c) -> (-ell, -r, a, -b, c); an orbit through (0, y) of the
/// original maps to an orbit through (0, -y) traversed backwards.
inline CanonicalParams time_reversed(const CanonicalParams& p) {
  CanonicalParams q = p;
  q.ell = -p.ell;
  q.r = -p.r;
  q.b = -p.b;
  return q;
}

}  // namespace pwl
