#pragma once

// Wronskian ladders of the residual function families and a grid-based
// ECT check with zero counting.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pwl/core.hpp"

namespace pwl {

enum class FamilyName { Case1, Case1L0, Case2, Case3, Case3L0 };

constexpr std::string_view to_string(FamilyName f) {
  switch (f) {
    case FamilyName::Case1: return "CASE1";
    case FamilyName::Case1L0: return "CASE1_L0";
    case FamilyName::Case2: return "CASE2";
    case FamilyName::Case3: return "CASE3";
    case FamilyName::Case3L0: return "CASE3_L0";
  }
  return "?";
}

inline FamilyName parse_family(std::string_view s) {
  for (auto f : {FamilyName::Case1, FamilyName::Case1L0, FamilyName::Case2, FamilyName::Case3,
                 FamilyName::Case3L0}) {
    if (s == to_string(f)) return f;
  }
  throw Error(ErrorCode::Config, "unknown function family '" + std::string(s) + "'");
}

/// Shape factor g of a basis function e^{lambda t} g(t).
enum class Shape { One, T, Cot, Csc, CotMinusCsc };

struct BasisFunction {
  double lambda;
  Shape shape;
};

inline constexpr int kMaxOrder = 3;

namespace detail {

// g^{(k)}(t) for k = 0..3.
inline std::array<double, 4> shape_derivatives(Shape s, double t) {
  switch (s) {
    case Shape::One: return {1.0, 0.0, 0.0, 0.0};
    case Shape::T: return {t, 1.0, 0.0, 0.0};
    case Shape::Cot:
    case Shape::Csc:
    case Shape::CotMinusCsc: {
      const double cs = 1.0 / std::sin(t);
      const double ct = std::cos(t) * cs;
      const std::array<double, 4> dcot{ct, -cs * cs, 2.0 * cs * cs * ct,
                                       -4.0 * cs * cs * ct * ct - 2.0 * cs * cs * cs * cs};
      const std::array<double, 4> dcsc{cs, -cs * ct, cs * (ct * ct + cs * cs),
                                       -cs * ct * ct * ct - 5.0 * cs * cs * cs * ct};
      if (s == Shape::Cot) return dcot;
      if (s == Shape::Csc) return dcsc;
      return {dcot[0] - dcsc[0], dcot[1] - dcsc[1], dcot[2] - dcsc[2], dcot[3] - dcsc[3]};
    }
  }
  return {};
}

inline bool is_trig(Shape s) { return s == Shape::Cot || s == Shape::Csc || s == Shape::CotMinusCsc; }

}  // namespace detail

/// f^{(k)}(t) for k = 0..3 by the Leibniz rule on e^{lambda t} g(t).
inline std::array<double, 4> derivatives(const BasisFunction& f, double t) {
  const auto g = detail::shape_derivatives(f.shape, t);
  const double e = std::exp(f.lambda * t);
  const double l = f.lambda;
  return {e * g[0], e * (l * g[0] + g[1]), e * (l * l * g[0] + 2.0 * l * g[1] + g[2]),
          e * (l * l * l * g[0] + 3.0 * l * l * g[1] + 3.0 * l * g[2] + g[3])};
}

class FunctionFamily {
 public:
  FunctionFamily(FamilyName name, double ell) : name_(name), ell_(ell) {
    switch (name) {
      case FamilyName::Case1:
        basis_ = {{ell, Shape::One}, {ell, Shape::Cot}, {0.0, Shape::Csc}, {2.0 * ell, Shape::Csc}};
        break;
      case FamilyName::Case1L0: basis_ = {{0.0, Shape::One}, {0.0, Shape::CotMinusCsc}}; break;
      case FamilyName::Case2:
        basis_ = {{0.0, Shape::One}, {ell, Shape::One}, {-ell, Shape::One}, {0.0, Shape::T}};
        break;
      case FamilyName::Case3:
        basis_ = {{1.0, Shape::One},
                  {ell, Shape::One},
                  {ell + 2.0, Shape::One},
                  {2.0 * ell + 1.0, Shape::One}};
        break;
      case FamilyName::Case3L0: basis_ = {{0.0, Shape::One}, {1.0, Shape::One}, {2.0, Shape::One}}; break;
    }
  }

  FamilyName name() const { return name_; }
  double ell() const { return ell_; }
  /// n, so the family has n + 1 members.
  int order() const { return static_cast<int>(basis_.size()) - 1; }
  const std::vector<BasisFunction>& basis() const { return basis_; }

  /// Families containing cot or csc are undefined at multiples of pi.
  bool has_poles() const {
    return std::any_of(basis_.begin(), basis_.end(), [](const BasisFunction& f) { return detail::is_trig(f.shape); });
  }

  void check_domain(double t) const {
    if (!std::isfinite(t)) throw Error(ErrorCode::Domain, "t must be finite");
    if (has_poles() && std::abs(std::sin(t)) < 1e-10) {
      throw Error(ErrorCode::Domain, "t is a multiple of pi");
    }
  }

  double value(int j, double t) const { return derivatives(basis_.at(j), t)[0]; }

  /// Sum of c_j f_j(t) without domain checks.
  double combination(const std::vector<double>& coeffs, double t) const {
    double s = 0.0;
    for (std::size_t j = 0; j < basis_.size() && j < coeffs.size(); ++j) {
      s += coeffs[j] * derivatives(basis_[j], t)[0];
    }
    return s;
  }

 private:
  FamilyName name_;
  double ell_;
  std::vector<BasisFunction> basis_;
};

namespace detail {

// Determinant of the (k+1)x(k+1) Wronski matrix and its Hadamard bound
// (product of column norms), by Gaussian elimination with partial pivoting.
struct WronskiValue {
  double det;
  double hadamard;
};

inline WronskiValue wronski(const FunctionFamily& fam, int k, double t) {
  const int m = std::clamp(k, 0, kMaxOrder) + 1;
  std::array<std::array<double, 4>, 4> M{};
  for (int j = 0; j < m; ++j) {
    const auto d = derivatives(fam.basis()[j], t);
    for (int i = 0; i < m; ++i) M[i][j] = d[i];
  }
  // Column scaling cancels in |W| / bound, so a fast-growing member does
  // not drown the others.
  double hadamard = 1.0;
  for (int j = 0; j < m; ++j) {
    double cn = 0.0;
    for (int i = 0; i < m; ++i) cn += M[i][j] * M[i][j];
    hadamard *= std::sqrt(cn);
  }
  double det = 1.0;
  for (int c = 0; c < m; ++c) {
    int piv = c;
    for (int i = c + 1; i < m; ++i) {
      if (std::abs(M[i][c]) > std::abs(M[piv][c])) piv = i;
    }
    if (M[piv][c] == 0.0) return {0.0, hadamard};
    if (piv != c) {
      std::swap(M[piv], M[c]);
      det = -det;
    }
    det *= M[c][c];
    for (int i = c + 1; i < m; ++i) {
      const double f = M[i][c] / M[c][c];
      for (int j = c; j < m; ++j) M[i][j] -= f * M[c][j];
    }
  }
  return {det, hadamard};
}

inline void check_order(const FunctionFamily& fam, int k) {
  if (k < 0 || k > fam.order()) {
    throw Error(ErrorCode::Domain, "Wronskian order out of range for " + std::string(to_string(fam.name())));
  }
}

}  // namespace detail

/// W(f_0, ..., f_k)(t) from exact derivatives.
inline double wronskian(const FunctionFamily& fam, int k, double t) {
  detail::check_order(fam, k);
  fam.check_domain(t);
  return detail::wronski(fam, k, t).det;
}

/// The published Wronskian formulas for each family.
inline double closed_form_wronskian(const FunctionFamily& fam, int k, double t) {
  detail::check_order(fam, k);
  fam.check_domain(t);
  const double l = fam.ell();
  switch (fam.name()) {
    case FamilyName::Case1: {
      const double cs = 1.0 / std::sin(t);
      switch (k) {
        case 0: return std::exp(l * t);
        case 1: return -std::exp(2.0 * l * t) * cs * cs;
        case 2: return -std::exp(2.0 * l * t) * (l * l + 1.0) * cs * cs * cs;
        default: return -2.0 * std::exp(4.0 * l * t) * l * (1.0 + l * l) * (1.0 + l * l) * cs * cs * cs * cs;
      }
    }
    case FamilyName::Case1L0: {
      const double cs = 1.0 / std::sin(t);
      return k == 0 ? 1.0 : (std::cos(t) * cs - cs) * cs;
    }
    case FamilyName::Case2:
      switch (k) {
        case 0: return 1.0;
        case 1: return l * std::exp(l * t);
        case 2: return 2.0 * l * l * l;
        default: return -2.0 * std::pow(l, 5);
      }
    case FamilyName::Case3:
      switch (k) {
        case 0: return std::exp(t);
        case 1: return (l - 1.0) * std::exp((l + 1.0) * t);
        case 2: return 2.0 * (l * l - 1.0) * std::exp((2.0 * l + 3.0) * t);
        default: return 4.0 * l * (l * l - 1.0) * (l * l - 1.0) * std::exp(4.0 * (l + 1.0) * t);
      }
    case FamilyName::Case3L0:
      switch (k) {
        case 0: return 1.0;
        case 1: return std::exp(t);
        default: return 2.0 * std::exp(3.0 * t);
      }
  }
  return 0.0;
}

struct ScanInterval {
  double lo;
  double hi;
};

/// Splits (lo, hi) into pieces that stay `margin` away from multiples of pi
/// when the family has poles.
inline std::vector<ScanInterval> split_at_poles(const FunctionFamily& fam, ScanInterval iv, double margin = 0.01) {
  if (!fam.has_poles()) return {iv};
  std::vector<ScanInterval> out;
  double lo = iv.lo;
  for (double k = std::floor(iv.lo / kPi) + 1.0;; k += 1.0) {
    const double pole = k * kPi;
    const double seg_lo = std::max(lo, (k - 1.0) * kPi + margin);
    const double seg_hi = std::min(iv.hi, pole - margin);
    if (seg_hi > seg_lo) out.push_back({seg_lo, seg_hi});
    if (pole >= iv.hi) break;
    lo = pole + margin;
  }
  return out;
}

/// Default scan window: (0.01, 2pi - 0.01) minus pi +- 0.01 for the trig
/// families, (0.01, 10) for the exponential ones.
inline std::vector<ScanInterval> default_scan_segments(const FunctionFamily& fam) {
  if (fam.has_poles()) return split_at_poles(fam, {0.01, 2.0 * kPi - 0.01});
  return {{0.01, 10.0}};
}

enum class EctVerdict { Ect, NotEct, Inconclusive };

constexpr std::string_view to_string(EctVerdict v) {
  switch (v) {
    case EctVerdict::Ect: return "ECT";
    case EctVerdict::NotEct: return "NOT_ECT";
    case EctVerdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

struct WronskianLevel {
  int k = 0;
  double min_abs = std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
  double min_normalized = std::numeric_limits<double>::infinity();  // |W| / Hadamard bound
  double max_normalized = 0.0;
  bool sign_constant = true;  // on every segment separately
  std::optional<double> sign_change_at;
  double max_rel_error = 0.0;  // engine vs published formula
  int unresolved = 0;          // grid points where W is indistinguishable from zero
  bool bounded_away = true;
};

struct WronskianReport {
  FamilyName family = FamilyName::Case1;
  double ell = 0.0;
  std::vector<ScanInterval> segments;
  int grid_points = 0;  // per segment
  std::vector<WronskianLevel> levels;
  EctVerdict verdict = EctVerdict::Inconclusive;
  std::string diagnostic;
};

struct EctOptions {
  double margin = 1e-10;
  double agreement = 1e-7;
};

/// Scans every W_k on `grid_points` uniform points per segment (segments are
/// first split at poles). ECT needs each W_k sign-constant on every segment
/// and resolved as nonzero at every grid point; a disagreement with the
/// published formulas makes the verdict INCONCLUSIVE.
inline WronskianReport verify_ect(const FunctionFamily& fam, const std::vector<ScanInterval>& intervals,
                                  int grid_points, const EctOptions& opt = {}) {
  if (grid_points < 100) throw Error(ErrorCode::Config, "grid_points must be >= 100");
  WronskianReport rep;
  rep.family = fam.name();
  rep.ell = fam.ell();
  rep.grid_points = grid_points;
  for (const auto& iv : intervals) {
    for (const auto& s : split_at_poles(fam, iv)) rep.segments.push_back(s);
  }
  if (rep.segments.empty()) throw Error(ErrorCode::Config, "scan interval is empty");

  for (int k = 0; k <= fam.order(); ++k) {
    WronskianLevel lv;
    lv.k = k;
    for (const auto& seg : rep.segments) {
      int seg_sign = 0;
      for (int i = 0; i < grid_points; ++i) {
        const double t = seg.lo + (seg.hi - seg.lo) * i / (grid_points - 1);
        const auto w = detail::wronski(fam, k, t);
        const double cf = closed_form_wronskian(fam, k, t);
        const double err = std::abs(w.det - cf);
        const double rel = cf != 0.0 ? err / std::abs(cf) : (err <= opt.margin * w.hadamard ? 0.0 : 1.0);
        lv.max_rel_error = std::max(lv.max_rel_error, rel);
        const double a = std::abs(w.det);
        const double nrm = w.hadamard > 0.0 ? a / w.hadamard : 0.0;
        lv.min_abs = std::min(lv.min_abs, a);
        lv.max_abs = std::max(lv.max_abs, a);
        lv.min_normalized = std::min(lv.min_normalized, nrm);
        lv.max_normalized = std::max(lv.max_normalized, nrm);
        // Nonzero if the value clears the rounding bound on its own, or if
        // the engine and the published formula agree on a nonzero value.
        const bool confirmed = cf != 0.0 && (cf > 0.0) == (w.det > 0.0) && rel < opt.agreement;
        if (nrm <= opt.margin && !confirmed) {
          ++lv.unresolved;
          continue;
        }
        const int sg = w.det > 0.0 ? 1 : -1;
        if (seg_sign == 0) {
          seg_sign = sg;
        } else if (sg != seg_sign && lv.sign_constant) {
          lv.sign_constant = false;
          lv.sign_change_at = t;
        }
      }
    }
    lv.bounded_away = lv.unresolved == 0;
    rep.levels.push_back(lv);
  }

  bool agree = true, ect = true;
  for (const auto& lv : rep.levels) {
    if (lv.max_rel_error >= opt.agreement) {
      agree = false;
      rep.diagnostic += "W_" + std::to_string(lv.k) + " disagrees with the published formula; ";
    }
    if (!lv.sign_constant || !lv.bounded_away) {
      ect = false;
      rep.diagnostic += "W_" + std::to_string(lv.k) + (lv.sign_constant ? " vanishes" : " changes sign") + "; ";
    }
  }
  rep.verdict = !agree ? EctVerdict::Inconclusive : (ect ? EctVerdict::Ect : EctVerdict::NotEct);
  return rep;
}

inline WronskianReport verify_ect(const FunctionFamily& fam, ScanInterval interval, int grid_points,
                                  const EctOptions& opt = {}) {
  return verify_ect(fam, std::vector<ScanInterval>{interval}, grid_points, opt);
}

struct ZeroScan {
  int count = 0;        // transversal sign changes, all segments
  int max_per_segment = 0;
  int tangential = 0;   // touches without a sign change
  std::vector<int> per_segment;
};

/// Counts sign changes of sum c_j f_j on `grid_points` uniform points per
/// segment of `interval` (split at poles). Sign changes across a pole are not
/// zeros and are ignored.
inline ZeroScan max_zero_scan(const FunctionFamily& fam, const std::vector<double>& coeffs,
                              ScanInterval interval, int grid_points) {
  if (std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; })) {
    throw Error(ErrorCode::Domain, "coefficients must not all vanish");
  }
  ZeroScan out;
  std::vector<double> vals(grid_points);
  for (const auto& seg : split_at_poles(fam, interval)) {
    double peak = 0.0;
    for (int i = 0; i < grid_points; ++i) {
      const double t = seg.lo + (seg.hi - seg.lo) * i / (grid_points - 1);
      vals[i] = fam.combination(coeffs, t);
      peak = std::max(peak, std::abs(vals[i]));
    }
    int n = 0;
    int last_sign = 0;
    bool zero_run = false;
    for (int i = 0; i < grid_points; ++i) {
      const double v = vals[i];
      const int sg = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
      if (sg == 0) {
        zero_run = true;
        continue;
      }
      if (last_sign != 0 && sg != last_sign) {
        ++n;
      } else if (last_sign != 0 && zero_run) {
        ++out.tangential;
      } else if (i > 0 && i + 1 < grid_points && std::abs(v) < 1e-8 * peak &&
                 std::abs(v) <= std::abs(vals[i - 1]) && std::abs(v) <= std::abs(vals[i + 1]) &&
                 (vals[i + 1] > 0.0) == (v > 0.0)) {
        ++out.tangential;
      }
      last_sign = sg;
      zero_run = false;
    }
    out.per_segment.push_back(n);
    out.count += n;
    out.max_per_segment = std::max(out.max_per_segment, n);
  }
  return out;
}

}  // namespace pwl
