#pragma once

// Crossing periodic orbits: closed-form reductions of the matching
// equations to one scalar residual per branch, candidate validation
// against the numeric oracle, and a displacement-based numeric counter.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pwl/chebyshev.hpp"
#include "pwl/halfmap.hpp"

namespace pwl {

enum class Branch { Case1C0, Case1A0, Case1L0, Case2, Case3, Case3L0, Numeric };

constexpr std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::Case1C0: return "CASE1_C0";
    case Branch::Case1A0: return "CASE1_A0";
    case Branch::Case1L0: return "CASE1_L0";
    case Branch::Case2: return "CASE2";
    case Branch::Case3: return "CASE3";
    case Branch::Case3L0: return "CASE3_L0";
    case Branch::Numeric: return "NUMERIC";
  }
  return "?";
}

inline Branch parse_branch(std::string_view s) {
  for (auto b : {Branch::Case1C0, Branch::Case1A0, Branch::Case1L0, Branch::Case2, Branch::Case3,
                 Branch::Case3L0, Branch::Numeric}) {
    if (s == to_string(b)) return b;
  }
  throw Error(ErrorCode::Config, "unknown branch '" + std::string(s) + "'");
}

/// Outcome of matching params against the closed-form branches.
struct BranchInfo {
  std::optional<Branch> branch;  // nullopt: no closed form
  bool obstructed = false;       // boundary equilibrium of node/saddle class
  std::string note;
};

/// A boundary equilibrium of node or saddle class has an invariant ray
/// leaving the line x = 0 from inside every crossing cycle, so such systems
/// have no crossing cycles at all.
inline BranchInfo detect_branch(const CanonicalParams& p) {
  const bool left_obstruct = p.a == 0.0 && p.left_class != EquilibriumClass::FocusCenter;
  const bool right_obstruct = p.c == 0.0 && p.right_class != EquilibriumClass::FocusCenter;
  if (left_obstruct || right_obstruct) {
    return {std::nullopt, true, "OBSTRUCTED: boundary equilibrium of node/saddle class"};
  }
  if (p.right_class != EquilibriumClass::FocusCenter) return {std::nullopt, false, "mirrored or generic pattern"};
  switch (p.left_class) {
    case EquilibriumClass::FocusCenter:
      if (p.c == 0.0) return {p.ell == 0.0 ? Branch::Case1L0 : Branch::Case1C0, false, ""};
      if (p.a == 0.0) return {Branch::Case1A0, false, ""};
      return {std::nullopt, false, "generic pattern (a != 0 and c != 0)"};
    case EquilibriumClass::DegenerateNode:
      if (p.c == 0.0) return {Branch::Case2, false, ""};
      return {std::nullopt, false, "generic pattern (c != 0)"};
    case EquilibriumClass::SaddleOrDiagonalNode:
      if (p.c == 0.0) return {p.ell == 0.0 ? Branch::Case3L0 : Branch::Case3, false, ""};
      return {std::nullopt, false, "generic pattern (c != 0)"};
  }
  return {};
}

/// Reduced residual as a combination of one of the Chebyshev families.
/// The free variable is t- for every branch except CASE1_A0, where it is t+
/// (and t- = pi).
struct ResidualForm {
  FunctionFamily family;
  std::vector<double> coeffs;
};

inline ResidualForm residual_form(const CanonicalParams& p, Branch branch) {
  const double l = p.ell, r = p.r, a = p.a, b = p.b, c = p.c;
  const double ep = std::exp(kPi * r);
  switch (branch) {
    case Branch::Case1C0:
      return {FunctionFamily(FamilyName::Case1, l),
              {-(1.0 + ep) * (b * l * l + a * l + b), a * (1.0 - ep), -a, a * ep}};
    case Branch::Case1L0:
      return {FunctionFamily(FamilyName::Case1L0, 0.0), {-(1.0 + ep) * b, a * (1.0 - ep)}};
    case Branch::Case1A0: {
      const double el = std::exp(kPi * l);
      return {FunctionFamily(FamilyName::Case1, r),
              {(1.0 + el) * (b * r * r - c * r + b), c * (1.0 - el), -c, c * el}};
    }
    case Branch::Case2:
      return {FunctionFamily(FamilyName::Case2, l), {a * (1.0 - ep), a * ep, -a, -(1.0 + ep) * l * (a + b * l)}};
    case Branch::Case3: {
      const double q = b * (1.0 + ep) * (l * l - 1.0);
      return {FunctionFamily(FamilyName::Case3, l),
              {2.0 * a, -a * (ep * (l - 1.0) + l + 1.0) - q, a * (ep * (l + 1.0) + l - 1.0) + q, -2.0 * a * ep}};
    }
    case Branch::Case3L0:
      return {FunctionFamily(FamilyName::Case3L0, 0.0),
              {a * (ep - 1.0) + b * (1.0 + ep), -2.0 * a * (ep - 1.0), a * (ep - 1.0) - b * (1.0 + ep)}};
    case Branch::Numeric: break;
  }
  throw Error(ErrorCode::UnsupportedBranch, "no reduced residual for this branch");
}

namespace detail {

inline void check_admissible(Branch branch, double t) {
  if (!std::isfinite(t)) throw Error(ErrorCode::Domain, "time must be finite");
  switch (branch) {
    case Branch::Case1C0:
    case Branch::Case1L0:
    case Branch::Case1A0:
      if (std::abs(std::sin(t)) < 1e-10) throw Error(ErrorCode::Domain, "sin t vanishes");
      break;
    case Branch::Case2:
    case Branch::Case3:
    case Branch::Case3L0:
      if (std::abs(t) < 1e-10) throw Error(ErrorCode::Domain, "t vanishes");
      break;
    case Branch::Numeric: throw Error(ErrorCode::UnsupportedBranch, "no closed form for NUMERIC");
  }
}

// (e^z - 1 - z) / z^2
inline double expm1_minus_z_over_z2(double z) {
  if (std::abs(z) < 0.25) {
    double sum = 0.0, pw = 1.0, fact = 2.0;
    for (int n = 2; n < 26; ++n) {
      if (n > 2) {
        pw *= z;
        fact *= n;
      }
      sum += pw / fact;
    }
    return sum;
  }
  return (std::expm1(z) - z) / (z * z);
}

}  // namespace detail

/// Left-hand side of the reduced e3 = 0 after t+ = pi and y0 elimination.
inline double residual_e3(const CanonicalParams& p, Branch branch, double t) {
  detail::check_admissible(branch, t);
  const auto form = residual_form(p, branch);
  return form.family.combination(form.coeffs, t);
}

/// y0 eliminated from x_L(-t-) = 0 (x_R(t+) = 0 for CASE1_A0).
inline double y0_of_tminus(const CanonicalParams& p, Branch branch, double t) {
  detail::check_admissible(branch, t);
  const double l = p.ell, a = p.a;
  switch (branch) {
    case Branch::Case1C0:
    case Branch::Case1L0:
      return a * (std::exp(l * t) - std::cos(t) - l * std::sin(t)) / ((l * l + 1.0) * std::sin(t));
    case Branch::Case1A0: {
      const double r = p.r, b = p.b, c = p.c;
      return (b * (r * r + 1.0) - c * r + c / std::tan(t) - c * std::exp(-r * t) / std::sin(t)) / (r * r + 1.0);
    }
    case Branch::Case2: return a * t * detail::expm1_minus_z_over_z2(l * t);
    case Branch::Case3:
    case Branch::Case3L0:
      return -a * (1.0 - l + std::exp(2.0 * t) * (1.0 + l) - 2.0 * std::exp((1.0 + l) * t)) /
             (std::expm1(2.0 * t) * (l * l - 1.0));
    case Branch::Numeric: break;
  }
  throw Error(ErrorCode::UnsupportedBranch, "no y0 elimination for this branch");
}

struct CycleCandidate {
  double y0 = 0.0;
  double t_minus = 0.0;
  double t_plus = 0.0;
  Orientation orientation = Orientation::ForwardRight;
  Branch branch = Branch::Numeric;
};

struct MatchingResiduals {
  double e1 = 0.0;  // x of the right leg at its end
  double e2 = 0.0;  // x of the left leg at its end
  double e3 = 0.0;  // y_left - y_right at the far end
  double y1 = 0.0;  // far-end height reached by the right leg
};

namespace detail {

struct LegSigns {
  TimeSign right;
  TimeSign left;
};

inline LegSigns leg_signs(Orientation o) {
  return o == Orientation::ForwardRight ? LegSigns{TimeSign::Forward, TimeSign::Backward}
                                        : LegSigns{TimeSign::Backward, TimeSign::Forward};
}

}  // namespace detail

/// The un-reduced matching equations evaluated from the flows.
inline MatchingResiduals matching_residuals(const CanonicalParams& p, const CycleCandidate& cand,
                                            FlowMode mode = FlowMode::Numeric) {
  const auto s = detail::leg_signs(cand.orientation);
  const Vec2 pr = flow(p, Side::Right, cand.y0, sign_of(s.right) * cand.t_plus, mode);
  const Vec2 pl = flow(p, Side::Left, cand.y0, sign_of(s.left) * cand.t_minus, mode);
  return {pr.x, pl.x, pl.y - pr.y, pr.y};
}

struct ClosedFormConfig {
  HalfMapConfig halfmap;
  int scan_points = 2048;  // per segment
  double root_separation = 1e-6;
};

struct ClosedFormSolution {
  std::optional<Branch> branch;
  std::vector<CycleCandidate> candidates;
  std::vector<double> degenerate;  // free-variable values of tangential zeros
  bool obstructed = false;
  bool continuum = false;
  std::string note;
};

namespace detail {

inline std::vector<ScanInterval> scan_segments(const CanonicalParams& p, Branch branch, const HalfMapConfig& cfg) {
  switch (branch) {
    case Branch::Case1C0:
    case Branch::Case1L0:
    case Branch::Case1A0: {
      const Side free_side = branch == Branch::Case1A0 ? Side::Right : Side::Left;
      const int n = static_cast<int>(std::floor(crossing_horizon(p, free_side, cfg) / kPi + 1e-9));
      std::vector<ScanInterval> out;
      for (int k = 0; k < n; ++k) out.push_back({k * kPi, (k + 1) * kPi});
      return out;
    }
    case Branch::Case2: {
      const double h = crossing_horizon(p, Side::Left, cfg);
      return {{0.0, 1.0}, {1.0, 10.0}, {10.0, h}};
    }
    case Branch::Case3:
    case Branch::Case3L0: return {{0.0, 1.0}, {1.0, crossing_horizon(p, Side::Left, cfg)}};
    case Branch::Numeric: break;
  }
  return {};
}

// Residual multiplied by e^{-m t}, m the largest exponential rate, so that
// the scan stays finite over long horizons. Also returns the matching sum
// of absolute terms as a local scale.
struct ScaledValue {
  double value;
  double scale;
};

inline ScaledValue scaled_residual(const ResidualForm& f, double m, double t) {
  double v = 0.0, s = 0.0;
  for (std::size_t j = 0; j < f.coeffs.size(); ++j) {
    if (f.coeffs[j] == 0.0) continue;
    BasisFunction bf = f.family.basis()[j];
    bf.lambda -= m;
    const double term = f.coeffs[j] * derivatives(bf, t)[0];
    v += term;
    s += std::abs(term);
  }
  return {v, s};
}

}  // namespace detail

/// Roots of the reduced residual on each branch segment, paired with the
/// eliminated y0 and t+ = pi (t- = pi for CASE1_A0). Throws
/// UNSUPPORTED_BRANCH when no closed form applies; obstructed systems return
/// no candidates.
inline ClosedFormSolution solve_closed_form(const CanonicalParams& p, const ClosedFormConfig& cfg = {}) {
  validate(p);
  ClosedFormSolution sol;
  const BranchInfo info = detect_branch(p);
  sol.note = info.note;
  if (info.obstructed) {
    sol.obstructed = true;
    return sol;
  }
  if (!info.branch) throw Error(ErrorCode::UnsupportedBranch, info.note);
  const Branch branch = *info.branch;
  sol.branch = branch;
  const bool free_is_plus = branch == Branch::Case1A0;
  auto make = [&](double y0, double t) {
    CycleCandidate c;
    c.y0 = y0;
    c.t_minus = free_is_plus ? kPi : t;
    c.t_plus = free_is_plus ? t : kPi;
    c.branch = branch;
    return c;
  };

  // Both equilibria on the boundary: x_L(-t-) = y0 e^{-l t-} sin t- and
  // x_R(t+) = (b - y0) e^{r t+} sin t+, so the only crossing option is
  // t- = t+ = pi and e3 becomes linear in y0.
  const bool both_on_boundary = (branch == Branch::Case1C0 || branch == Branch::Case1L0) && p.a == 0.0;
  if (both_on_boundary) {
    const double ep = std::exp(kPi * p.r);
    const double den = ep - std::exp(-kPi * p.ell);
    const double num = p.b * (1.0 + ep);
    if (den == 0.0) {
      if (num == 0.0) {
        sol.continuum = true;
        sol.note = "CONTINUUM: every orbit crossing the line is periodic";
        sol.candidates.push_back(make(std::min(0.0, p.b) - 1.0, kPi));
      }
    } else {
      sol.candidates.push_back(make(num / den, kPi));
    }
    return sol;
  }

  const ResidualForm form = residual_form(p, branch);
  double m = 0.0;
  for (const auto& bf : form.family.basis()) m = std::max(m, bf.lambda);

  std::vector<double> roots;
  const int n = cfg.scan_points;
  for (const auto& seg : detail::scan_segments(p, branch, cfg.halfmap)) {
    auto f = [&](double t) { return detail::scaled_residual(form, m, t).value; };
    std::vector<double> ts, vs, ss;
    ts.reserve(n);
    for (int i = 1; i < n; ++i) {
      const double t = seg.lo + 0.5 * (seg.hi - seg.lo) * (1.0 - std::cos(kPi * i / n));
      const auto sv = detail::scaled_residual(form, m, t);
      if (!std::isfinite(sv.value)) continue;
      ts.push_back(t);
      vs.push_back(sv.value);
      ss.push_back(sv.scale);
    }
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
      if (vs[i] == 0.0) {
        roots.push_back(ts[i]);
        continue;
      }
      if ((vs[i] > 0.0) != (vs[i + 1] > 0.0) && vs[i + 1] != 0.0) {
        if (auto rt = polish_root(f, ts[i], ts[i + 1], vs[i], vs[i + 1])) roots.push_back(*rt);
      } else if (i > 0 && std::abs(vs[i]) <= std::abs(vs[i - 1]) && std::abs(vs[i]) <= std::abs(vs[i + 1]) &&
                 std::abs(vs[i]) < 1e-8 * ss[i] && (vs[i - 1] > 0.0) == (vs[i] > 0.0)) {
        sol.degenerate.push_back(ts[i]);
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  double last = -std::numeric_limits<double>::infinity();
  for (double t : roots) {
    if (t - last < cfg.root_separation) continue;
    last = t;
    try {
      const double y0 = y0_of_tminus(p, branch, t);
      if (std::isfinite(y0)) sol.candidates.push_back(make(y0, t));
    } catch (const Error&) {
    }
  }

  // Tangential start at the boundary equilibrium (y0 = b when c = 0,
  // y0 = 0 when a = 0): kept only if the other leg closes up exactly.
  {
    const Side eq_side = free_is_plus ? Side::Left : Side::Right;
    const Side leg_side = other(eq_side);
    const double y0 = eq_side == Side::Right ? p.b : 0.0;
    const TimeSign sign = leg_side == Side::Left ? TimeSign::Backward : TimeSign::Forward;
    const HalfMap hm = half_return_map(p, leg_side, y0, sign, cfg.halfmap);
    if (hm && std::abs(hm.y1 - y0) <= 1e-10 * std::max(1.0, std::abs(y0))) {
      CycleCandidate c = make(y0, kPi);
      (free_is_plus ? c.t_plus : c.t_minus) = hm.tau;
      sol.candidates.push_back(c);
    }
  }
  return sol;
}

/// Solves the other orientation through the time-reversed, y-reflected
/// system: candidates come back with y0 -> -y0 and unchanged times.
inline ClosedFormSolution solve_closed_form(const CanonicalParams& p, Orientation o,
                                            const ClosedFormConfig& cfg = {}) {
  if (o == Orientation::ForwardRight) return solve_closed_form(p, cfg);
  ClosedFormSolution sol = solve_closed_form(time_reversed(p), cfg);
  for (auto& c : sol.candidates) {
    c.y0 = -c.y0;
    c.orientation = Orientation::ForwardLeft;
  }
  return sol;
}

enum class RejectReason { LegLeavesHalfplane, Residual, SlidingContact, NotIsolated };

constexpr std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::LegLeavesHalfplane: return "LEG_LEAVES_HALFPLANE";
    case RejectReason::Residual: return "RESIDUAL";
    case RejectReason::SlidingContact: return "SLIDING_CONTACT";
    case RejectReason::NotIsolated: return "NOT_ISOLATED";
  }
  return "?";
}

struct LimitCycle {
  CycleCandidate candidate;
  double period = 0.0;
  MatchingResiduals residuals;  // absolute values
  double stability_multiplier = 0.0;
  double y1 = 0.0;  // the other crossing height
};

struct ValidationConfig {
  HalfMapConfig halfmap{.mode = FlowMode::Numeric};
  int leg_samples = 1024;
  double leg_tol = 1e-9;       // relative to the orbit scale
  double residual_tol = 1e-8;  // relative to max(1, |y0|, |y1|)
  double fd_step = 1e-6;       // relative to max(1, |y0|)
  double isolation_tol = 1e-6;
};

struct Validation {
  std::optional<LimitCycle> cycle;
  RejectReason reason = RejectReason::Residual;
  std::string detail;
  explicit operator bool() const { return cycle.has_value(); }
};

/// Orbit scale used by the relative tolerances.
inline double orbit_scale(double y0, double y1) { return std::max({1.0, std::abs(y0), std::abs(y1)}); }

/// Rebuilds both legs with the matrix-exponential oracle and accepts the
/// candidate only if it is a genuine isolated crossing cycle disjoint from
/// the closed sliding set.
inline Validation validate(const CanonicalParams& p, const CycleCandidate& cand, const ValidationConfig& cfg = {}) {
  Validation out;
  if (!(cand.t_minus > 0.0) || !(cand.t_plus > 0.0) || !std::isfinite(cand.t_minus) ||
      !std::isfinite(cand.t_plus) || !std::isfinite(cand.y0)) {
    out.reason = RejectReason::Residual;
    out.detail = "times must be positive and finite";
    return out;
  }
  const auto res = matching_residuals(p, cand, FlowMode::Numeric);
  const double scale = orbit_scale(cand.y0, res.y1);
  if (!std::isfinite(res.e1) || !std::isfinite(res.e2) || !std::isfinite(res.e3)) {
    out.reason = RejectReason::Residual;
    out.detail = "non-finite residual";
    return out;
  }

  // (i) each leg stays in its own half-plane
  const auto signs = detail::leg_signs(cand.orientation);
  for (Side side : {Side::Right, Side::Left}) {
    const double t_end = side == Side::Right ? cand.t_plus : cand.t_minus;
    const double s = sign_of(side == Side::Right ? signs.right : signs.left);
    const int n = cfg.leg_samples;
    const AffineStepper step(piece(p, side), s * t_end / (n + 1));
    Vec2 z{0.0, cand.y0};
    for (int i = 1; i <= n; ++i) {
      z = step.advance(z);
      if (side_sign(side) * z.x < -cfg.leg_tol * scale) {
        out.reason = RejectReason::LegLeavesHalfplane;
        out.detail = std::string(to_string(side)) + " leg crosses x = 0 at t = " +
                     std::to_string(s * t_end * i / (n + 1));
        return out;
      }
    }
  }

  // (ii) matching equations
  const double worst = std::max({std::abs(res.e1), std::abs(res.e2), std::abs(res.e3)});
  if (worst >= cfg.residual_tol * scale) {
    out.reason = RejectReason::Residual;
    out.detail = "matching residual " + std::to_string(worst);
    return out;
  }

  // (iii) both crossings strictly in the sewing region
  const ClosedInterval sl = sliding_set(p);
  if (sl.contains(cand.y0) || sl.contains(res.y1)) {
    out.reason = RejectReason::SlidingContact;
    out.detail = "crossing height in the closed sliding set";
    return out;
  }

  // (iv) isolation through the derivative of the full return map
  const double h = cfg.fd_step * std::max(1.0, std::abs(cand.y0));
  const auto up = full_return_map(p, cand.y0 + h, cand.orientation, cfg.halfmap);
  const auto dn = full_return_map(p, cand.y0 - h, cand.orientation, cfg.halfmap);
  if (!up || !dn) {
    out.reason = RejectReason::NotIsolated;
    out.detail = "return map undefined next to the orbit";
    return out;
  }
  const double mult = (*up - *dn) / (2.0 * h);
  if (!(std::abs(mult - 1.0) >= cfg.isolation_tol)) {
    out.reason = RejectReason::NotIsolated;
    out.detail = "stability multiplier " + std::to_string(mult);
    return out;
  }

  LimitCycle lc;
  lc.candidate = cand;
  lc.period = cand.t_minus + cand.t_plus;
  lc.residuals = res;
  lc.stability_multiplier = mult;
  lc.y1 = res.y1;
  out.cycle = lc;
  return out;
}

struct NumericScanConfig {
  HalfMapConfig halfmap{.mode = FlowMode::Numeric};
  ValidationConfig validation;
  int points = 1200;
  double min_offset = 1e-6;  // distance below the sliding set
  double max_offset = 1e6;
  double root_separation = 1e-6;
};

struct NumericCycles {
  std::vector<LimitCycle> cycles;  // ascending in y0
  std::vector<std::pair<CycleCandidate, RejectReason>> rejected;
  bool continuum = false;
};

/// Fixed points of the displacement over a geometric y0 grid below the
/// sliding set (ForwardRight starts), each validated.
inline NumericCycles count_cycles_numeric(const CanonicalParams& p, const NumericScanConfig& cfg = {}) {
  validate(p);
  NumericCycles out;
  const double edge = sliding_set(p).lo;
  const int n = std::max(cfg.points, 2);
  const double ratio = std::log(cfg.max_offset / cfg.min_offset);

  struct Sample {
    double y0;
    double d;
  };
  std::vector<Sample> samples;
  samples.reserve(n);
  double dmax_rel = 0.0;
  for (int i = 0; i < n; ++i) {
    // descending offsets give ascending y0
    const double off = cfg.min_offset * std::exp(ratio * (n - 1 - i) / (n - 1));
    const double y0 = edge - off;
    const auto d = displacement(p, y0, Orientation::ForwardRight, cfg.halfmap);
    if (!d || !std::isfinite(d->d)) {
      samples.push_back({y0, std::numeric_limits<double>::quiet_NaN()});
      continue;
    }
    samples.push_back({y0, d->d});
    dmax_rel = std::max(dmax_rel, std::abs(d->d) / orbit_scale(y0, d->y1));
  }
  const bool any_defined =
      std::any_of(samples.begin(), samples.end(), [](const Sample& s) { return !std::isnan(s.d); });
  if (any_defined && dmax_rel < 1e-9) {
    out.continuum = true;
    return out;
  }

  auto dfun = [&](double y0) {
    const auto d = displacement(p, y0, Orientation::ForwardRight, cfg.halfmap);
    return d ? d->d : std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<double> roots;
  for (int i = 0; i + 1 < n; ++i) {
    const double da = samples[i].d, db = samples[i + 1].d;
    if (std::isnan(da) || std::isnan(db)) continue;
    if (da == 0.0) {
      roots.push_back(samples[i].y0);
      continue;
    }
    if ((da > 0.0) == (db > 0.0) || db == 0.0) continue;
    const auto rt = polish_root(
        [&](double y) {
          const double v = dfun(y);
          return std::isnan(v) ? da : v;  // treat undefined points as the lower side
        },
        samples[i].y0, samples[i + 1].y0, da, db);
    if (rt) roots.push_back(*rt);
  }
  if (n > 0 && samples[n - 1].d == 0.0) roots.push_back(samples[n - 1].y0);

  double last = -std::numeric_limits<double>::infinity();
  for (double y0 : roots) {
    if (y0 - last < cfg.root_separation) continue;
    const auto d = displacement(p, y0, Orientation::ForwardRight, cfg.halfmap);
    if (!d) continue;
    CycleCandidate c{y0, d->t_minus, d->t_plus, Orientation::ForwardRight, Branch::Numeric};
    const Validation v = validate(p, c, cfg.validation);
    if (v) {
      out.cycles.push_back(*v.cycle);
      last = y0;
    } else {
      out.rejected.emplace_back(c, v.reason);
    }
  }
  return out;
}

enum class Method { ClosedForm, Numeric, Both };

constexpr std::string_view to_string(Method m) {
  switch (m) {
    case Method::ClosedForm: return "closed_form";
    case Method::Numeric: return "numeric";
    case Method::Both: return "both";
  }
  return "?";
}

struct CycleReport {
  std::optional<Branch> branch;
  Method method = Method::ClosedForm;  // what actually ran
  std::vector<LimitCycle> cycles;
  std::vector<std::pair<CycleCandidate, RejectReason>> rejected;
  std::vector<double> degenerate;
  bool continuum = false;
  bool obstructed = false;
  std::string note;
};

struct FindConfig {
  ClosedFormConfig closed_form;
  ValidationConfig validation;
  NumericScanConfig numeric;
};

/// Closed form plus validation where a branch applies, the numeric counter
/// otherwise (or when `method` asks for it).
inline CycleReport find_cycles(const CanonicalParams& p, Method method = Method::ClosedForm,
                               const FindConfig& cfg = {}) {
  validate(p);
  CycleReport rep;
  const BranchInfo info = detect_branch(p);
  rep.branch = info.branch;
  rep.obstructed = info.obstructed;
  rep.note = info.note;
  const bool closed = method != Method::Numeric && (info.branch || info.obstructed);
  if (closed) {
    rep.method = Method::ClosedForm;
    const auto sol = solve_closed_form(p, cfg.closed_form);
    rep.degenerate = sol.degenerate;
    rep.continuum = sol.continuum;
    if (!sol.note.empty()) rep.note = sol.note;
    double last = -std::numeric_limits<double>::infinity();
    auto cands = sol.candidates;
    std::sort(cands.begin(), cands.end(), [](const auto& x, const auto& y) { return x.y0 < y.y0; });
    for (const auto& c : cands) {
      const Validation v = validate(p, c, cfg.validation);
      if (!v) {
        rep.rejected.emplace_back(c, v.reason);
        continue;
      }
      if (c.y0 - last < cfg.closed_form.root_separation) continue;
      last = c.y0;
      rep.cycles.push_back(*v.cycle);
    }
    if (method != Method::Both) return rep;
  }
  const auto num = count_cycles_numeric(p, cfg.numeric);
  if (closed) {
    rep.method = Method::Both;
    if (num.cycles.size() != rep.cycles.size()) {
      rep.note += (rep.note.empty() ? "" : "; ") + std::string("numeric oracle disagrees: ") +
                  std::to_string(num.cycles.size()) + " cycles";
    }
    return rep;
  }
  rep.method = Method::Numeric;
  rep.cycles = num.cycles;
  rep.rejected = num.rejected;
  rep.continuum = num.continuum;
  if (num.continuum) rep.note = "CONTINUUM: displacement vanishes on the whole scan";
  return rep;
}

}  // namespace pwl
