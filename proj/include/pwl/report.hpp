#pragma once

// JSON views of the library types. Key order is fixed so that reports are
// byte-reproducible.

#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "pwl/search.hpp"

namespace pwl {

using Json = nlohmann::ordered_json;

/// Finite numbers as-is; infinities and NaN become null.
inline Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(const CanonicalParams& p) {
  return Json{{"ell", p.ell},
              {"r", p.r},
              {"a", p.a},
              {"b", p.b},
              {"c", p.c},
              {"left_class", std::string(to_string(p.left_class))},
              {"right_class", std::string(to_string(p.right_class))}};
}

inline Json to_json(const BoundaryClassification& bc) {
  Json intervals = Json::array();
  for (const auto& iv : bc.intervals) {
    intervals.push_back({{"lo", num(iv.lo)}, {"hi", num(iv.hi)}, {"label", std::string(to_string(iv.label))}});
  }
  Json segments = Json::array();
  for (const auto& iv : bc.intervals) {
    if (iv.label != RegionLabel::Sewing) {
      segments.push_back({{"lo", num(iv.lo)}, {"hi", num(iv.hi)}, {"label", std::string(to_string(iv.label))}});
    }
  }
  return Json{{"intervals", intervals}, {"sliding_segments", segments}, {"tangency_points", bc.tangency_points}};
}

inline Json to_json(const EquilibriumInfo& e) {
  return Json{{"x", e.location.x}, {"y", e.location.y}, {"is_real", e.is_real}, {"on_boundary", e.on_boundary}};
}

inline Json to_json(const CycleCandidate& c) {
  return Json{{"y0", num(c.y0)},
              {"t_minus", num(c.t_minus)},
              {"t_plus", num(c.t_plus)},
              {"orientation", std::string(to_string(c.orientation))},
              {"branch", std::string(to_string(c.branch))}};
}

inline Json to_json(const LimitCycle& lc) {
  Json j = to_json(lc.candidate);
  j["y1"] = num(lc.y1);
  j["period"] = num(lc.period);
  j["stability_multiplier"] = num(lc.stability_multiplier);
  j["residuals"] = {{"e1", num(std::abs(lc.residuals.e1))},
                    {"e2", num(std::abs(lc.residuals.e2))},
                    {"e3", num(std::abs(lc.residuals.e3))}};
  return j;
}

inline Json to_json(const CycleReport& r) {
  Json cycles = Json::array();
  for (const auto& c : r.cycles) cycles.push_back(to_json(c));
  Json rejected = Json::array();
  for (const auto& [c, why] : r.rejected) {
    Json j = to_json(c);
    j["reason"] = std::string(to_string(why));
    rejected.push_back(j);
  }
  Json degenerate = Json::array();
  for (double t : r.degenerate) degenerate.push_back(num(t));
  return Json{{"branch", r.branch ? Json(std::string(to_string(*r.branch))) : Json(nullptr)},
              {"method", std::string(to_string(r.method))},
              {"count", r.cycles.size()},
              {"cycles", cycles},
              {"rejected", rejected},
              {"degenerate", degenerate},
              {"continuum", r.continuum},
              {"obstructed", r.obstructed},
              {"note", r.note}};
}

inline Json to_json(const WronskianReport& w) {
  Json segs = Json::array();
  for (const auto& s : w.segments) segs.push_back(Json::array({s.lo, s.hi}));
  Json levels = Json::array();
  for (const auto& lv : w.levels) {
    levels.push_back({{"k", lv.k},
                      {"min_abs", num(lv.min_abs)},
                      {"max_abs", num(lv.max_abs)},
                      {"min_normalized", num(lv.min_normalized)},
                      {"sign", lv.sign_constant ? "CONSTANT" : "SIGN_CHANGE"},
                      {"sign_change_at", lv.sign_change_at ? Json(*lv.sign_change_at) : Json(nullptr)},
                      {"unresolved_points", lv.unresolved},
                      {"bounded_away", lv.bounded_away},
                      {"max_rel_error_vs_printed", num(lv.max_rel_error)}});
  }
  return Json{{"family", std::string(to_string(w.family))},
              {"ell", w.ell},
              {"segments", segs},
              {"grid_points", w.grid_points},
              {"levels", levels},
              {"verdict", std::string(to_string(w.verdict))},
              {"diagnostic", w.diagnostic}};
}

inline Json to_json(const ParamBox& box) {
  Json j;
  for (ParamId id : {ParamId::Ell, ParamId::R, ParamId::A, ParamId::B, ParamId::C}) {
    const Range& rg = box_range(box, id);
    j[std::string(to_string(id))] = Json::array({rg.lo, rg.hi});
  }
  return j;
}

inline Json to_json(const Evaluation& e) {
  Json cycles = Json::array();
  for (const auto& c : e.cycles) cycles.push_back(to_json(c));
  return Json{{"params", to_json(e.params)},
              {"count", e.cycles.size()},
              {"margin", num(e.margin)},
              {"method", std::string(to_string(e.method))},
              {"cycles", cycles}};
}

inline Json to_json(const SweepReport& r, const ParamBox& box) {
  Json hist = Json::object();
  for (const auto& [k, v] : r.histogram) hist[std::to_string(k)] = v;
  Json best = Json::array();
  for (const auto& e : r.max_found) {
    Json j = to_json(e);
    j["sample"] = e.index;
    best.push_back(j);
  }
  Json viol = Json::array();
  for (const auto& e : r.violations) {
    Json j = to_json(e);
    j["sample"] = e.index;
    viol.push_back(j);
  }
  const std::size_t max_count = r.histogram.empty() ? 0 : r.histogram.rbegin()->first;
  return Json{{"family", r.family},
              {"samples", r.samples},
              {"seed", r.seed},
              {"method", std::string(to_string(r.method))},
              {"box", to_json(box)},
              {"histogram", hist},
              {"max_count", max_count},
              {"max_found", best},
              {"violations", viol}};
}

inline Json to_json(const SearchResult& s, const std::string& family, std::uint64_t budget, std::uint64_t seed,
                    const ParamBox& box) {
  return Json{{"family", family},
              {"budget", budget},
              {"seed", seed},
              {"box", to_json(box)},
              {"evaluations", s.evaluations},
              {"random_phase", s.random_phase},
              {"best", to_json(s.best)}};
}

}  // namespace pwl
