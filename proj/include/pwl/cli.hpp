#pragma once

// Command-line front end. Everything lives in run_cli so that the tests can
// drive the subcommands in-process.

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pwl/report.hpp"

namespace pwl {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSliding = 3, kExitInternal = 4 };

struct RunConfig {
  CanonicalParams params;
  Method method = Method::ClosedForm;
  std::uint64_t seed = 1;
  FindConfig find;
  std::string family = "case1_c0";  // sweep/search pattern
  std::uint64_t samples = 1000;
  std::uint64_t budget = 1000;
  ParamBox box;
  int threads = 0;
  std::string wronskian_family = "CASE1";
  double wronskian_ell = 1.0;
  std::vector<ScanInterval> intervals;  // empty: family default
  int grid = 1000;
  double y0 = -1.0;
  double t_span = 10.0;
  double dt = 0.01;
  std::string out;
  int json_indent = 2;
};

namespace detail {

inline void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::Config, where + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || k == a;
    if (!ok) throw Error(ErrorCode::Config, "unknown key '" + k + "' in " + where);
  }
}

template <class T>
void read(const Json& j, std::string_view key, T& dst) {
  const std::string k(key);
  if (j.contains(k)) dst = j.at(k).get<T>();
}

inline Method parse_method(std::string_view s) {
  if (s == "closed_form") return Method::ClosedForm;
  if (s == "numeric") return Method::Numeric;
  if (s == "both") return Method::Both;
  throw Error(ErrorCode::Config, "unknown method '" + std::string(s) + "' (closed_form, numeric, both)");
}

inline void read_box(const Json& j, ParamBox& box) {
  check_keys(j, {"ell", "r", "a", "b", "c"}, "box");
  for (ParamId id : {ParamId::Ell, ParamId::R, ParamId::A, ParamId::B, ParamId::C}) {
    const std::string k(to_string(id));
    if (!j.contains(k)) continue;
    const auto v = j.at(k).get<std::vector<double>>();
    if (v.size() != 2 || !(v[0] <= v[1])) throw Error(ErrorCode::Config, "box." + k + " must be [lo, hi]");
    box_range(box, id) = {v[0], v[1]};
  }
}

inline void read_halfmap(const Json& j, HalfMapConfig& h) {
  check_keys(j, {"focus_horizon", "node_horizon_scale", "min_gap", "grid", "tangency_tol"}, "halfmap");
  read(j, "focus_horizon", h.focus_horizon);
  read(j, "node_horizon_scale", h.node_horizon_scale);
  read(j, "min_gap", h.min_gap);
  read(j, "grid", h.grid);
  read(j, "tangency_tol", h.tangency_tol);
  if (h.grid < 2 || !(h.focus_horizon > 0.0) || !(h.node_horizon_scale > 0.0) || !(h.min_gap > 0.0)) {
    throw Error(ErrorCode::Config, "halfmap horizons and grid must be positive");
  }
}

}  // namespace detail

/// Parses a JSON config document; unknown keys are errors.
inline RunConfig parse_config(const Json& j) {
  using detail::check_keys;
  using detail::read;
  RunConfig cfg;
  check_keys(j, {"params", "method", "seed", "halfmap", "closed_form", "validation", "numeric", "sweep", "search",
                 "wronskian", "portrait", "output"},
             "config");
  if (j.contains("params")) {
    const Json& p = j.at("params");
    check_keys(p, {"ell", "r", "a", "b", "c", "left_class", "right_class"}, "params");
    read(p, "ell", cfg.params.ell);
    read(p, "r", cfg.params.r);
    read(p, "a", cfg.params.a);
    read(p, "b", cfg.params.b);
    read(p, "c", cfg.params.c);
    if (p.contains("left_class")) cfg.params.left_class = parse_equilibrium_class(p.at("left_class").get<std::string>());
    if (p.contains("right_class")) cfg.params.right_class = parse_equilibrium_class(p.at("right_class").get<std::string>());
  }
  if (j.contains("method")) cfg.method = detail::parse_method(j.at("method").get<std::string>());
  read(j, "seed", cfg.seed);
  if (j.contains("halfmap")) {
    detail::read_halfmap(j.at("halfmap"), cfg.find.closed_form.halfmap);
    HalfMapConfig numeric = cfg.find.closed_form.halfmap;
    numeric.mode = FlowMode::Numeric;
    cfg.find.validation.halfmap = numeric;
    cfg.find.numeric.halfmap = numeric;
  }
  if (j.contains("closed_form")) {
    const Json& c = j.at("closed_form");
    check_keys(c, {"scan_points", "root_separation"}, "closed_form");
    read(c, "scan_points", cfg.find.closed_form.scan_points);
    read(c, "root_separation", cfg.find.closed_form.root_separation);
    if (cfg.find.closed_form.scan_points < 3) throw Error(ErrorCode::Config, "closed_form.scan_points must be >= 3");
  }
  if (j.contains("validation")) {
    const Json& v = j.at("validation");
    check_keys(v, {"leg_samples", "leg_tol", "residual_tol", "fd_step", "isolation_tol"}, "validation");
    auto& vc = cfg.find.validation;
    read(v, "leg_samples", vc.leg_samples);
    read(v, "leg_tol", vc.leg_tol);
    read(v, "residual_tol", vc.residual_tol);
    read(v, "fd_step", vc.fd_step);
    read(v, "isolation_tol", vc.isolation_tol);
  }
  cfg.find.numeric.validation = cfg.find.validation;
  if (j.contains("numeric")) {
    const Json& n = j.at("numeric");
    check_keys(n, {"points", "min_offset", "max_offset", "root_separation"}, "numeric");
    read(n, "points", cfg.find.numeric.points);
    read(n, "min_offset", cfg.find.numeric.min_offset);
    read(n, "max_offset", cfg.find.numeric.max_offset);
    read(n, "root_separation", cfg.find.numeric.root_separation);
    if (!(cfg.find.numeric.min_offset > 0.0) || !(cfg.find.numeric.max_offset > cfg.find.numeric.min_offset)) {
      throw Error(ErrorCode::Config, "numeric offsets must satisfy 0 < min_offset < max_offset");
    }
  }
  for (const char* section : {"sweep", "search"}) {
    if (!j.contains(section)) continue;
    const Json& s = j.at(section);
    check_keys(s, {"family", "samples", "budget", "box", "threads"}, section);
    read(s, "family", cfg.family);
    read(s, "samples", cfg.samples);
    read(s, "budget", cfg.budget);
    read(s, "threads", cfg.threads);
    if (s.contains("box")) detail::read_box(s.at("box"), cfg.box);
  }
  if (j.contains("wronskian")) {
    const Json& w = j.at("wronskian");
    check_keys(w, {"family", "ell", "intervals", "grid"}, "wronskian");
    read(w, "family", cfg.wronskian_family);
    read(w, "ell", cfg.wronskian_ell);
    read(w, "grid", cfg.grid);
    if (w.contains("intervals")) {
      for (const auto& iv : w.at("intervals")) {
        const auto v = iv.get<std::vector<double>>();
        if (v.size() != 2 || !(v[0] < v[1])) throw Error(ErrorCode::Config, "wronskian intervals must be [lo, hi]");
        cfg.intervals.push_back({v[0], v[1]});
      }
    }
  }
  if (j.contains("portrait")) {
    const Json& p = j.at("portrait");
    check_keys(p, {"y0", "t_span", "dt"}, "portrait");
    read(p, "y0", cfg.y0);
    read(p, "t_span", cfg.t_span);
    read(p, "dt", cfg.dt);
  }
  if (j.contains("output")) {
    const Json& o = j.at("output");
    check_keys(o, {"path", "json_indent"}, "output");
    read(o, "path", cfg.out);
    read(o, "json_indent", cfg.json_indent);
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "cannot open config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::Config, "malformed JSON in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------------------
// Subcommands. Each writes its payload to `os`.

inline Json cmd_classify(const RunConfig& cfg) {
  const CanonicalParams& p = cfg.params;
  validate(p);
  Json eq = Json::object();
  for (Side s : {Side::Left, Side::Right}) {
    const std::string key = s == Side::Left ? "left" : "right";
    try {
      eq[key] = to_json(equilibrium(p, s));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularPiece) throw;
      eq[key] = nullptr;
    }
  }
  const ClosedInterval sl = sliding_set(p);
  return Json{{"params", to_json(p)},
              {"boundary", to_json(classify_boundary(p))},
              {"sliding_set", Json::array({sl.lo, sl.hi})},
              {"equilibria", eq}};
}

inline Json cmd_cycles(const RunConfig& cfg) {
  validate(cfg.params);
  const CycleReport rep = find_cycles(cfg.params, cfg.method, cfg.find);
  Json j = to_json(rep);
  j["params"] = to_json(cfg.params);
  return j;
}

inline Json cmd_wronskian(const RunConfig& cfg) {
  if (cfg.grid < 100) throw Error(ErrorCode::Config, "grid must be >= 100");
  const FunctionFamily fam(parse_family(cfg.wronskian_family), cfg.wronskian_ell);
  const auto intervals = cfg.intervals.empty() ? default_scan_segments(fam) : cfg.intervals;
  return to_json(verify_ect(fam, intervals, cfg.grid));
}

inline Json cmd_sweep(const RunConfig& cfg) {
  SweepOptions opt;
  opt.method = cfg.method;
  opt.find = cfg.find;
  opt.threads = cfg.threads;
  return to_json(sweep(find_sweep_family(cfg.family), cfg.box, cfg.samples, cfg.seed, opt), cfg.box);
}

inline Json cmd_search(const RunConfig& cfg) {
  SearchOptions opt;
  opt.method = cfg.method;
  opt.find = cfg.find;
  opt.threads = cfg.threads;
  const auto res = maximize_cycles(find_sweep_family(cfg.family), cfg.box, cfg.budget, cfg.seed, opt);
  if (!res) return Json{{"family", cfg.family}, {"budget", cfg.budget}, {"seed", cfg.seed}, {"best", nullptr}};
  return to_json(*res, cfg.family, cfg.budget, cfg.seed, cfg.box);
}

/// Orbit of the full system from (0, y0), chained leg by leg with exact
/// flows. Returns kExitSliding (after the contact row) if a crossing lands
/// in the closed sliding set.
inline int cmd_portrait(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
  const CanonicalParams& p = cfg.params;
  validate(p);
  if (!(cfg.t_span >= 0.0) || !std::isfinite(cfg.t_span)) throw Error(ErrorCode::Config, "t_span must be >= 0");
  if (!(cfg.dt > 0.0)) throw Error(ErrorCode::Config, "dt must be > 0");
  os << "t,x,y,piece\n";
  char buf[128];
  auto row = [&](double t, Vec2 z, Side s) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%s\n", t, z.x, z.y, std::string(to_string(s)).c_str());
    os << buf;
  };
  const ClosedInterval sl = sliding_set(p);
  auto heading = [&](double y) -> std::optional<Side> {
    if (sl.contains(y)) return std::nullopt;
    return y < sl.lo ? Side::Right : Side::Left;
  };

  double y_start = cfg.y0;
  auto side = heading(y_start);
  if (!side) {
    err << "sliding contact: start height " << y_start << " lies in the sliding set\n";
    return kExitSliding;
  }
  const HalfMapConfig hm = cfg.find.closed_form.halfmap;
  double t_start = 0.0;
  double last_t = -1.0;
  std::uint64_t k = 0;
  for (int leg = 0; leg < 1000000; ++leg) {
    const Crossing c = first_crossing_time(p, *side, y_start, TimeSign::Forward, hm);
    const double leg_end = c ? t_start + c.tau : std::numeric_limits<double>::infinity();
    const double stop = std::min(leg_end, cfg.t_span);
    for (double t = static_cast<double>(k) * cfg.dt; t <= stop; t = static_cast<double>(++k) * cfg.dt) {
      row(t, flow(p, *side, y_start, t - t_start, hm.mode), *side);
      last_t = t;
    }
    if (cfg.t_span <= leg_end) {
      if (last_t < cfg.t_span) row(cfg.t_span, flow(p, *side, y_start, cfg.t_span - t_start, hm.mode), *side);
      return kExitOk;
    }
    const double y1 = flow(p, *side, y_start, c.tau, hm.mode).y;
    const auto next = heading(y1);
    if (!next || *next == *side) {
      row(leg_end, {0.0, y1}, *side);
      err << "sliding contact at t = " << leg_end << ", y = " << y1 << "\n";
      return kExitSliding;
    }
    side = next;
    y_start = y1;
    t_start = leg_end;
  }
  throw std::runtime_error("portrait: too many legs");
}

/// Entry point shared by the binary and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Crossing limit cycles of discontinuous planar piecewise-linear systems", "pwl"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> indent;
  std::optional<double> ell, r, a, b, c, y0, t_span, dt, lo, hi;
  std::optional<std::string> left_class, right_class, method, family;
  std::optional<std::uint64_t> samples, budget;
  std::optional<int> grid, threads;

  auto common = [&](CLI::App* s) {
    s->add_option("--config", config_path, "JSON config file");
    s->add_option("--out", out_path, "write the report here instead of stdout");
    s->add_option("--seed", seed, "random seed");
    s->add_option("--json-indent", indent, "JSON indentation, -1 for compact");
  };
  auto params = [&](CLI::App* s) {
    s->add_option("--ell", ell, "left trace parameter");
    s->add_option("--r", r, "right trace parameter");
    s->add_option("--a", a, "left constant");
    s->add_option("--b", b, "right x constant");
    s->add_option("--c", c, "right y constant");
    s->add_option("--left-class", left_class, "focus, dnode or saddle_node");
    s->add_option("--right-class", right_class, "focus, dnode or saddle_node");
  };

  auto* classify = app.add_subcommand("classify", "Filippov partition of x = 0 and equilibria");
  common(classify);
  params(classify);
  auto* cycles = app.add_subcommand("cycles", "validated crossing limit cycles");
  common(cycles);
  params(cycles);
  cycles->add_option("--method", method, "closed_form, numeric or both");
  auto* portrait = app.add_subcommand("portrait", "orbit samples as CSV");
  common(portrait);
  params(portrait);
  portrait->add_option("--y0", y0, "start height on x = 0");
  portrait->add_option("--t-span", t_span, "integration time");
  portrait->add_option("--dt", dt, "sampling step");
  auto* wronsk = app.add_subcommand("wronskian", "Wronskian ladder and ECT verdict");
  common(wronsk);
  wronsk->add_option("--family", family, "CASE1, CASE1_L0, CASE2, CASE3 or CASE3_L0");
  wronsk->add_option("--ell", ell, "family parameter");
  wronsk->add_option("--lo", lo, "scan interval start");
  wronsk->add_option("--hi", hi, "scan interval end");
  wronsk->add_option("--grid", grid, "grid points per segment (>= 100)");
  auto* sweep_cmd = app.add_subcommand("sweep", "seeded random sweep with cycle-count histogram");
  common(sweep_cmd);
  sweep_cmd->add_option("--family", family, "sweep pattern, e.g. case1_c0");
  sweep_cmd->add_option("--samples", samples, "number of draws");
  sweep_cmd->add_option("--method", method, "closed_form, numeric or both");
  sweep_cmd->add_option("--threads", threads, "worker threads");
  auto* search_cmd = app.add_subcommand("search", "maximize the validated cycle count");
  common(search_cmd);
  search_cmd->add_option("--family", family, "sweep pattern, e.g. case1_c0");
  search_cmd->add_option("--budget", budget, "evaluation budget");
  search_cmd->add_option("--method", method, "closed_form, numeric or both");
  search_cmd->add_option("--threads", threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (indent) cfg.json_indent = *indent;
    if (!out_path.empty()) cfg.out = out_path;
    if (wronsk->parsed()) {
      if (ell) cfg.wronskian_ell = *ell;
    } else {
      if (ell) cfg.params.ell = *ell;
    }
    if (r) cfg.params.r = *r;
    if (a) cfg.params.a = *a;
    if (b) cfg.params.b = *b;
    if (c) cfg.params.c = *c;
    if (left_class) cfg.params.left_class = parse_equilibrium_class(*left_class);
    if (right_class) cfg.params.right_class = parse_equilibrium_class(*right_class);
    if (method) cfg.method = detail::parse_method(*method);
    if (family) (wronsk->parsed() ? cfg.wronskian_family : cfg.family) = *family;
    if (samples) cfg.samples = *samples;
    if (budget) cfg.budget = *budget;
    if (threads) cfg.threads = *threads;
    if (grid) cfg.grid = *grid;
    if (lo || hi) {
      if (!lo || !hi || !(*lo < *hi)) throw Error(ErrorCode::Config, "--lo and --hi must be given together, lo < hi");
      cfg.intervals = {{*lo, *hi}};
    }
    if (y0) cfg.y0 = *y0;
    if (t_span) cfg.t_span = *t_span;
    if (dt) cfg.dt = *dt;

    std::ofstream file;
    if (!cfg.out.empty()) {
      file.open(cfg.out);
      if (!file) throw Error(ErrorCode::Config, "cannot open output '" + cfg.out + "'");
    }
    std::ostream& os = cfg.out.empty() ? out : file;

    if (portrait->parsed()) return cmd_portrait(cfg, os, err);
    Json report;
    if (classify->parsed()) report = cmd_classify(cfg);
    else if (cycles->parsed()) report = cmd_cycles(cfg);
    else if (wronsk->parsed()) report = cmd_wronskian(cfg);
    else if (sweep_cmd->parsed()) report = cmd_sweep(cfg);
    else report = cmd_search(cfg);
    os << report.dump(cfg.json_indent) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    const bool config = e.code() == ErrorCode::Config || e.code() == ErrorCode::InvalidParams ||
                        e.code() == ErrorCode::Domain;
    return config ? kExitConfig : kExitInternal;
  } catch (const Json::exception& e) {
    err << "error: bad config value: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace pwl
