#pragma once

// Seeded parameter sweeps and a random-restart/coordinate search for
// configurations with many validated cycles.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pwl/cycles.hpp"

namespace pwl {

/// Counter-based generator: value i of stream `seed` is a pure function of
/// (seed, i), so samples can be drawn in any order or in parallel.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t bits(std::uint64_t index, std::uint64_t lane) const {
    return mix(mix(seed_ ^ mix(index)) + lane);
  }

  /// Uniform in [0, 1).
  double uniform(std::uint64_t index, std::uint64_t lane) const {
    return static_cast<double>(bits(index, lane) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  double at(double u) const { return lo + (hi - lo) * u; }
  double clamp(double v) const { return std::clamp(v, lo, hi); }
};

struct ParamBox {
  Range ell{-1.5, 1.5};
  Range r{-1.5, 1.5};
  Range a{-3.0, 3.0};
  Range b{-3.0, 3.0};
  Range c{-3.0, 3.0};
};

enum class ParamId { Ell, R, A, B, C };

constexpr std::string_view to_string(ParamId id) {
  switch (id) {
    case ParamId::Ell: return "ell";
    case ParamId::R: return "r";
    case ParamId::A: return "a";
    case ParamId::B: return "b";
    case ParamId::C: return "c";
  }
  return "?";
}

inline double& param_ref(CanonicalParams& p, ParamId id) {
  switch (id) {
    case ParamId::Ell: return p.ell;
    case ParamId::R: return p.r;
    case ParamId::A: return p.a;
    case ParamId::B: return p.b;
    case ParamId::C: return p.c;
  }
  return p.ell;
}

inline Range& box_range(ParamBox& box, ParamId id) {
  switch (id) {
    case ParamId::Ell: return box.ell;
    case ParamId::R: return box.r;
    case ParamId::A: return box.a;
    case ParamId::B: return box.b;
    case ParamId::C: return box.c;
  }
  return box.ell;
}

inline const Range& box_range(const ParamBox& box, ParamId id) {
  switch (id) {
    case ParamId::Ell: return box.ell;
    case ParamId::R: return box.r;
    case ParamId::A: return box.a;
    case ParamId::B: return box.b;
    case ParamId::C: return box.c;
  }
  return box.ell;
}

/// Named parameter pattern for sweeps: fixed classes, parameters pinned to
/// zero, and the free ones drawn from the box. Patterns with two class
/// options pick one per sample.
struct SweepFamily {
  std::string name;
  std::vector<EquilibriumClass> left_options;
  std::vector<EquilibriumClass> right_options;
  std::vector<ParamId> free;  // the rest are zero
};

inline std::vector<SweepFamily> sweep_families() {
  using E = EquilibriumClass;
  using P = ParamId;
  return {
      {"case1_c0", {E::FocusCenter}, {E::FocusCenter}, {P::Ell, P::R, P::A, P::B}},
      {"case1_a0", {E::FocusCenter}, {E::FocusCenter}, {P::Ell, P::R, P::B, P::C}},
      {"case1_l0", {E::FocusCenter}, {E::FocusCenter}, {P::R, P::A, P::B}},
      {"case2", {E::DegenerateNode}, {E::FocusCenter}, {P::Ell, P::R, P::A, P::B}},
      {"case3", {E::SaddleOrDiagonalNode}, {E::FocusCenter}, {P::Ell, P::R, P::A, P::B}},
      {"case3_l0", {E::SaddleOrDiagonalNode}, {E::FocusCenter}, {P::R, P::A, P::B}},
      // boundary equilibrium (c = 0, resp. a = 0) of node or saddle class
      {"obstructed_right", {E::FocusCenter}, {E::DegenerateNode, E::SaddleOrDiagonalNode}, {P::Ell, P::R, P::A, P::B}},
      {"obstructed_left", {E::DegenerateNode, E::SaddleOrDiagonalNode}, {E::FocusCenter}, {P::Ell, P::R, P::B, P::C}},
      // left focus on the boundary, right node or saddle: numeric only
      {"mirrored", {E::FocusCenter}, {E::DegenerateNode, E::SaddleOrDiagonalNode}, {P::Ell, P::R, P::B, P::C}},
      {"generic", {E::FocusCenter}, {E::FocusCenter}, {P::Ell, P::R, P::A, P::B, P::C}},
  };
}

inline SweepFamily find_sweep_family(std::string_view name) {
  for (auto& f : sweep_families()) {
    if (f.name == name) return f;
  }
  std::string known;
  for (auto& f : sweep_families()) known += (known.empty() ? "" : ", ") + f.name;
  throw Error(ErrorCode::Config, "unknown sweep family '" + std::string(name) + "' (known: " + known + ")");
}

/// Deterministic draw number `index`. Invalid draws (measure zero) are
/// redrawn on the next lanes.
inline CanonicalParams draw_params(const SweepFamily& fam, const ParamBox& box, const CounterRng& rng,
                                   std::uint64_t index) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    const std::uint64_t base = attempt * 16;
    CanonicalParams p;
    p.left_class = fam.left_options[rng.bits(index, base) % fam.left_options.size()];
    p.right_class = fam.right_options[rng.bits(index, base + 1) % fam.right_options.size()];
    std::uint64_t lane = base + 2;
    for (ParamId id : fam.free) param_ref(p, id) = box_range(box, id).at(rng.uniform(index, lane++));
    if (is_valid(p)) return p;
  }
}

inline int num_threads() {
  if (const char* env = std::getenv("PWL_NUM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs f(i) for i in [0, n) on up to `threads` workers; results land in
/// index order so the merge is independent of scheduling.
template <class R, class F>
std::vector<R> parallel_map(std::size_t n, int threads, F&& f) {
  std::vector<R> out(n);
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) out[i] = f(i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

struct Evaluation {
  CanonicalParams params;
  std::vector<LimitCycle> cycles;
  Method method = Method::ClosedForm;
  double margin = 0.0;
  std::uint64_t index = 0;  // sample index, or evaluation number in refinement
};

/// Margins at or above this value tie. Without a cap the relative gap keeps
/// growing as one cycle runs off to infinity.
inline constexpr double kMarginCap = 0.5;

/// Robustness of a configuration: the smallest relative gap between
/// consecutive crossing heights (sliding set edge included) or between a
/// multiplier and 1, whichever is smaller, capped at kMarginCap; 0 without
/// cycles.
inline double separation_margin(const CanonicalParams& p, const std::vector<LimitCycle>& cycles) {
  if (cycles.empty()) return 0.0;
  std::vector<double> ys{sliding_set(p).lo};
  double m = kMarginCap;
  for (const auto& c : cycles) {
    ys.push_back(c.candidate.y0);
    m = std::min(m, std::abs(c.stability_multiplier - 1.0));
  }
  std::sort(ys.begin(), ys.end());
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
    m = std::min(m, (ys[i + 1] - ys[i]) / std::max({1.0, std::abs(ys[i]), std::abs(ys[i + 1])}));
  }
  return m;
}

inline Evaluation evaluate(const CanonicalParams& p, Method method, const FindConfig& cfg = {}) {
  Evaluation e;
  e.params = p;
  try {
    const auto rep = find_cycles(p, method, cfg);
    e.cycles = rep.cycles;
    e.method = rep.method;
  } catch (const Error&) {
    e.method = Method::Numeric;
    e.cycles = count_cycles_numeric(p, cfg.numeric).cycles;
  }
  e.margin = separation_margin(p, e.cycles);
  return e;
}

/// Lexicographic objective: more cycles, then larger margin; ties go to the
/// earlier evaluation.
inline bool better(const Evaluation& x, const Evaluation& y) {
  if (x.cycles.size() != y.cycles.size()) return x.cycles.size() > y.cycles.size();
  if (x.margin != y.margin) return x.margin > y.margin;
  return x.index < y.index;
}

inline constexpr std::size_t kMaxCycleBound = 3;

struct SweepReport {
  std::string family;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  Method method = Method::ClosedForm;
  std::map<std::size_t, std::uint64_t> histogram;
  std::vector<Evaluation> max_found;   // up to `keep` draws attaining the maximum
  std::vector<Evaluation> violations;  // draws with more than three cycles
};

struct SweepOptions {
  Method method = Method::ClosedForm;
  FindConfig find;
  int threads = 0;  // 0: PWL_NUM_THREADS or hardware concurrency
  std::size_t keep = 5;
};

inline SweepReport sweep(const SweepFamily& fam, const ParamBox& box, std::uint64_t samples, std::uint64_t seed,
                         const SweepOptions& opt = {}) {
  if (samples == 0) throw Error(ErrorCode::Config, "samples must be >= 1");
  const CounterRng rng(seed);
  const auto evals = parallel_map<Evaluation>(samples, opt.threads > 0 ? opt.threads : num_threads(),
                                              [&](std::size_t i) {
                                                Evaluation e = evaluate(draw_params(fam, box, rng, i), opt.method, opt.find);
                                                e.index = i;
                                                return e;
                                              });
  SweepReport rep;
  rep.family = fam.name;
  rep.samples = samples;
  rep.seed = seed;
  rep.method = opt.method;
  std::size_t best = 0;
  for (const auto& e : evals) {
    ++rep.histogram[e.cycles.size()];
    best = std::max(best, e.cycles.size());
    if (e.cycles.size() > kMaxCycleBound) rep.violations.push_back(e);
  }
  for (const auto& e : evals) {
    if (e.cycles.size() == best && rep.max_found.size() < opt.keep) rep.max_found.push_back(e);
  }
  return rep;
}

struct SearchOptions {
  Method method = Method::ClosedForm;
  FindConfig find;
  int threads = 0;
  double initial_step = 0.1;  // fraction of the box width
  double min_step = 1e-4;
  std::size_t restarts = 16;  // best random draws handed to refinement
};

struct SearchResult {
  Evaluation best;
  std::uint64_t evaluations = 0;
  std::uint64_t random_phase = 0;
};

/// Half the budget on uniform draws, the rest on coordinate refinement with
/// step halving, started in turn from the best draws. budget = 0 gives
/// nullopt.
inline std::optional<SearchResult> maximize_cycles(const SweepFamily& fam, const ParamBox& box, std::uint64_t budget,
                                                   std::uint64_t seed, const SearchOptions& opt = {}) {
  if (budget == 0) return std::nullopt;
  const CounterRng rng(seed);
  const std::uint64_t n_random = std::max<std::uint64_t>(1, budget / 2);
  auto evals = parallel_map<Evaluation>(n_random, opt.threads > 0 ? opt.threads : num_threads(),
                                        [&](std::size_t i) {
                                          Evaluation e = evaluate(draw_params(fam, box, rng, i), opt.method, opt.find);
                                          e.index = i;
                                          return e;
                                        });
  std::sort(evals.begin(), evals.end(), better);
  SearchResult res;
  res.best = evals.front();
  res.evaluations = n_random;
  res.random_phase = n_random;

  const std::size_t starts = std::min(opt.restarts, evals.size());
  for (std::size_t s = 0; s < starts && res.evaluations < budget; ++s) {
    Evaluation cur = evals[s];
    for (double step = opt.initial_step; step >= opt.min_step && res.evaluations < budget; step *= 0.5) {
      bool improved = true;
      while (improved && res.evaluations < budget) {
        improved = false;
        for (ParamId id : fam.free) {
          for (double dir : {1.0, -1.0}) {
            if (res.evaluations >= budget) break;
            CanonicalParams q = cur.params;
            const Range& rg = box_range(box, id);
            param_ref(q, id) = rg.clamp(param_ref(q, id) + dir * step * rg.width());
            if (q == cur.params || !is_valid(q)) continue;
            Evaluation e = evaluate(q, opt.method, opt.find);
            e.index = res.evaluations++;
            if (e.cycles.size() > cur.cycles.size() ||
                (e.cycles.size() == cur.cycles.size() && e.margin > cur.margin)) {
              cur = std::move(e);
              improved = true;
            }
          }
        }
      }
    }
    if (cur.cycles.size() > res.best.cycles.size() ||
        (cur.cycles.size() == res.best.cycles.size() && cur.margin > res.best.margin)) {
      res.best = cur;
    }
  }
  return res;
}

}  // namespace pwl
