#pragma once

#include <fstream>
#include <random>
#include <string>

#include "pwl/cli.hpp"

namespace pwl::test {

inline Json load_fixture(const std::string& name) {
  std::ifstream in(std::string(PWL_FIXTURE_DIR) + "/" + name);
  return Json::parse(in);
}

/// Parameters of the stored two-cycle search result.
inline CanonicalParams two_cycle_params() {
  return parse_config(Json{{"params", load_fixture("case1_two_cycles.json").at("best").at("params")}}).params;
}

inline CanonicalParams focus_focus(double ell, double r, double a, double b, double c) {
  return {ell, r, a, b, c, EquilibriumClass::FocusCenter, EquilibriumClass::FocusCenter};
}

struct Uniform {
  std::mt19937_64 gen;
  explicit Uniform(std::uint64_t seed) : gen(seed) {}
  double operator()(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
};

}  // namespace pwl::test
