#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include <boost/math/tools/toms748_solve.hpp>

namespace pwl {

/// Root of f inside a sign-change bracket [lo, hi], f(lo) = flo and
/// f(hi) = fhi, via TOMS 748. Returns nullopt if the bracket is not valid.
template <class F>
std::optional<double> polish_root(F&& f, double lo, double hi, double flo, double fhi,
                                  std::uintmax_t max_iter = 200) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (!std::isfinite(flo) || !std::isfinite(fhi) || (flo > 0.0) == (fhi > 0.0)) return std::nullopt;
  try {
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), max_iter);
    const double fa = f(a);
    const double fb = f(b);
    return std::abs(fa) <= std::abs(fb) ? a : b;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace pwl
