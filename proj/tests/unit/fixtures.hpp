#pragma once

#include "naesat/moments.hpp"
#include "naesat/real.hpp"
#include "naesat/recursions.hpp"

namespace naesat::testing {

// k = 15 at the integer degree nearest its threshold.
struct K15 {
  static constexpr int k = 15;
  static constexpr int d = 170339;
  Real tol;
  FixedPoint fp;
  EmpiricalMeasure m;
};

inline const K15& k15() {
  static const K15 f = [] {
    PrecisionGuard g(default_precision_bits(K15::k));
    K15 x;
    x.tol = default_tol(K15::k);
    x.fp = solve_fixed_point(K15::k, Real(K15::d), x.tol);
    x.m = empirical_from_law(K15::k, K15::d, x.fp.law, x.tol);
    return x;
  }();
  return f;
}

inline Real max_abs_diff(const auto& a, const auto& b) {
  Real e(0);
  for (std::size_t i = 0; i < a.size(); ++i) e = max(e, abs(a[i] - b[i]));
  return e;
}

}  // namespace naesat::testing
