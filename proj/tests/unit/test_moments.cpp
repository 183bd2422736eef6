#include <doctest.h>

#include <cmath>
#include <map>

#include "fixtures.hpp"
#include "naesat/errors.hpp"
#include "naesat/moments.hpp"

using namespace naesat;
using naesat::testing::K15;
using naesat::testing::k15;
using naesat::testing::max_abs_diff;

namespace {

Real pow2(long e) { return ldexp(Real(1), e); }

// Threshold, round(d*) and the exponent there, from an independent
// 60-digit evaluation.
struct OracleRow {
  int k;
  const char* d_star;
  int d_round;
  const char* phi_at_round;
};
constexpr OracleRow kOracle[] = {
    {10, "3542.93126104360322464964532254", 3543, "-0.0000133715747764409026229633679157"},
    {15, "170338.899873207378485193199196", 170339, "-4.07335976160673648872141711936e-7"},
    {20, "7268163.04832831807824271630279", 7268163, "4.60890800699648039970007177803e-9"},
};

Real mass(const TupleClass& c) { return c.multiplicity * c.prob; }

}  // namespace

TEST_SUITE("moments") {

TEST_CASE("first moment and working bounds") {
  PrecisionGuard g(128);
  Thresholds t = thresholds(10);
  CHECK(abs(t.d_lbd - Real(5100) * const_log2()) < Real(1e-30));
  CHECK(abs(t.d_ubd - Real(5120) * const_log2()) < Real(1e-30));
  CHECK(abs(phi_first(10, t.d_fm)) < Real(1e-30));
  CHECK(t.d_lbd < t.d_fm);
  CHECK(t.d_fm < t.d_ubd);
  CHECK(abs(phi_first(7, Real(0)) - const_log2()) < Real(1e-35));
  Real prev(100);
  for (int k = 3; k <= 30; ++k) {
    Thresholds th = thresholds(k);
    Real r = th.d_ubd / th.d_lbd;
    CHECK(r > Real(1));
    CHECK(r < prev);
    prev = r;
  }
  CHECK(abs(prev - Real(1)) < Real(1e-7));
  CHECK_THROWS_AS(thresholds(2), InputError);
}

TEST_CASE("binary entropy") {
  PrecisionGuard g(128);
  CHECK(binary_entropy(Real(0)).is_zero());
  CHECK(binary_entropy(Real(1)).is_zero());
  CHECK(abs(binary_entropy(Real(0.5)) - const_log2()) < Real(1e-35));
  CHECK(abs(binary_entropy(Real(1) / Real(5)) - binary_entropy(Real(1) - Real(1) / Real(5))) < Real(1e-35));
  CHECK_THROWS_AS(binary_entropy(Real(1.5)), InputError);
}

TEST_CASE("second-moment exponent") {
  PrecisionGuard g(128);
  const int k = 10;
  const Real d = thresholds(k).d_lbd;
  const Real half = abar(k, d, Real(0.5));
  CHECK(abs(half - phi_first(k, d)) < Real(1e-30));
  for (int i = 1; i < 50; ++i) {
    const Real a = Real(i) / Real(50);
    const Real v = abar(k, d, a);
    CHECK(abs(v - abar(k, d, Real(1) - a)) < Real(1e-28));
    CHECK(v <= half + Real(1e-30));
    CHECK(abs(a_full(k, d, a, gamma_star(k, a)) - v) < Real(1e-28));
  }
  // gamma_star maximizes the two-variable form.
  const Real a(0.3);
  const Real gs = gamma_star(k, a);
  const Real at = a_full(k, d, a, gs);
  for (Real dg : {Real(1e-4), Real(-1e-4)}) CHECK(a_full(k, d, a, gs + dg) < at);
}

TEST_CASE("free-density exponent at k=15") {
  PrecisionGuard g(default_precision_bits(15));
  const int k = 15;
  const Real d(K15::d);
  const double ref = std::ldexp(1.0, -(k + 1));
  Real best(-1e9);
  double best_beta = 0;
  Real best_u;
  std::vector<Real> ys;
  for (int i = -60; i <= 60; ++i) {
    const double beta = ref * std::pow(2.0, i / 30.0);
    FreeDensityPoint p = free_density_exponent(k, d, Real(beta));
    ys.push_back(p.y);
    if (p.y > best) {
      best = p.y;
      best_beta = beta;
      best_u = p.u;
    }
  }
  CHECK(best_beta >= ref / 2);
  CHECK(best_beta <= 2 * ref);
  CHECK(abs(best_u - Real(1) - Real(2) / pow2(k)) <= Real(4 * k) / pow2(2 * k));
  // Unimodal on the grid.
  std::size_t peak = 0;
  for (std::size_t i = 1; i < ys.size(); ++i)
    if (ys[i] > ys[peak]) peak = i;
  for (std::size_t i = 1; i <= peak; ++i) CHECK(ys[i] > ys[i - 1]);
  for (std::size_t i = peak + 1; i < ys.size(); ++i) CHECK(ys[i] < ys[i - 1]);
  CHECK_THROWS_AS(free_density_exponent(k, d, Real(0)), InputError);
  CHECK_THROWS_AS(free_density_exponent(k, d, Real(1) / Real(k)), InputError);
}

TEST_CASE("three forms of the exponent agree at k=15") {
  const auto& f = k15();
  PrecisionGuard g(default_precision_bits(15));
  const Real ps = phi_star_explicit(f.fp.scalar);
  RatePoint r = phi_bethe(f.m, f.tol);
  REQUIRE(r.bethe_normalizer_form.has_value());
  CHECK(abs(r.phi - ps) < Real(1e-20));
  CHECK(abs(*r.bethe_normalizer_form - ps) < Real(1e-20));
  Normalizers nz = normalizers(f.fp);
  CHECK(abs(nz.phi_g - ps) < Real(1e-20));
  CHECK(abs(nz.zdot_bar_g / nz.zdot_bar_g_closed - Real(1)) < Real(1e-25));
  CHECK(abs(nz.zhat_bar_g / nz.zhat_bar_g_closed - Real(1)) < Real(1e-25));
  CHECK(abs(nz.z_bar_g / nz.z_bar_g_closed - Real(1)) < Real(1e-25));
  // Truncated tail: no prefactor.
  CHECK_FALSE(f.m.complete);
  CHECK_FALSE(r.log_prefactor.has_value());
  CHECK(abs(phi_star(15, Real(K15::d), f.tol).phi - ps) < Real(1e-30));
}

TEST_CASE("empirical measure is normalized and consistent") {
  const auto& f = k15();
  PrecisionGuard g(default_precision_bits(15));
  Real sv(0), sc(0), sh(0);
  for (const auto& c : f.m.var) sv += mass(c);
  for (const auto& c : f.m.clause) sc += mass(c);
  for (const auto& x : f.m.vh) sh += x;
  CHECK(abs(sv - Real(1)) < Real(1e-25));
  CHECK(abs(sc - Real(1)) < Real(1e-25));
  CHECK(abs(sh - Real(1)) < Real(1e-25));
  CHECK(max_abs_diff(clause_marginal(f.m), f.m.vh) < Real(1e-25));
}

TEST_CASE("exponent is invariant under 0/1 relabelling") {
  const auto& f = k15();
  PrecisionGuard g(default_precision_bits(15));
  EmpiricalMeasure r = relabel_01(f.m);
  CHECK(abs(phi_bethe(r, f.tol).phi - phi_bethe(f.m, f.tol).phi) < Real(1e-30));
}

TEST_CASE("marginal-preserving perturbation lowers the exponent") {
  const auto& f = k15();
  PrecisionGuard g(default_precision_bits(15));
  const Real base = phi_bethe(f.m, f.tol).phi;
  // Rigid variable classes (xx^j, xf^{d-j}) with x = 0, indexed by j.
  std::map<int, std::size_t> by_j;
  for (std::size_t i = 0; i < f.m.var.size(); ++i) {
    const auto& c = f.m.var[i].counts;
    if (c[S00] > 0 && c[S00] + c[S0f] == K15::d) by_j[c[S00]] = i;
  }
  REQUIRE(by_j.size() > 3);
  int j = 0;
  Real best(0);
  for (auto [jj, i] : by_j)
    if (by_j.count(jj - 1) && by_j.count(jj + 1) && mass(f.m.var[i]) > best) {
      best = mass(f.m.var[i]);
      j = jj;
    }
  REQUIRE(j > 0);
  const std::size_t idx[3] = {by_j[j - 1], by_j[j], by_j[j + 1]};
  Real lo = best;
  for (auto i : idx) lo = min(lo, mass(f.m.var[i]));
  for (double scale : {1e-2, 1e-3}) {
    const Real eps = lo * Real(scale);
    EmpiricalMeasure p = f.m;
    const Real w[3] = {eps, Real(-2) * eps, eps};
    for (int t = 0; t < 3; ++t) p.var[idx[t]].prob += w[t] / p.var[idx[t]].multiplicity;
    CHECK(phi_bethe(p, f.tol).phi < base);
  }
}

TEST_CASE("threshold against the independent oracle") {
  for (const auto& row : kOracle) {
    PrecisionGuard g(default_precision_bits(row.k));
    DStar ds = find_d_star(row.k, default_tol(row.k));
    CAPTURE(row.k);
    CHECK(abs(ds.d_star - Real(std::string_view(row.d_star))) < Real(1e-8));
    CHECK(abs(round(ds.d_star) - Real(row.d_round)).is_zero());
    const Real phi = phi_star(row.k, Real(row.d_round), default_tol(row.k)).phi;
    CHECK(abs(phi - Real(std::string_view(row.phi_at_round))) < Real(1e-25));
    Thresholds th = thresholds(row.k);
    CHECK(th.d_lbd < ds.d_star);
    CHECK(ds.d_star < th.d_ubd);
    CHECK(ds.d_star < th.d_fm);
    const Real ln2 = const_log2();
    const Real approx = (pow2(row.k - 1) - Real(0.5) - Real(1) / (Real(4) * ln2)) * Real(row.k) * ln2;
    CHECK(abs(ds.d_star - approx) * pow2(row.k) / Real(row.k * row.k * row.k) <= Real(1));
  }
}

TEST_CASE("gap identity at k=15") {
  const auto& f = k15();
  PrecisionGuard g(default_precision_bits(15));
  const Real gap = phi_first(15, Real(K15::d)) - phi_star_explicit(f.fp.scalar) - f.fp.scalar.q_free;
  CHECK(abs(gap) <= Real(10 * 15 * 15) / pow2(30));
  CHECK(gap.sign() < 0);
}

TEST_CASE("explicit tables match the class-based matrices") {
  const auto& f = k15();
  PrecisionGuard g(default_precision_bits(15));
  const ScalarState& s = f.fp.scalar;
  ExplicitTables t = explicit_tables(s);
  Real sum(0);
  for (const auto& x : t.vh) sum += x;
  CHECK(abs(sum - Real(1)) < Real(1e-30));
  CHECK(abs(t.vh[Sff] - s.q_free * s.v / (Real(1) + s.q_free * s.v_rig)) < Real(1e-35));
  CHECK(max_abs_diff(t.vh, f.m.vh) < Real(1e-30));
  CHECK(abs(t.lambda - sqrt(t.a * t.b)) < Real(1e-35));

  SpectralReport r = transition_matrices(f.m, false);
  CHECK(abs(r.Mdot(S00, S00) - t.a) < Real(1e-30));
  CHECK((t.Mdot - r.Mdot).max_abs() < Real(1e-30));
  CHECK((t.Mhat - r.Mhat).max_abs() < Real(1e-30));
  CHECK((t.Mhat0 - r.Mhat0).max_abs() < Real(1e-30));
  CHECK(r.stochastic_error < Real(1e-30));
  CHECK(r.reversibility_error < Real(1e-30));
  CHECK(r.mhat_split_error < Real(1e-30));

  REQUIRE(r.eig_Mdot.size() == 7);
  const Real l = t.lambda;
  const Real expect[7] = {-l, -l, l, l, Real(1), Real(1), Real(1)};
  for (int i = 0; i < 7; ++i) CHECK(abs(r.eig_Mdot[i] - expect[i]) <= Real(1e-15) * abs(expect[i]));
}

TEST_CASE("spectral verdict at k=15 with pairs") {
  const auto& f = k15();
  PrecisionGuard g(default_precision_bits(15));
  SpectralReport r = transition_matrices(f.m, true);
  REQUIRE(r.with_pairs);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      for (int a = 0; a < 7; ++a)
        for (int b = 0; b < 7; ++b)
          CHECK(abs(r.Mdot2(7 * i + a, 7 * j + b) - r.Mdot(i, j) * r.Mdot(a, b)) < Real(1e-30));
  HessianVerdict v = hessian_definiteness(r);
  REQUIRE(v.sigma_min.size() == 6);
  CHECK(v.nonsingular);
  CHECK(v.negative_definite);
  CHECK(v.pair_negative_definite);
  CHECK(v.hessian_max.sign() < 0);
  CHECK(v.hessian2_max.sign() < 0);
  CHECK(v.F_asymmetry < Real(1e-30));
  CHECK(v.F_product_form_error < Real(1e-25));

  SpectralReport bad = r;
  bad.Ldot = Matrix(7, 7);
  HessianVerdict w = hessian_definiteness(bad);
  CHECK_FALSE(w.nonsingular);
  CHECK_FALSE(w.negative_definite);
}

TEST_CASE("pair exponents at k=15") {
  const auto& f = k15();
  PrecisionGuard g(default_precision_bits(15));
  const Real ps = phi_star_explicit(f.fp.scalar);
  PairState p = pair_product(f.fp.scalar);
  PairRate pr = pair_rate(15, K15::d, f.fp, p, f.tol);
  CHECK(abs(pr.product - Real(2) * ps) < Real(1e-20));
  REQUIRE(pr.product_literal_sum.has_value());
  CHECK(abs(*pr.product_literal_sum - pr.product) < Real(1e-25));
  CHECK(abs(pr.identical0 - ps) < Real(1e-20));
  CHECK(abs(pr.identical1 - ps) < Real(1e-20));
}

TEST_CASE("pair clause weight on a product of identical copies") {
  PrecisionGuard g(128);
  // Copy 2 equals copy 1: the pair factor equals the single-copy factor.
  for (int k = 3; k <= 5; ++k) {
    std::vector<int> counts(kSpins * kSpins, 0);
    counts[kSpins * S00 + S00] = 1;
    counts[kSpins * S11 + S11] = 1;
    counts[kSpins * Sff + Sff] = k - 2;
    SpinCounts c{};
    c[S00] = 1;
    c[S11] = 1;
    c[Sff] = k - 2;
    const Real single(psi_hat(c).get_d());
    CHECK(abs(pair_clause_weight(k, counts) - single) < Real(1e-30));
  }
  CHECK_THROWS_AS(pair_clause_weight(3, std::vector<int>(7, 1)), InputError);
}

}
