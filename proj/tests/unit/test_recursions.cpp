#include <doctest.h>

#include "fixtures.hpp"
#include "naesat/errors.hpp"
#include "naesat/recursions.hpp"

using namespace naesat;
using naesat::testing::K15;
using naesat::testing::k15;
using naesat::testing::max_abs_diff;

TEST_SUITE("recursions") {

TEST_CASE("scalar maps at the endpoints") {
  PrecisionGuard g(128);
  CHECK(q_of_v(Real(20), Real(0)) == Real(1));
  CHECK(q_of_v(Real(20), Real(1)) == Real(0));
  CHECK(v_of_q(5, Real(0)) == Real(1));
  // Q = 2^{-(k-1)} at q = 1.
  const Real Q = ldexp(Real(1), -4);
  CHECK(abs(v_of_q(5, Real(1)) - (Real(1) - Real(2) * Q) / (Real(1) - Q)) < Real(1e-35));
}

TEST_CASE("scalar maps are decreasing, composition increasing") {
  PrecisionGuard g(128);
  const int k = 8;
  const Real d(300);
  Real prev_q(2), prev_v(2), prev_c(-1);
  for (int i = 0; i <= 40; ++i) {
    const Real x = Real(i) / Real(40);
    Real qv = q_of_v(d, x);
    Real vq = v_of_q(k, x);
    Real c = q_of_v(d, v_of_q(k, x));
    CHECK(qv <= prev_q);
    CHECK(vq < prev_v);
    CHECK(c >= prev_c);
    prev_q = qv;
    prev_v = vq;
    prev_c = c;
  }
}

TEST_CASE("fixed point at k=15 near the threshold") {
  const auto& f = k15();
  PrecisionGuard g(default_precision_bits(15));
  const ScalarState& s = f.fp.scalar;
  CHECK(s.residual < f.tol);
  CHECK(abs(s.q - Real("0.999984712345090320196964481007")) < Real(1e-25));
  CHECK(abs(s.q + s.q_free - Real(1)) < Real(1e-35));
  CHECK(abs(s.v + s.v_rig - Real(1)) < Real(1e-35));
  const Real dev = abs(ldexp(s.q_free, 15) - Real(0.5));
  CHECK(dev <= Real(5 * 15 * 15) / ldexp(Real(1), 15));
  // Both scalar equations hold.
  CHECK(abs(q_of_v(s.d, s.v) - s.q) < f.tol);
  CHECK(abs(v_of_q(15, s.q) - s.v) < f.tol);
}

TEST_CASE("contraction: derivative of the composed map") {
  const auto& f = k15();
  PrecisionGuard g(default_precision_bits(15));
  const ScalarState& s = f.fp.scalar;
  const Real h = ldexp(Real(1), -50);
  auto F = [&](const Real& q) { return q_of_v(s.d, v_of_q(15, q)); };
  const Real der = (F(s.q + h) - F(s.q - h)) / (Real(2) * h);
  CHECK(der.sign() > 0);
  CHECK(der <= Real(15 * 15) / ldexp(Real(1), 15));
}

TEST_CASE("degree far below the threshold goes to the trivial point") {
  PrecisionGuard g(256);
  ScalarState s = iterate_qv(15, Real(11000), Real(1), Real("1e-30"));
  CHECK(s.q < Real(1e-20));
}

TEST_CASE("d_of_q inverts the iteration") {
  const auto& f = k15();
  PrecisionGuard g(default_precision_bits(15));
  const Real dq = d_of_q(15, f.fp.scalar.q);
  CHECK(abs(dq - Real(K15::d)) / Real(K15::d) < Real(1e-20));
  Real prev(0);
  for (int j = 10; j <= 24; ++j) {
    Real dd = d_of_q(15, Real(1) - ldexp(Real(1), -j));
    CHECK(dd > prev);
    prev = dd;
  }
  CHECK_THROWS_AS(d_of_q(15, Real(1)), InputError);
  CHECK_THROWS_AS(d_of_q(15, Real(0)), InputError);
}

TEST_CASE("r/f law identities") {
  const auto& f = k15();
  PrecisionGuard g(default_precision_bits(15));
  const RFLaw& rf = f.fp.rf;
  CHECK(abs(rf.ghat[RR] + rf.ghat[RFr] - Real(0.5)) < Real(1e-30));
  CHECK(abs(rf.gdot[FR] - Real(2) * rf.gdot[FF]) < Real(1e-30));
  CHECK(abs(rf.ghat[RFr] / (rf.ghat[RR] + rf.ghat[RFr]) - f.fp.scalar.v) < Real(1e-30));
  Real sd(0), sh(0);
  for (int i = 0; i < kRF; ++i) {
    sd += rf.gdot[i];
    sh += rf.ghat[i];
  }
  CHECK(abs(sd - Real(1)) < Real(1e-30));
  CHECK(abs(sh - Real(1)) < Real(1e-30));
  CHECK(rf.residual < Real(1e-25));
  RFLaw img = rf_bethe_image(15, Real(K15::d), rf);
  CHECK(max_abs_diff(img.gdot, rf.gdot) < Real(1e-25));
  CHECK(max_abs_diff(img.ghat, rf.ghat) < Real(1e-25));
}

TEST_CASE("lift to 0/1/f messages") {
  const auto& f = k15();
  PrecisionGuard g(default_precision_bits(15));
  const MessageLaw& h = f.fp.law;
  CHECK(abs(h.hdot[S00] - h.hdot[S11]) < Real(1e-35));
  CHECK(abs(h.hhat[S00] - h.hhat[S11]) < Real(1e-35));
  CHECK(abs(Real(4) * h.hhat[S11] + Real(3) * h.hhat[Sff] - Real(1)) < Real(1e-30));
  CHECK(bethe_residual(15, Real(K15::d), h) < Real(1e-25));
  for (int s = 0; s < kSpins; ++s) CHECK(h.hdot[s].sign() >= 0);
}

TEST_CASE("Bethe residual of the uniform law is large") {
  PrecisionGuard g(128);
  MessageLaw u;
  for (int i = 0; i < kSpins; ++i) {
    u.hdot[i] = Real(1) / Real(7);
    u.hhat[i] = Real(1) / Real(7);
  }
  const Real d(300);
  Real r = bethe_residual(8, d, u);
  CHECK(r > Real(0.01));
  CHECK(abs(bethe_residual(8, d, relabel_01(u)) - r) < Real(1e-30));
}

TEST_CASE("0/1 relabelling fixes the fixed-point law") {
  const auto& f = k15();
  PrecisionGuard g(default_precision_bits(15));
  MessageLaw r = relabel_01(f.fp.law);
  CHECK(max_abs_diff(r.hdot, f.fp.law.hdot) < Real(1e-30));
  CHECK(max_abs_diff(r.hhat, f.fp.law.hhat) < Real(1e-30));
}

TEST_CASE("pair recursion") {
  const auto& f = k15();
  PrecisionGuard g(default_precision_bits(15));
  const ScalarState& s = f.fp.scalar;
  PairState p = pair_product(s);
  CHECK(p.in_regime);
  CHECK(p.residual < Real(1e-25));
  CHECK(abs(p.qhat[pair_index(0, 2)] - p.qhat[pair_index(1, 2)]) < Real(1e-35));
  CHECK(abs(p.qhat[pair_index(2, 0)] - p.qhat[pair_index(2, 1)]) < Real(1e-35));
  // Product form.
  CHECK(abs(p.qdot[pair_index(2, 2)] - s.q_free * s.q_free) < Real(1e-35));

  const Real eps = Real(15) / ldexp(sqrt(ldexp(Real(1), 15)), 1);
  PairState pert = pair_perturbed(s, eps);
  CHECK(pert.in_regime);
  CHECK(max_abs_diff(pert.qdot, p.qdot) > Real(1e-6));
  PairState it = pair_iterate(15, s.d, pert, f.tol);
  CHECK(max_abs_diff(it.qdot, p.qdot) < Real(1e-20));
  CHECK(max_abs_diff(it.qhat, p.qhat) < Real(1e-20));

  // One clause step followed by one variable step reproduces the product.
  auto qh = pair_clause_step(15, p.qdot);
  CHECK(max_abs_diff(qh, p.qhat) < Real(1e-25));
  CHECK(max_abs_diff(pair_variable_step(s.d, qh), p.qdot) < Real(1e-25));
}

TEST_CASE("regime check rejects a far-from-product pair law") {
  PrecisionGuard g(128);
  std::array<Real, kPairs> q;
  for (auto& x : q) x = Real(1) / Real(9);
  CHECK_FALSE(pair_in_regime(15, q));
}

TEST_CASE("invalid arguments") {
  PrecisionGuard g(128);
  CHECK_THROWS_AS(iterate_qv(2, Real(10)), InputError);
  CHECK_THROWS_AS(iterate_qv(5, Real(1)), InputError);
  CHECK_THROWS_AS(iterate_qv(5, Real(40), Real(1.5), Real(1e-20)), InputError);
  CHECK_THROWS_AS(iterate_qv(15, Real(K15::d), Real(1), Real(1e-30), 1), NonConvergence);
}

}
