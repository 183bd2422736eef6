#pragma once

#include <array>

#include "naesat/auxiliary.hpp"
#include "naesat/real.hpp"

namespace naesat {

// 4k+64 mantissa bits and tolerance 2^{-(2k+40)}.
long default_precision_bits(int k);
Real default_tol(int k);

struct ScalarState {
  int k = 0;
  Real d;
  Real q;       // 1 - qdot_f
  Real v;       // qhat_f / (qhat_0 + qhat_f)
  Real q_free;  // 1 - q
  Real v_rig;   // 1 - v
  Real Q;       // (q/2)^{k-1}
  Real residual;
  int iterations = 0;
};

// q_{d-1}(v) = (2 - 2v^{d-1}) / (2 - v^{d-1}) and v_{k-1}(q) = (1 - 2Q)/(1 - Q).
Real q_of_v(const Real& d, const Real& v);
Real v_of_q(int k, const Real& q);

// Iterates q -> q_{d-1}(v_{k-1}(q)) from q0. The map is increasing, so from
// q0 = 1 the orbit decreases to the largest fixed point. Throws
// NonConvergence if the residual is still above tol after max_iter steps.
ScalarState iterate_qv(int k, const Real& d, const Real& q0, const Real& tol, int max_iter = 10000);
ScalarState iterate_qv(int k, const Real& d);

// Degree at which q is a fixed point; q in (0,1).
Real d_of_q(int k, const Real& q);

// Laws on {rr, rf, fr, ff}.
struct RFLaw {
  std::array<Real, kRF> gdot;
  std::array<Real, kRF> ghat;
  Real zdot;
  Real zhat;
  Real residual;  // explicit r/f Bethe recursions, max norm after normalization
};

RFLaw rf_law_from_scalar(const ScalarState& s, const Real& tol);

// Right-hand sides of the explicit r/f recursions, normalized, with their
// normalizers.
RFLaw rf_bethe_image(int k, const Real& d, const RFLaw& g);

// Laws on the 7 spins.
struct MessageLaw {
  std::array<Real, kSpins> hdot;
  std::array<Real, kSpins> hhat;
  Real zdot;
  Real zhat;
};

// One application of both Bethe recursions with the literal-averaged clause
// factor, normalized; works for real d.
MessageLaw bethe_image(int k, const Real& d, const MessageLaw& h);
Real bethe_residual(int k, const Real& d, const MessageLaw& h);

// Checks the Bethe residual and 4 hhat_00 + 3 hhat_ff = 1 against tol.
MessageLaw lift_to_zof(int k, const Real& d, const RFLaw& g, const Real& tol);

MessageLaw relabel_01(const MessageLaw& h);

// Scalar state, r/f law and 7-spin law at one (k, d).
struct FixedPoint {
  ScalarState scalar;
  RFLaw rf;
  MessageLaw law;
};

FixedPoint solve_fixed_point(int k, const Real& d, const Real& tol, int max_iter = 10000);

// Pair laws on {0,1,f}^2, index 3a + b.
inline constexpr int kPairs = 9;
inline constexpr int pair_index(int a, int b) { return 3 * a + b; }

struct PairState {
  std::array<Real, kPairs> qdot;
  std::array<Real, kPairs> qhat;
  Real residual;
  int iterations = 0;
  bool in_regime = true;  // qdot({ff,rf,fr}) <= 8/2^k and |qdot_=/qdot_ne - 1| <= k/2^{k/2}
};

std::array<Real, kPairs> pair_clause_step(int k, const std::array<Real, kPairs>& qdot);
std::array<Real, kPairs> pair_variable_step(const Real& d, const std::array<Real, kPairs>& qhat);
bool pair_in_regime(int k, const std::array<Real, kPairs>& qdot);

// q* (x) q* from a scalar fixed point.
PairState pair_product(const ScalarState& s);

// qdot_= scaled by (1+eps/2), qdot_ne by (1-eps/2), then renormalized.
PairState pair_perturbed(const ScalarState& s, const Real& eps);

PairState pair_iterate(int k, const Real& d, const PairState& init, const Real& tol, int max_iter = 10000);

}  // namespace naesat
