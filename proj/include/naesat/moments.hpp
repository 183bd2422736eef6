#pragma once

#include <optional>
#include <vector>

#include "naesat/linalg.hpp"
#include "naesat/real.hpp"
#include "naesat/recursions.hpp"

namespace naesat {

// First moment of the NAE-SAT partition function: log 2 + (d/k) log(1 - 2/2^k).
Real phi_first(int k, const Real& d);

struct Thresholds {
  Real d_fm;   // zero of phi_first
  Real d_lbd;  // (2^{k-1} - 2) k log 2
  Real d_ubd;  // 2^{k-1} k log 2
};

Thresholds thresholds(int k);

Real binary_entropy(const Real& p);

// Second-moment exponent of the overlap alpha, and its two-variable form.
Real abar(int k, const Real& d, const Real& alpha);
Real a_full(int k, const Real& d, const Real& alpha, const Real& gamma);
Real gamma_star(int k, const Real& alpha);

struct FreeDensityPoint {
  Real y;  // exponent
  Real u;  // tilt
};

FreeDensityPoint free_density_exponent(int k, const Real& d, const Real& beta);

// Empirical measure stored by permutation class: every ordered tuple of a
// class has the same probability `prob` and factor weight `weight`.
struct TupleClass {
  std::vector<int> counts;  // occurrences of each edge spin
  Real multiplicity;         // number of ordered tuples in the class
  Real prob;
  Real weight;
};

struct EmpiricalMeasure {
  int k = 0;
  int d = 0;
  int alphabet = kSpins;
  std::vector<TupleClass> var;
  std::vector<TupleClass> clause;
  std::vector<Real> vh;      // edge marginal, from the variable side
  bool complete = true;      // false if negligible variable classes were dropped
  Real zdot_bar, zhat_bar, z_bar;
  bool has_normalizers = false;
};

// Builds (hdot_bar, hhat_bar, vh) from messages; d must be an integer. Variable
// classes are enumerated completely when d <= full_limit, otherwise the tail
// below 2^{-(bits+20)} is dropped. Throws ConsistencyError if
// z_bar = zdot_bar/zdot = zhat_bar/zhat fails by more than tol.
EmpiricalMeasure empirical_from_law(int k, int d, const MessageLaw& h, const Real& tol, int full_limit = 4096);

EmpiricalMeasure relabel_01(const EmpiricalMeasure& m);

// Edge marginal seen from the clause side.
std::vector<Real> clause_marginal(const EmpiricalMeasure& m);

struct RatePoint {
  Real phi;
  std::optional<Real> zdot_bar, zhat_bar, z_bar;
  std::optional<Real> bethe_normalizer_form;  // log zdot_bar + (d/k) log zhat_bar - d log z_bar
  std::optional<Real> log_prefactor;           // only for a complete enumeration
  std::optional<Real> dimension;               // sdot + shat - sbar - 1
};

RatePoint phi_bethe(const EmpiricalMeasure& m, const Real& tol);

// Explicit exponent at the scalar fixed point.
Real phi_star_explicit(const ScalarState& s);

struct PhiStar {
  Real phi;
  ScalarState scalar;
};

PhiStar phi_star(int k, const Real& d, const Real& tol, int max_iter = 10000);

// Normalizers of the r/f and 0/1/f models at the fixed point.
struct Normalizers {
  Real zdot_bar_g, zhat_bar_g, z_bar_g;
  Real zdot_bar_g_closed, zhat_bar_g_closed, z_bar_g_closed;  // in terms of q_free, v_rig
  Real phi_g;  // log zdot_bar_g + (d/k) log zhat_bar_g - d log z_bar_g
};

Normalizers normalizers(const FixedPoint& fp);

struct DStar {
  Real d_star;
  Real phi_star;
  ScalarState scalar;
  int iterations = 0;
  Real bracket_width;
};

// Bisection of phi_star on [d_lbd, d_ubd]; throws NonConvergence if the ends
// do not have opposite signs.
DStar find_d_star(int k, const Real& tol, const Real& d_tol = Real(1e-12), int max_bisect = 200);

// Transition matrices of an empirical measure and their pair versions.
struct ExplicitTables {
  std::vector<Real> vh;
  Matrix Mdot, Mhat, Mhat0;
  Real a, b, lambda, delta, gamma, eps, B;
};

ExplicitTables explicit_tables(const ScalarState& s);

struct SpectralReport {
  std::vector<Real> vh;
  Matrix Mdot, Mhat, Mhat0, Mhat1;
  Matrix Ldot, Lhat, L, F;
  std::vector<Real> vh2;
  Matrix Mdot2, Mhat2;
  Matrix Ldot2, Lhat2, L2, F2;
  std::vector<Real> eig_Mdot;  // ascending, from the symmetrized matrix
  Real stochastic_error;       // max |row sum - 1| over Mdot, Mhat, Mhat0, Mhat1
  Real reversibility_error;    // max |vh_i M_ij - vh_j M_ji|
  Real mhat_split_error;       // |Mhat - (Mhat0 + Mhat1)/2|
  bool with_pairs = false;
};

SpectralReport transition_matrices(const EmpiricalMeasure& m, bool with_pairs = true);

struct HessianVerdict {
  std::vector<Real> sigma_min;  // Ldot, Lhat, L, Ldot2, Lhat2, L2
  bool nonsingular = false;
  std::vector<Real> F_restricted;   // spectrum of F orthogonal to vh^{1/2}
  std::vector<Real> F2_restricted;
  Real F_asymmetry, F2_asymmetry;
  Real F_product_form_error;        // |F - H^{1/2} Ldot^{-1} L Lhat^{-1} H^{-1/2}|
  // Largest eigenvalue of the restricted Hessian form -F (scale dk dropped).
  Real hessian_max, hessian2_max;
  bool negative_definite = false;
  bool pair_negative_definite = false;
};

HessianVerdict hessian_definiteness(const SpectralReport& r);

// Pair clause factor 2^{-k} sum_L psi_hat_circ(s1 xor L) psi_hat_circ(s2 xor L)
// for a tuple given by counts over the 49 pair spins 7 s1 + s2.
Real pair_clause_weight(int k, const std::vector<int>& pair_counts);

// Pair measure concentrated on (sigma, sigma xor x).
EmpiricalMeasure identical_pair_measure(const EmpiricalMeasure& m, int x);

struct PairRate {
  Real product;             // from a converged pair state via the Bethe normalizers
  std::optional<Real> product_literal_sum;  // same, clause sum over all 2^k literal vectors
  Real identical0, identical1;
  Real phi_star;
};

Real pair_product_rate(int k, const Real& d, const PairState& p, bool literal_sum = false);

PairRate pair_rate(int k, int d, const FixedPoint& fp, const PairState& p, const Real& tol);

}  // namespace naesat
