#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "naesat/frozen.hpp"
#include "naesat/graphs.hpp"

namespace naesat {

// Edge spin (out, in) = (sigma_{v->a}, sigma_{a->v}) in the fixed order
// 0f, 00, f0, 1f, 11, f1, ff.
enum Spin : std::uint8_t { S0f = 0, S00 = 1, Sf0 = 2, S1f = 3, S11 = 4, Sf1 = 5, Sff = 6 };
inline constexpr int kSpins = 7;

// r/f letters in the order rr, rf, fr, ff.
enum RF : std::uint8_t { RR = 0, RFr = 1, FR = 2, FF = 3 };
inline constexpr int kRF = 4;

using SpinCounts = std::array<int, kSpins>;
using RFCounts = std::array<int, kRF>;

std::uint8_t spin_out(Spin s);
std::uint8_t spin_in(Spin s);
bool make_spin(std::uint8_t out, std::uint8_t in, Spin& s);
Spin spin_xor(Spin s, int bit);  // both coordinates, with not(f) = f
RF project(Spin s);
const char* spin_name(Spin s);
const char* rf_name(RF r);

SpinCounts count_spins(std::span<const Spin> tuple);
RFCounts project_counts(const SpinCounts& c);

inline constexpr std::uint8_t kUnsat = 3;

// f if every message is f; x if some message is x and none is not(x); else UNSAT.
std::uint8_t vertex_rule(std::span<const std::uint8_t> messages);

// Message from the clause to slot target_slot given the k-1 incoming messages
// of the other slots (in slot order) and the k literals of the clause.
std::uint8_t clause_rule(std::span<const std::uint8_t> incoming, std::span<const std::uint8_t> literals,
                         int target_slot);

// Factor tables, all evaluated on permutation classes.
int psi_dot(const SpinCounts& c);            // variable factor, {0,1}
int psi_hat_circ(const SpinCounts& c);       // clause factor at L = 0, {0,1}
int psi_dot_rf(const RFCounts& c);           // r/f variable factor, {0,1,2}
mpz_class psi_hat_rf_numerator(const RFCounts& c, int k);  // r/f clause factor times 2^k
mpq_class psi_hat(const SpinCounts& c);      // literal-averaged clause factor via projection

// 2^{-k} sum over all literal vectors of psi_hat_circ(tuple xor L), by brute force.
mpq_class psi_hat_literal_sum(std::span<const Spin> tuple);

enum class FactorKind { Variable, ClauseCirc, Clause, VariableRF, ClauseRF };

mpq_class factor_weight(FactorKind kind, std::span<const Spin> tuple);

// Spin on every edge, indexed by clause slot.
struct AuxConfig {
  std::vector<Spin> spins;
  friend bool operator==(const AuxConfig&, const AuxConfig&) = default;
};

bool is_valid_aux(const FactorGraph& g, const LiteralAssignment& L, const AuxConfig& sigma);

AuxConfig frozen_to_aux(const FactorGraph& g, const LiteralAssignment& L, const std::vector<std::uint8_t>& eta);
FrozenConfig aux_to_frozen(const FactorGraph& g, const AuxConfig& sigma);

enum class AuxMethod { Auto, Scan, Bijection };

struct AuxPartition {
  std::uint64_t count = 0;
  AuxMethod method = AuxMethod::Scan;
};

AuxPartition aux_partition(const FactorGraph& g, const LiteralAssignment& L, const TruncationPolicy& policy,
                           AuxMethod method = AuxMethod::Auto, int scan_edge_limit = 24, int limit_n = 12);

struct CompletionResult {
  bool ok = false;
  Assignment x;
  std::vector<int> component_vars;     // failing component when !ok
  std::vector<int> component_clauses;
  std::string reason;
};

CompletionResult complete_to_solution(const FactorGraph& g, const LiteralAssignment& L,
                                      const std::vector<std::uint8_t>& eta, std::uint64_t seed);

}  // namespace naesat
