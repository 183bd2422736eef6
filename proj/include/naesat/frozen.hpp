#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "naesat/graphs.hpp"
#include "naesat/naesat_core.hpp"

namespace naesat {

// Spin values of a frozen configuration.
inline constexpr std::uint8_t kZero = 0;
inline constexpr std::uint8_t kOne = 1;
inline constexpr std::uint8_t kFree = 2;

struct FrozenConfig {
  std::vector<std::uint8_t> eta;
  int free_count = 0;

  static FrozenConfig from_eta(std::vector<std::uint8_t> eta);
  friend bool operator==(const FrozenConfig&, const FrozenConfig&) = default;
};

struct TruncationPolicy {
  mpq_class beta_max;

  static TruncationPolicy standard(int k);  // 7/2^k
  static TruncationPolicy unrestricted();   // 1
  int free_limit(int n) const;               // floor(n * beta_max)
};

// True iff every slot of the clause is rigid and every other slot w satisfies
// L_av xor eta_v = not(L_aw xor eta_w). Slots are compared individually, so a
// repeated variable counts once per slot.
bool is_forcing_edge(const FactorGraph& g, const LiteralAssignment& L, const std::vector<std::uint8_t>& eta,
                     int clause_slot);

bool is_forced(const FactorGraph& g, const LiteralAssignment& L, const std::vector<std::uint8_t>& eta, int v);

// Frees the lowest-index unforced rigid variable until none is left.
FrozenConfig coarsen(const FactorGraph& g, const LiteralAssignment& L, const Assignment& x);

enum class FrozenRules {
  Literal,  // (a) no unsatisfied clause, (b) rigid iff forced
  Closed,   // additionally no clause whose single free slot would be forced by its rigid slots
};

bool is_valid_frozen(const FactorGraph& g, const LiteralAssignment& L, const std::vector<std::uint8_t>& eta,
                     FrozenRules rules = FrozenRules::Closed);

struct FrozenEnumeration {
  std::vector<FrozenConfig> configs;
  std::uint64_t truncated_count = 0;
  int free_limit = 0;
};

FrozenEnumeration enumerate_frozen(const FactorGraph& g, const LiteralAssignment& L, const TruncationPolicy& policy,
                                   int limit_n = 12, FrozenRules rules = FrozenRules::Closed);

// Solutions whose coarsening is eta.
std::vector<Assignment> cluster_preimage(const FactorGraph& g, const LiteralAssignment& L,
                                         const std::vector<std::uint8_t>& eta, int limit_n = 30);

}  // namespace naesat
