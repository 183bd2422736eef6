#pragma once

#include <cstdint>
#include <vector>

#include "naesat/graphs.hpp"
#include "naesat/rng.hpp"

namespace naesat::testing {

inline Instance make_instance(int n, int d, int k, std::vector<int> clause_vars, std::vector<std::uint8_t> lits) {
  Instance inst;
  inst.graph = FactorGraph::from_clause_vars(n, d, k, std::move(clause_vars));
  inst.literals.bits = std::move(lits);
  return inst;
}

inline Instance random_instance(int n, int d, int k, std::uint64_t seed) {
  Instance inst;
  inst.graph = generate_graph(n, d, k, derive_seed(seed, 0));
  inst.literals = generate_literals(inst.graph, derive_seed(seed, 1));
  return inst;
}

// One variable in all three slots of one clause with equal literals: every
// assignment evaluates to a constant clause.
inline Instance contradiction() { return make_instance(1, 3, 3, {0, 0, 0}, {0, 0, 0}); }

// Random tiny (n, d, k) with k in {3,4}, n <= n_max and n*d divisible by k.
struct TinyShape {
  int n, d, k;
};

inline TinyShape tiny_shape(SplitMix64& rng, int n_max = 10) {
  while (true) {
    int k = 3 + static_cast<int>(rng.below(2));
    int d = 2 + static_cast<int>(rng.below(3));
    int n = 2 + static_cast<int>(rng.below(n_max - 1));
    if (n * d % k == 0) return {n, d, k};
  }
}

}  // namespace naesat::testing
