#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "naesat/graphs.hpp"
#include "naesat/real.hpp"

namespace naesat {

using Assignment = std::vector<std::uint8_t>;

struct SolutionCount {
  std::uint64_t Z = 0;
  std::vector<Assignment> solutions;  // filled only when requested
};

// Slot-wise L_{a,j} xor x_{v(a,j)}.
std::vector<std::uint8_t> evaluate_clause(const FactorGraph& g, const LiteralAssignment& L, const Assignment& x, int a);

bool is_nae_solution(const FactorGraph& g, const LiteralAssignment& L, const Assignment& x);

// Exhaustive Gray-code scan of the assignments with x_{n-1} = 0; each hit is
// counted twice through its negation.
SolutionCount count_solutions(const FactorGraph& g, const LiteralAssignment& L, int limit_n = 30,
                              bool keep_solutions = false);

struct DecideOptions {
  std::uint64_t node_budget = 10'000'000;
};

struct DecideResult {
  bool sat = false;
  std::uint64_t nodes = 0;
  Assignment witness;  // a solution when sat
};

// DPLL: NAE unit propagation, most-constrained variable first, ties by index.
DecideResult decide(const FactorGraph& g, const LiteralAssignment& L, DecideOptions opt = {});
bool decide_exists(const FactorGraph& g, const LiteralAssignment& L, DecideOptions opt = {});

struct ExpectedZ {
  mpq_class exact;  // 2^n (1 - 2/2^k)^m
  Real log_value;   // log of exact
};

ExpectedZ expected_Z(int n, int m, int k);

// Mean of Z over all 2^{mk} literal vectors, by brute force.
mpq_class literal_average_Z(const FactorGraph& g, int limit_edges = 20);

}  // namespace naesat
