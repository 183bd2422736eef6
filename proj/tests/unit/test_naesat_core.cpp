#include <doctest.h>

#include "helpers.hpp"
#include "naesat/errors.hpp"
#include "naesat/moments.hpp"
#include "naesat/naesat_core.hpp"

using namespace naesat;
using naesat::testing::contradiction;
using naesat::testing::make_instance;
using naesat::testing::random_instance;

TEST_SUITE("naesat_core") {
  TEST_CASE("clause evaluation is slot-wise xor") {
    Instance a = make_instance(3, 1, 3, {0, 1, 2}, {0, 0, 0});
    CHECK(evaluate_clause(a.graph, a.literals, {1, 0, 1}, 0) == std::vector<std::uint8_t>{1, 0, 1});
    a.literals.bits = {1, 1, 1};
    CHECK(evaluate_clause(a.graph, a.literals, {1, 0, 1}, 0) == std::vector<std::uint8_t>{0, 1, 0});
    Instance rep = make_instance(2, 3, 3, {0, 0, 1, 1, 1, 0}, {0, 1, 0, 0, 0, 0});
    CHECK(evaluate_clause(rep.graph, rep.literals, {1, 0}, 0) == std::vector<std::uint8_t>{1, 0, 0});
  }

  TEST_CASE("nae solution predicate") {
    Instance a = make_instance(3, 1, 3, {0, 1, 2}, {0, 0, 0});
    CHECK_FALSE(is_nae_solution(a.graph, a.literals, {0, 0, 0}));
    CHECK_FALSE(is_nae_solution(a.graph, a.literals, {1, 1, 1}));
    CHECK(is_nae_solution(a.graph, a.literals, {0, 1, 0}));
    SplitMix64 rng(3);
    for (int t = 0; t < 200; ++t) {
      Instance inst = random_instance(6, 2, 3, rng.next());
      Assignment x(6), nx(6);
      for (int v = 0; v < 6; ++v) {
        x[v] = static_cast<std::uint8_t>(rng.bit());
        nx[v] = x[v] ^ 1;
      }
      CHECK(is_nae_solution(inst.graph, inst.literals, x) == is_nae_solution(inst.graph, inst.literals, nx));
    }
  }

  TEST_CASE("counts on hand-sized instances") {
    CHECK(count_solutions(contradiction().graph, contradiction().literals).Z == 0);
    Instance mixed = make_instance(1, 3, 3, {0, 0, 0}, {0, 1, 0});
    CHECK(count_solutions(mixed.graph, mixed.literals).Z == 2);
    Instance big = random_instance(33, 3, 3, 1);
    CHECK_THROWS_AS(count_solutions(big.graph, big.literals), SizeGuardError);
  }

  TEST_CASE("solution list matches the count and is even") {
    SplitMix64 rng(44);
    for (int t = 0; t < 100; ++t) {
      Instance inst = random_instance(9, 3, 3, rng.next());
      SolutionCount c = count_solutions(inst.graph, inst.literals, 30, true);
      CHECK(c.Z % 2 == 0);
      CHECK(c.solutions.size() == c.Z);
      for (const auto& x : c.solutions) CHECK(is_nae_solution(inst.graph, inst.literals, x));
    }
  }

  TEST_CASE("decide agrees with count") {
    SplitMix64 rng(5);
    for (int t = 0; t < 200; ++t) {
      auto [n, d, k] = naesat::testing::tiny_shape(rng, 12);
      Instance inst = random_instance(n, d, k, rng.next());
      const bool sat = count_solutions(inst.graph, inst.literals).Z > 0;
      DecideResult r = decide(inst.graph, inst.literals);
      CHECK(r.sat == sat);
      if (r.sat) CHECK(is_nae_solution(inst.graph, inst.literals, r.witness));
    }
    CHECK_FALSE(decide_exists(contradiction().graph, contradiction().literals));
    FactorGraph empty = FactorGraph::from_clause_vars(4, 0, 3, {});
    CHECK(decide_exists(empty, LiteralAssignment{}));
  }

  TEST_CASE("decide budget") {
    Instance inst = random_instance(30, 6, 3, 8);
    CHECK_THROWS_AS(decide(inst.graph, inst.literals, {1}), BudgetExhausted);
  }

  TEST_CASE("expected Z closed form") {
    ExpectedZ e = expected_Z(3, 2, 3);
    CHECK(e.exact == mpq_class(9, 2));
    CHECK(abs(e.log_value - log(Real(4.5))) < Real(1e-15));
    PrecisionGuard g(128);
    Thresholds th = thresholds(10);
    CHECK(abs(phi_first(10, th.d_fm)) < Real(1e-30));
  }

  TEST_CASE("literal average equals the first moment on a simple graph") {
    // n=3, d=2, k=3: clauses (v0 v1 v2), (v0 v1 v2).
    FactorGraph g = FactorGraph::from_clause_vars(3, 2, 3, {0, 1, 2, 0, 1, 2});
    REQUIRE(g.is_simple());
    CHECK(literal_average_Z(g) == mpq_class(9, 2));
    SplitMix64 rng(6);
    int checked = 0;
    while (checked < 20) {
      auto [n, d, k] = naesat::testing::tiny_shape(rng, 9);
      FactorGraph h = generate_graph(n, d, k, rng.next());
      if (!h.is_simple() || h.edges() > 18) continue;
      CHECK(literal_average_Z(h) == expected_Z(n, h.m(), k).exact);
      ++checked;
    }
  }

  TEST_CASE("flipping all literals of one clause preserves Z") {
    SplitMix64 rng(9);
    for (int t = 0; t < 50; ++t) {
      Instance inst = random_instance(8, 3, 4, rng.next());
      auto Z = count_solutions(inst.graph, inst.literals).Z;
      const int a = static_cast<int>(rng.below(inst.graph.m()));
      for (int j = 0; j < 4; ++j) inst.literals.bits[a * 4 + j] ^= 1;
      CHECK(count_solutions(inst.graph, inst.literals).Z == Z);
    }
  }
}
