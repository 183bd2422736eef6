#include <doctest.h>

#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "naesat/errors.hpp"
#include "naesat/frozen.hpp"

using namespace naesat;
using naesat::testing::contradiction;
using naesat::testing::make_instance;
using naesat::testing::random_instance;

namespace {

// x = (0,1) is a solution in which each variable is forced by one clause.
Instance fully_forced() { return make_instance(2, 3, 3, {0, 1, 1, 1, 0, 0}, {0, 0, 0, 0, 0, 0}); }

std::vector<std::uint8_t> all_free(int n) { return std::vector<std::uint8_t>(n, kFree); }

}  // namespace

TEST_SUITE("frozen") {
  TEST_CASE("forcing edges") {
    Instance a = make_instance(3, 1, 3, {0, 1, 2}, {0, 0, 0});
    CHECK(is_forcing_edge(a.graph, a.literals, {0, 1, 1}, 0));
    CHECK_FALSE(is_forcing_edge(a.graph, a.literals, {0, 1, 1}, 1));
    CHECK_FALSE(is_forcing_edge(a.graph, a.literals, {0, 1, kFree}, 0));
    // (v,v,w,w) with eta_v != eta_w and L = 0: the repeated slot disagrees with itself.
    Instance rep = make_instance(2, 2, 4, {0, 0, 1, 1}, {0, 0, 0, 0});
    for (int s = 0; s < 4; ++s) CHECK_FALSE(is_forcing_edge(rep.graph, rep.literals, {0, 1}, s));
    // (v,w,w) has slot 0 forcing v.
    Instance vw = make_instance(2, 3, 3, {0, 1, 1, 1, 0, 0}, {0, 0, 0, 0, 0, 0});
    CHECK(is_forcing_edge(vw.graph, vw.literals, {0, 1}, 0));
  }

  TEST_CASE("coarsening corner cases") {
    Instance ff = fully_forced();
    REQUIRE(is_nae_solution(ff.graph, ff.literals, {0, 1}));
    CHECK(coarsen(ff.graph, ff.literals, {0, 1}).eta == std::vector<std::uint8_t>{0, 1});
    Instance none = make_instance(4, 1, 4, {0, 1, 2, 3}, {0, 0, 0, 0});
    FrozenConfig c = coarsen(none.graph, none.literals, {0, 0, 1, 1});
    CHECK(c.eta == all_free(4));
    CHECK(c.free_count == 4);
    CHECK_THROWS_AS(coarsen(none.graph, none.literals, {0, 0, 0, 0}), InputError);
  }

  TEST_CASE("validity of special configurations") {
    SplitMix64 rng(12);
    for (int t = 0; t < 50; ++t) {
      Instance inst = random_instance(6, 2, 3, rng.next());
      CHECK(is_valid_frozen(inst.graph, inst.literals, all_free(6)));
    }
    // x = (0,0,1,1) solves the single 4-clause but no variable is forced.
    Instance none = make_instance(4, 1, 4, {0, 1, 2, 3}, {0, 0, 0, 0});
    CHECK_FALSE(is_valid_frozen(none.graph, none.literals, {0, 0, 1, 1}, FrozenRules::Literal));
    Instance ff = fully_forced();
    CHECK(is_valid_frozen(ff.graph, ff.literals, {0, 1}));
  }

  TEST_CASE("coarsened solutions are valid under both rule sets") {
    SplitMix64 rng(77);
    int seen = 0;
    for (int t = 0; t < 200; ++t) {
      auto [n, d, k] = naesat::testing::tiny_shape(rng, 10);
      Instance inst = random_instance(n, d, k, rng.next());
      for (const auto& x : count_solutions(inst.graph, inst.literals, 30, true).solutions) {
        FrozenConfig c = coarsen(inst.graph, inst.literals, x);
        CHECK(is_valid_frozen(inst.graph, inst.literals, c.eta, FrozenRules::Closed));
        CHECK(is_valid_frozen(inst.graph, inst.literals, c.eta, FrozenRules::Literal));
        CHECK(c.free_count == std::count(c.eta.begin(), c.eta.end(), kFree));
        for (int v = 0; v < n; ++v)
          if (c.eta[v] != kFree) CHECK(c.eta[v] == x[v]);
        ++seen;
      }
    }
    CHECK(seen > 100);
  }

  TEST_CASE("truncation thresholds") {
    CHECK(TruncationPolicy::standard(3).beta_max == mpq_class(7, 8));
    CHECK(TruncationPolicy::standard(4).free_limit(10) == 4);
    CHECK(TruncationPolicy::unrestricted().free_limit(10) == 10);
    Instance c = contradiction();
    CHECK(enumerate_frozen(c.graph, c.literals, TruncationPolicy::standard(3)).configs.empty());
    auto all = enumerate_frozen(c.graph, c.literals, TruncationPolicy::unrestricted());
    REQUIRE(all.configs.size() == 1);
    CHECK(all.configs[0].eta == all_free(1));
    SplitMix64 rng(4);
    for (int t = 0; t < 30; ++t) {
      Instance inst = random_instance(8, 3, 4, rng.next());
      auto full = enumerate_frozen(inst.graph, inst.literals, TruncationPolicy::unrestricted());
      auto cut = enumerate_frozen(inst.graph, inst.literals, TruncationPolicy::standard(4));
      CHECK(std::count_if(full.configs.begin(), full.configs.end(),
                          [](const FrozenConfig& f) { return f.eta == all_free(8); }) == 1);
      for (const auto& f : cut.configs) CHECK(f.free_count <= cut.free_limit);
      CHECK(cut.configs.size() <= full.configs.size());
    }
    Instance big = random_instance(15, 3, 3, 1);
    CHECK_THROWS_AS(enumerate_frozen(big.graph, big.literals, TruncationPolicy::unrestricted()), SizeGuardError);
  }

  TEST_CASE("every valid configuration has at most one forcing slot per clause") {
    SplitMix64 rng(31);
    for (int t = 0; t < 60; ++t) {
      auto [n, d, k] = naesat::testing::tiny_shape(rng, 8);
      Instance inst = random_instance(n, d, k, rng.next());
      for (const auto& f : enumerate_frozen(inst.graph, inst.literals, TruncationPolicy::unrestricted()).configs)
        for (int a = 0; a < inst.graph.m(); ++a) {
          int forcing = 0;
          for (int j = 0; j < k; ++j) forcing += is_forcing_edge(inst.graph, inst.literals, f.eta, a * k + j);
          CHECK(forcing <= 1);
        }
    }
  }

  TEST_CASE("cluster preimages partition the solutions") {
    Instance ff = fully_forced();
    CHECK(cluster_preimage(ff.graph, ff.literals, {0, 1}) == std::vector<Assignment>{{0, 1}});
    CHECK(cluster_preimage(ff.graph, ff.literals, {0, 0}).empty());
    SplitMix64 rng(8);
    for (int t = 0; t < 100; ++t) {
      auto [n, d, k] = naesat::testing::tiny_shape(rng, 10);
      Instance inst = random_instance(n, d, k, rng.next());
      auto sols = count_solutions(inst.graph, inst.literals, 30, true).solutions;
      std::set<Assignment> all(sols.begin(), sols.end());
      std::set<Assignment> covered;
      std::size_t total = 0;
      for (const auto& f : enumerate_frozen(inst.graph, inst.literals, TruncationPolicy::unrestricted()).configs) {
        for (const auto& x : cluster_preimage(inst.graph, inst.literals, f.eta)) {
          covered.insert(x);
          ++total;
          CHECK(coarsen(inst.graph, inst.literals, x).eta == f.eta);
        }
      }
      CHECK(total == covered.size());
      CHECK(covered == all);
    }
  }
}
