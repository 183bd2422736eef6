#include <doctest.h>

#include <algorithm>
#include <map>

#include "gsharp_oracle.hpp"
#include "helpers.hpp"
#include "naesat/auxiliary.hpp"
#include "naesat/errors.hpp"

using namespace naesat;
using naesat::testing::contradiction;
using naesat::testing::make_instance;
using naesat::testing::random_instance;

namespace {

mpq_class frac(const mpz_class& num, const mpz_class& den) {
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

std::vector<Spin> spins_of(int code, int len) {
  std::vector<Spin> t(len);
  for (int i = 0; i < len; ++i) {
    t[i] = static_cast<Spin>(code % kSpins);
    code /= kSpins;
  }
  return t;
}

int ipow(int b, int e) {
  int r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

TEST_SUITE("auxiliary") {
  TEST_CASE("spin alphabet") {
    const char* names[kSpins] = {"0f", "00", "f0", "1f", "11", "f1", "ff"};
    for (int s = 0; s < kSpins; ++s) {
      CHECK(std::string(spin_name(static_cast<Spin>(s))) == names[s]);
      Spin back;
      REQUIRE(make_spin(spin_out(static_cast<Spin>(s)), spin_in(static_cast<Spin>(s)), back));
      CHECK(back == s);
      CHECK(spin_xor(spin_xor(static_cast<Spin>(s), 1), 1) == s);
    }
    Spin s;
    CHECK_FALSE(make_spin(0, 1, s));
    CHECK_FALSE(make_spin(1, 0, s));
    CHECK(spin_xor(S0f, 1) == S1f);
    CHECK(spin_xor(Sff, 1) == Sff);
    CHECK(project(S00) == RR);
    CHECK(project(S0f) == RFr);
    CHECK(project(Sf1) == FR);
  }

  TEST_CASE("vertex rule") {
    std::vector<std::uint8_t> fff{kFree, kFree, kFree}, zf{0, kFree}, zof{0, 1, kFree}, oo{1, 1};
    CHECK(vertex_rule(fff) == kFree);
    CHECK(vertex_rule(zf) == 0);
    CHECK(vertex_rule(zof) == kUnsat);
    CHECK(vertex_rule(oo) == 1);
  }

  TEST_CASE("clause rule") {
    std::vector<std::uint8_t> L0{0, 0, 0}, L1{0, 0, 1};
    std::vector<std::uint8_t> in11{1, 1}, in1f{1, kFree}, in10{1, 0}, in01{0, 1};
    CHECK(clause_rule(in11, L0, 0) == 0);
    CHECK(clause_rule(in1f, L0, 0) == kFree);
    CHECK(clause_rule(in10, L1, 0) == 0);
    CHECK(clause_rule(in01, L0, 0) == kFree);
  }

  TEST_CASE("r/f tables") {
    for (int k = 3; k <= 8; ++k) {
      CHECK(psi_hat_rf_numerator({0, k, 0, 0}, k) == (mpz_class(1) << k) - 2 - 2 * k);
      CHECK(factor_weight(FactorKind::ClauseRF, std::vector<Spin>(k, S0f)) ==
            frac((mpz_class(1) << k) - 2 - 2 * k, mpz_class(1) << k));
    }
    for (int d = 1; d <= 6; ++d) CHECK(factor_weight(FactorKind::VariableRF, std::vector<Spin>(d, Sff)) == 1);
  }

  TEST_CASE("literal-averaged clause factor depends only on the r/f projection") {
    for (int k = 3; k <= 4; ++k) {
      std::map<RFCounts, mpq_class> by_class;
      for (int code = 0; code < ipow(kSpins, k); ++code) {
        auto t = spins_of(code, k);
        mpq_class brute = psi_hat_literal_sum(t);
        SpinCounts c = count_spins(t);
        RFCounts rc = project_counts(c);
        CHECK(psi_hat(c) == brute);
        CHECK(frac(psi_hat_rf_numerator(rc, k), mpz_class(1) << k) == brute);
        auto [it, fresh] = by_class.emplace(rc, brute);
        if (!fresh) CHECK(it->second == brute);
      }
    }
  }

  TEST_CASE("factors are permutation invariant") {
    SplitMix64 rng(3);
    for (int t = 0; t < 300; ++t) {
      const int len = 3 + static_cast<int>(rng.below(4));
      std::vector<Spin> tup(len);
      for (auto& s : tup) s = static_cast<Spin>(rng.below(kSpins));
      auto perm = tup;
      for (int i = len - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
      for (auto kind : {FactorKind::Variable, FactorKind::ClauseCirc, FactorKind::Clause, FactorKind::VariableRF,
                        FactorKind::ClauseRF})
        CHECK(factor_weight(kind, tup) == factor_weight(kind, perm));
    }
  }

  TEST_CASE("frozen and auxiliary configurations correspond") {
    SplitMix64 rng(21);
    for (int t = 0; t < 120; ++t) {
      auto [n, d, k] = naesat::testing::tiny_shape(rng, 10);
      Instance inst = random_instance(n, d, k, rng.next());
      const auto& g = inst.graph;
      const auto& L = inst.literals;
      auto fe = enumerate_frozen(g, L, TruncationPolicy::unrestricted());
      for (const auto& f : fe.configs) {
        AuxConfig s = frozen_to_aux(g, L, f.eta);
        CHECK(is_valid_aux(g, L, s));
        CHECK(aux_to_frozen(g, s).eta == f.eta);
        for (int v = 0; v < n; ++v) {
          std::vector<std::uint8_t> in;
          for (int slot : g.var_slots(v)) in.push_back(spin_in(s.spins[slot]));
          CHECK(vertex_rule(in) != kUnsat);
        }
      }
      auto bij = aux_partition(g, L, TruncationPolicy::unrestricted(), AuxMethod::Bijection);
      CHECK(bij.count == fe.configs.size());
      if (g.edges() <= 16) {
        auto scan = aux_partition(g, L, TruncationPolicy::unrestricted(), AuxMethod::Scan, 16);
        CHECK(scan.count == fe.configs.size());
      }
      auto cut = enumerate_frozen(g, L, TruncationPolicy::standard(k));
      CHECK(aux_partition(g, L, TruncationPolicy::standard(k)).count == cut.configs.size());
    }
  }

  TEST_CASE("all-free maps to all-ff") {
    Instance inst = random_instance(6, 2, 3, 5);
    AuxConfig s = frozen_to_aux(inst.graph, inst.literals, std::vector<std::uint8_t>(6, kFree));
    CHECK(std::all_of(s.spins.begin(), s.spins.end(), [](Spin x) { return x == Sff; }));
  }

  TEST_CASE("partition function corner cases") {
    Instance c = contradiction();
    CHECK(aux_partition(c.graph, c.literals, TruncationPolicy::standard(3)).count == 0);
    CHECK(aux_partition(c.graph, c.literals, TruncationPolicy::unrestricted()).count >= 1);
  }

  TEST_CASE("completion of a fully rigid configuration") {
    Instance ff = make_instance(2, 3, 3, {0, 1, 1, 1, 0, 0}, {0, 0, 0, 0, 0, 0});
    CompletionResult r = complete_to_solution(ff.graph, ff.literals, {0, 1}, 1);
    CHECK(r.ok);
    CHECK(r.x == Assignment{0, 1});
  }

  TEST_CASE("two-cycle component is reported") {
    Instance ff = make_instance(2, 3, 3, {0, 1, 1, 1, 0, 0}, {0, 0, 0, 0, 0, 0});
    std::vector<std::uint8_t> eta{kFree, kFree};
    REQUIRE(naesat::testing::max_gsharp_cycles(ff.graph, ff.literals, eta) >= 2);
    CompletionResult r = complete_to_solution(ff.graph, ff.literals, eta, 1);
    CHECK_FALSE(r.ok);
    CHECK(r.component_vars == std::vector<int>{0, 1});
    CHECK(r.component_clauses == std::vector<int>{0, 1});
  }

  TEST_CASE("completion succeeds on at most unicyclic G#") {
    SplitMix64 rng(99);
    int tried = 0;
    for (int t = 0; t < 200; ++t) {
      auto [n, d, k] = naesat::testing::tiny_shape(rng, 10);
      Instance inst = random_instance(n, d, k, rng.next());
      for (const auto& f : enumerate_frozen(inst.graph, inst.literals, TruncationPolicy::unrestricted()).configs) {
        const int cycles = naesat::testing::max_gsharp_cycles(inst.graph, inst.literals, f.eta);
        CompletionResult r = complete_to_solution(inst.graph, inst.literals, f.eta, rng.next());
        if (cycles <= 1) {
          ++tried;
          CHECK(r.ok);
          CHECK(is_nae_solution(inst.graph, inst.literals, r.x));
          for (int v = 0; v < n; ++v)
            if (f.eta[v] != kFree) CHECK(r.x[v] == f.eta[v]);
          FrozenConfig back = coarsen(inst.graph, inst.literals, r.x);
          for (int v = 0; v < n; ++v)
            if (f.eta[v] != kFree) CHECK(back.eta[v] == f.eta[v]);
        } else {
          CHECK_FALSE(r.ok);
        }
      }
    }
    CHECK(tried > 50);
  }

  TEST_CASE("invalid frozen input is rejected") {
    Instance none = make_instance(4, 1, 4, {0, 1, 2, 3}, {0, 0, 0, 0});
    CHECK_THROWS_AS(complete_to_solution(none.graph, none.literals, {0, 0, 1, 1}, 1), InputError);
  }
}
