#include "naesat/naesat_core.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "naesat/errors.hpp"

namespace naesat {

std::vector<std::uint8_t> evaluate_clause(const FactorGraph& g, const LiteralAssignment& L, const Assignment& x,
                                          int a) {
  std::vector<std::uint8_t> out(g.k());
  for (int j = 0; j < g.k(); ++j) {
    int s = a * g.k() + j;
    out[j] = static_cast<std::uint8_t>(L.bits[s] ^ x[g.var_at(s)]);
  }
  return out;
}

bool is_nae_solution(const FactorGraph& g, const LiteralAssignment& L, const Assignment& x) {
  const int k = g.k();
  for (int a = 0; a < g.m(); ++a) {
    int ones = 0;
    for (int j = 0; j < k; ++j) {
      int s = a * k + j;
      ones += L.bits[s] ^ x[g.var_at(s)];
    }
    if (ones == 0 || ones == k) return false;
  }
  return true;
}

SolutionCount count_solutions(const FactorGraph& g, const LiteralAssignment& L, int limit_n, bool keep_solutions) {
  const int n = g.n();
  const int k = g.k();
  if (n > limit_n || n > 62) throw SizeGuardError("count_solutions: n=" + std::to_string(n) + " exceeds limit");
  SolutionCount out;
  Assignment x(n, 0);
  if (n == 0) {
    if (is_nae_solution(g, L, x)) {
      out.Z = 1;
      if (keep_solutions) out.solutions.push_back(x);
    }
    return out;
  }
  std::vector<int> ones(g.m(), 0);
  for (int s = 0; s < g.edges(); ++s) ones[s / k] += L.bits[s];
  int bad = 0;
  for (int a = 0; a < g.m(); ++a) bad += (ones[a] == 0 || ones[a] == k);
  auto record = [&]() {
    if (bad != 0) return;
    out.Z += 2;
    if (keep_solutions) {
      out.solutions.push_back(x);
      Assignment neg(x);
      for (auto& b : neg) b ^= 1;
      out.solutions.push_back(std::move(neg));
    }
  };
  record();
  const std::uint64_t total = std::uint64_t{1} << (n - 1);
  for (std::uint64_t i = 1; i < total; ++i) {
    int v = std::countr_zero(i);
    x[v] ^= 1;
    for (int s : g.var_slots(v)) {
      int a = s / k;
      int before = (ones[a] == 0 || ones[a] == k);
      ones[a] += (L.bits[s] ^ x[v]) ? 1 : -1;
      int after = (ones[a] == 0 || ones[a] == k);
      bad += after - before;
    }
    record();
  }
  return out;
}

namespace {

class Dpll {
 public:
  Dpll(const FactorGraph& g, const LiteralAssignment& L, std::uint64_t budget)
      : g_(g), L_(L), budget_(budget), x_(g.n(), -1) {}

  bool run() {
    if (g_.n() == 0) return is_nae_solution(g_, L_, Assignment{});
    // Negation symmetry lets the first variable be fixed to 0.
    std::vector<int> trail;
    if (!assign(0, 0, trail) || !propagate(trail)) return false;
    return search();
  }

  std::uint64_t nodes() const { return nodes_; }

  Assignment witness() const {
    Assignment w(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) w[i] = static_cast<std::uint8_t>(x_[i] < 0 ? 0 : x_[i]);
    return w;
  }

 private:
  // Returns false on an immediate conflict in a clause touched by v.
  bool assign(int v, int val, std::vector<int>& trail) {
    x_[v] = val;
    trail.push_back(v);
    const int k = g_.k();
    for (int s : g_.var_slots(v)) {
      int a = s / k;
      if (!clause_ok(a)) return false;
    }
    return true;
  }

  void undo(std::vector<int>& trail, std::size_t mark) {
    while (trail.size() > mark) {
      x_[trail.back()] = -1;
      trail.pop_back();
    }
  }

  bool clause_ok(int a) const {
    int zeros = 0, ones = 0, open = 0;
    for (int j = 0; j < g_.k(); ++j) {
      int s = a * g_.k() + j;
      int xv = x_[g_.var_at(s)];
      if (xv < 0) {
        ++open;
      } else if (L_.bits[s] ^ xv) {
        ++ones;
      } else {
        ++zeros;
      }
    }
    return open > 0 || (zeros > 0 && ones > 0);
  }

  bool propagate(std::vector<int>& trail) {
    const int k = g_.k();
    bool changed = true;
    while (changed) {
      changed = false;
      for (int a = 0; a < g_.m(); ++a) {
        int zeros = 0, ones = 0, open = 0, open_slot = -1;
        for (int j = 0; j < k; ++j) {
          int s = a * k + j;
          int xv = x_[g_.var_at(s)];
          if (xv < 0) {
            ++open;
            open_slot = s;
          } else if (L_.bits[s] ^ xv) {
            ++ones;
          } else {
            ++zeros;
          }
        }
        if (open == 0) {
          if (zeros == 0 || ones == 0) return false;
          continue;
        }
        if (open == 1 && (zeros == 0 || ones == 0)) {
          int need = zeros == 0 ? 0 : 1;
          int v = g_.var_at(open_slot);
          if (!assign(v, need ^ L_.bits[open_slot], trail)) return false;
          changed = true;
        }
      }
    }
    return true;
  }

  int pick() const {
    const int k = g_.k();
    int best = -1;
    int best_score = 1 << 30;
    std::vector<int> open_in(g_.m(), 0);
    for (int s = 0; s < g_.edges(); ++s)
      if (x_[g_.var_at(s)] < 0) ++open_in[s / k];
    for (int v = 0; v < g_.n(); ++v) {
      if (x_[v] >= 0) continue;
      int score = 1 << 29;
      for (int s : g_.var_slots(v)) score = std::min(score, open_in[s / k]);
      if (score < best_score) {
        best_score = score;
        best = v;
      }
    }
    return best;
  }

  bool search() {
    if (++nodes_ > budget_) throw BudgetExhausted("decide_exists: node budget exhausted");
    int v = pick();
    if (v < 0) return true;
    std::vector<int> trail;
    for (int val = 0; val < 2; ++val) {
      if (assign(v, val, trail) && propagate(trail) && search()) return true;
      undo(trail, 0);
    }
    return false;
  }

  const FactorGraph& g_;
  const LiteralAssignment& L_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  std::vector<int> x_;
};

}  // namespace

DecideResult decide(const FactorGraph& g, const LiteralAssignment& L, DecideOptions opt) {
  Dpll solver(g, L, opt.node_budget);
  DecideResult r;
  r.sat = solver.run();
  r.nodes = solver.nodes();
  if (r.sat) r.witness = solver.witness();
  return r;
}

bool decide_exists(const FactorGraph& g, const LiteralAssignment& L, DecideOptions opt) {
  return decide(g, L, opt).sat;
}

ExpectedZ expected_Z(int n, int m, int k) {
  if (n < 0 || m < 0 || k < 1) throw InputError("expected_Z: need n, m >= 0 and k >= 1");
  mpz_class two_k = mpz_class(1) << k;
  mpq_class ratio(two_k - 2, two_k);
  ratio.canonicalize();
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), ratio.get_num_mpz_t(), static_cast<unsigned long>(m));
  mpz_pow_ui(den.get_mpz_t(), ratio.get_den_mpz_t(), static_cast<unsigned long>(m));
  num <<= n;
  ExpectedZ out;
  out.exact = mpq_class(num, den);
  out.exact.canonicalize();
  Real ln2 = const_log2();
  Real base = Real(1) - ldexp(Real(1), 1 - k);
  out.log_value = Real(n) * ln2;
  if (m > 0) out.log_value += Real(m) * log(base);
  return out;
}

mpq_class literal_average_Z(const FactorGraph& g, int limit_edges) {
  const int E = g.edges();
  if (E > limit_edges || E > 40) throw SizeGuardError("literal_average_Z: too many edges for full literal scan");
  LiteralAssignment L;
  L.bits.assign(E, 0);
  mpz_class total = 0;
  const std::uint64_t count = std::uint64_t{1} << E;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    for (int s = 0; s < E; ++s) L.bits[s] = static_cast<std::uint8_t>((mask >> s) & 1U);
    total += static_cast<unsigned long>(count_solutions(g, L).Z);
  }
  mpq_class mean(total, mpz_class(1) << E);
  mean.canonicalize();
  return mean;
}

}  // namespace naesat
