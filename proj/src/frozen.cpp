#include "naesat/frozen.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "naesat/errors.hpp"

namespace naesat {

FrozenConfig FrozenConfig::from_eta(std::vector<std::uint8_t> eta) {
  FrozenConfig c;
  c.free_count = static_cast<int>(std::count(eta.begin(), eta.end(), kFree));
  c.eta = std::move(eta);
  return c;
}

TruncationPolicy TruncationPolicy::standard(int k) {
  TruncationPolicy p;
  p.beta_max = mpq_class(7, mpz_class(1) << k);
  p.beta_max.canonicalize();
  return p;
}

TruncationPolicy TruncationPolicy::unrestricted() { return TruncationPolicy{mpq_class(1)}; }

int TruncationPolicy::free_limit(int n) const {
  mpq_class x = beta_max * n;
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return static_cast<int>(f.get_si());
}

bool is_forcing_edge(const FactorGraph& g, const LiteralAssignment& L, const std::vector<std::uint8_t>& eta,
                     int clause_slot) {
  const int k = g.k();
  const int a = clause_slot / k;
  for (int j = 0; j < k; ++j)
    if (eta[g.var_at(a, j)] == kFree) return false;
  const int target = L.bits[clause_slot] ^ eta[g.var_at(clause_slot)];
  for (int j = 0; j < k; ++j) {
    int s = a * k + j;
    if (s == clause_slot) continue;
    if ((L.bits[s] ^ eta[g.var_at(s)]) == target) return false;
  }
  return true;
}

bool is_forced(const FactorGraph& g, const LiteralAssignment& L, const std::vector<std::uint8_t>& eta, int v) {
  for (int s : g.var_slots(v))
    if (is_forcing_edge(g, L, eta, s)) return true;
  return false;
}

FrozenConfig coarsen(const FactorGraph& g, const LiteralAssignment& L, const Assignment& x) {
  if (static_cast<int>(x.size()) != g.n() || !is_nae_solution(g, L, x))
    throw InputError("coarsen: input is not an NAE-SAT solution");
  std::vector<std::uint8_t> eta(x.begin(), x.end());
  std::set<int> work;
  for (int v = 0; v < g.n(); ++v) work.insert(v);
  while (!work.empty()) {
    int v = *work.begin();
    work.erase(work.begin());
    if (eta[v] == kFree || is_forced(g, L, eta, v)) continue;
    eta[v] = kFree;
    for (int s : g.var_slots(v)) {
      int a = s / g.k();
      for (int w : g.clause_vars(a))
        if (eta[w] != kFree) work.insert(w);
    }
  }
  return FrozenConfig::from_eta(std::move(eta));
}

namespace {

// Clause-local checks: (a) and, for Closed, the single-free-slot closure.
bool clause_ok(const FactorGraph& g, const LiteralAssignment& L, const std::vector<std::uint8_t>& eta, int a,
               FrozenRules rules) {
  const int k = g.k();
  int ones = 0, rigid = 0;
  for (int j = 0; j < k; ++j) {
    int s = a * k + j;
    int e = eta[g.var_at(s)];
    if (e == kFree) continue;
    ++rigid;
    ones += L.bits[s] ^ e;
  }
  if (rigid == k) return ones != 0 && ones != k;
  if (rules == FrozenRules::Closed && rigid == k - 1 && k >= 2) return ones != 0 && ones != rigid;
  return true;
}

}  // namespace

bool is_valid_frozen(const FactorGraph& g, const LiteralAssignment& L, const std::vector<std::uint8_t>& eta,
                     FrozenRules rules) {
  if (static_cast<int>(eta.size()) != g.n()) return false;
  for (auto e : eta)
    if (e > kFree) return false;
  for (int a = 0; a < g.m(); ++a)
    if (!clause_ok(g, L, eta, a, rules)) return false;
  for (int v = 0; v < g.n(); ++v)
    if ((eta[v] != kFree) != is_forced(g, L, eta, v)) return false;
  return true;
}

namespace {

class FrozenSearch {
 public:
  FrozenSearch(const FactorGraph& g, const LiteralAssignment& L, int free_limit, FrozenRules rules)
      : g_(g), L_(L), free_limit_(free_limit), rules_(rules), eta_(g.n(), kFree), clause_ready_(g.n()), var_ready_(g.n()) {
    const int k = g.k();
    std::vector<int> clause_max(g.m(), -1);
    for (int s = 0; s < g.edges(); ++s) clause_max[s / k] = std::max(clause_max[s / k], g.var_at(s));
    for (int a = 0; a < g.m(); ++a) clause_ready_[clause_max[a]].push_back(a);
    for (int v = 0; v < g.n(); ++v) {
      int r = v;
      for (int s : g.var_slots(v)) r = std::max(r, clause_max[s / k]);
      var_ready_[r].push_back(v);
    }
  }

  std::vector<FrozenConfig> run() {
    if (g_.n() == 0) {
      if (is_valid_frozen(g_, L_, eta_, rules_)) out_.push_back(FrozenConfig::from_eta(eta_));
      return out_;
    }
    descend(0, 0);
    return out_;
  }

 private:
  bool consistent_at(int i) const {
    for (int a : clause_ready_[i])
      if (!clause_ok(g_, L_, eta_, a, rules_)) return false;
    for (int v : var_ready_[i])
      if ((eta_[v] != kFree) != is_forced(g_, L_, eta_, v)) return false;
    return true;
  }

  void descend(int i, int frees) {
    if (i == g_.n()) {
      out_.push_back(FrozenConfig::from_eta(eta_));
      return;
    }
    for (std::uint8_t val : {kZero, kOne, kFree}) {
      int f = frees + (val == kFree);
      if (f > free_limit_) continue;
      eta_[i] = val;
      if (consistent_at(i)) descend(i + 1, f);
    }
    eta_[i] = kFree;
  }

  const FactorGraph& g_;
  const LiteralAssignment& L_;
  int free_limit_;
  FrozenRules rules_;
  std::vector<std::uint8_t> eta_;
  std::vector<std::vector<int>> clause_ready_;
  std::vector<std::vector<int>> var_ready_;
  std::vector<FrozenConfig> out_;
};

}  // namespace

FrozenEnumeration enumerate_frozen(const FactorGraph& g, const LiteralAssignment& L, const TruncationPolicy& policy,
                                   int limit_n, FrozenRules rules) {
  if (g.n() > limit_n) throw SizeGuardError("enumerate_frozen: n=" + std::to_string(g.n()) + " exceeds limit");
  FrozenEnumeration r;
  r.free_limit = policy.free_limit(g.n());
  r.configs = FrozenSearch(g, L, r.free_limit, rules).run();
  r.truncated_count = r.configs.size();
  return r;
}

std::vector<Assignment> cluster_preimage(const FactorGraph& g, const LiteralAssignment& L,
                                         const std::vector<std::uint8_t>& eta, int limit_n) {
  if (g.n() > limit_n) throw SizeGuardError("cluster_preimage: n=" + std::to_string(g.n()) + " exceeds limit");
  std::vector<Assignment> out;
  if (!is_valid_frozen(g, L, eta)) return out;
  std::vector<int> frees;
  for (int v = 0; v < g.n(); ++v)
    if (eta[v] == kFree) frees.push_back(v);
  if (frees.size() > 40) throw SizeGuardError("cluster_preimage: too many free variables");
  Assignment x(g.n(), 0);
  for (int v = 0; v < g.n(); ++v)
    if (eta[v] != kFree) x[v] = eta[v];
  const std::uint64_t total = std::uint64_t{1} << frees.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    for (std::size_t i = 0; i < frees.size(); ++i) x[frees[i]] = static_cast<std::uint8_t>((mask >> i) & 1U);
    if (!is_nae_solution(g, L, x)) continue;
    if (coarsen(g, L, x).eta == eta) out.push_back(x);
  }
  return out;
}

}  // namespace naesat
