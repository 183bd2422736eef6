#include "naesat/auxiliary.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "naesat/errors.hpp"
#include "naesat/rng.hpp"

namespace naesat {

namespace {

constexpr std::uint8_t kOut[kSpins] = {kZero, kZero, kFree, kOne, kOne, kFree, kFree};
constexpr std::uint8_t kIn[kSpins] = {kFree, kZero, kZero, kFree, kOne, kOne, kFree};
constexpr RF kProj[kSpins] = {RFr, RR, FR, RFr, RR, FR, FF};
constexpr const char* kSpinNames[kSpins] = {"0f", "00", "f0", "1f", "11", "f1", "ff"};
constexpr const char* kRFNames[kRF] = {"rr", "rf", "fr", "ff"};

std::uint8_t flip(std::uint8_t x) { return x == kFree ? kFree : static_cast<std::uint8_t>(x ^ 1); }

}  // namespace

std::uint8_t spin_out(Spin s) { return kOut[s]; }
std::uint8_t spin_in(Spin s) { return kIn[s]; }

bool make_spin(std::uint8_t out, std::uint8_t in, Spin& s) {
  for (int i = 0; i < kSpins; ++i)
    if (kOut[i] == out && kIn[i] == in) {
      s = static_cast<Spin>(i);
      return true;
    }
  return false;
}

Spin spin_xor(Spin s, int bit) {
  if (!bit) return s;
  Spin r = s;
  make_spin(flip(kOut[s]), flip(kIn[s]), r);
  return r;
}

RF project(Spin s) { return kProj[s]; }
const char* spin_name(Spin s) { return kSpinNames[s]; }
const char* rf_name(RF r) { return kRFNames[r]; }

SpinCounts count_spins(std::span<const Spin> tuple) {
  SpinCounts c{};
  for (Spin s : tuple) ++c[s];
  return c;
}

RFCounts project_counts(const SpinCounts& c) {
  RFCounts r{};
  for (int i = 0; i < kSpins; ++i) r[kProj[i]] += c[i];
  return r;
}

std::uint8_t vertex_rule(std::span<const std::uint8_t> messages) {
  bool zero = false, one = false;
  for (auto m : messages) {
    zero |= m == kZero;
    one |= m == kOne;
  }
  if (zero && one) return kUnsat;
  if (zero) return kZero;
  if (one) return kOne;
  return kFree;
}

std::uint8_t clause_rule(std::span<const std::uint8_t> incoming, std::span<const std::uint8_t> literals,
                         int target_slot) {
  const int k = static_cast<int>(literals.size());
  if (k < 2) return kFree;
  int common = -1;
  int idx = 0;
  for (int j = 0; j < k; ++j) {
    if (j == target_slot) continue;
    std::uint8_t m = incoming[idx++];
    if (m == kFree) return kFree;
    int e = literals[j] ^ m;
    if (common < 0) {
      common = e;
    } else if (common != e) {
      return kFree;
    }
  }
  return static_cast<std::uint8_t>((common ^ 1) ^ literals[target_slot]);
}

int psi_dot(const SpinCounts& c) {
  const int d = std::accumulate(c.begin(), c.end(), 0);
  if (c[Sff] == d) return 1;
  const int n0 = c[S00] + c[Sf0];
  const int n1 = c[S11] + c[Sf1];
  if (n0 > 0 && n1 > 0) return 0;
  if (n0 > 0) {
    if (n0 == 1) return c[Sf0] == 1 && c[S0f] == d - 1;
    return c[S00] == n0 && c[S0f] == d - n0;
  }
  if (n1 > 0) {
    if (n1 == 1) return c[Sf1] == 1 && c[S1f] == d - 1;
    return c[S11] == n1 && c[S1f] == d - n1;
  }
  return 0;
}

int psi_hat_circ(const SpinCounts& c) {
  const int k = std::accumulate(c.begin(), c.end(), 0);
  const int z = c[S0f] + c[S00];
  const int o = c[S1f] + c[S11];
  const int f = c[Sf0] + c[Sf1] + c[Sff];
  SpinCounts want{};
  if (f >= 2) {
    want[S0f] = z;
    want[S1f] = o;
    want[Sff] = f;
  } else if (f == 1) {
    want[S0f] = z;
    want[S1f] = o;
    if (z == k - 1) {
      want[Sf1] = 1;
    } else if (o == k - 1) {
      want[Sf0] = 1;
    } else {
      want[Sff] = 1;
    }
  } else {
    if (z == 0 || o == 0) return 0;
    want[S00] = z == 1;
    want[S0f] = z - (z == 1);
    want[S11] = o == 1;
    want[S1f] = o - (o == 1);
  }
  return want == c;
}

int psi_dot_rf(const RFCounts& c) {
  const int d = std::accumulate(c.begin(), c.end(), 0);
  if (c[FF] == d) return 1;
  if (c[FF] != 0) return 0;
  if (c[FR] == 1 && c[RFr] == d - 1) return 2;
  if (c[FR] == 0 && c[RR] >= 2 && c[RFr] == d - c[RR]) return 2;
  return 0;
}

mpz_class psi_hat_rf_numerator(const RFCounts& c, int k) {
  if (k < 3) {
    // Short clauses fall outside the closed form; sum over a representative.
    std::vector<Spin> rep;
    constexpr Spin pick[kRF] = {S00, S0f, Sf0, Sff};
    for (int r = 0; r < kRF; ++r) rep.insert(rep.end(), c[r], pick[r]);
    mpq_class q = psi_hat_literal_sum(rep);
    return mpz_class(q * (mpz_class(1) << k));
  }
  const mpz_class full = mpz_class(1) << k;
  if (c[FF] >= 2 && c[RR] == 0 && c[FR] == 0) return full;
  if (c[FF] == 1 && c[RFr] == k - 1) return full - 4;
  if (c[RFr] == k) return full - 2 - 2 * k;
  if (c[FF] == 0 && c[RFr] == k - 1 && (c[RR] == 1 || c[FR] == 1)) return 2;
  return 0;
}

mpq_class psi_hat(const SpinCounts& c) {
  const int k = std::accumulate(c.begin(), c.end(), 0);
  mpq_class q(psi_hat_rf_numerator(project_counts(c), k), mpz_class(1) << k);
  q.canonicalize();
  return q;
}

mpq_class psi_hat_literal_sum(std::span<const Spin> tuple) {
  const int k = static_cast<int>(tuple.size());
  if (k > 24) throw SizeGuardError("psi_hat_literal_sum: k too large");
  std::vector<Spin> t(tuple.begin(), tuple.end());
  long total = 0;
  for (std::uint32_t mask = 0; mask < (1U << k); ++mask) {
    for (int j = 0; j < k; ++j) t[j] = spin_xor(tuple[j], (mask >> j) & 1U);
    total += psi_hat_circ(count_spins(t));
  }
  mpq_class q(total, mpz_class(1) << k);
  q.canonicalize();
  return q;
}

mpq_class factor_weight(FactorKind kind, std::span<const Spin> tuple) {
  SpinCounts c = count_spins(tuple);
  switch (kind) {
    case FactorKind::Variable:
      return psi_dot(c);
    case FactorKind::ClauseCirc:
      return psi_hat_circ(c);
    case FactorKind::Clause:
    case FactorKind::ClauseRF:
      return psi_hat(c);
    case FactorKind::VariableRF:
      return psi_dot_rf(project_counts(c));
  }
  return 0;
}

namespace {

bool variable_ok(const FactorGraph& g, const AuxConfig& sigma, int v) {
  auto slots = g.var_slots(v);
  std::vector<std::uint8_t> ins;
  for (int s : slots) ins.push_back(kIn[sigma.spins[s]]);
  if (vertex_rule(ins) == kUnsat) return false;
  std::vector<std::uint8_t> others;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    others.clear();
    for (std::size_t j = 0; j < slots.size(); ++j)
      if (j != i) others.push_back(ins[j]);
    if (vertex_rule(others) != kOut[sigma.spins[slots[i]]]) return false;
  }
  return true;
}

bool clause_ok(const FactorGraph& g, const LiteralAssignment& L, std::span<const Spin> spins, int a) {
  const int k = g.k();
  std::span<const std::uint8_t> lits(L.bits.data() + static_cast<std::size_t>(a) * k, k);
  int ones = 0;
  bool rigid = true;
  for (int j = 0; j < k; ++j) {
    std::uint8_t m = kOut[spins[j]];
    if (m == kFree) {
      rigid = false;
    } else {
      ones += lits[j] ^ m;
    }
  }
  if (rigid && (ones == 0 || ones == k)) return false;
  std::vector<std::uint8_t> others;
  for (int j = 0; j < k; ++j) {
    others.clear();
    for (int i = 0; i < k; ++i)
      if (i != j) others.push_back(kOut[spins[i]]);
    if (clause_rule(others, lits, j) != kIn[spins[j]]) return false;
  }
  return true;
}

}  // namespace

bool is_valid_aux(const FactorGraph& g, const LiteralAssignment& L, const AuxConfig& sigma) {
  if (static_cast<int>(sigma.spins.size()) != g.edges()) return false;
  for (auto s : sigma.spins)
    if (s >= kSpins) return false;
  for (int v = 0; v < g.n(); ++v)
    if (!variable_ok(g, sigma, v)) return false;
  const int k = g.k();
  for (int a = 0; a < g.m(); ++a)
    if (!clause_ok(g, L, std::span<const Spin>(sigma.spins.data() + static_cast<std::size_t>(a) * k, k), a))
      return false;
  return true;
}

AuxConfig frozen_to_aux(const FactorGraph& g, const LiteralAssignment& L, const std::vector<std::uint8_t>& eta) {
  if (!is_valid_frozen(g, L, eta)) throw InputError("frozen_to_aux: not a valid frozen configuration");
  const int E = g.edges();
  std::vector<std::uint8_t> in(E);
  for (int s = 0; s < E; ++s) in[s] = is_forcing_edge(g, L, eta, s) ? eta[g.var_at(s)] : kFree;
  AuxConfig sigma;
  sigma.spins.resize(E);
  std::vector<std::uint8_t> others;
  for (int v = 0; v < g.n(); ++v) {
    auto slots = g.var_slots(v);
    for (std::size_t i = 0; i < slots.size(); ++i) {
      others.clear();
      for (std::size_t j = 0; j < slots.size(); ++j)
        if (j != i) others.push_back(in[slots[j]]);
      std::uint8_t out = vertex_rule(others);
      if (!make_spin(out, in[slots[i]], sigma.spins[slots[i]]))
        throw InputError("frozen_to_aux: conflicting messages");
    }
  }
  return sigma;
}

FrozenConfig aux_to_frozen(const FactorGraph& g, const AuxConfig& sigma) {
  if (static_cast<int>(sigma.spins.size()) != g.edges()) throw InputError("aux_to_frozen: wrong edge count");
  std::vector<std::uint8_t> eta(g.n());
  std::vector<std::uint8_t> ins;
  for (int v = 0; v < g.n(); ++v) {
    ins.clear();
    for (int s : g.var_slots(v)) ins.push_back(kIn[sigma.spins[s]]);
    eta[v] = vertex_rule(ins);
    if (eta[v] == kUnsat) throw InputError("aux_to_frozen: conflicting incoming messages");
  }
  return FrozenConfig::from_eta(std::move(eta));
}

namespace {

// Depth-first scan over per-variable spin tuples with clause-level pruning
// against the precomputed list of locally valid clause tuples.
class AuxScan {
 public:
  AuxScan(const FactorGraph& g, const LiteralAssignment& L, int free_limit)
      : g_(g), L_(L), free_limit_(free_limit), spins_(g.edges(), Sff), assigned_(g.edges(), 0) {
    const int d = g.d();
    const int k = g.k();
    enumerate_tuples(d, [&](const std::vector<Spin>& tup) {
      if (psi_dot(count_spins(tup))) var_tuples_.push_back(tup);
    });
    clause_tuples_.resize(g.m());
    for (int a = 0; a < g.m(); ++a)
      enumerate_tuples(k, [&](const std::vector<Spin>& tup) {
        if (clause_ok(g, L, tup, a)) clause_tuples_[a].push_back(tup);
      });
  }

  std::uint64_t run() {
    descend(0, 0);
    return count_;
  }

 private:
  template <class F>
  static void enumerate_tuples(int len, F&& f) {
    std::vector<Spin> t(len, S0f);
    while (true) {
      f(t);
      int i = 0;
      while (i < len && t[i] == Sff) t[i++] = S0f;
      if (i == len) return;
      t[i] = static_cast<Spin>(t[i] + 1);
    }
  }

  bool clause_extends(int a) const {
    const int k = g_.k();
    for (const auto& tup : clause_tuples_[a]) {
      bool match = true;
      for (int j = 0; j < k && match; ++j) {
        int s = a * k + j;
        match = !assigned_[s] || spins_[s] == tup[j];
      }
      if (match) return true;
    }
    return false;
  }

  void descend(int v, int frees) {
    if (v == g_.n()) {
      ++count_;
      return;
    }
    auto slots = g_.var_slots(v);
    const int k = g_.k();
    for (const auto& tup : var_tuples_) {
      int f = frees + (tup.empty() || std::all_of(tup.begin(), tup.end(), [](Spin s) { return s == Sff; }));
      if (f > free_limit_) continue;
      for (std::size_t i = 0; i < slots.size(); ++i) {
        spins_[slots[i]] = tup[i];
        assigned_[slots[i]] = 1;
      }
      bool ok = true;
      for (int s : slots)
        if (!clause_extends(s / k)) {
          ok = false;
          break;
        }
      if (ok) descend(v + 1, f);
      for (int s : slots) assigned_[s] = 0;
    }
  }

  const FactorGraph& g_;
  const LiteralAssignment& L_;
  int free_limit_;
  std::vector<Spin> spins_;
  std::vector<std::uint8_t> assigned_;
  std::vector<std::vector<Spin>> var_tuples_;
  std::vector<std::vector<std::vector<Spin>>> clause_tuples_;
  std::uint64_t count_ = 0;
};

}  // namespace

AuxPartition aux_partition(const FactorGraph& g, const LiteralAssignment& L, const TruncationPolicy& policy,
                           AuxMethod method, int scan_edge_limit, int limit_n) {
  if (method == AuxMethod::Auto) method = g.edges() <= scan_edge_limit ? AuxMethod::Scan : AuxMethod::Bijection;
  AuxPartition r;
  r.method = method;
  const int free_limit = policy.free_limit(g.n());
  if (method == AuxMethod::Scan) {
    if (g.edges() > scan_edge_limit || g.d() > 8 || g.k() > 8)
      throw SizeGuardError("aux_partition: too many edges for a direct scan");
    r.count = AuxScan(g, L, free_limit).run();
    return r;
  }
  auto frozen = enumerate_frozen(g, L, policy, limit_n);
  for (const auto& c : frozen.configs) {
    AuxConfig sigma = frozen_to_aux(g, L, c.eta);
    if (!is_valid_aux(g, L, sigma) || aux_to_frozen(g, sigma).eta != c.eta)
      throw ConsistencyError("aux_partition: bijection failed on a frozen configuration");
    ++r.count;
  }
  return r;
}

namespace {

struct GSharp {
  std::vector<std::uint8_t> in_fsharp;  // per clause
  std::vector<std::uint8_t> xi;         // per clause
  std::vector<std::uint8_t> all_free;   // per clause
};

GSharp build_gsharp(const FactorGraph& g, const LiteralAssignment& L, const std::vector<std::uint8_t>& eta) {
  const int k = g.k();
  GSharp gs{std::vector<std::uint8_t>(g.m(), 0), std::vector<std::uint8_t>(g.m(), 0),
            std::vector<std::uint8_t>(g.m(), 0)};
  for (int a = 0; a < g.m(); ++a) {
    int free_slots = 0;
    int common = -1;
    bool constant = true;
    for (int j = 0; j < k; ++j) {
      int s = a * k + j;
      std::uint8_t e = eta[g.var_at(s)];
      if (e == kFree) {
        ++free_slots;
        continue;
      }
      int ev = L.bits[s] ^ e;
      if (common < 0) {
        common = ev;
      } else if (common != ev) {
        constant = false;
      }
    }
    if (free_slots >= 2 && constant) {
      gs.in_fsharp[a] = 1;
      gs.xi[a] = static_cast<std::uint8_t>(common < 0 ? 0 : common);
      gs.all_free[a] = free_slots == k;
    }
  }
  return gs;
}

}  // namespace

CompletionResult complete_to_solution(const FactorGraph& g, const LiteralAssignment& L,
                                      const std::vector<std::uint8_t>& eta, std::uint64_t seed) {
  if (!is_valid_frozen(g, L, eta)) throw InputError("complete_to_solution: not a valid frozen configuration");
  const int n = g.n();
  const int k = g.k();
  const GSharp gs = build_gsharp(g, L, eta);
  SplitMix64 rng(seed);

  std::vector<int> x(n, -1);
  for (int v = 0; v < n; ++v)
    if (eta[v] != kFree) x[v] = eta[v];

  // G# nodes: variables 0..n-1 and clauses n..n+m-1; edges are clause slots.
  auto edge_ok = [&](int s) { return gs.in_fsharp[s / k] && eta[g.var_at(s)] == kFree; };
  std::vector<int> comp(n + g.m(), -1);
  std::vector<std::vector<int>> comp_nodes;
  for (int v = 0; v < n; ++v) {
    if (eta[v] != kFree || comp[v] >= 0) continue;
    const int id = static_cast<int>(comp_nodes.size());
    comp_nodes.emplace_back();
    std::vector<int> stack{v};
    comp[v] = id;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      comp_nodes[id].push_back(u);
      auto visit = [&](int w) {
        if (comp[w] < 0) {
          comp[w] = id;
          stack.push_back(w);
        }
      };
      if (u < n) {
        for (int s : g.var_slots(u))
          if (edge_ok(s)) visit(n + s / k);
      } else {
        int a = u - n;
        for (int j = 0; j < k; ++j)
          if (edge_ok(a * k + j)) visit(g.var_at(a, j));
      }
    }
  }

  CompletionResult res;
  auto fail = [&](int id, std::string reason) {
    res.ok = false;
    res.reason = std::move(reason);
    for (int u : comp_nodes[id]) (u < n ? res.component_vars : res.component_clauses).push_back(u < n ? u : u - n);
    std::sort(res.component_vars.begin(), res.component_vars.end());
    std::sort(res.component_clauses.begin(), res.component_clauses.end());
    return res;
  };

  std::vector<std::uint8_t> processed(g.m(), 0);
  for (int id = 0; id < static_cast<int>(comp_nodes.size()); ++id) {
    auto& nodes = comp_nodes[id];
    std::sort(nodes.begin(), nodes.end());
    int edges = 0;
    for (int u : nodes)
      if (u >= n)
        for (int j = 0; j < k; ++j) edges += edge_ok((u - n) * k + j);
    const int cycles = edges - static_cast<int>(nodes.size()) + 1;
    if (cycles >= 2) return fail(id, "component with " + std::to_string(cycles) + " cycles");

    std::vector<int> queue;
    if (cycles == 1) {
      // Strip leaves; what remains is the cycle.
      std::vector<int> deg(n + g.m(), 0);
      std::vector<std::uint8_t> gone(n + g.m(), 0);
      for (int u : nodes)
        if (u >= n)
          for (int j = 0; j < k; ++j)
            if (edge_ok((u - n) * k + j)) {
              ++deg[u];
              ++deg[g.var_at(u - n, j)];
            }
      std::vector<int> leaves;
      for (int u : nodes)
        if (deg[u] <= 1) leaves.push_back(u);
      while (!leaves.empty()) {
        int u = leaves.back();
        leaves.pop_back();
        if (gone[u]) continue;
        gone[u] = 1;
        auto drop = [&](int w) {
          if (!gone[w] && --deg[w] == 1) leaves.push_back(w);
        };
        if (u < n) {
          for (int s : g.var_slots(u))
            if (edge_ok(s)) drop(n + s / k);
        } else {
          for (int j = 0; j < k; ++j)
            if (edge_ok((u - n) * k + j)) drop(g.var_at(u - n, j));
        }
      }
      auto on_cycle = [&](int s) { return edge_ok(s) && !gone[g.var_at(s)] && !gone[n + s / k]; };
      int v0 = -1;
      for (int u : nodes)
        if (u < n && !gone[u]) {
          v0 = u;
          break;
        }
      int v = v0;
      int prev_edge = -1;
      do {
        int e = -1;
        for (int s : g.var_slots(v))
          if (on_cycle(s) && s != prev_edge) {
            e = s;
            break;
          }
        const int a = e / k;
        x[v] = (1 ^ gs.xi[a]) ^ L.bits[e];
        queue.push_back(v);
        int next = -1;
        for (int j = 0; j < k; ++j) {
          int s = a * k + j;
          if (s != e && on_cycle(s)) {
            next = s;
            break;
          }
        }
        prev_edge = next;
        v = g.var_at(next);
      } while (v != v0);
    } else {
      std::vector<int> vars;
      for (int u : nodes)
        if (u < n) vars.push_back(u);
      int root = vars[rng.below(vars.size())];
      x[root] = rng.bit();
      queue.push_back(root);
    }

    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const int u = queue[qi];
      for (int s0 : g.var_slots(u)) {
        if (!edge_ok(s0)) continue;
        const int a = s0 / k;
        if (processed[a]) continue;
        processed[a] = 1;
        bool have[2] = {false, false};
        std::vector<int> child_slots;
        for (int j = 0; j < k; ++j) {
          int s = a * k + j;
          if (!edge_ok(s)) continue;
          int w = g.var_at(s);
          if (x[w] >= 0) {
            have[L.bits[s] ^ x[w]] = true;
          } else if (std::none_of(child_slots.begin(), child_slots.end(),
                                  [&](int t) { return g.var_at(t) == w; })) {
            child_slots.push_back(s);
          }
        }
        std::vector<int> need;
        if (gs.all_free[a]) {
          if (!have[0]) need.push_back(0);
          if (!have[1]) need.push_back(1);
        } else if (!have[1 ^ gs.xi[a]]) {
          need.push_back(1 ^ gs.xi[a]);
        }
        if (need.size() > child_slots.size()) return fail(id, "clause " + std::to_string(a) + " cannot be satisfied");
        for (std::size_t i = 0; i < child_slots.size(); ++i) {
          int s = child_slots[i];
          int w = g.var_at(s);
          x[w] = i < need.size() ? (need[i] ^ L.bits[s]) : rng.bit();
          queue.push_back(w);
        }
      }
    }
  }

  res.x.assign(n, 0);
  for (int v = 0; v < n; ++v) res.x[v] = static_cast<std::uint8_t>(x[v] < 0 ? 0 : x[v]);
  if (!is_nae_solution(g, L, res.x)) {
    res.reason = "completion violates a clause";
    return res;
  }
  res.ok = true;
  return res;
}

}  // namespace naesat
