#include <gmpxx.h>

#include <array>
#include <cstdint>

#include "naesat/errors.hpp"
#include "naesat/moments.hpp"

namespace naesat {

Real pair_clause_weight(int k, const std::vector<int>& pair_counts) {
  if (pair_counts.size() != static_cast<std::size_t>(kSpins * kSpins))
    throw InputError("pair_clause_weight: expected 49 counts");
  std::vector<int> types;
  for (int t = 0; t < kSpins * kSpins; ++t)
    if (pair_counts[t] > 0) types.push_back(t);
  std::vector<int> flips(types.size(), 0);
  mpz_class total = 0;
  while (true) {
    SpinCounts c1{}, c2{};
    mpz_class ways = 1;
    for (std::size_t i = 0; i < types.size(); ++i) {
      const int n = pair_counts[types[i]];
      const int l = flips[i];
      const Spin s1 = static_cast<Spin>(types[i] / kSpins);
      const Spin s2 = static_cast<Spin>(types[i] % kSpins);
      c1[s1] += n - l;
      c1[spin_xor(s1, 1)] += l;
      c2[s2] += n - l;
      c2[spin_xor(s2, 1)] += l;
      mpz_class b;
      mpz_bin_uiui(b.get_mpz_t(), n, l);
      ways *= b;
    }
    if (psi_hat_circ(c1) && psi_hat_circ(c2)) total += ways;
    std::size_t i = 0;
    while (i < types.size() && flips[i] == pair_counts[types[i]]) flips[i++] = 0;
    if (i == types.size()) break;
    ++flips[i];
  }
  return Real(total.get_str()) / ldexp(Real(1), k);
}

EmpiricalMeasure identical_pair_measure(const EmpiricalMeasure& m, int x) {
  if (m.alphabet != kSpins) throw InputError("identical_pair_measure: single-copy measure expected");
  if (x != 0 && x != 1) throw InputError("identical_pair_measure: x must be 0 or 1");
  auto pair_of = [x](int s) { return kSpins * s + spin_xor(static_cast<Spin>(s), x); };
  auto lift = [&](const std::vector<int>& c) {
    std::vector<int> out(kSpins * kSpins, 0);
    for (int s = 0; s < kSpins; ++s) out[pair_of(s)] = c[s];
    return out;
  };
  EmpiricalMeasure p;
  p.k = m.k;
  p.d = m.d;
  p.alphabet = kSpins * kSpins;
  p.complete = m.complete;
  for (const auto& cl : m.var) p.var.push_back({lift(cl.counts), cl.multiplicity, cl.prob, Real(1)});
  for (const auto& cl : m.clause) {
    auto c = lift(cl.counts);
    Real w = pair_clause_weight(m.k, c);
    p.clause.push_back({std::move(c), cl.multiplicity, cl.prob, w});
  }
  p.vh.assign(kSpins * kSpins, Real(0));
  for (int s = 0; s < kSpins; ++s) p.vh[pair_of(s)] = m.vh[s];
  return p;
}

Real pair_product_rate(int k, const Real& d, const PairState& p, bool literal_sum) {
  const auto& qd = p.qdot;
  const auto& qh = p.qhat;
  // Spins with out = a (for hdot) or in = a (for hhat): two for 0 and 1, three for f.
  constexpr int mult[3] = {2, 2, 3};
  Real Zdot(0), Zhat(0), zbar(0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      Zdot += qd[pair_index(a, b)] * Real(mult[a] * mult[b]);
      Zhat += qh[pair_index(a, b)] * Real(mult[a] * mult[b]);
    }
  for (int s1 = 0; s1 < kSpins; ++s1)
    for (int s2 = 0; s2 < kSpins; ++s2) {
      auto S1 = static_cast<Spin>(s1);
      auto S2 = static_cast<Spin>(s2);
      zbar += qd[pair_index(spin_out(S1), spin_out(S2))] * qh[pair_index(spin_in(S1), spin_in(S2))];
    }
  zbar /= Zdot * Zhat;

  // Incoming messages at a variable are consistent iff they avoid {0,1}
  // together: inclusion-exclusion over {0,f}, {1,f}, {f} in each copy.
  constexpr int sets[3] = {0b101, 0b110, 0b100};
  constexpr int signs[3] = {1, 1, -1};
  Real zdot_bar(0);
  for (int A = 0; A < 3; ++A)
    for (int B = 0; B < 3; ++B) {
      Real S(0);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          if ((sets[A] >> a & 1) && (sets[B] >> b & 1)) S += qh[pair_index(a, b)];
      Real term = pow_unit(min(S, Real(1)), d);
      if (signs[A] * signs[B] > 0) {
        zdot_bar += term;
      } else {
        zdot_bar -= term;
      }
    }
  zdot_bar /= pow(Zhat, d);

  // A clause is violated in a copy iff its outgoing messages equal L or not(L).
  Real r[2], c[2];
  for (int a = 0; a < 2; ++a) {
    r[a] = Real(0);
    c[a] = Real(0);
    for (int b = 0; b < 3; ++b) {
      r[a] += qd[pair_index(a, b)];
      c[a] += qd[pair_index(b, a)];
    }
  }
  Real total(0);
  for (const auto& x : qd) total += x;
  const Real T = pow(total, k);
  Real sum(0);
  if (literal_sum) {
    if (k > 20) throw SizeGuardError("pair_product_rate: literal sum limited to k <= 20");
    for (std::uint32_t L = 0; L < (1U << k); ++L) {
      Real rl(1), rn(1), cl(1), cn(1), ll(1), ln(1), nl(1), nn(1);
      for (int i = 0; i < k; ++i) {
        const int x = (L >> i) & 1U;
        const int y = x ^ 1;
        rl *= r[x];
        rn *= r[y];
        cl *= c[x];
        cn *= c[y];
        ll *= qd[pair_index(x, x)];
        ln *= qd[pair_index(x, y)];
        nl *= qd[pair_index(y, x)];
        nn *= qd[pair_index(y, y)];
      }
      sum += T - (rl + rn) - (cl + cn) + (ll + ln + nl + nn);
    }
  } else {
    mpz_class binom = 1;
    for (int w = 0; w <= k; ++w) {
      const int u = k - w;
      Real A1 = pow(r[0], u) * pow(r[1], w) + pow(r[1], u) * pow(r[0], w);
      Real A2 = pow(c[0], u) * pow(c[1], w) + pow(c[1], u) * pow(c[0], w);
      Real A12 = pow(qd[pair_index(0, 0)], u) * pow(qd[pair_index(1, 1)], w) +
                 pow(qd[pair_index(0, 1)], u) * pow(qd[pair_index(1, 0)], w) +
                 pow(qd[pair_index(1, 0)], u) * pow(qd[pair_index(0, 1)], w) +
                 pow(qd[pair_index(1, 1)], u) * pow(qd[pair_index(0, 0)], w);
      sum += Real(binom.get_str()) * (T - A1 - A2 + A12);
      binom = binom * (k - w) / (w + 1);
    }
  }
  Real zhat_bar = sum / ldexp(pow(Zdot, k), k);
  return log(zdot_bar) + d / Real(k) * log(zhat_bar) - d * log(zbar);
}

PairRate pair_rate(int k, int d, const FixedPoint& fp, const PairState& p, const Real& tol) {
  PairRate out;
  const Real D(d);
  out.product = pair_product_rate(k, D, p, false);
  if (k <= 16) out.product_literal_sum = pair_product_rate(k, D, p, true);
  EmpiricalMeasure m = empirical_from_law(k, d, fp.law, tol);
  out.identical0 = phi_bethe(identical_pair_measure(m, 0), tol).phi;
  out.identical1 = phi_bethe(identical_pair_measure(m, 1), tol).phi;
  out.phi_star = phi_star_explicit(fp.scalar);
  return out;
}

}  // namespace naesat
