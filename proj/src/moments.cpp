#include "naesat/moments.hpp"

#include <gmpxx.h>

#include <string>

#include "naesat/errors.hpp"

namespace naesat {

namespace {

Real from_mpz(const mpz_class& z) { return Real(z.get_str()); }

Real xlogx(const Real& x) { return x.sign() > 0 ? x * log(x) : Real(0); }

void check_k(int k, const char* who) {
  if (k < 3) throw InputError(std::string(who) + ": need k >= 3");
}

void check_open_unit(const Real& x, const char* who) {
  if (x.sign() <= 0 || !(x < Real(1))) throw InputError(std::string(who) + ": argument must lie in (0,1)");
}

// k!/prod c_i!
mpz_class multinomial(const std::vector<int>& c) {
  int total = 0;
  mpz_class out = 1;
  for (int x : c) {
    for (int i = 1; i <= x; ++i) {
      ++total;
      out *= total;
      out /= i;
    }
  }
  return out;
}

}  // namespace

Real phi_first(int k, const Real& d) {
  check_k(k, "phi_first");
  return const_log2() + d / Real(k) * log1p(-ldexp(Real(1), 1 - k));
}

Thresholds thresholds(int k) {
  check_k(k, "thresholds");
  Thresholds t;
  Real ln2 = const_log2();
  t.d_fm = Real(k) * ln2 / -log1p(-ldexp(Real(1), 1 - k));
  Real half = ldexp(Real(1), k - 1);
  t.d_lbd = (half - Real(2)) * Real(k) * ln2;
  t.d_ubd = half * Real(k) * ln2;
  return t;
}

Real binary_entropy(const Real& p) {
  if (p.sign() < 0 || p > Real(1)) throw InputError("binary_entropy: argument outside [0,1]");
  return -xlogx(p) - xlogx(Real(1) - p);
}

namespace {

Real gamma0(int k, const Real& alpha) { return Real(1) - pow(alpha, k) - pow(Real(1) - alpha, k); }

Real theta(int k) { return Real(2) / (ldexp(Real(1), k) - Real(2)); }

}  // namespace

Real abar(int k, const Real& d, const Real& alpha) {
  check_k(k, "abar");
  check_open_unit(alpha, "abar");
  return binary_entropy(alpha) + d / Real(k) * log1p(-gamma0(k, alpha) * theta(k));
}

Real gamma_star(int k, const Real& alpha) {
  check_k(k, "gamma_star");
  check_open_unit(alpha, "gamma_star");
  Real g0 = gamma0(k, alpha);
  Real th = theta(k);
  return g0 * (Real(1) - th) / (Real(1) - th * g0);
}

Real a_full(int k, const Real& d, const Real& alpha, const Real& gamma) {
  check_k(k, "a_full");
  check_open_unit(alpha, "a_full");
  check_open_unit(gamma, "a_full");
  Real g0 = gamma0(k, alpha);
  Real rel = gamma * log(gamma / g0) + (Real(1) - gamma) * log((Real(1) - gamma) / (Real(1) - g0));
  return binary_entropy(alpha) + d / Real(k) * (-rel + gamma * log1p(-theta(k)));
}

FreeDensityPoint free_density_exponent(int k, const Real& d, const Real& beta) {
  check_k(k, "free_density_exponent");
  if (beta.sign() <= 0 || !(beta < Real(1) / Real(k)))
    throw InputError("free_density_exponent: beta must lie in (0, 1/k)");
  std::vector<Real> p(k + 1);
  mpz_class binom = 1;
  for (int j = 0; j <= k; ++j) {
    p[j] = from_mpz(binom) * pow(beta, j) * pow(Real(1) - beta, k - j);
    binom = binom * (k - j) / (j + 1);
  }
  p[0] *= Real(1) - ldexp(Real(1), 1 - k);
  p[1] *= Real(1) - ldexp(Real(1), 2 - k);
  const Real target = Real(k) * beta;
  auto mean_at = [&](const Real& logu) {
    Real u = exp(logu);
    Real c(0), m(0), uj(1);
    for (int j = 0; j <= k; ++j) {
      c += p[j] * uj;
      m += Real(j) * p[j] * uj;
      uj *= u;
    }
    return m / c;
  };
  Real lo(0), hi(0);
  int guard = 0;
  while (mean_at(hi) < target) {
    hi = hi + Real(1);
    if (++guard > 4000) throw InputError("free_density_exponent: tilt bracket failure");
  }
  guard = 0;
  while (mean_at(lo) > target) {
    lo = lo - Real(1);
    if (++guard > 4000) throw InputError("free_density_exponent: tilt bracket failure");
  }
  const long bits = Real::default_bits();
  for (long it = 0; it < bits + 16; ++it) {
    Real mid = ldexp(lo + hi, -1);
    if (mean_at(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  Real logu = ldexp(lo + hi, -1);
  Real u = exp(logu);
  Real c(0), uj(1);
  for (int j = 0; j <= k; ++j) {
    c += p[j] * uj;
    uj *= u;
  }
  FreeDensityPoint out;
  out.u = u;
  out.y = (Real(1) - beta) * const_log2() + binary_entropy(beta) + d / Real(k) * (log(c) - target * logu);
  return out;
}

EmpiricalMeasure empirical_from_law(int k, int d, const MessageLaw& h, const Real& tol, int full_limit) {
  check_k(k, "empirical_from_law");
  if (d < 2) throw InputError("empirical_from_law: need integer d >= 2");
  EmpiricalMeasure m;
  m.k = k;
  m.d = d;
  m.alphabet = kSpins;
  const Real D(d);
  const auto& hh = h.hhat;
  const auto& hd = h.hdot;

  // Variable side: ff^d, (fx, xf^{d-1}) and (xx^j, xf^{d-j}) for j >= 2.
  Real zdot_bar = pow(hh[Sff], d);
  for (int x = 0; x < 2; ++x) {
    const Real& a = hh[x == 0 ? S00 : S11];
    const Real& b = hh[x == 0 ? S0f : S1f];
    const Real& c = hh[x == 0 ? Sf0 : Sf1];
    zdot_bar += D * c * pow(b, d - 1) + pow(a + b, d) - pow(b, d) - D * a * pow(b, d - 1);
  }
  m.zdot_bar = zdot_bar;
  auto add_var = [&](std::vector<int> counts, Real mult, Real prod) {
    m.var.push_back({std::move(counts), std::move(mult), prod / zdot_bar, Real(1)});
  };
  {
    std::vector<int> c(kSpins, 0);
    c[Sff] = d;
    add_var(c, Real(1), pow(hh[Sff], d));
  }
  const Real cutoff = ldexp(Real(1), -(Real::default_bits() + 20)) * zdot_bar;
  for (int x = 0; x < 2; ++x) {
    const Spin sxx = x == 0 ? S00 : S11;
    const Spin sxf = x == 0 ? S0f : S1f;
    const Spin sfx = x == 0 ? Sf0 : Sf1;
    const Real& a = hh[sxx];
    const Real& b = hh[sxf];
    {
      std::vector<int> c(kSpins, 0);
      c[sfx] = 1;
      c[sxf] = d - 1;
      add_var(c, D, hh[sfx] * pow(b, d - 1));
    }
    if (a.is_zero()) continue;
    Real mult = D * Real(d - 1) / Real(2);
    Real prod = a * a * pow(b, d - 2);
    Real ratio_ab = b.is_zero() ? Real(0) : a / b;
    for (int j = 2; j <= d; ++j) {
      if (j > 2) {
        mult = mult * Real(d - j + 1) / Real(j);
        prod = b.is_zero() ? pow(a, j) * pow(b, d - j) : prod * ratio_ab;
      }
      std::vector<int> c(kSpins, 0);
      c[sxx] = j;
      c[sxf] = d - j;
      Real term = mult * prod;
      add_var(c, mult, prod);
      // Past the mode the terms decrease; drop the tail once it is negligible.
      if (d > full_limit && Real(j) > D * a / (a + b) && term < cutoff) {
        if (j < d) m.complete = false;
        break;
      }
    }
  }

  // Clause side, from the r/f classes with positive weight split by 0/1.
  Real zhat_bar(0);
  constexpr Spin zero_of[kRF] = {S00, S0f, Sf0, Sff};
  constexpr Spin one_of[kRF] = {S11, S1f, Sf1, Sff};
  for (int nrr = 0; nrr <= k; ++nrr)
    for (int nrf = 0; nrr + nrf <= k; ++nrf)
      for (int nfr = 0; nrr + nrf + nfr <= k; ++nfr) {
        const int nff = k - nrr - nrf - nfr;
        RFCounts rc{nrr, nrf, nfr, nff};
        mpz_class num = psi_hat_rf_numerator(rc, k);
        if (num == 0) continue;
        Real w = from_mpz(num) / ldexp(Real(1), k);
        for (int rr0 = 0; rr0 <= nrr; ++rr0)
          for (int rf0 = 0; rf0 <= nrf; ++rf0)
            for (int fr0 = 0; fr0 <= nfr; ++fr0) {
              std::vector<int> c(kSpins, 0);
              c[zero_of[RR]] += rr0;
              c[one_of[RR]] += nrr - rr0;
              c[zero_of[RFr]] += rf0;
              c[one_of[RFr]] += nrf - rf0;
              c[zero_of[FR]] += fr0;
              c[one_of[FR]] += nfr - fr0;
              c[Sff] += nff;
              Real prod = w;
              for (int s = 0; s < kSpins; ++s)
                if (c[s] > 0) prod *= pow(hd[s], c[s]);
              Real mult = from_mpz(multinomial(c));
              zhat_bar += mult * prod;
              m.clause.push_back({std::move(c), std::move(mult), prod, w});
            }
      }
  for (auto& cl : m.clause) cl.prob /= zhat_bar;
  m.zhat_bar = zhat_bar;

  m.vh.assign(kSpins, Real(0));
  for (const auto& cl : m.var)
    for (int s = 0; s < kSpins; ++s)
      if (cl.counts[s] > 0) m.vh[s] += cl.multiplicity * cl.prob * Real(cl.counts[s]);
  for (auto& x : m.vh) x /= D;

  m.z_bar = Real(0);
  for (int s = 0; s < kSpins; ++s) m.z_bar += hd[s] * hh[s];
  m.has_normalizers = true;
  Real e1 = abs(zdot_bar / h.zdot - m.z_bar) / m.z_bar;
  Real e2 = abs(zhat_bar / h.zhat - m.z_bar) / m.z_bar;
  if (!(e1 < tol) || !(e2 < tol))
    throw ConsistencyError("empirical_from_law: z_bar = zdot_bar/zdot = zhat_bar/zhat violated (" + e1.str(4) +
                           ", " + e2.str(4) + ")");
  return m;
}

EmpiricalMeasure relabel_01(const EmpiricalMeasure& m) {
  if (m.alphabet != kSpins) throw InputError("relabel_01: single-copy measure expected");
  EmpiricalMeasure out = m;
  auto flip = [](const std::vector<int>& c) {
    std::vector<int> r(kSpins, 0);
    for (int s = 0; s < kSpins; ++s) r[spin_xor(static_cast<Spin>(s), 1)] = c[s];
    return r;
  };
  for (auto& cl : out.var) cl.counts = flip(cl.counts);
  for (auto& cl : out.clause) cl.counts = flip(cl.counts);
  for (int s = 0; s < kSpins; ++s) out.vh[spin_xor(static_cast<Spin>(s), 1)] = m.vh[s];
  return out;
}

std::vector<Real> clause_marginal(const EmpiricalMeasure& m) {
  std::vector<Real> vh(m.alphabet, Real(0));
  for (const auto& cl : m.clause)
    for (int s = 0; s < m.alphabet; ++s)
      if (cl.counts[s] > 0) vh[s] += cl.multiplicity * cl.prob * Real(cl.counts[s]);
  for (auto& x : vh) x /= Real(m.k);
  return vh;
}

RatePoint phi_bethe(const EmpiricalMeasure& m, const Real& tol) {
  std::vector<Real> vc = clause_marginal(m);
  Real mismatch(0);
  for (int s = 0; s < m.alphabet; ++s) mismatch = max(mismatch, abs(vc[s] - m.vh[s]));
  if (!(mismatch < tol)) throw ConsistencyError("phi_bethe: inconsistent edge marginals (" + mismatch.str(4) + ")");
  const Real D(m.d);
  const Real ratio = D / Real(m.k);
  Real var_term(0), clause_term(0), edge_term(0);
  for (const auto& cl : m.var)
    if (cl.prob.sign() > 0) var_term += cl.multiplicity * cl.prob * log(cl.weight / cl.prob);
  for (const auto& cl : m.clause)
    if (cl.prob.sign() > 0) clause_term += cl.multiplicity * cl.prob * log(cl.weight / cl.prob);
  for (const auto& x : m.vh) edge_term += xlogx(x);
  RatePoint r;
  r.phi = var_term + ratio * clause_term + D * edge_term;
  if (m.has_normalizers) {
    r.zdot_bar = m.zdot_bar;
    r.zhat_bar = m.zhat_bar;
    r.z_bar = m.z_bar;
    r.bethe_normalizer_form = log(m.zdot_bar) + ratio * log(m.zhat_bar) - D * log(m.z_bar);
  }
  if (m.complete) {
    Real s(0);
    Real sdot(0), shat(0);
    int sbar = 0;
    bool positive = true;
    for (const auto& x : m.vh) {
      if (x.sign() <= 0) continue;
      ++sbar;
      s += log(D * x);
    }
    s -= log(Real(m.k));
    for (const auto& cl : m.var) {
      if (cl.prob.sign() <= 0) positive = false;
      s -= cl.multiplicity * log(cl.prob);
      sdot += cl.multiplicity;
    }
    for (const auto& cl : m.clause) {
      if (cl.prob.sign() <= 0) positive = false;
      s -= cl.multiplicity * log(ratio * cl.prob);
      shat += cl.multiplicity;
    }
    if (positive) {
      r.log_prefactor = ldexp(s, -1);
      r.dimension = sdot + shat - Real(sbar) - Real(1);
    }
  }
  return r;
}

Real phi_star_explicit(const ScalarState& s) {
  const Real& q = s.q;
  const Real& d = s.d;
  const int k = s.k;
  Real qk = pow(q / Real(2), k);
  return const_log2() - log(Real(2) - q) - d * (Real(1) - Real(1) / Real(k) - Real(1) / d) * log1p(-Real(2) * qk) +
         (d - Real(1)) * log1p(-s.Q);
}

PhiStar phi_star(int k, const Real& d, const Real& tol, int max_iter) {
  PhiStar out;
  out.scalar = iterate_qv(k, d, Real(1), tol, max_iter);
  out.phi = phi_star_explicit(out.scalar);
  return out;
}

Normalizers normalizers(const FixedPoint& fp) {
  const ScalarState& s = fp.scalar;
  const RFLaw& g = fp.rf;
  const int k = s.k;
  const Real& d = s.d;
  Normalizers n;
  n.zdot_bar_g = Real(2) * pow_unit(g.ghat[RR] + g.ghat[FF], d) - pow_unit(g.ghat[FF], d);
  n.zhat_bar_g = pow(g.gdot[RFr] + g.gdot[FF], k) - Real(2) * pow(g.gdot[RFr] / Real(2), k);
  n.z_bar_g = (g.gdot[RR] + g.gdot[FF]) * (g.ghat[RR] + g.ghat[FF]) + g.gdot[FF] * g.ghat[RR];
  const Real qv = s.q_free * s.v_rig;
  n.zdot_bar_g_closed = (Real(2) - pow_unit(s.v, d)) / pow(Real(2), d);
  n.zhat_bar_g_closed = (Real(1) + qv) / (pow(Real(2) + s.q_free, k) * (Real(1) + s.v_rig));
  n.z_bar_g_closed = (Real(1) + qv) / (Real(2) * (Real(2) + s.q_free));
  n.phi_g = log(n.zdot_bar_g) + d / Real(k) * log(n.zhat_bar_g) - d * log(n.z_bar_g);
  return n;
}

DStar find_d_star(int k, const Real& tol, const Real& d_tol, int max_bisect) {
  check_k(k, "find_d_star");
  Thresholds t = thresholds(k);
  Real lo = t.d_lbd, hi = t.d_ubd;
  if (!(lo > Real(1))) lo = Real(1) + ldexp(Real(1), -8);
  PhiStar plo = phi_star(k, lo, tol);
  PhiStar phi = phi_star(k, hi, tol);
  if (!(plo.phi.sign() > 0 && phi.phi.sign() < 0))
    throw NonConvergence("find_d_star: no sign change on [d_lbd, d_ubd] (phi*=" + plo.phi.str(6) + ", " +
                         phi.phi.str(6) + ")");
  DStar out;
  int it = 0;
  while (it < max_bisect && hi - lo > d_tol) {
    ++it;
    Real mid = ldexp(lo + hi, -1);
    PhiStar pm = phi_star(k, mid, tol);
    if (pm.phi.sign() > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.d_star = ldexp(lo + hi, -1);
  PhiStar fin = phi_star(k, out.d_star, tol);
  out.phi_star = fin.phi;
  out.scalar = fin.scalar;
  out.iterations = it;
  out.bracket_width = hi - lo;
  return out;
}

}  // namespace naesat
