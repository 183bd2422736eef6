#include "naesat/recursions.hpp"

#include <span>
#include <string>
#include <vector>

#include "naesat/errors.hpp"

namespace naesat {

namespace {

// x^y for x >= 0 and real y; 0^y = 0 for y > 0.
Real rpow(const Real& x, const Real& y) {
  if (y.is_zero()) return Real(1);
  if (x.sign() <= 0) return Real(0);
  return exp(y * log(x));
}

Real max_abs_diff(std::span<const Real> a, std::span<const Real> b) {
  Real m(0);
  for (std::size_t i = 0; i < a.size(); ++i) m = max(m, abs(a[i] - b[i]));
  return m;
}

void check_k_d(int k, const Real& d, const char* who) {
  if (k < 3) throw InputError(std::string(who) + ": need k >= 3");
  if (!(d > Real(1))) throw InputError(std::string(who) + ": need d > 1");
}

// q_free after one application of q -> q_{d-1}(v_{k-1}(q)).
Real scalar_step(int k, const Real& dm1, const Real& q_free) {
  Real Q = pow((Real(1) - q_free) / Real(2), k - 1);
  Real v_rig = Q / (Real(1) - Q);
  Real w = exp(dm1 * log1p(-v_rig));
  return w / (Real(2) - w);
}

ScalarState make_state(int k, const Real& d, const Real& q_free) {
  ScalarState s;
  s.k = k;
  s.d = d;
  s.q_free = q_free;
  s.q = Real(1) - q_free;
  s.Q = pow(s.q / Real(2), k - 1);
  s.v_rig = s.Q / (Real(1) - s.Q);
  s.v = Real(1) - s.v_rig;
  s.residual = abs(scalar_step(k, d - Real(1), q_free) - q_free);
  return s;
}

}  // namespace

long default_precision_bits(int k) { return 4L * k + 64; }

Real default_tol(int k) { return ldexp(Real(1), -(2L * k + 40)); }

Real q_of_v(const Real& d, const Real& v) {
  Real w = rpow(v, d - Real(1));
  return (Real(2) - Real(2) * w) / (Real(2) - w);
}

Real v_of_q(int k, const Real& q) {
  Real Q = pow(q / Real(2), k - 1);
  return (Real(1) - Real(2) * Q) / (Real(1) - Q);
}

ScalarState iterate_qv(int k, const Real& d, const Real& q0, const Real& tol, int max_iter) {
  check_k_d(k, d, "iterate_qv");
  if (q0.sign() < 0 || q0 > Real(1)) throw InputError("iterate_qv: q0 outside [0,1]");
  const Real dm1 = d - Real(1);
  Real qf = Real(1) - q0;
  for (int it = 1; it <= max_iter; ++it) {
    Real next = scalar_step(k, dm1, qf);
    Real step = abs(next - qf);
    qf = std::move(next);
    if (step < tol) {
      // Polish toward working precision so the small message components are
      // accurate in relative terms, not just to tol.
      const Real floor = ldexp(qf, -Real::default_bits());
      for (int extra = 0; extra < 64 && step > floor; ++extra, ++it) {
        Real again = scalar_step(k, dm1, qf);
        Real s2 = abs(again - qf);
        qf = std::move(again);
        if (!(s2 < step)) break;
        step = std::move(s2);
      }
      ScalarState s = make_state(k, d, qf);
      s.iterations = it;
      return s;
    }
  }
  throw NonConvergence("iterate_qv: no convergence within " + std::to_string(max_iter) + " iterations (k=" +
                       std::to_string(k) + ", d=" + d.str(12) + ")");
}

ScalarState iterate_qv(int k, const Real& d) { return iterate_qv(k, d, Real(1), default_tol(k)); }

Real d_of_q(int k, const Real& q) {
  if (k < 3) throw InputError("d_of_q: need k >= 3");
  if (q.sign() <= 0 || !(q < Real(1))) throw InputError("d_of_q: q must lie in (0,1)");
  Real Q = pow(q / Real(2), k - 1);
  Real num = log(Real(2) * (Real(1) - q) / (Real(2) - q));
  Real den = log1p(-Q / (Real(1) - Q));
  return Real(1) + num / den;
}

RFLaw rf_bethe_image(int k, const Real& d, const RFLaw& g) {
  const Real c = ldexp(Real(1), 1 - k);
  const Real& grr = g.gdot[RR];
  const Real& grf = g.gdot[RFr];
  const Real& gfr = g.gdot[FR];
  const Real& gff = g.gdot[FF];
  Real p1 = pow(grf, k - 1);
  Real p2 = pow(grf, k - 2);
  Real s1 = pow(grf + gff, k - 1);
  RFLaw out;
  out.ghat[RR] = c * p1;
  out.ghat[FR] = c * p1;
  out.ghat[FF] = s1 - Real(2) * c * p1;
  out.ghat[RFr] = s1 - c * Real(k + 1) * p1 + c * Real(k - 1) * p2 * (grr + gfr - Real(2) * gff);

  const Real dm1 = d - Real(1);
  const Real& hrr = g.ghat[RR];
  const Real& hrf = g.ghat[RFr];
  const Real& hff = g.ghat[FF];
  Real t = Real(2) * (rpow(hrr + hrf, dm1) - rpow(hrf, dm1));
  out.gdot[FF] = rpow(hff, dm1);
  out.gdot[FR] = Real(2) * rpow(hrf, dm1);
  out.gdot[RR] = t;
  out.gdot[RFr] = t;

  out.zhat = Real(0);
  out.zdot = Real(0);
  for (int i = 0; i < kRF; ++i) {
    out.zhat += out.ghat[i];
    out.zdot += out.gdot[i];
  }
  for (int i = 0; i < kRF; ++i) {
    out.ghat[i] /= out.zhat;
    out.gdot[i] /= out.zdot;
  }
  out.residual = max(max_abs_diff(out.gdot, g.gdot), max_abs_diff(out.ghat, g.ghat));
  return out;
}

RFLaw rf_law_from_scalar(const ScalarState& s, const Real& tol) {
  RFLaw g;
  Real den = Real(2) + s.q_free;
  g.gdot[FR] = Real(2) * s.q_free / den;
  g.gdot[FF] = s.q_free / den;
  g.gdot[RR] = s.q / den;
  g.gdot[RFr] = s.q / den;
  g.ghat[RFr] = s.v / Real(2);
  g.ghat[FF] = s.v / Real(2);
  g.ghat[RR] = s.v_rig / Real(2);
  g.ghat[FR] = s.v_rig / Real(2);
  RFLaw img = rf_bethe_image(s.k, s.d, g);
  g.zdot = img.zdot;
  g.zhat = img.zhat;
  g.residual = img.residual;
  if (!(g.residual < tol))
    throw ConsistencyError("rf_law_from_scalar: r/f Bethe residual " + g.residual.str(6) + " exceeds tolerance");
  return g;
}

MessageLaw bethe_image(int k, const Real& d, const MessageLaw& h) {
  MessageLaw out;
  const Real dm1 = d - Real(1);
  const Real dm2 = d - Real(2);
  const auto& hh = h.hhat;
  for (int x = 0; x < 2; ++x) {
    const Real& a = hh[x == 0 ? S00 : S11];
    const Real& b = hh[x == 0 ? S0f : S1f];
    const Real& c = hh[x == 0 ? Sf0 : Sf1];
    Real both = rpow(a + b, dm1) - rpow(b, dm1);
    Real bd2 = rpow(b, dm2);
    out.hdot[x == 0 ? S00 : S11] = both;
    out.hdot[x == 0 ? S0f : S1f] = both + dm1 * (c - a) * bd2;
    out.hdot[x == 0 ? Sf0 : Sf1] = rpow(b, dm1);
  }
  out.hdot[Sff] = rpow(hh[Sff], dm1);

  // The literal average only sees the 0/1-symmetrized law.
  const auto& hd = h.hdot;
  const Real A = hd[S0f] + hd[S1f];
  const Real B = hd[S00] + hd[S11];
  const Real C = hd[Sf0] + hd[Sf1];
  const Real D = Real(2) * hd[Sff];
  const int K = k - 1;
  const Real c = ldexp(Real(1), 1 - k);
  Real aK = pow(A, K);
  Real aK1 = pow(A, K - 1);
  Real top = pow(Real(2) * A + D, K);
  Real wf = top - Real(2) * aK;
  Real w0f = top + Real(K) * (C + B - D) * aK1 - Real(K + 2) * aK;
  out.hhat[Sff] = c * wf;
  out.hhat[Sf0] = out.hhat[Sf1] = c * aK;
  out.hhat[S00] = out.hhat[S11] = c * aK;
  out.hhat[S0f] = out.hhat[S1f] = c * w0f;

  out.zdot = Real(0);
  out.zhat = Real(0);
  for (int s = 0; s < kSpins; ++s) {
    out.zdot += out.hdot[s];
    out.zhat += out.hhat[s];
  }
  for (int s = 0; s < kSpins; ++s) {
    out.hdot[s] /= out.zdot;
    out.hhat[s] /= out.zhat;
  }
  return out;
}

Real bethe_residual(int k, const Real& d, const MessageLaw& h) {
  MessageLaw img = bethe_image(k, d, h);
  return max(max_abs_diff(img.hdot, h.hdot), max_abs_diff(img.hhat, h.hhat));
}

MessageLaw lift_to_zof(int k, const Real& d, const RFLaw& g, const Real& tol) {
  MessageLaw h;
  Real den = Real(2) - g.ghat[FF];
  for (int s = 0; s < kSpins; ++s) {
    RF r = project(static_cast<Spin>(s));
    h.hhat[s] = g.ghat[r] / den;
    h.hdot[s] = r == FF ? g.gdot[r] : g.gdot[r] / Real(2);
  }
  MessageLaw img = bethe_image(k, d, h);
  h.zdot = img.zdot;
  h.zhat = img.zhat;
  Real res = max(max_abs_diff(img.hdot, h.hdot), max_abs_diff(img.hhat, h.hhat));
  if (!(res < tol))
    throw ConsistencyError("lift_to_zof: Bethe residual " + res.str(6) + " exceeds tolerance");
  Real rel = abs(Real(4) * h.hhat[S00] + Real(3) * h.hhat[Sff] - Real(1));
  Real v = Real(2) * g.ghat[FF];
  Real rel_v = abs(v - Real(4) * h.hhat[Sff] / (Real(1) + h.hhat[Sff]));
  if (!(rel < tol) || !(rel_v < tol)) throw ConsistencyError("lift_to_zof: 4 hhat_00 + 3 hhat_ff != 1");
  return h;
}

MessageLaw relabel_01(const MessageLaw& h) {
  MessageLaw out = h;
  for (int s = 0; s < kSpins; ++s) {
    int t = spin_xor(static_cast<Spin>(s), 1);
    out.hdot[t] = h.hdot[s];
    out.hhat[t] = h.hhat[s];
  }
  return out;
}

FixedPoint solve_fixed_point(int k, const Real& d, const Real& tol, int max_iter) {
  FixedPoint fp;
  fp.scalar = iterate_qv(k, d, Real(1), tol, max_iter);
  fp.rf = rf_law_from_scalar(fp.scalar, tol);
  fp.law = lift_to_zof(k, d, fp.rf, tol);
  return fp;
}

std::array<Real, kPairs> pair_clause_step(int k, const std::array<Real, kPairs>& q) {
  const int K = k - 1;
  const Real c = ldexp(Real(1), 1 - k);
  Real eq = q[pair_index(0, 0)] + q[pair_index(1, 1)];
  Real ne = q[pair_index(0, 1)] + q[pair_index(1, 0)];
  Real row(0), col(0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (a < 2) row += q[pair_index(a, b)];
      if (b < 2) col += q[pair_index(a, b)];
    }
  Real peq = pow(eq, K);
  Real pne = pow(ne, K);
  std::array<Real, kPairs> h;
  h[pair_index(0, 0)] = h[pair_index(1, 1)] = c * peq;
  h[pair_index(0, 1)] = h[pair_index(1, 0)] = c * pne;
  h[pair_index(0, 2)] = h[pair_index(1, 2)] = c * (pow(row, K) - peq - pne);
  h[pair_index(2, 0)] = h[pair_index(2, 1)] = c * (pow(col, K) - peq - pne);
  Real rest(0);
  for (int i = 0; i < kPairs - 1; ++i) rest += h[i];
  h[pair_index(2, 2)] = Real(1) - rest;
  return h;
}

std::array<Real, kPairs> pair_variable_step(const Real& d, const std::array<Real, kPairs>& qh) {
  // Value a is compatible with incoming sets {a,f} minus {f} (a rigid) or {f}.
  struct Term {
    int set;  // bit mask over {0,1,f}
    int sign;
  };
  auto terms = [](int a) -> std::vector<Term> {
    if (a == 2) return {{4, 1}};
    return {{(1 << a) | 4, 1}, {4, -1}};
  };
  auto S = [&](int A, int B) {
    Real s(0);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        if ((A >> a & 1) && (B >> b & 1)) s += qh[pair_index(a, b)];
    return s;
  };
  const Real dm1 = d - Real(1);
  std::array<Real, kPairs> out;
  Real z(0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      Real v(0);
      for (const Term& ta : terms(a))
        for (const Term& tb : terms(b)) {
          Real p = rpow(S(ta.set, tb.set), dm1);
          if (ta.sign * tb.sign > 0) {
            v += p;
          } else {
            v -= p;
          }
        }
      out[pair_index(a, b)] = v;
      z += v;
    }
  for (auto& x : out) x /= z;
  return out;
}

bool pair_in_regime(int k, const std::array<Real, kPairs>& q) {
  Real free_mass(0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (a == 2 || b == 2) free_mass += q[pair_index(a, b)];
  Real eq = q[pair_index(0, 0)] + q[pair_index(1, 1)];
  Real ne = q[pair_index(0, 1)] + q[pair_index(1, 0)];
  if (ne.is_zero()) return false;
  Real skew = abs(eq / ne - Real(1));
  return free_mass <= ldexp(Real(8), -k) && skew <= Real(k) / sqrt(ldexp(Real(1), k));
}

PairState pair_product(const ScalarState& s) {
  std::array<Real, 3> single{s.q / Real(2), s.q / Real(2), s.q_free};
  PairState p;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) p.qdot[pair_index(a, b)] = single[a] * single[b];
  p.qhat = pair_clause_step(s.k, p.qdot);
  Real next = max_abs_diff(pair_variable_step(s.d, p.qhat), p.qdot);
  p.residual = next;
  p.in_regime = pair_in_regime(s.k, p.qdot);
  return p;
}

PairState pair_perturbed(const ScalarState& s, const Real& eps) {
  PairState p = pair_product(s);
  Real up = Real(1) + eps / Real(2);
  Real down = Real(1) - eps / Real(2);
  p.qdot[pair_index(0, 0)] *= up;
  p.qdot[pair_index(1, 1)] *= up;
  p.qdot[pair_index(0, 1)] *= down;
  p.qdot[pair_index(1, 0)] *= down;
  Real z(0);
  for (const auto& x : p.qdot) z += x;
  for (auto& x : p.qdot) x /= z;
  p.qhat = pair_clause_step(s.k, p.qdot);
  p.residual = max_abs_diff(pair_variable_step(s.d, p.qhat), p.qdot);
  p.in_regime = pair_in_regime(s.k, p.qdot);
  return p;
}

PairState pair_iterate(int k, const Real& d, const PairState& init, const Real& tol, int max_iter) {
  check_k_d(k, d, "pair_iterate");
  PairState p = init;
  p.in_regime = pair_in_regime(k, p.qdot);
  for (int it = 1; it <= max_iter; ++it) {
    auto qh = pair_clause_step(k, p.qdot);
    auto next = pair_variable_step(d, qh);
    Real step = max_abs_diff(next, p.qdot);
    p.qdot = next;
    if (step < tol) {
      p.qhat = pair_clause_step(k, p.qdot);
      p.residual = max_abs_diff(pair_variable_step(d, p.qhat), p.qdot);
      p.iterations = it;
      return p;
    }
  }
  throw NonConvergence("pair_iterate: no convergence within " + std::to_string(max_iter) + " iterations");
}

}  // namespace naesat
