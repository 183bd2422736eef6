#include "naesat/errors.hpp"
#include "naesat/moments.hpp"

namespace naesat {

namespace {

// M(s,t) = vh(s)^{-1} sum over tuples of prob * 1{(sigma_1, sigma_2) = (s, t)}.
Matrix markov_from_classes(const std::vector<TupleClass>& classes, int n, const std::vector<Real>& vh, int A,
                           bool circ_only) {
  Matrix M(A, A);
  const Real pairs = Real(n) * Real(n - 1);
  for (const auto& cl : classes) {
    Real p = cl.prob;
    if (circ_only) {
      SpinCounts c{};
      for (int s = 0; s < kSpins; ++s) c[s] = cl.counts[s];
      if (!psi_hat_circ(c)) continue;
      p = cl.prob / cl.weight;  // per-tuple probability given L = 0
    }
    Real mass = cl.multiplicity * p / pairs;
    for (int s = 0; s < A; ++s) {
      if (cl.counts[s] == 0) continue;
      for (int t = 0; t < A; ++t) {
        int ct = cl.counts[t] - (s == t);
        if (ct <= 0) continue;
        M(s, t) += mass * Real(cl.counts[s]) * Real(ct);
      }
    }
  }
  for (int s = 0; s < A; ++s)
    for (int t = 0; t < A; ++t) M(s, t) /= vh[s];
  return M;
}

Real stochastic_error(const Matrix& M) {
  Real e(0);
  for (std::size_t i = 0; i < M.rows(); ++i) {
    Real s(0);
    for (std::size_t j = 0; j < M.cols(); ++j) s += M(i, j);
    e = max(e, abs(s - Real(1)));
  }
  return e;
}

Real reversibility_error(const Matrix& M, const std::vector<Real>& vh) {
  Real e(0);
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t j = 0; j < M.cols(); ++j) e = max(e, abs(vh[i] * M(i, j) - vh[j] * M(j, i)));
  return e;
}

Matrix symmetrized(const Matrix& M) { return (M + M.transpose()).scaled(Real(0.5)); }

Matrix affine(const Matrix& M, const Real& c) {
  return Matrix::identity(M.rows()) + M.scaled(c);
}

std::vector<Real> kron_vec(const std::vector<Real>& a, const std::vector<Real>& b) {
  std::vector<Real> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(x * y);
  return out;
}

Matrix hessian_F(const Matrix& Ldot, const Matrix& Lhat, const std::vector<Real>& vh) {
  const std::size_t n = vh.size();
  return inverse(conjugate_by_sqrt(Ldot, vh)) + inverse(conjugate_by_sqrt(Lhat, vh)) - Matrix::identity(n);
}

// Spectrum of the symmetric part of F on the complement of vh^{1/2}.
std::vector<Real> restricted_spectrum(const Matrix& F, const std::vector<Real>& vh) {
  const std::size_t n = vh.size();
  std::vector<Real> w(n);
  Real norm(0);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = sqrt(vh[i]);
    norm += w[i] * w[i];
  }
  norm = sqrt(norm);
  for (auto& x : w) x /= norm;
  Matrix P = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) P(i, j) -= w[i] * w[j];
  EigenResult e = jacobi_eigen(symmetrized(P * symmetrized(F) * P));
  std::size_t drop = 0;
  Real best(-1);
  for (std::size_t j = 0; j < n; ++j) {
    Real dot(0);
    for (std::size_t i = 0; i < n; ++i) dot += e.vectors(i, j) * w[i];
    if (abs(dot) > best) {
      best = abs(dot);
      drop = j;
    }
  }
  std::vector<Real> out;
  for (std::size_t j = 0; j < n; ++j)
    if (j != drop) out.push_back(e.values[j]);
  return out;
}

}  // namespace

ExplicitTables explicit_tables(const ScalarState& s) {
  ExplicitTables t;
  const Real& q = s.q;
  const Real& qf = s.q_free;
  const Real& v = s.v;
  const Real& vr = s.v_rig;
  Real norm = Real(2) * (Real(1) + qf * vr);
  t.vh = {q * v / norm, q * vr / norm, Real(2) * qf * vr / norm, q * v / norm, q * vr / norm,
          Real(2) * qf * vr / norm, qf * v / (Real(1) + qf * vr)};
  t.a = vr * (Real(1) + qf) / (Real(1) - qf);
  t.b = Real(2) * vr * qf / (v * q);
  t.lambda = sqrt(t.a * t.b);
  t.delta = qf * (Real(1) + vr) / (Real(1) - vr);
  t.gamma = vr / v;
  t.eps = Real(2) * qf / q;
  t.B = vr / (Real(1) - qf - Real(2) * vr - qf * vr);

  t.Mdot = Matrix(kSpins, kSpins);
  for (int x = 0; x < 2; ++x) {
    const int xf = x == 0 ? S0f : S1f;
    const int xx = x == 0 ? S00 : S11;
    const int fx = x == 0 ? Sf0 : Sf1;
    t.Mdot(xf, xf) = Real(1) - t.a;
    t.Mdot(xf, xx) = t.a - t.b;
    t.Mdot(xf, fx) = t.b;
    t.Mdot(xx, xf) = Real(1) - t.a;
    t.Mdot(xx, xx) = t.a;
    t.Mdot(fx, xf) = Real(1);
  }
  t.Mdot(Sff, Sff) = Real(1);

  const Real& de = t.delta;
  const Real& gm = t.gamma;
  const Real eg = t.eps * gm;
  const Real mrf = Real(1) - de - gm;
  t.Mhat = Matrix(kSpins, kSpins);
  for (int x = 0; x < 2; ++x) {
    const int xf = x == 0 ? S0f : S1f;
    const int xx = x == 0 ? S00 : S11;
    const int fx = x == 0 ? Sf0 : Sf1;
    for (int y = 0; y < 2; ++y) {
      const int yf = y == 0 ? S0f : S1f;
      const int yy = y == 0 ? S00 : S11;
      const int fy = y == 0 ? Sf0 : Sf1;
      t.Mhat(xf, yf) = mrf / Real(2);
      t.Mhat(xf, yy) = gm / Real(2);
      t.Mhat(xf, fy) = eg / Real(2);
      t.Mhat(xx, yf) = Real(1) / Real(2);
      t.Mhat(fx, yf) = Real(1) / Real(2);
    }
    t.Mhat(xf, Sff) = de - eg;
    t.Mhat(Sff, xf) = (Real(1) - de) / Real(2);
  }
  t.Mhat(Sff, Sff) = de;

  t.Mhat0 = Matrix(kSpins, kSpins);
  Matrix& M0 = t.Mhat0;
  const Real plus = (Real(1) + t.B) / Real(2) * mrf;
  const Real minus = (Real(1) - t.B) / Real(2) * mrf;
  M0(S0f, S0f) = plus;
  M0(S0f, S1f) = minus;
  M0(S0f, S11) = gm;
  M0(S0f, Sf1) = eg;
  M0(S0f, Sff) = de - eg;
  M0(S00, S1f) = Real(1);
  M0(Sf0, S1f) = Real(1);
  M0(S1f, S0f) = minus;
  M0(S1f, S00) = gm;
  M0(S1f, Sf0) = eg;
  M0(S1f, S1f) = plus;
  M0(S1f, Sff) = de - eg;
  M0(S11, S0f) = Real(1);
  M0(Sf1, S0f) = Real(1);
  M0(Sff, S0f) = (Real(1) - de) / Real(2);
  M0(Sff, S1f) = (Real(1) - de) / Real(2);
  M0(Sff, Sff) = de;
  return t;
}

SpectralReport transition_matrices(const EmpiricalMeasure& m, bool with_pairs) {
  if (m.alphabet != kSpins) throw InputError("transition_matrices: single-copy measure expected");
  for (const auto& x : m.vh)
    if (x.sign() <= 0) throw InputError("transition_matrices: edge marginal must be positive");
  SpectralReport r;
  r.vh = m.vh;
  r.Mdot = markov_from_classes(m.var, m.d, m.vh, kSpins, false);
  r.Mhat = markov_from_classes(m.clause, m.k, m.vh, kSpins, false);
  r.Mhat0 = markov_from_classes(m.clause, m.k, m.vh, kSpins, true);
  r.Mhat1 = Matrix(kSpins, kSpins);
  for (int s = 0; s < kSpins; ++s)
    for (int t = 0; t < kSpins; ++t) r.Mhat1(s, t) = r.Mhat0(s, spin_xor(static_cast<Spin>(t), 1));

  r.stochastic_error = Real(0);
  r.reversibility_error = Real(0);
  for (const Matrix* M : {&r.Mdot, &r.Mhat, &r.Mhat0, &r.Mhat1}) {
    r.stochastic_error = max(r.stochastic_error, stochastic_error(*M));
    r.reversibility_error = max(r.reversibility_error, reversibility_error(*M, m.vh));
  }
  r.mhat_split_error = (r.Mhat - (r.Mhat0 + r.Mhat1).scaled(Real(0.5))).max_abs();
  r.eig_Mdot = jacobi_eigen(symmetrized(conjugate_by_sqrt(r.Mdot, m.vh))).values;

  const Real dm1(m.d - 1), km1(m.k - 1);
  r.Ldot = affine(r.Mdot, dm1);
  r.Lhat = affine(r.Mhat, km1);
  r.L = affine(r.Mdot * r.Mhat, -(dm1 * km1));
  r.F = hessian_F(r.Ldot, r.Lhat, m.vh);

  r.with_pairs = with_pairs;
  if (with_pairs) {
    r.vh2 = kron_vec(m.vh, m.vh);
    r.Mdot2 = kron(r.Mdot, r.Mdot);
    r.Mhat2 = (kron(r.Mhat0, r.Mhat0) + kron(r.Mhat1, r.Mhat1)).scaled(Real(0.5));
    r.Ldot2 = affine(r.Mdot2, dm1);
    r.Lhat2 = affine(r.Mhat2, km1);
    r.L2 = affine(r.Mdot2 * r.Mhat2, -(dm1 * km1));
    r.F2 = hessian_F(r.Ldot2, r.Lhat2, r.vh2);
  }
  return r;
}

HessianVerdict hessian_definiteness(const SpectralReport& r) {
  HessianVerdict v;
  const Real floor_sv = ldexp(Real(1), -(Real::default_bits() / 2));
  std::vector<const Matrix*> Ls{&r.Ldot, &r.Lhat, &r.L};
  if (r.with_pairs) Ls.insert(Ls.end(), {&r.Ldot2, &r.Lhat2, &r.L2});
  v.nonsingular = true;
  for (const Matrix* L : Ls) {
    v.sigma_min.push_back(min_singular_value(*L));
    if (!(v.sigma_min.back() > floor_sv)) v.nonsingular = false;
  }
  if (!v.nonsingular) return v;

  v.F_asymmetry = r.F.max_asymmetry();
  Matrix prod = conjugate_by_sqrt(inverse(r.Ldot) * r.L * inverse(r.Lhat), r.vh);
  v.F_product_form_error = (prod - r.F).max_abs();
  v.F_restricted = restricted_spectrum(r.F, r.vh);
  v.hessian_max = -v.F_restricted.front();
  v.negative_definite = v.hessian_max.sign() < 0;
  if (r.with_pairs) {
    v.F2_asymmetry = r.F2.max_asymmetry();
    v.F2_restricted = restricted_spectrum(r.F2, r.vh2);
    v.hessian2_max = -v.F2_restricted.front();
    v.pair_negative_definite = v.hessian2_max.sign() < 0;
  }
  return v;
}

}  // namespace naesat
