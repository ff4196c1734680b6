#include "certibif/bifurcation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <complex>
#include <numeric>

namespace certibif {

namespace {

void put_sym(IMatrix& H, Eigen::Index i, Eigen::Index j, const Interval& v) {
  H(i, j) = v;
  H(j, i) = v;
}

bool excludes(const Interval& x, const Interval& v) { return x.hi() < v.lo() || x.lo() > v.hi(); }

using CMat = Eigen::MatrixXcd;

CIMatrix to_cinterval(const CMat& M) {
  CIMatrix out(M.rows(), M.cols());
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) out(i, j) = CInterval(Interval(M(i, j).real()), Interval(M(i, j).imag()));
  return out;
}

CIMatrix to_cinterval(const IMatrix& M) {
  CIMatrix out(M.rows(), M.cols());
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) out(i, j) = CInterval(M(i, j));
  return out;
}

CIMatrix cmul(const CIMatrix& A, const CIMatrix& B) {
  CIMatrix C(A.rows(), B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
      CInterval s(0.0);
      for (Eigen::Index k = 0; k < A.cols(); ++k) s += A(i, k) * B(k, j);
      C(i, j) = s;
    }
  return C;
}

CInterval cdot(const CIVector& p, const CIVector& q) {
  CInterval s(0.0);
  for (Eigen::Index k = 0; k < p.size(); ++k) s += p(k) * q(k);
  return s;
}

CIVector civec(const IVector& re, const IVector& im) {
  CIVector out(re.size());
  for (Eigen::Index k = 0; k < re.size(); ++k) out(k) = CInterval(re(k), im(k));
  return out;
}

CIVector conj(const CIVector& v) {
  CIVector out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) out(k) = v(k).conj();
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Hessians of the extended systems

std::vector<IMatrix> SnSystem::hessians(const IVector& z) const {
  const Eigen::Index d = d_, m = dim();
  const CoralModel<Interval>& mi = cache_->mi;
  IVector x = z.head(d), v = z.segment(d, d);
  Interval lam = z(2 * d);
  IMatrix H1 = mi.hessian_first(lam, x);
  IMatrix H1u = mi.hessian_first(Interval(1.0), x);
  IVector G1 = mi.first_row_gradient(Interval(1.0), x);
  IMatrix T1 = mi.third_first(lam, x, v);
  IVector H1uv = H1u * v;
  const Eigen::Index L = 2 * d;

  std::vector<IMatrix> hs(m, IMatrix::Zero(m, m));
  IMatrix& h0 = hs[0];
  h0.block(0, 0, d, d) = H1;
  for (Eigen::Index k = 0; k < d; ++k) put_sym(h0, k, L, G1(k));

  IMatrix& h1 = hs[d];
  h1.block(0, 0, d, d) = T1;
  h1.block(0, d, d, d) = H1;
  h1.block(d, 0, d, d) = H1.transpose();
  for (Eigen::Index k = 0; k < d; ++k) {
    put_sym(h1, k, L, H1uv(k));
    put_sym(h1, d + k, L, G1(k));
  }

  IMatrix& hn = hs[2 * d];
  for (Eigen::Index k = 0; k < d; ++k) hn(d + k, d + k) = Interval(2.0);
  return hs;
}

std::vector<IMatrix> NsSystem::hessians(const IVector& z) const {
  const Eigen::Index d = d_, m = dim();
  const CoralModel<Interval>& mi = cache_->mi;
  IVector x = z.segment(iX(), d), w = z.segment(iW(), d), u = z.segment(iU(), d);
  Interval lam = z(iL());
  IMatrix H1 = mi.hessian_first(lam, x);
  IMatrix H1u = mi.hessian_first(Interval(1.0), x);
  IVector G1 = mi.first_row_gradient(Interval(1.0), x);
  const Eigen::Index L = iL(), W = iW(), U = iU(), A = iA(), B = iB();

  std::vector<IMatrix> hs(m, IMatrix::Zero(m, m));
  hs[0].block(0, 0, d, d) = H1;
  for (Eigen::Index k = 0; k < d; ++k) put_sym(hs[0], k, L, G1(k));

  // Eigenvector rows: first component is nonlinear in x, all rows bilinear in (a, b) x (w, u).
  auto eig_row0 = [&](IMatrix& h, const IVector& vec, Eigen::Index off) {
    h.block(0, 0, d, d) = mi.third_first(lam, x, vec);
    h.block(0, off, d, d) = H1;
    h.block(off, 0, d, d) = H1.transpose();
    IVector H1uv = H1u * vec;
    for (Eigen::Index k = 0; k < d; ++k) {
      put_sym(h, k, L, H1uv(k));
      put_sym(h, off + k, L, G1(k));
    }
  };
  eig_row0(hs[d], w, W);
  eig_row0(hs[2 * d], u, U);
  for (Eigen::Index i = 0; i < d; ++i) {
    put_sym(hs[d + i], A, W + i, Interval(-1.0));
    put_sym(hs[d + i], B, U + i, Interval(1.0));
    put_sym(hs[2 * d + i], B, W + i, Interval(-1.0));
    put_sym(hs[2 * d + i], A, U + i, Interval(-1.0));
  }
  hs[3 * d](A, A) = Interval(2.0);
  hs[3 * d](B, B) = Interval(2.0);
  for (Eigen::Index k = 0; k < d; ++k) {
    hs[3 * d + 1](W + k, W + k) = Interval(2.0);
    hs[3 * d + 2](U + k, U + k) = Interval(2.0);
  }
  return hs;
}

// ---------------------------------------------------------------------------
// Verified complex linear algebra

CIVector complex_solve(const CIMatrix& M, const CIVector& r) {
  const Eigen::Index n = M.rows();
  IMatrix big(2 * n, 2 * n);
  IVector rhs(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      big(i, j) = M(i, j).re;
      big(i, n + j) = -M(i, j).im;
      big(n + i, j) = M(i, j).im;
      big(n + i, n + j) = M(i, j).re;
    }
    rhs(i) = r(i).re;
    rhs(n + i) = r(i).im;
  }
  VerifiedSolve vs = verified_solve(big, rhs);
  return civec(vs.enclosure.head(n), vs.enclosure.tail(n));
}

CIVector left_eigenvector(const IMatrix& A, const CIVector& q, const CInterval& mu) {
  const Eigen::Index d = A.rows();
  CIMatrix M = CIMatrix::Constant(d + 1, d + 1, CInterval(0.0));
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) M(i, j) = CInterval(A(j, i));
    M(i, i) -= mu;
    // Border column: a fixed vector with q^T r != 0.
    M(i, d) = CInterval(Interval(q(i).re.mid()), Interval(-q(i).im.mid()));
    M(d, i) = q(i);
  }
  CIVector rhs = CIVector::Constant(d + 1, CInterval(0.0));
  rhs(d) = CInterval(1.0);
  return complex_solve(M, rhs).head(d);
}

// ---------------------------------------------------------------------------
// Spectrum

Spectrum verified_spectrum(const IMatrix& A) {
  const Eigen::Index n = A.rows();
  Eigen::EigenSolver<Eigen::MatrixXd> es(midpoint(A));
  if (es.info() != Eigen::Success) throw SpectrumInconclusive("eigen decomposition failed");
  CMat V = es.eigenvectors();
  Eigen::FullPivLU<CMat> lu(V);
  if (!lu.isInvertible()) throw SpectrumInconclusive("eigenvector matrix is singular");
  CMat Rm = lu.inverse();

  CIMatrix Vi = to_cinterval(V), Ri = to_cinterval(Rm);
  CIMatrix E = cmul(Ri, Vi);
  for (Eigen::Index i = 0; i < n; ++i) E(i, i) = CInterval(1.0) - E(i, i);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) E(i, j) = -E(i, j);
  double rho1 = norm_inf_upper(E);
  double rho2 = norm_inf_upper(Ri);
  if (!(rho1 < 1.0)) throw SpectrumInconclusive("|I - V^{-1} V| is not below 1");
  // |V^{-1} - R| <= eta, so V^{-1} A V = R A V + (V^{-1} - R) A V.
  Interval eta = Interval(rho1) * Interval(rho2) / (Interval(1.0) - Interval(rho1));
  CIMatrix AV = cmul(to_cinterval(A), Vi);
  CIMatrix C = cmul(Ri, AV);
  double eps = (eta * Interval(norm_inf_upper(AV))).hi();

  Spectrum sp;
  sp.total = static_cast<int>(n);
  std::vector<std::complex<double>> centers(n);
  std::vector<double> radii(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::complex<double> c(C(i, i).re.mid(), C(i, i).im.mid());
    Interval r((C(i, i) - CInterval(Interval(c.real()), Interval(c.imag()))).mag());
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) r += Interval(C(i, j).mag());
    r += Interval(eps);
    centers[i] = c;
    radii[i] = r.hi();
  }

  std::vector<Eigen::Index> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(centers[i] - centers[j]) <= (radii[i] + radii[j]) * (1 + 1e-12) + 1e-300)
        parent[find(i)] = find(j);

  std::vector<bool> comp_inside(n, true);
  std::vector<int> comp_size(n, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    Interval modulus = sqrt(sqr(Interval(centers[i].real())) + sqr(Interval(centers[i].imag()))) + Interval(radii[i]);
    if (!(modulus.hi() < 1.0)) comp_inside[find(i)] = false;
    comp_size[find(i)]++;
    sp.centers_abs.push_back(std::abs(centers[i]));
    sp.radii.push_back(radii[i]);
  }
  for (Eigen::Index i = 0; i < n; ++i)
    if (find(i) == i && comp_inside[i]) sp.inside += comp_size[i];
  return sp;
}

Interval pi_interval() { return Interval(M_PI, detail::next_up(M_PI)); }

Interval atan2_upper(const Interval& b, const Interval& a) {
  if (!(b.lo() > 0)) throw DomainError("atan2_upper needs b > 0");
  double lo = M_PI, hi = 0.0;
  for (double y : {b.lo(), b.hi()})
    for (double x : {a.lo(), a.hi()}) {
      double t = std::atan2(y, x);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
  using detail::next_down;
  using detail::next_up;
  return Interval(next_down(next_down(lo)), next_up(next_up(hi)));
}

// ---------------------------------------------------------------------------
// Conditions

NsConditions ns_conditions(const NsSystem& sys, const IVector& z) {
  const Eigen::Index d = sys.d();
  const CoralModel<Interval>& mi = sys.imodel();
  IVector x = z.segment(sys.iX(), d), w = z.segment(sys.iW(), d), u = z.segment(sys.iU(), d);
  Interval lam = z(sys.iL()), a = z(sys.iA()), b = z(sys.iB());
  IMatrix A = mi.jacobian_x(lam, x);
  CIVector q0 = civec(w, u);
  CInterval mu(a, b);
  CIVector pt = left_eigenvector(A, q0, mu);

  Interval pn2(0.0);
  for (Eigen::Index k = 0; k < d; ++k) pn2 += pt(k).norm2();
  Interval pn = sqrt(pn2);
  CIVector p(d), q(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    p(k) = CInterval(pt(k).re / pn, pt(k).im / pn);
    q(k) = q0(k) * pn;
  }
  CIVector qb = conj(q);
  CInterval rot(a, -b);  // e^{-i theta}

  NsConditions nc;
  IMatrix Al = mi.mixed_x_lambda(lam, x);
  CIVector Alq = to_cinterval(Al) * q;
  nc.c = (rot * cdot(p, Alq)).re;

  IMatrix ImA = IMatrix::Identity(d, d) - A;
  VerifiedSolve dx = verified_solve(ImA, mi.jacobian_lambda(lam, x));
  CIVector y = civec(dx.enclosure, IVector::Zero(d));
  CIVector total = Alq + mi.bilinear<CInterval>(lam, x, y, q);
  nc.c_total = (rot * cdot(p, total)).re;

  CIMatrix ImAc = to_cinterval(ImA);
  CIVector h11 = complex_solve(ImAc, mi.bilinear<CInterval>(lam, x, q, qb));
  CInterval e2(a * a - b * b, Interval(2.0) * a * b);
  CIMatrix M2 = to_cinterval(IMatrix(-A));
  for (Eigen::Index k = 0; k < d; ++k) M2(k, k) += e2;
  CIVector h20 = complex_solve(M2, mi.bilinear<CInterval>(lam, x, q, q));
  CInterval g = cdot(p, mi.trilinear<CInterval>(lam, x, q, q, qb)) +
                CInterval(2.0) * cdot(p, mi.bilinear<CInterval>(lam, x, q, h11)) +
                cdot(p, mi.bilinear<CInterval>(lam, x, qb, h20));
  CInterval eg = rot * g;
  nc.e = eg.re;
  nc.e_imag = eg.im;

  Interval theta = atan2_upper(b, a);
  Interval pi = pi_interval();
  nc.theta_deg = theta * Interval(180.0) / pi;
  nc.resonance_free["k1"] = theta.lo() > 0;
  nc.resonance_free["k2"] = excludes(theta, pi) && theta.lo() > 0;
  nc.resonance_free["k3"] = excludes(theta, Interval(2.0) * pi / Interval(3.0));
  nc.resonance_free["k4"] = excludes(theta, pi / Interval(2.0)) && excludes(theta, pi);
  return nc;
}

SnConditions sn_conditions(const SnSystem& sys, const IVector& z) {
  const Eigen::Index d = sys.d();
  const CoralModel<Interval>& mi = sys.imodel();
  IVector x = z.head(d), q = z.segment(d, d);
  Interval lam = z(2 * d);
  IMatrix A = mi.jacobian_x(lam, x);
  IMatrix M = IMatrix::Zero(d + 1, d + 1);
  M.block(0, 0, d, d) = A.transpose() - IMatrix::Identity(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    M(i, d) = Interval(q(i).mid());
    M(d, i) = q(i);
  }
  IVector rhs = IVector::Zero(d + 1);
  rhs(d) = Interval(1.0);
  IVector p = verified_solve(M, rhs).enclosure.head(d);

  SnConditions sc;
  IVector fl = mi.jacobian_lambda(lam, x);
  IVector Bqq = mi.bilinear<Interval>(lam, x, q, q);
  sc.c = Interval(0.0);
  sc.d = Interval(0.0);
  Interval ptq(0.0);
  for (Eigen::Index k = 0; k < d; ++k) {
    sc.c += p(k) * fl(k);
    sc.d += p(k) * Bqq(k);
    ptq += p(k) * q(k);
  }
  sc.ptq_minus_1 = ptq - Interval(1.0);
  return sc;
}

// ---------------------------------------------------------------------------
// Anchors

Eigen::VectorXd SnApprox::packed() const {
  const Eigen::Index d = x.size();
  Eigen::VectorXd z(2 * d + 1);
  z << x, v, lambda;
  return z;
}

Eigen::VectorXd NsApprox::packed() const {
  const Eigen::Index d = x.size();
  Eigen::VectorXd z(3 * d + 3);
  z << x, lambda, w, u, a, b;
  return z;
}

SnApprox approximate_sn(const CoralParams& prm) {
  SnSystem sys(prm);
  const CoralModel<double>& m = sys.model();
  BranchPoint bp = branch_point_from_density(m, fold_density(m));
  SnApprox ap;
  ap.x = bp.x;
  ap.lambda = bp.lambda;
  // At the fold the kernel of D_x f - I is spanned by the survival products a.
  ap.v = m.coeffs().a.normalized();
  SystemProblem<SnSystem> prob(sys);
  Eigen::VectorXd z = newton(prob, ap.packed());
  const Eigen::Index d = sys.d();
  ap.x = z.head(d);
  ap.v = z.segment(d, d);
  ap.lambda = z(2 * d);
  if (ap.v(0) < 0) ap.v = -ap.v;
  return ap;
}

NsApprox approximate_ns(const CoralParams& prm) {
  NsSystem sys(prm);
  const CoralModel<double>& m = sys.model();
  auto radius = [&](double P) {
    BranchPoint bp = branch_point_from_density(m, P);
    Eigen::EigenSolver<Eigen::MatrixXd> es(m.jacobian_x(bp.lambda, bp.x), false);
    return es.eigenvalues().cwiseAbs().maxCoeff() - 1.0;
  };
  double lo = 1.2 * fold_density(m), hi = 2 * lo;
  while (radius(hi) < 0 && hi < 1e6) hi *= 1.5;
  if (!(radius(lo) < 0 && radius(hi) > 0)) throw CertificationFailed("anchor", "no stability change on the upper branch");
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    (radius(mid) < 0 ? lo : hi) = mid;
  }
  BranchPoint bp = branch_point_from_density(m, 0.5 * (lo + hi));
  Eigen::EigenSolver<Eigen::MatrixXd> es(m.jacobian_x(bp.lambda, bp.x));
  Eigen::Index best = -1;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    auto ev = es.eigenvalues()(k);
    if (ev.imag() > 0 && (best < 0 || std::abs(ev) > std::abs(es.eigenvalues()(best)))) best = k;
  }
  if (best < 0) throw CertificationFailed("anchor", "no complex pair at the stability change");
  std::complex<double> mu = es.eigenvalues()(best);
  Eigen::VectorXcd q = es.eigenvectors().col(best);
  // Rotate so that |Re q| = |Im q|, then scale both parts to unit norm.
  std::complex<double> Q = (q.array() * q.array()).sum();
  double phase = 0.5 * (M_PI / 2 - std::arg(Q));
  q *= std::polar(std::sqrt(2.0) / q.norm(), phase);

  NsApprox ap;
  ap.x = bp.x;
  ap.lambda = bp.lambda;
  ap.w = q.real();
  ap.u = q.imag();
  ap.a = mu.real() / std::abs(mu);
  ap.b = mu.imag() / std::abs(mu);
  SystemProblem<NsSystem> prob(sys);
  Eigen::VectorXd z = newton(prob, ap.packed());
  const Eigen::Index d = sys.d();
  ap.x = z.segment(sys.iX(), d);
  ap.lambda = z(sys.iL());
  ap.w = z.segment(sys.iW(), d);
  ap.u = z.segment(sys.iU(), d);
  ap.a = z(sys.iA());
  ap.b = z(sys.iB());
  return ap;
}

// ---------------------------------------------------------------------------
// Certificates

namespace {

template <class System>
ZeroCertificate run_cift(const System& sys, const Eigen::VectorXd& z0, const CiftOptions& opt) {
  SystemProblem<System> prob(sys);
  try {
    return validate_zero(prob, z0, opt);
  } catch (const ValidationFailed& e) {
    throw CertificationFailed("cift/" + e.stage(), e.what());
  }
}

void fill_point(BifCertificate& c, const CoralModel<Interval>& mi, const IVector& x, const Interval& lam) {
  c.lambda = lam;
  c.R = mi.lambda_to_R(lam);
  c.x1 = x(0);
  c.P = mi.density(x);
}

}  // namespace

BifCertificate certify_sn(const SnApprox& approx, const CoralParams& prm, const CertifyOptions& opt) {
  SnSystem sys(prm);
  BifCertificate c;
  c.kind = "saddle_node";
  Eigen::VectorXd z0 = approx.packed();
  c.zero = run_cift(sys, z0, opt.cift);
  c.enclosure = ball(z0, c.zero.delta_accuracy);
  const Eigen::Index d = sys.d();
  fill_point(c, sys.imodel(), c.enclosure.head(d), c.enclosure(2 * d));

  SnConditions sc = sn_conditions(sys, c.enclosure);
  c.conditions["c"] = sc.c;
  c.conditions["d"] = sc.d;
  c.conditions["ptq_minus_1"] = sc.ptq_minus_1;
  c.checks["c_nonzero"] = sc.c.excludes_zero();
  c.checks["d_nonzero"] = sc.d.excludes_zero();
  if (!sc.c.excludes_zero()) throw ConditionInconclusive("c", "transversality interval contains 0");
  if (!sc.d.excludes_zero()) throw ConditionInconclusive("d", "nondegeneracy interval contains 0");
  return c;
}

BifCertificate certify_ns(const NsApprox& approx, const CoralParams& prm, const CertifyOptions& opt) {
  NsSystem sys(prm);
  BifCertificate c;
  c.kind = "neimark_sacker";
  Eigen::VectorXd z0 = approx.packed();
  c.zero = run_cift(sys, z0, opt.cift);
  c.enclosure = ball(z0, c.zero.delta_accuracy);
  const Eigen::Index d = sys.d();
  IVector x = c.enclosure.segment(sys.iX(), d);
  Interval lam = c.enclosure(sys.iL());
  fill_point(c, sys.imodel(), x, lam);

  Interval b = c.enclosure(sys.iB());
  c.checks["b_nonzero"] = b.excludes_zero();
  if (!(b.lo() > 0)) throw CertificationFailed("eigenvalue", "imaginary part is not positive");

  Spectrum sp = verified_spectrum(sys.imodel().jacobian_x(lam, x));
  c.spectrum_inside = sp.inside;
  c.checks["spectrum"] = sp.inside == sp.total - 2;
  if (sp.inside != sp.total - 2)
    throw CertificationFailed("spectrum", std::to_string(sp.inside) + " of " + std::to_string(sp.total) +
                                              " eigenvalues verified inside the unit disk");

  NsConditions nc = ns_conditions(sys, c.enclosure);
  c.conditions["c"] = nc.c;
  c.conditions["c_total"] = nc.c_total;
  c.conditions["theta_deg"] = nc.theta_deg;
  c.conditions["e"] = nc.e;
  c.conditions["e_imag"] = nc.e_imag;
  c.checks["c_nonzero"] = nc.c.excludes_zero();
  c.checks["c_total_nonzero"] = nc.c_total.excludes_zero();
  c.checks["e_nonzero"] = nc.e.excludes_zero();
  bool resonance_ok = true;
  for (const auto& [k, ok] : nc.resonance_free) {
    c.checks["d_" + k] = ok;
    resonance_ok = resonance_ok && ok;
  }
  if (!nc.c.excludes_zero()) throw ConditionInconclusive("c", "transversality interval contains 0");
  if (!resonance_ok) throw ConditionInconclusive("d", "angle enclosure meets a resonance");
  if (!nc.e.excludes_zero()) throw ConditionInconclusive("e", "cubic coefficient interval contains 0");
  return c;
}

TranscriticalResult transcritical_analysis(const CoralParams& prm) {
  CoralModel<Interval> mi(prm);
  const auto& c = mi.coeffs();
  const Eigen::Index d = mi.dim();
  TranscriticalResult t;
  t.R_star = c.c2 / c.c1;
  t.lambda_star = c.c2 / (c.c1 * c.ba);
  t.v = c.a;
  t.w.resize(d);
  t.w(d - 1) = c.b(d - 1);
  for (Eigen::Index k = d - 2; k >= 0; --k) t.w(k) = c.b(k) + c.S(k) * t.w(k + 1);

  IVector zero = IVector::Zero(d);
  IVector Av = mi.mixed_x_lambda(t.lambda_star, zero) * t.v;
  IVector Bvv = mi.bilinear<Interval>(t.lambda_star, zero, t.v, t.v);
  t.nd1 = Interval(0.0);
  t.nd2 = Interval(0.0);
  for (Eigen::Index k = 0; k < d; ++k) {
    t.nd1 += t.w(k) * Av(k);
    t.nd2 += t.w(k) * Bvv(k);
  }
  IMatrix AmI = mi.jacobian_x(t.lambda_star, zero) - IMatrix::Identity(d, d);
  t.eigen_residual = (norm_inf(IVector(AmI * t.v)) / norm_inf(t.v)).hi();
  return t;
}

}  // namespace certibif
