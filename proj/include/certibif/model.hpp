#pragma once

// Red coral age-structured map
//
//   f_1(lambda, x)     = lambda * phi(P(x)) * sum_k b_k x_k
//   f_{k+1}(lambda, x) = S_k x_k,          k = 1..d-1
//
// with P(x) = (1/Omega) sum_{k>=2} p_k x_k and
// phi(y) = c1 exp(-alpha y) / (y^2 + c2 exp(-beta y)).
//
// Everything is templated on the scalar so the same code evaluates in double,
// Interval, and the multiprecision type of highprec.hpp.  Only the first
// component is nonlinear, so all higher derivatives are closed-form
// expressions in the scalar jet of phi.

#include <string>
#include <vector>

#include "certibif/interval.hpp"
#include "certibif/scalar.hpp"

namespace certibif {

struct CoralParams {
  int d = 13;
  std::vector<double> S;  // S_1..S_{d-1}
  std::vector<double> F;  // F_1..F_d
  double c1 = 1.8e5;
  double c2 = 1.3e7;
  double alpha = 5e-4;
  double beta = 3.4e-3;
  double omega = 36.0;
  double p_coef = 1.239;
  double p_exp = 2.324;

  static CoralParams table1();
  /// Plain-text `key = value` file; list values are comma separated.
  /// Unknown keys are an error, missing keys keep the default table.
  static CoralParams load(const std::string& path);
  static CoralParams parse(const std::string& text);
  void validate() const;
  std::string to_text() const;
};

template <class T>
struct CoralCoefficients {
  Vec<T> S;  // length d-1
  Vec<T> a;  // survival products, a_1 = 1
  Vec<T> b;  // birth rates
  Vec<T> p;  // polyps per colony
  Vec<T> g;  // density weights, g_1 = 0, g_k = p_k / Omega
  T ba;      // b . a
  T pa;      // g . a, so P(x1 * a) = x1 * pa
  T c1, c2, alpha, beta, gamma;

  explicit CoralCoefficients(const CoralParams& prm) {
    using std::pow;
    const int d = prm.d;
    S.resize(d - 1);
    a.resize(d);
    b.resize(d);
    p.resize(d);
    g.resize(d);
    for (int k = 0; k < d - 1; ++k) S(k) = decimal<T>(prm.S[k]);
    T e = decimal<T>(prm.p_exp);
    T pc = decimal<T>(prm.p_coef);
    T om = decimal<T>(prm.omega);
    a(0) = T(1);
    for (int k = 1; k < d; ++k) a(k) = S(k - 1) * a(k - 1);
    for (int k = 0; k < d; ++k) {
      T kp = pow(exact<T>(k + 1), e);
      b(k) = decimal<T>(prm.F[k]) * kp;
      p(k) = pc * kp;
      g(k) = k == 0 ? T(0) : p(k) / om;
    }
    ba = T(0);
    pa = T(0);
    for (int k = 0; k < d; ++k) {
      ba += b(k) * a(k);
      pa += g(k) * a(k);
    }
    c1 = decimal<T>(prm.c1);
    c2 = decimal<T>(prm.c2);
    alpha = decimal<T>(prm.alpha);
    beta = decimal<T>(prm.beta);
    gamma = beta - alpha;
  }
};

/// phi and its first three derivatives at one point.
template <class T>
struct PhiJet {
  T phi, d1, d2, d3;
};

template <class T>
class CoralModel {
 public:
  using Scalar = T;

  explicit CoralModel(const CoralParams& prm = CoralParams::table1()) : prm_(prm), c_(prm) {}

  const CoralParams& params() const { return prm_; }
  const CoralCoefficients<T>& coeffs() const { return c_; }
  Eigen::Index dim() const { return prm_.d; }

  // phi = c1 / E with E(y) = y^2 e^{alpha y} + c2 e^{-gamma y}, gamma = beta - alpha.
  PhiJet<T> phi_jet(const T& y) const {
    using std::exp;
    const T& al = c_.alpha;
    const T& ga = c_.gamma;
    T ea = exp(al * y);
    T eg = c_.c2 * exp(-ga * y);
    T y2 = y * y;
    T E = y2 * ea + eg;
    T E1 = (T(2) * y + al * y2) * ea - ga * eg;
    T E2 = (T(2) + T(4) * al * y + al * al * y2) * ea + ga * ga * eg;
    T E3 = (T(6) * al + T(6) * al * al * y + al * al * al * y2) * ea - ga * ga * ga * eg;
    T r = T(1) / E;
    T r2 = r * r;
    T r3 = r2 * r;
    PhiJet<T> j;
    j.phi = c_.c1 * r;
    j.d1 = -c_.c1 * E1 * r2;
    j.d2 = c_.c1 * (T(2) * E1 * E1 * r3 - E2 * r2);
    j.d3 = c_.c1 * (T(-6) * E1 * E1 * E1 * r3 * r + T(6) * E1 * E2 * r3 - E3 * r2);
    return j;
  }

  T phi(const T& y) const {
    using std::exp;
    return c_.c1 / (y * y * exp(c_.alpha * y) + c_.c2 * exp(-c_.gamma * y));
  }

  T density(const Vec<T>& x) const { return dot(c_.g, x); }

  Vec<T> step(const T& lambda, const Vec<T>& x) const {
    Vec<T> y(dim());
    y(0) = lambda * phi(density(x)) * dot(c_.b, x);
    for (Eigen::Index k = 1; k < dim(); ++k) y(k) = c_.S(k - 1) * x(k - 1);
    return y;
  }

  /// F(lambda, x) = f(lambda, x) - x.
  Vec<T> residual(const T& lambda, const Vec<T>& x) const { return step(lambda, x) - x; }

  Mat<T> jacobian_x(const T& lambda, const Vec<T>& x) const {
    Mat<T> A = Mat<T>::Zero(dim(), dim());
    A.row(0) = first_row_gradient(lambda, x).transpose();
    for (Eigen::Index k = 1; k < dim(); ++k) A(k, k - 1) = c_.S(k - 1);
    return A;
  }

  /// Gradient of f_1 with respect to x.
  Vec<T> first_row_gradient(const T& lambda, const Vec<T>& x) const {
    PhiJet<T> j = phi_jet(density(x));
    T bx = dot(c_.b, x);
    Vec<T> r(dim());
    for (Eigen::Index k = 0; k < dim(); ++k) r(k) = lambda * (j.d1 * c_.g(k) * bx + j.phi * c_.b(k));
    return r;
  }

  /// D_lambda f = (phi(P) b.x, 0, ..., 0).
  Vec<T> jacobian_lambda(const T& /*lambda*/, const Vec<T>& x) const {
    Vec<T> r = Vec<T>::Zero(dim());
    r(0) = phi(density(x)) * dot(c_.b, x);
    return r;
  }

  /// d/dlambda of D_x f at fixed x.
  Mat<T> mixed_x_lambda(const T& /*lambda*/, const Vec<T>& x) const {
    Mat<T> A = Mat<T>::Zero(dim(), dim());
    A.row(0) = first_row_gradient(T(1), x).transpose();
    return A;
  }

  /// Hessian of f_1 with respect to x.
  Mat<T> hessian_first(const T& lambda, const Vec<T>& x) const {
    PhiJet<T> j = phi_jet(density(x));
    T bx = dot(c_.b, x);
    Mat<T> H(dim(), dim());
    for (Eigen::Index r = 0; r < dim(); ++r)
      for (Eigen::Index s = 0; s < dim(); ++s)
        H(r, s) = lambda * (j.d2 * c_.g(r) * c_.g(s) * bx + j.d1 * (c_.g(r) * c_.b(s) + c_.g(s) * c_.b(r)));
    return H;
  }

  /// sum_l d^3 f_1 / dx_r dx_s dx_l * w_l.
  Mat<T> third_first(const T& lambda, const Vec<T>& x, const Vec<T>& w) const {
    PhiJet<T> j = phi_jet(density(x));
    T bx = dot(c_.b, x);
    T gw = dot(c_.g, w);
    T bw = dot(c_.b, w);
    Mat<T> M(dim(), dim());
    for (Eigen::Index r = 0; r < dim(); ++r)
      for (Eigen::Index s = 0; s < dim(); ++s) {
        const T& gr = c_.g(r);
        const T& gs = c_.g(s);
        M(r, s) = lambda * (j.d3 * gw * bx * gr * gs + j.d2 * gw * (gr * c_.b(s) + gs * c_.b(r)) +
                            j.d2 * bw * gr * gs);
      }
    return M;
  }

  /// B(y, z) = D^2_x f [y, z].  Rows 2..d vanish.  U may be complex.
  template <class U>
  Vec<U> bilinear(const T& lambda, const Vec<T>& x, const Vec<U>& y, const Vec<U>& z) const {
    PhiJet<T> j = phi_jet(density(x));
    T bx = dot(c_.b, x);
    U gy = mixed_dot(c_.g, y), gz = mixed_dot(c_.g, z);
    U by = mixed_dot(c_.b, y), bz = mixed_dot(c_.b, z);
    Vec<U> r = Vec<U>::Constant(dim(), U(0.0));
    r(0) = (lambda * j.d2 * bx) * (gy * gz) + (lambda * j.d1) * (gy * bz + gz * by);
    return r;
  }

  /// C(y, z, w) = D^3_x f [y, z, w].  Rows 2..d vanish.
  template <class U>
  Vec<U> trilinear(const T& lambda, const Vec<T>& x, const Vec<U>& y, const Vec<U>& z,
                   const Vec<U>& w) const {
    PhiJet<T> j = phi_jet(density(x));
    T bx = dot(c_.b, x);
    U gy = mixed_dot(c_.g, y), gz = mixed_dot(c_.g, z), gw = mixed_dot(c_.g, w);
    U by = mixed_dot(c_.b, y), bz = mixed_dot(c_.b, z), bw = mixed_dot(c_.b, w);
    Vec<U> r = Vec<U>::Constant(dim(), U(0.0));
    r(0) = (lambda * j.d3 * bx) * (gy * gz * gw) +
           (lambda * j.d2) * (gy * gz * bw + gy * gw * bz + gz * gw * by);
    return r;
  }

  T lambda_to_R(const T& lambda) const { return c_.ba * lambda; }
  T R_to_lambda(const T& R) const { return R / c_.ba; }

  /// Residual of the one-dimensional reduction x1 = lambda (b.a) x1 phi(x1 * pa).
  T reduced_residual(const T& lambda, const T& x1) const {
    return lambda * c_.ba * x1 * phi(x1 * c_.pa) - x1;
  }

  /// Fixed point x = x1 * a.
  Vec<T> fixed_point_from_x1(const T& x1) const { return c_.a * x1; }

 private:
  static T dot(const Vec<T>& u, const Vec<T>& v) {
    T s(0);
    for (Eigen::Index k = 0; k < u.size(); ++k) s += u(k) * v(k);
    return s;
  }

  template <class U>
  static U mixed_dot(const Vec<T>& u, const Vec<U>& v) {
    U s(0.0);
    for (Eigen::Index k = 0; k < u.size(); ++k) s += u(k) * v(k);
    return s;
  }

  CoralParams prm_;
  CoralCoefficients<T> c_;
};

/// A point on the nontrivial fixed-point branch.
struct BranchPoint {
  double R = 0, lambda = 0, P = 0;
  Eigen::VectorXd x;
};

/// Nontrivial fixed point with polyp density P (R = 1/phi(P)).
BranchPoint branch_point_from_density(const CoralModel<double>& m, double P);
/// Nontrivial fixed point on the upper (large P) or lower part of the branch at R.
BranchPoint branch_point_at_R(const CoralModel<double>& m, double R, bool upper = true);
/// Density of the fold, where phi attains its maximum.
double fold_density(const CoralModel<double>& m);

/// All nonnegative roots x1 of the reduced equation, always starting with 0.
/// Grid of `grid` points on [0, x1_max] plus bisection.
std::vector<double> solve_branch_1d(const CoralModel<double>& m, double lambda,
                                    double x1_max = 1e5, int grid = 10000);

/// The preconditioned map f~(p, u~) = f(kappa p, s .* u~) ./ s.
/// kappa = rscale / (b.a) parametrizes by R~ = R / rscale; kappa = 1 by lambda.
template <class T>
class ScaledCoralMap {
 public:
  ScaledCoralMap(const CoralModel<T>& m, const Vec<T>& s, const T& kappa) : m_(m), s_(s), kappa_(kappa) {}

  const CoralModel<T>& model() const { return m_; }
  const Vec<T>& scale() const { return s_; }
  const T& kappa() const { return kappa_; }
  Eigen::Index dim() const { return m_.dim(); }

  T lambda_of(const T& p) const { return kappa_ * p; }
  Vec<T> unscale(const Vec<T>& u) const { return s_.cwiseProduct(u); }

  Vec<T> F(const T& p, const Vec<T>& u) const {
    Vec<T> x = unscale(u);
    return (m_.step(lambda_of(p), x) - x).cwiseQuotient(s_);
  }

  Mat<T> F_u(const T& p, const Vec<T>& u) const {
    Mat<T> A = m_.jacobian_x(lambda_of(p), unscale(u));
    for (Eigen::Index r = 0; r < dim(); ++r)
      for (Eigen::Index c = 0; c < dim(); ++c) A(r, c) = A(r, c) * s_(c) / s_(r);
    for (Eigen::Index r = 0; r < dim(); ++r) A(r, r) -= T(1);
    return A;
  }

  Vec<T> F_p(const T& p, const Vec<T>& u) const {
    Vec<T> v = m_.jacobian_lambda(lambda_of(p), unscale(u));
    for (Eigen::Index r = 0; r < dim(); ++r) v(r) = kappa_ * v(r) / s_(r);
    return v;
  }

  /// Second derivatives of the first component: d2/du du, d2/dp du.  The others vanish.
  Mat<T> F1_uu(const T& p, const Vec<T>& u) const {
    Mat<T> H = m_.hessian_first(lambda_of(p), unscale(u));
    for (Eigen::Index r = 0; r < dim(); ++r)
      for (Eigen::Index c = 0; c < dim(); ++c) H(r, c) = H(r, c) * s_(r) * s_(c) / s_(0);
    return H;
  }

  Vec<T> F1_pu(const T& p, const Vec<T>& u) const {
    (void)p;
    Vec<T> g = m_.first_row_gradient(T(1), unscale(u));
    for (Eigen::Index c = 0; c < dim(); ++c) g(c) = kappa_ * g(c) * s_(c) / s_(0);
    return g;
  }

 private:
  CoralModel<T> m_;
  Vec<T> s_;
  T kappa_;
};

}  // namespace certibif
