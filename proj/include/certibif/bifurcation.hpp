#pragma once

// Extended systems for the saddle-node and Neimark-Sacker points, their
// certification, the verified spectrum count, and the closed-form
// transcritical point on the trivial branch.

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "certibif/cift.hpp"
#include "certibif/model.hpp"

namespace certibif {

namespace detail {

// Cached model instances for double and Interval; other scalars are built on demand.
struct ModelCache {
  explicit ModelCache(const CoralParams& prm) : prm(prm), md(prm), mi(prm) {}

  template <class T>
  CoralModel<T> get() const {
    if constexpr (std::is_same_v<T, double>)
      return md;
    else if constexpr (std::is_same_v<T, Interval>)
      return mi;
    else
      return CoralModel<T>(prm);
  }

  CoralParams prm;
  CoralModel<double> md;
  CoralModel<Interval> mi;
};

}  // namespace detail

/// H_sn(x, v, lambda) = (f - x, D_x f v - v, |v|^2 - 1), dimension 2d+1.
class SnSystem {
 public:
  explicit SnSystem(const CoralParams& prm = CoralParams::table1())
      : cache_(std::make_shared<detail::ModelCache>(prm)), d_(prm.d) {}

  std::string name() const { return "H_sn"; }
  Eigen::Index dim() const { return 2 * d_ + 1; }
  Eigen::Index d() const { return d_; }
  const CoralModel<double>& model() const { return cache_->md; }
  const CoralModel<Interval>& imodel() const { return cache_->mi; }

  template <class T>
  Vec<T> value(const Vec<T>& z) const {
    const CoralModel<T> m = cache_->get<T>();
    Vec<T> x = z.head(d_), v = z.segment(d_, d_);
    T lam = z(2 * d_);
    Vec<T> out(dim());
    out.head(d_) = m.residual(lam, x);
    out.segment(d_, d_) = m.jacobian_x(lam, x) * v - v;
    T n(0);
    for (Eigen::Index k = 0; k < d_; ++k) n += v(k) * v(k);
    out(2 * d_) = n - T(1);
    return out;
  }

  template <class T>
  Mat<T> jacobian(const Vec<T>& z) const {
    const CoralModel<T> m = cache_->get<T>();
    const Eigen::Index d = d_;
    Vec<T> x = z.head(d), v = z.segment(d, d);
    T lam = z(2 * d);
    Mat<T> A = m.jacobian_x(lam, x);
    Mat<T> AmI = A - Mat<T>::Identity(d, d);
    Mat<T> J = Mat<T>::Zero(dim(), dim());
    J.block(0, 0, d, d) = AmI;
    J.block(0, 2 * d, d, 1) = m.jacobian_lambda(lam, x);
    J.block(d, 0, 1, d) = (m.hessian_first(lam, x) * v).transpose();
    J.block(d, d, d, d) = AmI;
    J.block(d, 2 * d, d, 1) = m.mixed_x_lambda(lam, x) * v;
    for (Eigen::Index k = 0; k < d; ++k) J(2 * d, d + k) = T(2) * v(k);
    return J;
  }

  std::vector<IMatrix> hessians(const IVector& z) const;

 private:
  std::shared_ptr<detail::ModelCache> cache_;
  Eigen::Index d_;
};

/// H_ns(x, lambda, w, u, a, b) with eigenpair (a + ib, w + iu), dimension 3d+3.
class NsSystem {
 public:
  explicit NsSystem(const CoralParams& prm = CoralParams::table1())
      : cache_(std::make_shared<detail::ModelCache>(prm)), d_(prm.d) {}

  std::string name() const { return "H_ns"; }
  Eigen::Index dim() const { return 3 * d_ + 3; }
  Eigen::Index d() const { return d_; }
  const CoralModel<double>& model() const { return cache_->md; }
  const CoralModel<Interval>& imodel() const { return cache_->mi; }

  // Block offsets.
  Eigen::Index iX() const { return 0; }
  Eigen::Index iL() const { return d_; }
  Eigen::Index iW() const { return d_ + 1; }
  Eigen::Index iU() const { return 2 * d_ + 1; }
  Eigen::Index iA() const { return 3 * d_ + 1; }
  Eigen::Index iB() const { return 3 * d_ + 2; }

  template <class T>
  Vec<T> value(const Vec<T>& z) const {
    const CoralModel<T> m = cache_->get<T>();
    const Eigen::Index d = d_;
    Vec<T> x = z.segment(iX(), d), w = z.segment(iW(), d), u = z.segment(iU(), d);
    T lam = z(iL()), a = z(iA()), b = z(iB());
    Mat<T> A = m.jacobian_x(lam, x);
    Vec<T> out(dim());
    out.segment(0, d) = m.residual(lam, x);
    out.segment(d, d) = A * w - w * a + u * b;
    out.segment(2 * d, d) = A * u - w * b - u * a;
    T nw(0), nu(0);
    for (Eigen::Index k = 0; k < d; ++k) {
      nw += w(k) * w(k);
      nu += u(k) * u(k);
    }
    out(3 * d) = a * a + b * b - T(1);
    out(3 * d + 1) = nw - T(1);
    out(3 * d + 2) = nu - T(1);
    return out;
  }

  template <class T>
  Mat<T> jacobian(const Vec<T>& z) const {
    const CoralModel<T> m = cache_->get<T>();
    const Eigen::Index d = d_;
    Vec<T> x = z.segment(iX(), d), w = z.segment(iW(), d), u = z.segment(iU(), d);
    T lam = z(iL()), a = z(iA()), b = z(iB());
    Mat<T> A = m.jacobian_x(lam, x);
    Mat<T> H1 = m.hessian_first(lam, x);
    Mat<T> Al = m.mixed_x_lambda(lam, x);
    Mat<T> I = Mat<T>::Identity(d, d);
    Mat<T> J = Mat<T>::Zero(dim(), dim());
    J.block(0, iX(), d, d) = A - I;
    J.block(0, iL(), d, 1) = m.jacobian_lambda(lam, x);

    J.block(d, iX(), 1, d) = (H1 * w).transpose();
    J.block(d, iL(), d, 1) = Al * w;
    J.block(d, iW(), d, d) = A - I * a;
    J.block(d, iU(), d, d) = I * b;
    J.block(d, iA(), d, 1) = -w;
    J.block(d, iB(), d, 1) = u;

    J.block(2 * d, iX(), 1, d) = (H1 * u).transpose();
    J.block(2 * d, iL(), d, 1) = Al * u;
    J.block(2 * d, iW(), d, d) = -I * b;
    J.block(2 * d, iU(), d, d) = A - I * a;
    J.block(2 * d, iA(), d, 1) = -u;
    J.block(2 * d, iB(), d, 1) = -w;

    J(3 * d, iA()) = T(2) * a;
    J(3 * d, iB()) = T(2) * b;
    for (Eigen::Index k = 0; k < d; ++k) {
      J(3 * d + 1, iW() + k) = T(2) * w(k);
      J(3 * d + 2, iU() + k) = T(2) * u(k);
    }
    return J;
  }

  std::vector<IMatrix> hessians(const IVector& z) const;

 private:
  std::shared_ptr<detail::ModelCache> cache_;
  Eigen::Index d_;
};

struct Spectrum {
  int inside = 0;                // eigenvalues verified strictly inside the unit disk
  int total = 0;
  std::vector<double> centers_abs;  // |disc center|, for reporting
  std::vector<double> radii;
};

/// Verified count of eigenvalues strictly inside the unit disk (similarity + Gershgorin).
/// Throws SpectrumInconclusive when the eigenvector matrix cannot be inverted rigorously.
Spectrum verified_spectrum(const IMatrix& A);

/// Interval enclosure of atan2(b, a) for boxes in the open upper half plane.
Interval atan2_upper(const Interval& b, const Interval& a);
/// Enclosure of pi.
Interval pi_interval();

struct BifCertificate {
  std::string kind;  // saddle_node | neimark_sacker | transcritical
  ZeroCertificate zero;
  IVector enclosure;
  Interval R{0.0}, lambda{0.0}, x1{0.0}, P{0.0};
  std::map<std::string, Interval> conditions;
  std::map<std::string, bool> checks;
  int spectrum_inside = -1;
};

struct SnApprox {
  Eigen::VectorXd x, v;
  double lambda = 0;
  Eigen::VectorXd packed() const;
};

struct NsApprox {
  Eigen::VectorXd x, w, u;
  double lambda = 0, a = 0, b = 0;
  Eigen::VectorXd packed() const;
};

/// Non-rigorous anchors from the one-dimensional branch plus Newton on the extended system.
SnApprox approximate_sn(const CoralParams& prm = CoralParams::table1());
NsApprox approximate_ns(const CoralParams& prm = CoralParams::table1());

struct CertifyOptions {
  CiftOptions cift;
};

BifCertificate certify_sn(const SnApprox& approx, const CoralParams& prm = CoralParams::table1(),
                          const CertifyOptions& opt = {});
BifCertificate certify_ns(const NsApprox& approx, const CoralParams& prm = CoralParams::table1(),
                          const CertifyOptions& opt = {});

/// Left eigenvector p with p^T (A - mu I) = 0 and p^T q = 1, enclosed for all A, q, mu in the boxes.
CIVector left_eigenvector(const IMatrix& A, const CIVector& q, const CInterval& mu);
/// Enclosure of (M)^{-1} r for a complex interval matrix.
CIVector complex_solve(const CIMatrix& M, const CIVector& r);

struct NsConditions {
  Interval c, c_total, e, theta_deg;
  Interval e_imag;
  std::map<std::string, bool> resonance_free;  // k1..k4
};

/// Conditions (c), (d), (e) over the box z (interval H_ns coordinates).
NsConditions ns_conditions(const NsSystem& sys, const IVector& z);

struct SnConditions {
  Interval c, d;
  Interval ptq_minus_1;
};
SnConditions sn_conditions(const SnSystem& sys, const IVector& z);

struct TranscriticalResult {
  Interval lambda_star{0.0}, R_star{0.0};
  IVector v, w;
  Interval nd1{0.0}, nd2{0.0};
  double eigen_residual = 0.0;  // |(D_x f(lambda*, 0) - I) v|_inf / |v|_inf, upper bound
};

TranscriticalResult transcritical_analysis(const CoralParams& prm = CoralParams::table1());

}  // namespace certibif
