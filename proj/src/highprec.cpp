#include "certibif/highprec.hpp"

#include <Eigen/LU>
#include <charconv>

namespace certibif {

using VecH = Vec<Real200>;
using MatH = Mat<Real200>;

Real200 ScalarTraits<Real200>::decimal(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return Real200(std::string(buf, res.ptr));
}

double distance_up(const Real200& x, double y) {
  Real200 d = abs(x - Real200(y));
  double r = static_cast<double>(d);
  if (Real200(r) < d) r = detail::next_up(r);
  return r;
}

namespace {

Real200 norm_inf(const VecH& v) {
  Real200 m(0);
  for (Eigen::Index k = 0; k < v.size(); ++k) m = std::max(m, Real200(abs(v(k))));
  return m;
}

template <class Value, class Jacobian>
HighPrecisionZero newton_hp(const Eigen::VectorXd& z0, Value value, Jacobian jacobian, const VecH& start) {
  VecH z = start;
  HighPrecisionZero out;
  const Real200 tol("1e-55");
  for (int it = 0; it < 40; ++it) {
    VecH dz = jacobian(z).partialPivLu().solve(value(z));
    z -= dz;
    out.iterations = it + 1;
    if (norm_inf(dz) < tol) break;
  }
  out.residual = static_cast<double>(norm_inf(value(z)));
  out.z.resize(z.size());
  out.distance = 0;
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    out.z(k) = static_cast<double>(z(k));
    if (k < z0.size()) out.distance = std::max(out.distance, distance_up(z(k), z0(k)));
  }
  return out;
}

VecH lift(const Eigen::VectorXd& v) {
  VecH out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) out(k) = Real200(v(k));
  return out;
}

template <class System>
HighPrecisionZero refine_system(const System& sys, const Eigen::VectorXd& z0) {
  return newton_hp(
      z0, [&](const VecH& z) { return sys.template value<Real200>(z); },
      [&](const VecH& z) { return sys.template jacobian<Real200>(z); }, lift(z0));
}

}  // namespace

HighPrecisionZero refine_sn(const CoralParams& prm, const Eigen::VectorXd& z0) {
  return refine_system(SnSystem(prm), z0);
}

HighPrecisionZero refine_ns(const CoralParams& prm, const Eigen::VectorXd& z0) {
  return refine_system(NsSystem(prm), z0);
}

HighPrecisionZero refine_segment(const CoralFamily& fam, const Anchor& a, double alpha) {
  CoralModel<Real200> m(fam.model().params());
  Real200 kappa = fam.is_preconditioned() ? Real200(100) / m.coeffs().ba : Real200(1);
  ScaledCoralMap<Real200> map(m, lift(fam.scale()), kappa);
  const Eigen::Index n = fam.dim();
  Real200 p0(a.p), mu(a.mu), al(alpha);
  VecH u0 = lift(a.u), v = lift(a.v);
  auto point = [&](const VecH& y, Real200& p, VecH& u) {
    p = p0 + al * mu + y(0);
    u = u0 + v * al + y.tail(n);
  };
  auto value = [&](const VecH& y) {
    Real200 p;
    VecH u;
    point(y, p, u);
    VecH g(n + 1);
    g(0) = mu * y(0) + v.dot(y.tail(n));
    g.tail(n) = map.F(p, u);
    return g;
  };
  auto jacobian = [&](const VecH& y) {
    Real200 p;
    VecH u;
    point(y, p, u);
    MatH J(n + 1, n + 1);
    J(0, 0) = mu;
    J.block(0, 1, 1, n) = v.transpose();
    J.block(1, 0, n, 1) = map.F_p(p, u);
    J.block(1, 1, n, n) = map.F_u(p, u);
    return J;
  };
  return newton_hp(Eigen::VectorXd::Zero(n + 1), value, jacobian, VecH::Zero(n + 1));
}

}  // namespace certibif
