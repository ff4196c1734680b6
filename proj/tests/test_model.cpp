#include <doctest.h>

#include <cmath>
#include <fstream>

#include "certibif/model.hpp"

using namespace certibif;

namespace {

struct Oracle {
  std::vector<double> a, b, g;
  double ba = 0, pa = 0;
  explicit Oracle(const CoralParams& p) {
    a.assign(p.d, 1.0);
    for (int k = 1; k < p.d; ++k) a[k] = a[k - 1] * p.S[k - 1];
    for (int k = 0; k < p.d; ++k) {
      double kp = std::pow(k + 1.0, p.p_exp);
      b.push_back(p.F[k] * kp);
      g.push_back(k == 0 ? 0.0 : p.p_coef * kp / p.omega);
      ba += b[k] * a[k];
      pa += g[k] * a[k];
    }
  }
};

double phi(const CoralParams& p, double y) {
  return p.c1 * std::exp(-p.alpha * y) / (y * y + p.c2 * std::exp(-p.beta * y));
}

Eigen::VectorXd oracle_step(const CoralParams& p, const Oracle& o, double lambda, const Eigen::VectorXd& x) {
  double P = 0, bx = 0;
  for (int k = 0; k < p.d; ++k) {
    P += o.g[k] * x(k);
    bx += o.b[k] * x(k);
  }
  Eigen::VectorXd y(p.d);
  y(0) = lambda * phi(p, P) * bx;
  for (int k = 1; k < p.d; ++k) y(k) = p.S[k - 1] * x(k - 1);
  return y;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("coefficients match a direct computation") {
  CoralParams p = CoralParams::table1();
  Oracle o(p);
  CoralModel<double> m(p);
  CHECK(m.coeffs().ba == doctest::Approx(o.ba).epsilon(1e-14));
  CHECK(m.coeffs().pa == doctest::Approx(o.pa).epsilon(1e-14));
  for (int k = 0; k < p.d; ++k) CHECK(m.coeffs().a(k) == doctest::Approx(o.a[k]).epsilon(1e-14));
  CoralModel<Interval> mi(p);
  CHECK(mi.coeffs().ba.contains(m.coeffs().ba));
  CHECK(mi.coeffs().ba.width() < 1e-10);
}

TEST_CASE("reproduction number calibration") {
  CoralModel<double> m;
  CHECK(m.lambda_to_R(1.0) == doctest::Approx(29.15).epsilon(0.15 / 29.15));
  CHECK(m.lambda_to_R(0.3) == doctest::Approx(8.744).epsilon(0.05 / 8.744));
  CHECK(m.R_to_lambda(m.lambda_to_R(2.5)) == doctest::Approx(2.5));
}

TEST_CASE("step matches the direct formula") {
  CoralParams p = CoralParams::table1();
  Oracle o(p);
  CoralModel<double> m(p);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(p.d, 900.0, 10.0);
  Eigen::VectorXd y = m.step(3.1, x);
  Eigen::VectorXd z = oracle_step(p, o, 3.1, x);
  CHECK((y - z).lpNorm<Eigen::Infinity>() <= 1e-11 * z.lpNorm<Eigen::Infinity>());
}

TEST_CASE("derivatives agree with central differences") {
  CoralParams p = CoralParams::table1();
  Oracle o(p);
  CoralModel<double> m(p);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(p.d, 1500.0, 20.0);
  double lam = 4.0;
  Eigen::MatrixXd J = m.jacobian_x(lam, x);
  Eigen::MatrixXd H = m.hessian_first(lam, x);
  for (int k = 0; k < p.d; ++k) {
    double h = 1e-3;
    Eigen::VectorXd xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    Eigen::VectorXd fd = (oracle_step(p, o, lam, xp) - oracle_step(p, o, lam, xm)) / (2 * h);
    CHECK((J.col(k) - fd).lpNorm<Eigen::Infinity>() <= 1e-6 * (1 + fd.lpNorm<Eigen::Infinity>()));
    Eigen::VectorXd gd = (m.first_row_gradient(lam, xp) - m.first_row_gradient(lam, xm)) / (2 * h);
    CHECK((H.col(k) - gd).lpNorm<Eigen::Infinity>() <= 1e-6 * (1e-6 + gd.lpNorm<Eigen::Infinity>()));
  }
  double h = 1e-5;
  Eigen::VectorXd fl = (oracle_step(p, o, lam + h, x) - oracle_step(p, o, lam - h, x)) / (2 * h);
  CHECK((m.jacobian_lambda(lam, x) - fl).lpNorm<Eigen::Infinity>() <= 1e-7 * fl.lpNorm<Eigen::Infinity>());
}

TEST_CASE("interval evaluation encloses the double evaluation") {
  CoralModel<double> m;
  CoralModel<Interval> mi;
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(13, 2000.0, 5.0);
  IVector xi = to_interval(x);
  IVector y = mi.step(Interval(5.0), xi);
  Eigen::VectorXd yd = m.step(5.0, x);
  for (int k = 0; k < 13; ++k) CHECK(y(k).contains(yd(k)));
  IMatrix J = mi.jacobian_x(Interval(5.0), xi);
  Eigen::MatrixXd Jd = m.jacobian_x(5.0, x);
  for (int r = 0; r < 13; ++r)
    for (int c = 0; c < 13; ++c) CHECK(J(r, c).contains(Jd(r, c)));
}

TEST_CASE("branch points are fixed points with R phi(P) = 1") {
  CoralParams p = CoralParams::table1();
  CoralModel<double> m(p);
  for (double R : {20.0, 72.0, 154.0, 300.0}) {
    BranchPoint bp = branch_point_at_R(m, R, true);
    CHECK(bp.R == doctest::Approx(R));
    CHECK(R * phi(p, bp.P) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.residual(bp.lambda, bp.x).lpNorm<Eigen::Infinity>() <= 1e-9 * bp.x(0));
  }
  BranchPoint lower = branch_point_at_R(m, 20.0, false);
  BranchPoint upper = branch_point_at_R(m, 20.0, true);
  CHECK(lower.P < upper.P);
  CHECK_THROWS(branch_point_at_R(m, 10.0, true));
}

TEST_CASE("fold density maximizes phi") {
  CoralParams p = CoralParams::table1();
  CoralModel<double> m(p);
  double Pf = fold_density(m);
  double lo = 1.0, hi = 5000.0;
  for (int i = 0; i < 200; ++i) {
    double a = lo + (hi - lo) / 3, b = hi - (hi - lo) / 3;
    if (phi(p, a) < phi(p, b))
      lo = a;
    else
      hi = b;
  }
  CHECK(Pf == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-6));
}

TEST_CASE("scaled map is the conjugated residual") {
  CoralParams p = CoralParams::table1();
  CoralModel<double> m(p);
  Eigen::VectorXd s = Eigen::VectorXd::LinSpaced(13, 2000.0, 1.0);
  double kappa = 100.0 / m.coeffs().ba;
  ScaledCoralMap<double> f(m, s, kappa);
  Eigen::VectorXd u = Eigen::VectorXd::Constant(13, 0.9);
  Eigen::VectorXd x = s.cwiseProduct(u);
  Eigen::VectorXd expect = (m.step(kappa * 1.7, x) - x).cwiseQuotient(s);
  CHECK((f.F(1.7, u) - expect).lpNorm<Eigen::Infinity>() <= 1e-12);
  double h = 1e-6;
  Eigen::VectorXd fp = (f.F(1.7 + h, u) - f.F(1.7 - h, u)) / (2 * h);
  CHECK((f.F_p(1.7, u) - fp).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("parameter files") {
  CoralParams p = CoralParams::table1();
  CoralParams q = CoralParams::parse(p.to_text());
  CHECK(q.S == p.S);
  CHECK(q.F == p.F);
  CHECK(q.c1 == p.c1);
  CoralParams r = CoralParams::parse("# comment\nc1 = 2e5\n");
  CHECK(r.c1 == 2e5);
  CHECK(r.c2 == p.c2);
  CHECK_THROWS_AS(CoralParams::parse("nonsense = 1\n"), DomainError);
  CHECK_THROWS_AS(CoralParams::parse("c1 = abc\n"), DomainError);
  CHECK_THROWS_AS(CoralParams::parse("d = 4\n"), DomainError);
  CHECK_THROWS(CoralParams::load("/nonexistent/params.txt"));
}

}
