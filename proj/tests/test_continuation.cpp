#include <doctest.h>

#include <sstream>

#include "certibif/continuation.hpp"

using namespace certibif;

namespace {

// F(p, u) = u - p (1, ..., 1): the branch is the straight line u = p 1
class LinearMap : public ParametrizedMap {
 public:
  explicit LinearMap(Eigen::Index n) : n_(n) {}
  Eigen::Index dim() const override { return n_; }
  Eigen::VectorXd F(double p, const Eigen::VectorXd& u) const override {
    return u - Eigen::VectorXd::Constant(n_, p);
  }
  IVector F(const Interval& p, const IVector& u) const override {
    IVector r(n_);
    for (Eigen::Index k = 0; k < n_; ++k) r(k) = u(k) - p;
    return r;
  }
  Eigen::MatrixXd F_u(double, const Eigen::VectorXd&) const override { return Eigen::MatrixXd::Identity(n_, n_); }
  IMatrix F_u(const Interval&, const IVector&) const override { return to_interval(Eigen::MatrixXd(Eigen::MatrixXd::Identity(n_, n_))); }
  Eigen::VectorXd F_p(double, const Eigen::VectorXd&) const override { return -Eigen::VectorXd::Ones(n_); }
  IVector F_p(const Interval&, const IVector&) const override { return to_interval(Eigen::VectorXd(-Eigen::VectorXd::Ones(n_))); }
  SecondDerivatives second(const Interval&, const IVector&) const override {
    SecondDerivatives s;
    s.uu.assign(n_, IMatrix::Constant(n_, n_, Interval(0.0)));
    s.pu = IMatrix::Constant(n_, n_, Interval(0.0));
    s.pp = IVector::Constant(n_, Interval(0.0));
    return s;
  }

 private:
  Eigen::Index n_;
};

}  // namespace

TEST_SUITE("continuation") {

TEST_CASE("tangent of the linear map") {
  LinearMap F(3);
  Eigen::VectorXd hint = Eigen::VectorXd::Zero(4);
  hint(0) = 1.0;
  Eigen::VectorXd t = tangent_estimate(F, 0.5, Eigen::VectorXd::Constant(3, 0.5), &hint);
  for (int k = 0; k < 4; ++k) CHECK(t(k) == doctest::Approx(1.0));
  hint(0) = -1.0;
  t = tangent_estimate(F, 0.5, Eigen::VectorXd::Constant(3, 0.5), &hint);
  CHECK(t(0) == doctest::Approx(-1.0));
}

TEST_CASE("linear branch is validated with zero Lipschitz constant") {
  LinearMap F(3);
  ContinuationConfig cfg;
  cfg.max_steps = 400;
  cfg.target_p = -1.0;
  ContinuationResult r = continue_branch(F, 0.0, Eigen::VectorXd::Zero(3), cfg);
  CHECK(r.stop_reason == "target");
  CHECK(r.all_linked);
  REQUIRE(r.boxes.size() >= 2);
  for (size_t i = 0; i < r.boxes.size(); ++i) {
    const BranchBox& b = r.boxes[i];
    CHECK(b.bounds.L1.hi() == 0.0);
    CHECK(b.delta_min <= 1e-14);
    for (int k = 0; k < 3; ++k) CHECK(b.base.u(k) == doctest::Approx(b.base.p).epsilon(1e-12));
    if (i > 0) CHECK(b.linked_to_previous);
  }
  CHECK(r.boxes.back().base.p <= -1.0);
}

TEST_CASE("extended map: interval encloses double, corrector returns a zero") {
  CoralParams prm = CoralParams::table1();
  CoralFamily fam = CoralFamily::preconditioned(prm, 300.0);
  BranchPoint bp = branch_point_at_R(fam.model(), 200.0, true);
  Anchor a;
  a.p = fam.p_of_R(200.0);
  a.u = fam.u_of_x(bp.x);
  Eigen::VectorXd t = tangent_estimate(fam, a.p, a.u);
  a.mu = t(0);
  a.v = t.tail(13);
  CHECK(t.lpNorm<Eigen::Infinity>() == doctest::Approx(1.0));
  Eigen::VectorXd Ft = fam.F_p(a.p, a.u) * a.mu + fam.F_u(a.p, a.u) * a.v;
  CHECK(Ft.lpNorm<Eigen::Infinity>() < 1e-10);

  Eigen::VectorXd y = Eigen::VectorXd::Constant(14, 1e-4);
  Eigen::VectorXd g = extended_G(fam, a, 1e-3, y);
  IVector gi = extended_G(fam, a, Interval(1e-3), to_interval(y));
  for (int k = 0; k < 14; ++k) CHECK(gi(k).contains(g(k)));
  Eigen::MatrixXd J = extended_G_jacobian(fam, a, 1e-3, y);
  IMatrix Ji = extended_G_jacobian(fam, a, Interval(1e-3), to_interval(y));
  for (int r = 0; r < 14; ++r)
    for (int c = 0; c < 14; ++c) CHECK(Ji(r, c).contains(J(r, c)));

  Eigen::VectorXd z = newton_correct(fam, a, 1e-3);
  CHECK(extended_G(fam, a, 1e-3, z).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(std::fabs(a.mu * z(0) + a.v.dot(z.tail(13))) < 1e-14);
}

TEST_CASE("preconditioned coral branch: linked boxes with tiny accuracy radii") {
  CoralParams prm = CoralParams::table1();
  CoralFamily fam = CoralFamily::preconditioned(prm, 300.0);
  BranchPoint bp = branch_point_at_R(fam.model(), 300.0, true);
  ContinuationConfig cfg;
  cfg.max_steps = 150;
  ContinuationResult r = continue_branch(fam, fam.p_of_R(300.0), fam.u_of_x(bp.x), cfg);
  CHECK(r.stop_reason == "max_steps");
  CHECK(r.all_linked);
  REQUIRE(r.boxes.size() == 150);
  for (size_t i = 0; i + 1 < r.boxes.size(); ++i) {
    const BranchBox& b = r.boxes[i];
    const BranchBox& n = r.boxes[i + 1];
    CHECK(b.delta_min <= 1e-10);
    CHECK(b.delta_u > b.delta_min);
    CHECK(n.linked_to_previous);
    CHECK(b.alpha_step > 0);
    CHECK(b.alpha_step < b.delta_alpha);
    CHECK(4.0 * b.bounds.K.hi() * b.bounds.K.hi() * b.bounds.rho.hi() * b.bounds.L1.hi() < 1.0);
    IVector corr(14);
    corr(0) = Interval(n.base.p) - Interval(b.base.p) - Interval(b.alpha_step) * Interval(b.base.mu);
    for (int k = 0; k < 13; ++k)
      corr(1 + k) = Interval(n.base.u(k)) - Interval(b.base.u(k)) - Interval(b.alpha_step) * Interval(b.base.v(k));
    CHECK(check_link(b, b.alpha_step, corr, n.delta_min));
    // anchors sit on the branch R phi(P) = 1
    double lam = fam.lambda_of_p(n.base.p);
    Eigen::VectorXd x = fam.x_of_u(n.base.u);
    CHECK(fam.model().residual(lam, x).lpNorm<Eigen::Infinity>() < 1e-8);
  }
  CHECK(fam.R_of_p(r.boxes.back().base.p) < 300.0);
}

TEST_CASE("a shifted anchor breaks the link") {
  CoralParams prm = CoralParams::table1();
  CoralFamily fam = CoralFamily::preconditioned(prm, 300.0);
  BranchPoint bp = branch_point_at_R(fam.model(), 300.0, true);
  ContinuationConfig cfg;
  cfg.max_steps = 3;
  ContinuationResult r = continue_branch(fam, fam.p_of_R(300.0), fam.u_of_x(bp.x), cfg);
  REQUIRE(r.boxes.size() == 3);
  const BranchBox& b = r.boxes[0];
  IVector corr(14);
  for (int k = 0; k < 14; ++k) corr(k) = Interval(0.0);
  corr(3) = Interval(10 * b.delta_u);
  CHECK_FALSE(check_link(b, b.alpha_step, corr, r.boxes[1].delta_min));
}

TEST_CASE("preconditioning enlarges the raw segment length") {
  CoralParams prm = CoralParams::table1();
  CoralFamily pre = CoralFamily::preconditioned(prm, 300.0);
  CoralFamily raw = CoralFamily::raw(prm);
  CHECK(raw.kappa() == 1.0);
  CHECK(raw.scale().isOnes());
  BranchPoint bp = branch_point_at_R(pre.model(), 300.0, true);
  ContinuationConfig cfg;
  cfg.max_steps = 5;
  ContinuationResult rp = continue_branch(pre, pre.p_of_R(300.0), pre.u_of_x(bp.x), cfg);
  ContinuationResult rr = continue_branch(raw, raw.p_of_R(300.0), raw.u_of_x(bp.x), cfg);
  REQUIRE(rp.boxes.size() == 5);
  REQUIRE(rr.boxes.size() == 5);
  CHECK(raw_segment_length(pre, rp.boxes[0]) > 10 * raw_segment_length(raw, rr.boxes[0]));
  CHECK(pre.R_of_p(pre.p_of_R(123.0)) == doctest::Approx(123.0));
  CHECK(raw.R_of_p(Interval(raw.p_of_R(50.0))).contains(raw.R_of_p(raw.p_of_R(50.0))));
}

TEST_CASE("CSV output") {
  CoralParams prm = CoralParams::table1();
  CoralFamily fam = CoralFamily::preconditioned(prm, 300.0);
  BranchPoint bp = branch_point_at_R(fam.model(), 300.0, true);
  ContinuationConfig cfg;
  cfg.max_steps = 4;
  ContinuationResult r = continue_branch(fam, fam.p_of_R(300.0), fam.u_of_x(bp.x), cfg);
  std::ostringstream os;
  write_branch_csv(os, fam, r.boxes);
  std::string s = os.str();
  CHECK(s.rfind("R,lambda,x1,", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 5);
  CHECK(s.find("stable") != std::string::npos);
}

TEST_CASE("stability of the trivial branch changes at R = c2 / c1") {
  CoralParams prm = CoralParams::table1();
  CoralModel<double> m(prm);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(13);
  double Rstar = prm.c2 / prm.c1;
  CHECK(classify_stability(m, m.R_to_lambda(Rstar - 1), zero).stable);
  CHECK_FALSE(classify_stability(m, m.R_to_lambda(Rstar + 1), zero).stable);
}

}
