#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "certibif/dynamics.hpp"

using namespace certibif;

namespace {

Eigen::Matrix2Xd rigid(double rho, const Eigen::Vector2d& c, double r, long n) {
  Eigen::Matrix2Xd pts(2, n);
  for (long k = 0; k < n; ++k) {
    double t = 2 * M_PI * rho * static_cast<double>(k);
    pts.col(k) = c + r * Eigen::Vector2d(std::cos(t), std::sin(t));
  }
  return pts;
}

// smallest q with some p/q in [lo, hi], by exhaustive scan
Rational scan(const Rational& lo, const Rational& hi) {
  for (long long q = 1;; ++q) {
    // ceil(lo * q)
    __int128 num = static_cast<__int128>(lo.p) * q;
    long long p = static_cast<long long>(num / lo.q);
    if (static_cast<__int128>(p) * lo.q < num) ++p;
    if (static_cast<__int128>(p) * hi.q <= static_cast<__int128>(hi.p) * q) {
      long long g = std::gcd(p, q);
      return {p / g, q / g};
    }
  }
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("rigid rotation is recovered") {
  double rho = (3 - std::sqrt(5.0)) / 2;
  RotationResult r = rotation_number(rigid(rho, {0, 0}, 1.0, 10000), {0, 0});
  CHECK(std::fabs(r.rho - rho) < 1e-12);
  CHECK(r.convergence_gap < 1e-12);
}

TEST_CASE("weighting beats the plain average for a non-uniform speed") {
  // circle seen from an off-centre point: increments vary around the orbit
  double rho = (3 - std::sqrt(5.0)) / 2;
  Eigen::Matrix2Xd pts = rigid(rho, {0, 0}, 1.0, 10000);
  Eigen::Vector2d c(0.05, 0.005);
  double weighted = rotation_number(pts, c).rho;
  double plain = rotation_number_unweighted(pts, c);
  CHECK(std::fabs(weighted - rho) < 1e-12);
  CHECK(std::fabs(plain - rho) > 1e-9);
  CHECK(std::fabs(plain - rho) < 1e-4);
}

TEST_CASE("increments of mixed sign are rejected") {
  Eigen::Matrix2Xd pts(2, 6);
  for (int k = 0; k < 6; ++k) {
    double t = (k % 2 == 0) ? 0.0 : 0.3;
    pts.col(k) << std::cos(t), std::sin(t);
  }
  pts.col(3) << std::cos(-0.2), std::sin(-0.2);
  CHECK_THROWS_AS(rotation_number(pts, {0, 0}), RotationUndefined);
  Eigen::Matrix2Xd hit = rigid(0.1, {0, 0}, 1.0, 20);
  hit.col(5).setZero();
  CHECK_THROWS_AS(rotation_number(hit, {0, 0}), RotationUndefined);
}

TEST_CASE("angle profile of a rigid rotation is flat") {
  AngleProfile ap = angle_profile(rigid(0.1234567, {1, 2}, 3.0, 20000), {1, 2}, 50);
  REQUIRE(ap.increment.size() == 50);
  for (double v : ap.increment) CHECK(v == doctest::Approx(0.1234567).epsilon(1e-9));
}

TEST_CASE("orbits: extinction below threshold, divergence detection") {
  CoralModel<double> m;
  Eigen::VectorXd y = initial_vector(m);
  CHECK(m.density(y) == doctest::Approx(1500.0));
  OrbitSample o = iterate(m, m.R_to_lambda(8.744), y, 400);
  CHECK(o.points.cols() == 400);
  CHECK(o.points.col(399).lpNorm<Eigen::Infinity>() < 1e-3 * y.lpNorm<Eigen::Infinity>());
  Eigen::VectorXd bad = y;
  bad(0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(iterate(m, 1.0, bad, 5), OrbitDiverged);
  Eigen::Matrix2Xd pl = iterate_plane(m, 1.0, y, 10, 5);
  CHECK(pl.cols() == 10);
  CHECK(pl(0, 0) == doctest::Approx(iterate(m, 1.0, y, 1, 5).points(0, 0)));
}

TEST_CASE("bistability at R = 29.15 splits at the lower fixed point") {
  CoralModel<double> m;
  double lambda = m.R_to_lambda(29.15);
  BranchPoint lower = branch_point_at_R(m, 29.15, false);
  BranchPoint upper = branch_point_at_R(m, 29.15, true);
  Eigen::VectorXd y = initial_vector(m);
  double t = lower.P / m.density(y);
  OrbitSample below = iterate(m, lambda, 0.98 * t * y, 1, 3000);
  OrbitSample above = iterate(m, lambda, 1.02 * t * y, 1, 3000);
  CHECK(m.density(below.points.col(0)) < 1e-6);
  CHECK(m.density(above.points.col(0)) == doctest::Approx(upper.P).epsilon(1e-9));
  OrbitSample small = iterate(m, lambda, 0.1 * y, 1, 3000);
  CHECK(m.density(small.points.col(0)) < 1e-6);
}

TEST_CASE("coral invariant circle: rotation number converges") {
  CoralModel<double> m;
  Eigen::Matrix2Xd pts = iterate_plane(m, m.R_to_lambda(160.31), 1.5 * initial_vector(m), 50000, 10000);
  RotationResult r = rotation_number(pts, {2500, 2500});
  CHECK(r.rho > 0.126);
  CHECK(r.rho < 0.129 + 0.001);
  CHECK(r.convergence_gap <= 1e-12);
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("0.126") == Rational{63, 500});
  CHECK(parse_rational("5/39") == Rational{5, 39});
  CHECK(parse_rational("10/4") == Rational{5, 2});
  CHECK(parse_rational("3") == Rational{3, 1});
  CHECK_THROWS(parse_rational("abc"));
  CHECK_THROWS(parse_rational("1/0"));
}

TEST_CASE("Farey search matches an exhaustive scan") {
  CHECK(farey_min_denominator(parse_rational("0.126"), parse_rational("0.129")) == Rational{5, 39});
  CHECK(farey_min_denominator({1, 3}, {1, 3}) == Rational{1, 3});
  CHECK(farey_min_denominator({0, 1}, {1, 1000}) == Rational{0, 1});
  CHECK_THROWS(farey_min_denominator({1, 2}, {1, 3}));
  std::mt19937_64 gen(12345);
  std::uniform_int_distribution<long long> num(0, 999999);
  for (int i = 0; i < 200; ++i) {
    long long a = num(gen), b = num(gen);
    if (a > b) std::swap(a, b);
    Rational lo{a, 1000000}, hi{b, 1000000};
    Rational f = farey_min_denominator(lo, hi);
    Rational s = scan(lo, hi);
    CHECK(f == s);
  }
}

}
