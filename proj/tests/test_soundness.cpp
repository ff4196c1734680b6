#include <doctest.h>

#include <random>

#include "certibif/highprec.hpp"

using namespace certibif;

namespace {

bool encloses(const Interval& x, const Real200& v) { return Real200(x.lo()) <= v && v <= Real200(x.hi()); }

struct Sampler {
  std::mt19937_64 gen{20240611};
  std::uniform_real_distribution<double> unit{0.0, 1.0};
  std::uniform_int_distribution<int> expo{-30, 30};

  double number(bool positive = false) {
    double m = 1.0 + unit(gen);
    double x = std::ldexp(m, expo(gen));
    return positive || unit(gen) < 0.5 ? x : -x;
  }
  Interval interval(bool positive = false) {
    double a = number(positive);
    double w = unit(gen) < 0.3 ? 0.0 : std::fabs(a) * std::ldexp(unit(gen), -expo(gen) % 20 - 1);
    return positive ? Interval(a, a + w) : Interval(a - w, a + w);
  }
  double inside(const Interval& x) {
    double t = unit(gen);
    double v = x.lo() + t * (x.hi() - x.lo());
    return std::min(std::max(v, x.lo()), x.hi());
  }
};

}  // namespace

TEST_SUITE("soundness") {

TEST_CASE("interval operations contain 200-bit results (1e5 samples)") {
  Sampler s;
  int failures = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    int op = i % 8;
    Interval A = s.interval(op >= 4), B = s.interval(op == 3);
    double a = s.inside(A), b = s.inside(B);
    Real200 ra(a), rb(b);
    Interval r;
    Real200 v;
    switch (op) {
      case 0: r = A + B; v = ra + rb; break;
      case 1: r = A - B; v = ra - rb; break;
      case 2: r = A * B; v = ra * rb; break;
      case 3: r = A / B; v = ra / rb; break;
      case 4: r = sqrt(A); v = sqrt(ra); break;
      case 5: {
        Interval Ae = A * Interval(std::ldexp(1.0, -30));
        double ae = s.inside(Ae);
        r = exp(Ae);
        v = exp(Real200(ae));
        break;
      }
      case 6: r = pow(A, 2.324); v = pow(ra, Real200(2.324)); break;
      default: r = sqr(B); v = Real200(b) * Real200(b); break;
    }
    if (!encloses(r, v)) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("decimal parameters enclose their decimal values") {
  for (double x : {0.89, 0.63, 0.33, 1.239, 2.324, 5e-4, 3.4e-3, 0.36, 0.97}) {
    Interval I = Interval::decimal(x);
    CHECK(encloses(I, ScalarTraits<Real200>::decimal(x)));
  }
}

TEST_CASE("high-precision saddle-node zero lies in the accuracy ball") {
  CoralParams prm = CoralParams::table1();
  BifCertificate c = certify_sn(approximate_sn(prm), prm);
  HighPrecisionZero z = refine_sn(prm, c.zero.anchor);
  CHECK(z.residual < 1e-40);
  CHECK(z.distance <= c.zero.delta_accuracy);
  for (Eigen::Index k = 0; k < z.z.size(); ++k) CHECK(c.enclosure(k).contains(z.z(k)));
}

TEST_CASE("high-precision Neimark-Sacker zero lies in the accuracy ball") {
  CoralParams prm = CoralParams::table1();
  BifCertificate c = certify_ns(approximate_ns(prm), prm);
  HighPrecisionZero z = refine_ns(prm, c.zero.anchor);
  CHECK(z.residual < 1e-40);
  CHECK(z.distance <= c.zero.delta_accuracy);
}

TEST_CASE("high-precision branch points lie in their boxes") {
  CoralParams prm = CoralParams::table1();
  CoralFamily fam = CoralFamily::preconditioned(prm, 300.0);
  BranchPoint bp = branch_point_at_R(fam.model(), 300.0, true);
  ContinuationConfig cfg;
  cfg.max_steps = 60;
  ContinuationResult r = continue_branch(fam, fam.p_of_R(300.0), fam.u_of_x(bp.x), cfg);
  REQUIRE(r.boxes.size() == 60);
  for (size_t i = 0; i + 1 < r.boxes.size(); i += 7) {
    const BranchBox& b = r.boxes[i];
    HighPrecisionZero at0 = refine_segment(fam, b.base, 0.0);
    CHECK(at0.residual < 1e-40);
    CHECK(at0.distance <= b.delta_min);
    for (double frac : {0.5, 1.0}) {
      HighPrecisionZero z = refine_segment(fam, b.base, frac * b.delta_alpha);
      CHECK(z.distance <= b.delta_u);
    }
  }
}

}
