#include <doctest.h>

#include <cmath>

#include "certibif/interval.hpp"

using namespace certibif;

TEST_SUITE("interval") {

TEST_CASE("decimal literals are enclosed, binary values stay points") {
  Interval t = Interval::decimal(0.1);
  CHECK(t.lo() < t.hi());
  CHECK(t.hi() == std::nextafter(0.1, 1.0));
  CHECK(t.lo() == std::nextafter(0.1, 0.0));
  // 0.1 = 1/10: 10 * [lo, hi] must straddle 1
  CHECK((t * Interval(10.0)).contains(1.0));
  CHECK(Interval::decimal(0.5).is_point());
  CHECK(Interval::decimal(13.0).is_point());
}

TEST_CASE("arithmetic is outward rounded") {
  Interval third = Interval(1.0) / Interval(3.0);
  CHECK(third.lo() < third.hi());
  CHECK((third * Interval(3.0)).contains(1.0));
  Interval s = Interval(1.0) + Interval(1e-30);
  CHECK(s.lo() == 1.0);
  CHECK(s.hi() > 1.0);
  Interval d = Interval(1.0) - Interval(1e-30);
  CHECK(d.hi() == 1.0);
  CHECK(d.lo() < 1.0);
  Interval p = Interval(-2.0, 3.0) * Interval(-5.0, 4.0);
  CHECK(p.lo() == -15.0);
  CHECK(p.hi() == 12.0);
}

TEST_CASE("division by an interval containing zero throws") {
  CHECK_THROWS_AS(Interval(1.0) / Interval(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(Interval(1.0) / Interval(0.0), DomainError);
  CHECK_NOTHROW(Interval(1.0) / Interval(1e-300, 1.0));
}

TEST_CASE("bad bounds and domains") {
  CHECK_THROWS_AS(Interval(2.0, 1.0), DomainError);
  CHECK_THROWS_AS(sqrt(Interval(-1.0, -0.5)), DomainError);
  CHECK_THROWS_AS(pow(Interval(-1.0, 2.0), 0.5), DomainError);
}

TEST_CASE("elementary functions contain libm values") {
  CHECK(exp(Interval(1.0)).contains(std::exp(1.0)));
  CHECK(exp(Interval(0.0)).contains(1.0));
  CHECK(sqrt(Interval(2.0)).contains(std::sqrt(2.0)));
  Interval r = pow(Interval(2.0), 0.5);
  CHECK(r.contains(std::sqrt(2.0)));
  CHECK(r.width() < 1e-14);
  Interval k = pow(Interval(13.0), Interval::decimal(2.324));
  CHECK(k.contains(std::pow(13.0, 2.324)));
  CHECK(sqr(Interval(-2.0, 1.0)).lo() == 0.0);
  CHECK(sqr(Interval(-2.0, 1.0)).hi() == 4.0);
  CHECK(abs(Interval(-3.0, -1.0)) == Interval(1.0, 3.0));
}

TEST_CASE("width, mag, mig, hull") {
  Interval a(-1.0, 3.0);
  CHECK(a.mag() == 3.0);
  CHECK(a.mig() == 0.0);
  CHECK(Interval(2.0, 5.0).mig() == 2.0);
  CHECK(hull(Interval(1.0), Interval(4.0)) == Interval(1.0, 4.0));
  CHECK(a.width() >= 4.0);
  CHECK(Interval::ball(1.0, 0.25).contains(Interval(0.75, 1.25)));
}

TEST_CASE("Eigen matrices over intervals") {
  IMatrix A(2, 2);
  A << Interval(1.0), Interval::decimal(0.1), Interval(0.0), Interval(2.0);
  IVector x(2);
  x << Interval(1.0), Interval(-1.0);
  IVector y = A * x;
  CHECK(y(0).contains(0.9));
  CHECK(y(1) == Interval(-2.0));
  CHECK(norm_inf(y).contains(2.0));
  Interval n = norm_inf(A);
  CHECK(n.contains(2.0));
  Eigen::MatrixXd m = midpoint(A);
  CHECK(m(0, 1) == doctest::Approx(0.1));
}

TEST_CASE("complex intervals") {
  CInterval i(Interval(0.0), Interval(1.0));
  CInterval m = i * i;
  CHECK(m.re.contains(-1.0));
  CHECK(m.im.contains(0.0));
  CInterval q = CInterval(Interval(1.0), Interval(1.0)) / CInterval(Interval(1.0), Interval(-1.0));
  CHECK(q.re.contains(0.0));
  CHECK(q.im.contains(1.0));
  CHECK(CInterval(Interval(3.0), Interval(4.0)).mag() >= 5.0);
  CHECK(CInterval(Interval(3.0), Interval(4.0)).norm2().contains(25.0));
}

}
