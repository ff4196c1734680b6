#include "certibif/interval.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <ostream>

namespace certibif {

using detail::kInf;
using detail::kTiny;
using detail::next_down;
using detail::next_up;

namespace {

// r is the round-to-nearest result, err the exact residual (true - r) or its sign.
// TwoSum stays exact through underflow, FMA residuals do not; `tiny_ok` says which.
double lower(double r, double err, bool tiny_ok = false) {
  if (std::isnan(r)) return -kInf;
  if (!std::isfinite(r)) return r > 0 ? std::numeric_limits<double>::max() : r;
  if (!std::isfinite(err) || (!tiny_ok && std::fabs(r) < kTiny)) return next_down(r);
  return err < 0 ? next_down(r) : r;
}

double upper(double r, double err, bool tiny_ok = false) {
  if (std::isnan(r)) return kInf;
  if (!std::isfinite(r)) return r < 0 ? std::numeric_limits<double>::lowest() : r;
  if (!std::isfinite(err) || (!tiny_ok && std::fabs(r) < kTiny)) return next_up(r);
  return err > 0 ? next_up(r) : r;
}

double two_sum_err(double a, double b, double s) {
  double bb = s - a;
  return (a - (s - bb)) + (b - bb);
}

struct Rounded {
  double lo, hi;
};

Rounded add_rd(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    double s = a + b;
    return {std::isnan(s) ? -kInf : s, std::isnan(s) ? kInf : s};
  }
  double s = a + b;
  double e = two_sum_err(a, b, s);
  return {lower(s, e, true), upper(s, e, true)};
}

Rounded mul_rd(double a, double b) {
  if (a == 0.0 || b == 0.0) return {0.0, 0.0};
  double p = a * b;
  if (!std::isfinite(a) || !std::isfinite(b)) return {p, p};
  double e = std::fma(a, b, -p);
  return {lower(p, e), upper(p, e)};
}

Rounded div_rd(double a, double b) {
  if (a == 0.0) return {0.0, 0.0};
  double q = a / b;
  if (!std::isfinite(a)) return {q, q};
  if (!std::isfinite(b)) return {next_down(0.0), next_up(0.0)};
  double r = std::fma(-q, b, a);
  double e = b > 0 ? r : -r;
  return {lower(q, e), upper(q, e)};
}

double down2(double x) { return next_down(next_down(x)); }
double up2(double x) { return next_up(next_up(x)); }

bool is_integer(double r) { return std::isfinite(r) && std::floor(r) == r; }

Interval ipow(const Interval& a, long n) {
  if (n == 0) return Interval(1.0);
  if (n < 0) return Interval(1.0) / ipow(a, -n);
  Interval base = a;
  Interval result(1.0);
  bool first = true;
  // Square-and-multiply, using sqr for even powers so the result stays tight.
  if (n % 2 == 0) return sqr(ipow(a, n / 2));
  while (n > 0) {
    if (n & 1) {
      result = first ? base : result * base;
      first = false;
    }
    n >>= 1;
    if (n > 0) base = sqr(base);
  }
  return result;
}

}  // namespace

Interval make_unchecked(double lo, double hi) { return Interval(lo, hi, Interval::Unchecked{}); }

Interval Interval::decimal(double x) {
  if (!std::isfinite(x) || is_integer(x)) return Interval(x);
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::fixed);
  *res.ptr = '\0';
  const char* dot = std::strchr(buf, '.');
  int frac = dot ? static_cast<int>(res.ptr - dot - 1) : 0;
  // The shortest decimal equals x exactly iff x has at most `frac` binary fraction digits.
  if (frac < 1000) {
    double scaled = std::ldexp(x, frac);
    if (is_integer(scaled)) return Interval(x);
  }
  return make_unchecked(next_down(x), next_up(x));
}

Interval Interval::ball(double center, double radius) {
  Rounded l = add_rd(center, -radius);
  Rounded h = add_rd(center, radius);
  return make_unchecked(l.lo, h.hi);
}

double Interval::mid() const {
  if (lo_ == -kInf && hi_ == kInf) return 0.0;
  if (lo_ == -kInf) return std::numeric_limits<double>::lowest();
  if (hi_ == kInf) return std::numeric_limits<double>::max();
  double m = 0.5 * lo_ + 0.5 * hi_;
  return std::clamp(m, lo_, hi_);
}

double Interval::rad() const {
  double m = mid();
  return std::max(add_rd(hi_, -m).hi, add_rd(m, -lo_).hi);
}

Interval add(const Interval& a, const Interval& b) {
  return make_unchecked(add_rd(a.lo_, b.lo_).lo, add_rd(a.hi_, b.hi_).hi);
}

Interval sub(const Interval& a, const Interval& b) {
  return make_unchecked(add_rd(a.lo_, -b.hi_).lo, add_rd(a.hi_, -b.lo_).hi);
}

Interval mul(const Interval& a, const Interval& b) {
  if (a.is_point() && b.is_point()) {
    Rounded p = mul_rd(a.lo_, b.lo_);
    return make_unchecked(p.lo, p.hi);
  }
  Rounded p1 = mul_rd(a.lo_, b.lo_);
  Rounded p2 = mul_rd(a.lo_, b.hi_);
  Rounded p3 = mul_rd(a.hi_, b.lo_);
  Rounded p4 = mul_rd(a.hi_, b.hi_);
  return make_unchecked(std::min({p1.lo, p2.lo, p3.lo, p4.lo}),
                        std::max({p1.hi, p2.hi, p3.hi, p4.hi}));
}

Interval div(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw DomainError("Interval division by an interval containing zero");
  Rounded q1 = div_rd(a.lo_, b.lo_);
  Rounded q2 = div_rd(a.lo_, b.hi_);
  Rounded q3 = div_rd(a.hi_, b.lo_);
  Rounded q4 = div_rd(a.hi_, b.hi_);
  return make_unchecked(std::min({q1.lo, q2.lo, q3.lo, q4.lo}),
                        std::max({q1.hi, q2.hi, q3.hi, q4.hi}));
}

Interval hull(const Interval& a, const Interval& b) {
  return make_unchecked(std::min(a.lo_, b.lo_), std::max(a.hi_, b.hi_));
}

Interval abs(const Interval& a) {
  if (a.lo_ >= 0) return a;
  if (a.hi_ <= 0) return -a;
  return make_unchecked(0.0, std::max(-a.lo_, a.hi_));
}

Interval sqr(const Interval& a) {
  double m = a.mig();
  double M = a.mag();
  double lo = m == 0.0 ? 0.0 : std::max(0.0, mul_rd(m, m).lo);
  return make_unchecked(lo, mul_rd(M, M).hi);
}

Interval sqrt(const Interval& a) {
  if (a.hi_ < 0) throw DomainError("sqrt of a negative interval");
  auto root_lo = [](double x) {
    if (x <= 0) return 0.0;
    double s = std::sqrt(x);
    if (!std::isfinite(s)) return s;
    return std::max(0.0, lower(s, std::fma(-s, s, x)));
  };
  auto root_hi = [](double x) {
    if (x <= 0) return 0.0;
    double s = std::sqrt(x);
    if (!std::isfinite(s)) return s;
    return upper(s, std::fma(-s, s, x));
  };
  return make_unchecked(root_lo(a.lo_), root_hi(a.hi_));
}

Interval exp(const Interval& a) {
  if (a.is_point() && a.lo_ == 0.0) return Interval(1.0);
  double lo = a.lo_ == -kInf ? 0.0 : std::max(0.0, down2(std::exp(a.lo_)));
  double hi = std::exp(a.hi_);
  hi = std::isfinite(hi) ? up2(hi) : kInf;
  return make_unchecked(lo, hi);
}

Interval pow(const Interval& a, double r) {
  if (is_integer(r) && std::fabs(r) <= 1024) return ipow(a, static_cast<long>(r));
  if (a.lo_ < 0) throw DomainError("fractional power of an interval with a negative part");
  if (r < 0 && a.lo_ == 0) throw DomainError("negative power of an interval containing zero");
  double x0 = r > 0 ? a.lo_ : a.hi_;
  double x1 = r > 0 ? a.hi_ : a.lo_;
  double lo = x0 == 0.0 ? 0.0 : std::max(0.0, down2(std::pow(x0, r)));
  double hi = std::pow(x1, r);
  hi = std::isfinite(hi) ? up2(hi) : kInf;
  return make_unchecked(lo, hi);
}

Interval pow(const Interval& a, const Interval& r) {
  if (r.is_point()) return pow(a, r.lo_);
  if (a.lo_ < 0 || (a.lo_ == 0 && r.lo_ <= 0))
    throw DomainError("interval power needs a positive base");
  // x^r = exp(r ln x) and r ln x is bilinear, so the extremes sit at corners.
  double lo = kInf, hi = 0.0;
  for (double x : {a.lo_, a.hi_}) {
    for (double e : {r.lo_, r.hi_}) {
      double v = std::pow(x, e);
      lo = std::min(lo, x == 0.0 ? 0.0 : std::max(0.0, down2(v)));
      hi = std::max(hi, std::isfinite(v) ? up2(v) : kInf);
    }
  }
  return make_unchecked(lo, hi);
}

Interval max(const Interval& a, const Interval& b) {
  return make_unchecked(std::max(a.lo_, b.lo_), std::max(a.hi_, b.hi_));
}

std::ostream& operator<<(std::ostream& os, const Interval& a) {
  char buf[80];
  std::snprintf(buf, sizeof(buf), "[%.17g, %.17g]", a.lo(), a.hi());
  return os << buf;
}

IVector to_interval(const Eigen::VectorXd& v) { return v.cast<Interval>(); }
IMatrix to_interval(const Eigen::MatrixXd& m) { return m.cast<Interval>(); }

Eigen::VectorXd midpoint(const IVector& v) {
  return v.unaryExpr([](const Interval& x) { return x.mid(); });
}

Eigen::MatrixXd midpoint(const IMatrix& m) {
  return m.unaryExpr([](const Interval& x) { return x.mid(); });
}

IVector ball(const Eigen::VectorXd& center, double radius) {
  IVector out(center.size());
  for (Eigen::Index i = 0; i < center.size(); ++i) out(i) = Interval::ball(center(i), radius);
  return out;
}

Interval norm_inf(const IVector& v) {
  double lo = 0.0, hi = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    lo = std::max(lo, v(i).mig());
    hi = std::max(hi, v(i).mag());
  }
  return Interval(lo, hi);
}

Interval norm_inf(const IMatrix& a) {
  double lo = 0.0, hi = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Interval row(0.0);
    for (Eigen::Index j = 0; j < a.cols(); ++j) row += abs(a(i, j));
    lo = std::max(lo, row.lo());
    hi = std::max(hi, row.hi());
  }
  return Interval(lo, hi);
}

Interval product_norm(const Interval& alpha, const IVector& x) {
  return max(abs(alpha), norm_inf(x));
}

double CInterval::mag() const { return sqrt(norm2()).hi(); }

CInterval operator/(const CInterval& a, const CInterval& b) {
  Interval den = b.norm2();
  CInterval num = a * b.conj();
  return {num.re / den, num.im / den};
}

double norm_inf_upper(const CIVector& v) {
  double hi = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) hi = std::max(hi, v(i).mag());
  return hi;
}

double norm_inf_upper(const CIMatrix& a) {
  double hi = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Interval row(0.0);
    for (Eigen::Index j = 0; j < a.cols(); ++j) row += Interval(0.0, a(i, j).mag());
    hi = std::max(hi, row.hi());
  }
  return hi;
}

}  // namespace certibif
