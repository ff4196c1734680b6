#pragma once

// Outward-rounded inf-sup interval arithmetic usable as an Eigen scalar.
//
// Rounding is done without touching the FPU rounding mode: each basic
// operation is evaluated in round-to-nearest and the exact rounding error is
// recovered with an error-free transform (TwoSum, FMA residuals).  The sign
// of that error tells which endpoint needs a one-ulp nudge.  Near the
// underflow threshold, where the transforms stop being exact, both endpoints
// are nudged.  Nothing here reads or writes global state.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <limits>

#include "certibif/errors.hpp"

namespace certibif {

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this magnitude FMA/TwoSum residuals may be inexact (subnormal range).
inline constexpr double kTiny = 0x1p-960;

inline double next_up(double x) { return std::nextafter(x, kInf); }
inline double next_down(double x) { return std::nextafter(x, -kInf); }

}  // namespace detail

class Interval {
 public:
  constexpr Interval() = default;
  // Implicit on purpose: point values mix freely with intervals in Eigen expressions.
  constexpr Interval(double x) : lo_(x), hi_(x) {}
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) throw DomainError("Interval: lower bound exceeds upper bound");
  }

  /// Tightest representable enclosure of the decimal number whose shortest
  /// round-trip representation is `x` (e.g. the literal 0.89).  Integers and
  /// other values that are exact in binary stay points.
  static Interval decimal(double x);

  /// [c - r, c + r], rounded outward.
  static Interval ball(double center, double radius);

  static Interval entire() { return {-detail::kInf, detail::kInf, Unchecked{}}; }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double mid() const;
  double rad() const;
  double width() const { return detail::next_up(hi_ - lo_); }
  double mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }
  double mig() const {
    if (lo_ <= 0.0 && hi_ >= 0.0) return 0.0;
    return std::min(std::fabs(lo_), std::fabs(hi_));
  }
  bool is_point() const { return lo_ == hi_; }

  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool contains_zero() const { return contains(0.0); }
  bool excludes_zero() const { return !contains_zero(); }

  Interval& operator+=(const Interval& o);
  Interval& operator-=(const Interval& o);
  Interval& operator*=(const Interval& o);
  Interval& operator/=(const Interval& o);

  Interval operator-() const { return {-hi_, -lo_, Unchecked{}}; }
  Interval operator+() const { return *this; }

  friend bool operator==(const Interval& a, const Interval& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }
  friend bool operator!=(const Interval& a, const Interval& b) { return !(a == b); }

 private:
  struct Unchecked {};
  constexpr Interval(double lo, double hi, Unchecked) : lo_(lo), hi_(hi) {}

  friend Interval add(const Interval&, const Interval&);
  friend Interval sub(const Interval&, const Interval&);
  friend Interval mul(const Interval&, const Interval&);
  friend Interval div(const Interval&, const Interval&);
  friend Interval hull(const Interval&, const Interval&);
  friend Interval abs(const Interval&);
  friend Interval sqr(const Interval&);
  friend Interval sqrt(const Interval&);
  friend Interval exp(const Interval&);
  friend Interval pow(const Interval&, double);
  friend Interval pow(const Interval&, const Interval&);
  friend Interval max(const Interval&, const Interval&);
  friend Interval make_unchecked(double, double);

  double lo_ = 0.0;
  double hi_ = 0.0;
};

Interval add(const Interval& a, const Interval& b);
Interval sub(const Interval& a, const Interval& b);
Interval mul(const Interval& a, const Interval& b);
Interval div(const Interval& a, const Interval& b);

inline Interval operator+(const Interval& a, const Interval& b) { return add(a, b); }
inline Interval operator-(const Interval& a, const Interval& b) { return sub(a, b); }
inline Interval operator*(const Interval& a, const Interval& b) { return mul(a, b); }
inline Interval operator/(const Interval& a, const Interval& b) { return div(a, b); }

inline Interval& Interval::operator+=(const Interval& o) { return *this = add(*this, o); }
inline Interval& Interval::operator-=(const Interval& o) { return *this = sub(*this, o); }
inline Interval& Interval::operator*=(const Interval& o) { return *this = mul(*this, o); }
inline Interval& Interval::operator/=(const Interval& o) { return *this = div(*this, o); }

Interval hull(const Interval& a, const Interval& b);
Interval abs(const Interval& a);
Interval sqr(const Interval& a);
Interval sqrt(const Interval& a);
Interval exp(const Interval& a);
/// Real power with a point exponent; requires a >= 0 unless r is an integer.
Interval pow(const Interval& a, double r);
/// Real power with an interval exponent; requires a > 0 (or a >= 0 with r > 0).
Interval pow(const Interval& a, const Interval& r);
/// Upper envelope max(a, b).
Interval max(const Interval& a, const Interval& b);

inline double mag(const Interval& a) { return a.mag(); }
inline double mig(const Interval& a) { return a.mig(); }
inline double mid(const Interval& a) { return a.mid(); }

/// Certainly-less: every point of a is below every point of b.
inline bool certainly_lt(const Interval& a, const Interval& b) { return a.hi() < b.lo(); }
inline bool certainly_le(const Interval& a, const Interval& b) { return a.hi() <= b.lo(); }

std::ostream& operator<<(std::ostream& os, const Interval& a);

// Dense aliases, generic over the scalar so model code can be shared between
// floating-point simulation, interval validation and multiprecision oracles.
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

using IVector = Vec<Interval>;
using IMatrix = Mat<Interval>;

IVector to_interval(const Eigen::VectorXd& v);
IMatrix to_interval(const Eigen::MatrixXd& m);
Eigen::VectorXd midpoint(const IVector& v);
Eigen::MatrixXd midpoint(const IMatrix& m);
/// Componentwise box center +- radius.
IVector ball(const Eigen::VectorXd& center, double radius);

/// Max norm: upper bound dominates max_i |x_i| for every x in v.
Interval norm_inf(const IVector& v);
/// Induced max-row-sum norm.
Interval norm_inf(const IMatrix& a);
/// Norm on R x U used by the continuation: max(|alpha|, ||x||_inf).
Interval product_norm(const Interval& alpha, const IVector& x);

inline double norm_inf(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
}
inline double norm_inf(const Eigen::MatrixXd& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace certibif

namespace Eigen {

template <>
struct NumTraits<certibif::Interval> : GenericNumTraits<double> {
  using Real = certibif::Interval;
  using NonInteger = certibif::Interval;
  using Nested = certibif::Interval;
  using Literal = certibif::Interval;

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 8,
    MulCost = 16
  };

  static inline Real epsilon() { return NumTraits<double>::epsilon(); }
  static inline Real dummy_precision() { return NumTraits<double>::dummy_precision(); }
  static inline int digits10() { return NumTraits<double>::digits10(); }
  static inline Real highest() { return NumTraits<double>::highest(); }
  static inline Real lowest() { return NumTraits<double>::lowest(); }
};

}  // namespace Eigen

namespace certibif {

/// Rectangular complex interval re + i*im.
struct CInterval {
  Interval re;
  Interval im;

  CInterval() = default;
  CInterval(const Interval& r) : re(r), im(0.0) {}
  CInterval(double r) : re(r), im(0.0) {}
  CInterval(const Interval& r, const Interval& i) : re(r), im(i) {}

  CInterval conj() const { return {re, -im}; }
  /// |z|^2 enclosure.
  Interval norm2() const { return sqr(re) + sqr(im); }
  /// Upper bound of |z|.
  double mag() const;
  bool contains_zero() const { return re.contains_zero() && im.contains_zero(); }

  CInterval& operator+=(const CInterval& o) { re += o.re; im += o.im; return *this; }
  CInterval& operator-=(const CInterval& o) { re -= o.re; im -= o.im; return *this; }
  CInterval operator-() const { return {-re, -im}; }
};

inline CInterval operator+(const CInterval& a, const CInterval& b) { return {a.re + b.re, a.im + b.im}; }
inline CInterval operator-(const CInterval& a, const CInterval& b) { return {a.re - b.re, a.im - b.im}; }
inline CInterval operator*(const CInterval& a, const CInterval& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline CInterval operator*(const Interval& a, const CInterval& b) { return {a * b.re, a * b.im}; }
inline CInterval operator*(const CInterval& a, const Interval& b) { return {a.re * b, a.im * b}; }
CInterval operator/(const CInterval& a, const CInterval& b);

using CIVector = Vec<CInterval>;
using CIMatrix = Mat<CInterval>;

/// Max norm of a complex interval vector (upper bound of max_i |z_i|).
double norm_inf_upper(const CIVector& v);
/// Induced max-row-sum norm upper bound of a complex interval matrix.
double norm_inf_upper(const CIMatrix& a);

}  // namespace certibif

namespace Eigen {

template <>
struct NumTraits<certibif::CInterval> : GenericNumTraits<double> {
  using Real = certibif::Interval;
  using NonInteger = certibif::CInterval;
  using Nested = certibif::CInterval;
  using Literal = certibif::CInterval;

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 16,
    MulCost = 64
  };

  static inline Real epsilon() { return NumTraits<double>::epsilon(); }
  static inline Real dummy_precision() { return NumTraits<double>::dummy_precision(); }
  static inline int digits10() { return NumTraits<double>::digits10(); }
};

}  // namespace Eigen
