#pragma once

// 200-bit Newton refinement, used as an independent check that certified
// enclosures contain the true zero.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

#include "certibif/bifurcation.hpp"
#include "certibif/continuation.hpp"

namespace certibif {

using Real200 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<200>,
                                              boost::multiprecision::et_off>;

template <>
struct ScalarTraits<Real200> {
  static Real200 decimal(double x);
  static Real200 exact(double x) { return Real200(x); }
  static double to_double(const Real200& x) { return static_cast<double>(x); }
};

struct HighPrecisionZero {
  Eigen::VectorXd z;       // rounded to double
  double distance = 0;     // |z_hp - z0|_inf, rounded up
  double residual = 0;     // |H(z_hp)|_inf
  int iterations = 0;
};

HighPrecisionZero refine_sn(const CoralParams& prm, const Eigen::VectorXd& z0);
HighPrecisionZero refine_ns(const CoralParams& prm, const Eigen::VectorXd& z0);
/// Zero of y -> G(alpha, y) for the box anchored at `a`; distance is |y_hp|_inf.
HighPrecisionZero refine_segment(const CoralFamily& fam, const Anchor& a, double alpha);

/// Upper bound of |x - y| for a 200-bit x and a double y.
double distance_up(const Real200& x, double y);

}  // namespace certibif
