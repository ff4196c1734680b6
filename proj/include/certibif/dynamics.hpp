#pragma once

// Orbits, rotation numbers on invariant circles, and Farey search.  Nothing
// here is rigorous.

#include <string>
#include <vector>

#include "certibif/model.hpp"

namespace certibif {

struct OrbitSample {
  Eigen::MatrixXd points;  // d x n, iterates skip+1 .. skip+n
  double lambda = 0;
  long transient_skipped = 0;
};

/// Throws OrbitDiverged when an iterate is not finite.
OrbitSample iterate(const CoralModel<double>& m, double lambda, const Eigen::VectorXd& x0, long n, long skip = 0);

/// Same orbit, keeping only (x1, x2).
Eigen::Matrix2Xd iterate_plane(const CoralModel<double>& m, double lambda, const Eigen::VectorXd& x0, long n,
                               long skip = 0);

/// Age profile with P = 1500: y = c a with c = 1500 / (g . a).
Eigen::VectorXd initial_vector(const CoralModel<double>& m, double density = 1500.0);

struct RotationResult {
  double rho = 0;  // revolutions per iterate, in (0, 1)
  Eigen::Vector2d center;
  long iterates_used = 0;
  double convergence_gap = 0;  // |rho_N - rho_{0.8N}|
};

/// Weighted Birkhoff average of the angle increments about `center`, with
/// weight exp(-1 / (s (1 - s))).  Throws RotationUndefined when the orbit
/// hits the centre or the increments do not keep one sign.
RotationResult rotation_number(const Eigen::Matrix2Xd& pts, const Eigen::Vector2d& center);

/// Plain Birkhoff average of the increments, for comparison.
double rotation_number_unweighted(const Eigen::Matrix2Xd& pts, const Eigen::Vector2d& center);

struct AngleProfile {
  std::vector<double> angle;      // bin centres, rescaled to [0, 1)
  std::vector<double> increment;  // mean increment, in revolutions
  std::vector<bool> interpolated;
  double min_angle = 0;
  double min_increment = 0;
};

/// Mean angle increment as a function of the (rescaled) angle.
AngleProfile angle_profile(const Eigen::Matrix2Xd& pts, const Eigen::Vector2d& center, int bins = 200);

struct Rational {
  long long p = 0, q = 1;
  double value() const { return static_cast<double>(p) / static_cast<double>(q); }
  bool operator==(const Rational&) const = default;
};

/// "0.126", "5/39" or "3" as an exact rational.
Rational parse_rational(const std::string& s);

/// Fraction with the smallest denominator in [lo, hi], by Stern-Brocot descent.
Rational farey_min_denominator(const Rational& lo, const Rational& hi);

}  // namespace certibif
