#pragma once

// Constructive implicit function theorem for G(alpha, x) = 0 in max norms.
//
// Given an approximate zero x*, the theorem needs
//   rho >= |G(alpha*, x*)|                         (H1)
//   K   >= |D_x G(alpha*, x*)^{-1}|                (H2)
//   |D_x G(a, x) - D_x G(a*, x*)| <= L1 |x - x*| + L2 |a - a*|   on the box (H3)
//   |D_a G(a, x*)| <= L3 + L4 |a - a*|             (H4)
// and 4 K^2 rho L1 < 1, 2 K rho < ell_x.  A feasible (delta_alpha, delta_x)
// then gives existence and uniqueness of x(alpha) within delta_x.

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "certibif/interval.hpp"

namespace certibif {

struct CiftBounds {
  Interval rho{0.0}, K{0.0}, L1{0.0}, L2{0.0}, L3{0.0}, L4{0.0};
  double ell_x = 0.0;
  double ell_alpha = 0.0;
};

struct DeltaPair {
  double delta_alpha = 0.0;
  double delta_x = 0.0;
  double delta_min = 0.0;
};

/// Extra constraint delta_alpha * direction_norm + delta_x <= box_limit used by continuation.
struct DeltaConstraint {
  double direction_norm = 0.0;
  double box_limit = std::numeric_limits<double>::infinity();
};

/// Largest delta_alpha with a feasible delta_x; delta_x is then the largest feasible value.
/// Throws ValidationFailed naming the broken inequality.
DeltaPair solve_deltas(const CiftBounds& b, const DeltaConstraint& extra = {});

/// True iff (delta_alpha, delta_x) satisfies every inequality, checked in interval arithmetic.
bool deltas_feasible(const CiftBounds& b, const DeltaPair& dp, const DeltaConstraint& extra = {});

struct InverseBound {
  double K = 0.0;     // upper bound of |A^{-1}|
  double err = 0.0;   // upper bound of |B - A^{-1}|
  double rho1 = 0.0;  // upper bound of |I - B A|
  double rho2 = 0.0;  // upper bound of |B|
};

/// Inverse-bounds lemma.  Throws NotInvertibleEvidence when |I - BA| >= 1.
InverseBound inverse_bound(const IMatrix& A, const Eigen::MatrixXd& B);
/// Same with B = inv(mid(A)).
InverseBound inverse_bound(const IMatrix& A);

/// Enclosure of A^{-1} b for every A in the interval matrix and b in the interval vector.
struct VerifiedSolve {
  Eigen::VectorXd center;
  double radius = 0.0;  // max-norm radius around center
  IVector enclosure;
};
VerifiedSolve verified_solve(const IMatrix& A, const IVector& b);

/// A square system H: R^m -> R^m with closed-form derivatives.
class ZeroProblem {
 public:
  virtual ~ZeroProblem() = default;
  virtual std::string name() const = 0;
  virtual Eigen::Index dim() const = 0;
  virtual Eigen::VectorXd value(const Eigen::VectorXd& z) const = 0;
  virtual IVector value(const IVector& z) const = 0;
  virtual Eigen::MatrixXd jacobian(const Eigen::VectorXd& z) const = 0;
  virtual IMatrix jacobian(const IVector& z) const = 0;
  /// hessians(z)[i](j, k) encloses d^2 H_i / dz_j dz_k over the box z.
  virtual std::vector<IMatrix> hessians(const IVector& z) const = 0;
};

/// Wraps a system class exposing templated value/jacobian and an interval `hessians`.
template <class System>
class SystemProblem : public ZeroProblem {
 public:
  explicit SystemProblem(System sys) : sys_(std::move(sys)) {}
  const System& system() const { return sys_; }
  std::string name() const override { return sys_.name(); }
  Eigen::Index dim() const override { return sys_.dim(); }
  Eigen::VectorXd value(const Eigen::VectorXd& z) const override { return sys_.template value<double>(z); }
  IVector value(const IVector& z) const override { return sys_.template value<Interval>(z); }
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& z) const override { return sys_.template jacobian<double>(z); }
  IMatrix jacobian(const IVector& z) const override { return sys_.template jacobian<Interval>(z); }
  std::vector<IMatrix> hessians(const IVector& z) const override { return sys_.hessians(z); }

 private:
  System sys_;
};

enum class LipschitzRecipe {
  MeanValue,  // m * max_k |d2 H_i / dz_k dz_j|, summed over j
  RowSum,     // sum_k |d2 H_i / dz_k dz_j|, summed over j
};

/// Lipschitz constant of DH in the induced max norm from row Hessian enclosures.
Interval lipschitz_from_hessians(const std::vector<IMatrix>& hess, LipschitzRecipe recipe);

/// L1 of M*H over the box z0 +- ell (M = identity when empty).
Interval lipschitz_L1(const ZeroProblem& H, const Eigen::VectorXd& z0, double ell,
                      const Eigen::MatrixXd& M = Eigen::MatrixXd(),
                      LipschitzRecipe recipe = LipschitzRecipe::MeanValue);

/// |M H(z0)|_inf enclosure (M = identity when empty).
Interval residual_bound(const ZeroProblem& H, const Eigen::VectorXd& z0,
                        const Eigen::MatrixXd& M = Eigen::MatrixXd());

struct CiftOptions {
  double ell = 1e-6;
  bool precondition = true;
  LipschitzRecipe recipe = LipschitzRecipe::MeanValue;
};

struct ZeroCertificate {
  std::string system;
  Eigen::VectorXd anchor;
  CiftBounds bounds;
  double delta_accuracy = 0.0;
  double delta_uniqueness = 0.0;
  std::string preconditioner_hash;
};

/// Parameter-free validation: certifies a unique zero within delta_accuracy of z0,
/// unique within delta_uniqueness.  Throws ValidationFailed.
ZeroCertificate validate_zero(const ZeroProblem& H, const Eigen::VectorXd& z0, const CiftOptions& opt = {});

/// Plain Newton iteration on H; returns the last iterate.
Eigen::VectorXd newton(const ZeroProblem& H, Eigen::VectorXd z, int max_iter = 50, double tol = 1e-13);

/// FNV-1a of the raw matrix bytes, hex encoded.
std::string matrix_hash(const Eigen::MatrixXd& M);

}  // namespace certibif
