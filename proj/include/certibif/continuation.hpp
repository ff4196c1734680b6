#pragma once

// Validated pseudo-arclength continuation of zeros of F(p, u).
//
// Around an anchor (p0, u0) with direction (mu, v) the extended map
//
//   G(alpha, (sigma, x)) = ( mu sigma + v^t x,  F(p0 + alpha mu + sigma, u0 + alpha v + x) )
//
// is validated with the constructive implicit function theorem, treating
// alpha as the parameter.  Consecutive boxes are linked when the accuracy
// ball of the next anchor lies in the uniqueness region of the current box.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "certibif/cift.hpp"
#include "certibif/model.hpp"

namespace certibif {

/// Second-derivative enclosures of F over a box: uu[i](j, k), pu(i, j), pp(i).
struct SecondDerivatives {
  std::vector<IMatrix> uu;
  IMatrix pu;
  IVector pp;
};

/// A one-parameter family F: R x R^n -> R^n with closed-form derivatives.
class ParametrizedMap {
 public:
  virtual ~ParametrizedMap() = default;
  virtual Eigen::Index dim() const = 0;
  virtual Eigen::VectorXd F(double p, const Eigen::VectorXd& u) const = 0;
  virtual IVector F(const Interval& p, const IVector& u) const = 0;
  virtual Eigen::MatrixXd F_u(double p, const Eigen::VectorXd& u) const = 0;
  virtual IMatrix F_u(const Interval& p, const IVector& u) const = 0;
  virtual Eigen::VectorXd F_p(double p, const Eigen::VectorXd& u) const = 0;
  virtual IVector F_p(const Interval& p, const IVector& u) const = 0;
  virtual SecondDerivatives second(const Interval& p, const IVector& u) const = 0;
};

/// F(p, u) = f~(p, u) - u for the coral map, in preconditioned or raw coordinates.
class CoralFamily : public ParametrizedMap {
 public:
  /// p = R / 100, u = x ./ s with s the fixed point at R_start rounded to one significant digit.
  static CoralFamily preconditioned(const CoralParams& prm, double R_start);
  /// p = lambda, u = x.
  static CoralFamily raw(const CoralParams& prm);

  Eigen::Index dim() const override { return md_.dim(); }
  Eigen::VectorXd F(double p, const Eigen::VectorXd& u) const override { return md_.F(p, u); }
  IVector F(const Interval& p, const IVector& u) const override { return mi_.F(p, u); }
  Eigen::MatrixXd F_u(double p, const Eigen::VectorXd& u) const override { return md_.F_u(p, u); }
  IMatrix F_u(const Interval& p, const IVector& u) const override { return mi_.F_u(p, u); }
  Eigen::VectorXd F_p(double p, const Eigen::VectorXd& u) const override { return md_.F_p(p, u); }
  IVector F_p(const Interval& p, const IVector& u) const override { return mi_.F_p(p, u); }
  SecondDerivatives second(const Interval& p, const IVector& u) const override;

  bool is_preconditioned() const { return preconditioned_; }
  const Eigen::VectorXd& scale() const { return md_.scale(); }
  double kappa() const { return md_.kappa(); }
  const CoralModel<double>& model() const { return md_.model(); }
  const CoralModel<Interval>& imodel() const { return mi_.model(); }

  double p_of_R(double R) const;
  double R_of_p(double p) const;
  Interval R_of_p(const Interval& p) const;
  double lambda_of_p(double p) const { return md_.lambda_of(p); }
  Eigen::VectorXd u_of_x(const Eigen::VectorXd& x) const { return x.cwiseQuotient(scale()); }
  Eigen::VectorXd x_of_u(const Eigen::VectorXd& u) const { return md_.unscale(u); }

 private:
  CoralFamily(const CoralParams& prm, const Eigen::VectorXd& s, const Interval& kappa, bool pre);
  ScaledCoralMap<double> md_;
  ScaledCoralMap<Interval> mi_;
  bool preconditioned_;
};

/// Base point and direction of one slanted box; t = (mu, v).
struct Anchor {
  double p = 0;
  Eigen::VectorXd u;
  double mu = 0;
  Eigen::VectorXd v;

  Eigen::VectorXd direction() const;
};

struct SegmentHypotheses {
  Interval rho{0.0}, xi{0.0}, K{0.0};
  Interval M1{0.0}, M2{0.0}, M3{0.0}, M4{0.0};
  double d_u = 0, d_lambda = 0;
};

struct BranchBox {
  Anchor base;
  double alpha_step = 0;  // alpha used for the next predictor
  double delta_alpha = 0, delta_u = 0, delta_min = 0;
  CiftBounds bounds;
  SegmentHypotheses hyp;
  bool linked_to_previous = false;
  Eigen::VectorXd correction;  // (sigma*, x*) leading to the next anchor
  int corrector_iterations = 0;
};

/// G(alpha, y) with y = (sigma, x).
Eigen::VectorXd extended_G(const ParametrizedMap& F, const Anchor& a, double alpha, const Eigen::VectorXd& y);
IVector extended_G(const ParametrizedMap& F, const Anchor& a, const Interval& alpha, const IVector& y);
/// D_y G(alpha, y).
Eigen::MatrixXd extended_G_jacobian(const ParametrizedMap& F, const Anchor& a, double alpha, const Eigen::VectorXd& y);
IMatrix extended_G_jacobian(const ParametrizedMap& F, const Anchor& a, const Interval& alpha, const IVector& y);

/// Null vector of [F_p | F_u] with unit max norm, oriented along `previous` when given.
/// Throws TangentUndefined when the rank drops below n.
Eigen::VectorXd tangent_estimate(const ParametrizedMap& F, double p, const Eigen::VectorXd& u,
                                 const Eigen::VectorXd* previous = nullptr);

/// Newton on y -> G(alpha, y) from y = 0.  Throws CorrectorFailed.
Eigen::VectorXd newton_correct(const ParametrizedMap& F, const Anchor& a, double alpha, int max_iter = 25,
                               double tol = 1e-14, int* iterations = nullptr);

/// Residual, inverse and second-derivative bounds at the anchor over |u - u0| <= d_u, |p - p0| <= d_lambda.
SegmentHypotheses segment_hypotheses(const ParametrizedMap& F, const Anchor& a, double d_u, double d_lambda,
                                     LipschitzRecipe recipe = LipschitzRecipe::MeanValue);

/// L1..L4 of the extended map from M1..M4.
CiftBounds derive_extended_constants(const SegmentHypotheses& h, const Interval& mu_abs, const Interval& v_norm);

/// Certifies the box; throws ValidationFailed naming the broken inequality.
BranchBox validate_segment(const Anchor& a, const SegmentHypotheses& h);

/// Both linking inequalities.  The accuracy ball of the next anchor is split
/// orthogonally along t = (mu, v) in interval arithmetic.
bool check_link(const BranchBox& prev, double alpha_k, const IVector& correction, double next_delta_min);

struct ContinuationConfig {
  int max_steps = 5000;
  double alpha_frac = 0.8;
  double d_init = 1e-4;
  double d_min = 1e-9;
  double d_max = 0.05;
  LipschitzRecipe recipe = LipschitzRecipe::MeanValue;
  int corrector_iter = 25;
  double corrector_tol = 1e-14;
  /// Stop once p passes `target_p` for the `target_crossing`-th time.
  std::optional<double> target_p;
  int target_crossing = 1;
  /// Initial orientation: sign of mu at the first anchor.
  double initial_mu_sign = -1.0;
  std::function<void(const BranchBox&, int)> on_box;
};

struct ContinuationResult {
  std::vector<BranchBox> boxes;
  std::string stop_reason;  // target | max_steps | validation | link | corrector | tangent
  std::string stop_detail;
  bool all_linked = true;  // every emitted pair of consecutive boxes passed the link test
};

ContinuationResult continue_branch(const ParametrizedMap& F, double p0, const Eigen::VectorXd& u0,
                                   const ContinuationConfig& cfg = {});

struct Stability {
  bool stable = true;
  int index = 0;  // eigenvalues with modulus > 1
};

/// Floating-point eigenvalue moduli of D_x f against 1.  Not rigorous.
Stability classify_stability(const CoralModel<double>& m, double lambda, const Eigen::VectorXd& x);

/// Length of the box centre segment in raw (lambda, x) max-norm coordinates.
double raw_segment_length(const CoralFamily& fam, const BranchBox& box);

/// One row per box: R, lambda, x_1..x_d, P, delta_alpha, delta_u, delta_min, stability.
void write_branch_csv(std::ostream& os, const CoralFamily& fam, const std::vector<BranchBox>& boxes);

/// Worker threads for per-step hypothesis evaluation (CERTIBIF_THREADS, default 1).
int thread_count();

}  // namespace certibif
