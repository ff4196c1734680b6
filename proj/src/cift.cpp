#include "certibif/cift.hpp"

#include <Eigen/LU>
#include <cstdint>
#include <cstdio>

namespace certibif {

namespace {

double up(const Interval& x) { return x.hi(); }

IMatrix identity(Eigen::Index n) { return IMatrix::Identity(n, n); }

}  // namespace

InverseBound inverse_bound(const IMatrix& A, const Eigen::MatrixXd& B) {
  IMatrix Bi = B.cast<Interval>();
  IMatrix E = identity(A.rows()) - Bi * A;
  InverseBound ib;
  ib.rho1 = up(norm_inf(E));
  ib.rho2 = up(norm_inf(Bi));
  if (!(ib.rho1 < 1.0)) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "|I - BA| <= %.3e is not below 1", ib.rho1);
    throw NotInvertibleEvidence(buf);
  }
  Interval den = Interval(1.0) - Interval(ib.rho1);
  ib.K = up(Interval(ib.rho2) / den);
  ib.err = up(Interval(ib.rho1) * Interval(ib.rho2) / den);
  return ib;
}

InverseBound inverse_bound(const IMatrix& A) {
  Eigen::MatrixXd mid = midpoint(A);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(mid);
  if (!lu.isInvertible()) throw NotInvertibleEvidence("midpoint matrix is numerically singular");
  return inverse_bound(A, lu.inverse());
}

VerifiedSolve verified_solve(const IMatrix& A, const IVector& b) {
  Eigen::MatrixXd mid = midpoint(A);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(mid);
  if (!lu.isInvertible()) throw NotInvertibleEvidence("midpoint matrix is numerically singular");
  Eigen::MatrixXd R = lu.inverse();
  IMatrix Ri = R.cast<Interval>();
  Eigen::VectorXd x0 = R * midpoint(b);
  // |x - x0| <= |R (b - A x0)| / (1 - |I - R A|)
  double rho1 = up(norm_inf(IMatrix(identity(A.rows()) - Ri * A)));
  if (!(rho1 < 1.0)) throw NotInvertibleEvidence("verified solve: |I - RA| >= 1");
  IVector x0i = x0.cast<Interval>();
  double res = up(norm_inf(IVector(Ri * (b - A * x0i))));
  VerifiedSolve out;
  out.center = x0;
  out.radius = up(Interval(res) / (Interval(1.0) - Interval(rho1)));
  out.enclosure = ball(x0, out.radius);
  return out;
}

Interval lipschitz_from_hessians(const std::vector<IMatrix>& hess, LipschitzRecipe recipe) {
  double best = 0.0;
  for (const IMatrix& Hi : hess) {
    const Eigen::Index m = Hi.rows();
    Interval row(0.0);
    for (Eigen::Index j = 0; j < m; ++j) {
      if (recipe == LipschitzRecipe::MeanValue) {
        double mx = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) mx = std::max(mx, Hi(k, j).mag());
        row += Interval(static_cast<double>(m)) * Interval(mx);
      } else {
        for (Eigen::Index k = 0; k < m; ++k) row += Interval(Hi(k, j).mag());
      }
    }
    best = std::max(best, row.hi());
  }
  return Interval(0.0, best);
}

Interval lipschitz_L1(const ZeroProblem& H, const Eigen::VectorXd& z0, double ell, const Eigen::MatrixXd& M,
                      LipschitzRecipe recipe) {
  std::vector<IMatrix> hess = H.hessians(ball(z0, ell));
  if (M.size() == 0) return lipschitz_from_hessians(hess, recipe);
  const Eigen::Index m = H.dim();
  std::vector<IMatrix> pre(m, IMatrix::Zero(m, m));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index r = 0; r < m; ++r) {
      double w = M(i, r);
      if (w == 0.0) continue;
      Interval wi(w);
      for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index k = 0; k < m; ++k) {
          const Interval& h = hess[r](j, k);
          if (h.lo() == 0.0 && h.hi() == 0.0) continue;
          pre[i](j, k) += wi * h;
        }
    }
  return lipschitz_from_hessians(pre, recipe);
}

Interval residual_bound(const ZeroProblem& H, const Eigen::VectorXd& z0, const Eigen::MatrixXd& M) {
  IVector r = H.value(IVector(z0.cast<Interval>()));
  if (M.size() == 0) return norm_inf(r);
  return norm_inf(IVector(M.cast<Interval>() * r));
}

namespace {

struct DeltaEnds {
  double lower;  // rigorous upper bound of the smallest admissible delta_x
  double upper;  // rigorous lower bound of the largest admissible delta_x
};

DeltaEnds delta_ends(const CiftBounds& b, double da, const DeltaConstraint& extra) {
  Interval two_k = Interval(2.0) * b.K;
  Interval a(da);
  Interval lo = two_k * b.rho + two_k * b.L3 * a + two_k * b.L4 * a * a;
  double hi = b.ell_x;
  if (b.L1.hi() > 0) {
    Interval num = Interval(1.0) - two_k * b.L2 * a;
    Interval den((two_k * b.L1).hi());
    hi = num.lo() <= 0 ? -1.0 : std::min(hi, (Interval(num.lo()) / den).lo());
  } else if ((two_k * b.L2 * a).hi() > 1.0) {
    hi = -1.0;
  }
  if (std::isfinite(extra.box_limit)) hi = std::min(hi, (Interval(extra.box_limit) - Interval(extra.direction_norm) * a).lo());
  return {lo.hi(), hi};
}

}  // namespace

bool deltas_feasible(const CiftBounds& b, const DeltaPair& dp, const DeltaConstraint& extra) {
  if (dp.delta_alpha < 0 || dp.delta_alpha > b.ell_alpha) return false;
  if (!(dp.delta_x > 0) || dp.delta_x > b.ell_x) return false;
  Interval two_k = Interval(2.0) * b.K;
  Interval a(dp.delta_alpha), x(dp.delta_x);
  if ((two_k * b.L1 * x + two_k * b.L2 * a).hi() > 1.0) return false;
  if ((two_k * b.rho + two_k * b.L3 * a + two_k * b.L4 * a * a).hi() > dp.delta_x) return false;
  if (std::isfinite(extra.box_limit) && (Interval(extra.direction_norm) * a + x).hi() > extra.box_limit)
    return false;
  return true;
}

DeltaPair solve_deltas(const CiftBounds& b, const DeltaConstraint& extra) {
  Interval four_k2 = Interval(4.0) * b.K * b.K;
  if (!((four_k2 * b.rho * b.L1).hi() < 1.0))
    throw ValidationFailed("4K^2 rho L1 < 1", "not satisfied");
  if (!((Interval(2.0) * b.K * b.rho).hi() < b.ell_x)) throw ValidationFailed("2K rho < ell_x", "not satisfied");

  DeltaEnds e0 = delta_ends(b, 0.0, extra);
  if (!(e0.lower <= e0.upper) || !(e0.upper > 0))
    throw ValidationFailed("delta_x", "no admissible delta_x even for delta_alpha = 0");

  double lo = 0.0, hi = b.ell_alpha;
  DeltaEnds eh = delta_ends(b, hi, extra);
  if (!(eh.lower <= eh.upper)) {
    for (int it = 0; it < 200; ++it) {
      double m = 0.5 * (lo + hi);
      if (m <= lo || m >= hi) break;
      DeltaEnds em = delta_ends(b, m, extra);
      if (em.lower <= em.upper)
        lo = m;
      else
        hi = m;
    }
  } else {
    lo = hi;
  }
  DeltaPair dp;
  dp.delta_alpha = lo;
  dp.delta_x = delta_ends(b, lo, extra).upper;
  dp.delta_min = (Interval(2.0) * b.K * b.rho).hi();
  if (!deltas_feasible(b, dp, extra)) {
    dp.delta_alpha = 0.0;
    dp.delta_x = e0.upper;
    if (!deltas_feasible(b, dp, extra)) throw ValidationFailed("delta_x", "interval recheck failed");
  }
  return dp;
}

ZeroCertificate validate_zero(const ZeroProblem& H, const Eigen::VectorXd& z0, const CiftOptions& opt) {
  const Eigen::Index m = H.dim();
  Eigen::MatrixXd M;
  if (opt.precondition) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(H.jacobian(z0));
    if (!lu.isInvertible()) throw ValidationFailed("preconditioner", "Jacobian at the anchor is singular");
    M = lu.inverse();
  } else {
    M = Eigen::MatrixXd::Identity(m, m);
  }
  IMatrix Mi = M.cast<Interval>();
  IVector zi = z0.cast<Interval>();

  ZeroCertificate cert;
  cert.system = H.name();
  cert.anchor = z0;
  cert.preconditioner_hash = matrix_hash(M);
  CiftBounds& b = cert.bounds;
  b.ell_x = opt.ell;
  b.ell_alpha = 0.0;
  b.rho = norm_inf(IVector(Mi * H.value(zi)));
  IMatrix A = Mi * H.jacobian(zi);
  InverseBound ib = inverse_bound(A);
  b.K = Interval(0.0, ib.K);
  b.rho = Interval(0.0, b.rho.hi());
  b.L1 = lipschitz_L1(H, z0, opt.ell, M, opt.recipe);

  DeltaPair dp = solve_deltas(b);
  cert.delta_accuracy = dp.delta_min;
  cert.delta_uniqueness = dp.delta_x;
  return cert;
}

Eigen::VectorXd newton(const ZeroProblem& H, Eigen::VectorXd z, int max_iter, double tol) {
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd r = H.value(z);
    Eigen::VectorXd dz = H.jacobian(z).fullPivLu().solve(r);
    z -= dz;
    if (dz.lpNorm<Eigen::Infinity>() <= tol * std::max(1.0, z.lpNorm<Eigen::Infinity>())) break;
  }
  return z;
}

std::string matrix_hash(const Eigen::MatrixXd& M) {
  std::uint64_t h = 1469598103934665603ULL;
  const auto* p = reinterpret_cast<const unsigned char*>(M.data());
  for (Eigen::Index i = 0; i < M.size() * static_cast<Eigen::Index>(sizeof(double)); ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace certibif
