#include "certibif/continuation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <cstdlib>
#include <future>
#include <iomanip>
#include <ostream>

namespace certibif {

// ---------------------------------------------------------------------------
// Coral family

namespace {

double one_digit(double x) {
  x = std::fabs(x);
  if (!(x > 0) || !std::isfinite(x)) return 1.0;
  double e = std::pow(10.0, std::floor(std::log10(x)));
  double r = std::round(x / e) * e;
  return r > 0 ? r : e;
}

}  // namespace

CoralFamily::CoralFamily(const CoralParams& prm, const Eigen::VectorXd& s, const Interval& kappa, bool pre)
    : md_(CoralModel<double>(prm), s, kappa.mid()),
      mi_(CoralModel<Interval>(prm), to_interval(s), kappa),
      preconditioned_(pre) {}

CoralFamily CoralFamily::preconditioned(const CoralParams& prm, double R_start) {
  CoralModel<double> m(prm);
  BranchPoint bp = branch_point_at_R(m, R_start, true);
  Eigen::VectorXd s = bp.x.unaryExpr([](double v) { return one_digit(v); });
  CoralModel<Interval> mi(prm);
  return CoralFamily(prm, s, Interval(100.0) / mi.coeffs().ba, true);
}

CoralFamily CoralFamily::raw(const CoralParams& prm) {
  return CoralFamily(prm, Eigen::VectorXd::Ones(prm.d), Interval(1.0), false);
}

SecondDerivatives CoralFamily::second(const Interval& p, const IVector& u) const {
  const Eigen::Index n = dim();
  SecondDerivatives sd;
  sd.uu.assign(n, IMatrix::Zero(n, n));
  sd.uu[0] = mi_.F1_uu(p, u);
  sd.pu = IMatrix::Zero(n, n);
  sd.pu.row(0) = mi_.F1_pu(p, u).transpose();
  sd.pp = IVector::Zero(n);
  return sd;
}

double CoralFamily::p_of_R(double R) const { return R / (model().coeffs().ba * kappa()); }

double CoralFamily::R_of_p(double p) const { return model().lambda_to_R(md_.lambda_of(p)); }

Interval CoralFamily::R_of_p(const Interval& p) const { return imodel().lambda_to_R(mi_.lambda_of(p)); }

Eigen::VectorXd Anchor::direction() const {
  Eigen::VectorXd t(v.size() + 1);
  t << mu, v;
  return t;
}

// ---------------------------------------------------------------------------
// Extended map

Eigen::VectorXd extended_G(const ParametrizedMap& F, const Anchor& a, double alpha, const Eigen::VectorXd& y) {
  const Eigen::Index n = F.dim();
  Eigen::VectorXd out(n + 1);
  out(0) = a.mu * y(0) + a.v.dot(y.tail(n));
  out.tail(n) = F.F(a.p + alpha * a.mu + y(0), a.u + alpha * a.v + y.tail(n));
  return out;
}

IVector extended_G(const ParametrizedMap& F, const Anchor& a, const Interval& alpha, const IVector& y) {
  const Eigen::Index n = F.dim();
  IVector v = to_interval(a.v);
  Interval mu(a.mu);
  IVector out(n + 1);
  Interval s = mu * y(0);
  for (Eigen::Index k = 0; k < n; ++k) s += v(k) * y(1 + k);
  out(0) = s;
  IVector u = to_interval(a.u) + v * alpha + IVector(y.tail(n));
  out.tail(n) = F.F(Interval(a.p) + alpha * mu + y(0), u);
  return out;
}

Eigen::MatrixXd extended_G_jacobian(const ParametrizedMap& F, const Anchor& a, double alpha,
                                    const Eigen::VectorXd& y) {
  const Eigen::Index n = F.dim();
  double p = a.p + alpha * a.mu + y(0);
  Eigen::VectorXd u = a.u + alpha * a.v + y.tail(n);
  Eigen::MatrixXd J(n + 1, n + 1);
  J(0, 0) = a.mu;
  J.block(0, 1, 1, n) = a.v.transpose();
  J.block(1, 0, n, 1) = F.F_p(p, u);
  J.block(1, 1, n, n) = F.F_u(p, u);
  return J;
}

IMatrix extended_G_jacobian(const ParametrizedMap& F, const Anchor& a, const Interval& alpha, const IVector& y) {
  const Eigen::Index n = F.dim();
  IVector v = to_interval(a.v);
  Interval p = Interval(a.p) + alpha * Interval(a.mu) + y(0);
  IVector u = to_interval(a.u) + v * alpha + IVector(y.tail(n));
  IMatrix J(n + 1, n + 1);
  J(0, 0) = Interval(a.mu);
  J.block(0, 1, 1, n) = v.transpose();
  J.block(1, 0, n, 1) = F.F_p(p, u);
  J.block(1, 1, n, n) = F.F_u(p, u);
  return J;
}

Eigen::VectorXd tangent_estimate(const ParametrizedMap& F, double p, const Eigen::VectorXd& u,
                                 const Eigen::VectorXd* previous) {
  const Eigen::Index n = F.dim();
  Eigen::MatrixXd Jt(n + 1, n);
  Jt.row(0) = F.F_p(p, u).transpose();
  Jt.bottomRows(n) = F.F_u(p, u).transpose();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Jt);
  if (qr.rank() < n) throw TangentUndefined("[F_p | F_u] has rank " + std::to_string(qr.rank()));
  Eigen::MatrixXd Q = qr.householderQ();
  Eigen::VectorXd t = Q.col(n);
  t /= t.lpNorm<Eigen::Infinity>();
  if (previous && t.dot(*previous) < 0) t = -t;
  return t;
}

Eigen::VectorXd newton_correct(const ParametrizedMap& F, const Anchor& a, double alpha, int max_iter, double tol,
                               int* iterations) {
  const Eigen::Index n = F.dim();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n + 1);
  double scale = std::max({1.0, std::fabs(a.p), a.u.lpNorm<Eigen::Infinity>()});
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd dy = extended_G_jacobian(F, a, alpha, y).partialPivLu().solve(extended_G(F, a, alpha, y));
    if (!dy.allFinite()) break;
    y -= dy;
    double step = dy.lpNorm<Eigen::Infinity>();
    // Converged, or stalled at the rounding floor.
    if (step <= tol * scale || (it >= 2 && step >= 0.5 * last && step <= 1e-9 * scale)) {
      if (iterations) *iterations = it + 1;
      return y;
    }
    last = step;
  }
  throw CorrectorFailed("Newton corrector did not converge in " + std::to_string(max_iter) + " iterations");
}

// ---------------------------------------------------------------------------
// Hypotheses and the branch-segment theorem

namespace {

Interval upper_only(const Interval& x) { return Interval(0.0, x.mag()); }

struct Lipschitz4 {
  Interval M1, M2, M3, M4;
};

Lipschitz4 lipschitz_block(const SecondDerivatives& sd, LipschitzRecipe recipe) {
  const Eigen::Index n = sd.pu.rows();
  Lipschitz4 L;
  L.M1 = lipschitz_from_hessians(sd.uu, recipe);
  double m2 = 0, m3 = 0, m4 = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Interval row(0.0);
    double mx = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      row += Interval(sd.pu(i, j).mag());
      mx = std::max(mx, sd.pu(i, j).mag());
    }
    m2 = std::max(m2, row.hi());
    m3 = std::max(m3, recipe == LipschitzRecipe::RowSum ? row.hi() : (Interval(double(n)) * Interval(mx)).hi());
    m4 = std::max(m4, sd.pp(i).mag());
  }
  L.M2 = Interval(0.0, m2);
  L.M3 = Interval(0.0, m3);
  L.M4 = Interval(0.0, m4);
  return L;
}

}  // namespace

int thread_count() {
  const char* env = std::getenv("CERTIBIF_THREADS");
  if (!env) return 1;
  int n = std::atoi(env);
  return n > 0 ? n : 1;
}

SegmentHypotheses segment_hypotheses(const ParametrizedMap& F, const Anchor& a, double d_u, double d_lambda,
                                     LipschitzRecipe recipe) {
  const Eigen::Index n = F.dim();
  SegmentHypotheses h;
  h.d_u = d_u;
  h.d_lambda = d_lambda;

  auto lipschitz = [&] {
    IVector U(n);
    for (Eigen::Index k = 0; k < n; ++k) U(k) = Interval::ball(a.u(k), d_u);
    return lipschitz_block(F.second(Interval::ball(a.p, d_lambda), U), recipe);
  };
  std::future<Lipschitz4> pending;
  if (thread_count() > 1) pending = std::async(std::launch::async, lipschitz);

  Interval p0(a.p);
  IVector u0 = to_interval(a.u);
  IVector v = to_interval(a.v);
  Interval mu(a.mu);
  h.rho = upper_only(norm_inf(F.F(p0, u0)));
  IMatrix Fu = F.F_u(p0, u0);
  IVector Fp = F.F_p(p0, u0);
  h.xi = upper_only(norm_inf(IVector(Fp * mu + Fu * v)));
  IMatrix J0(n + 1, n + 1);
  J0(0, 0) = mu;
  J0.block(0, 1, 1, n) = v.transpose();
  J0.block(1, 0, n, 1) = Fp;
  J0.block(1, 1, n, n) = Fu;
  h.K = Interval(0.0, inverse_bound(J0).K);

  Lipschitz4 L = pending.valid() ? pending.get() : lipschitz();
  h.M1 = L.M1;
  h.M2 = L.M2;
  h.M3 = L.M3;
  h.M4 = L.M4;
  return h;
}

CiftBounds derive_extended_constants(const SegmentHypotheses& h, const Interval& mu_abs, const Interval& v_norm) {
  CiftBounds b;
  b.rho = h.rho;
  b.K = h.K;
  Interval M13 = h.M1 + h.M3, M24 = h.M2 + h.M4;
  b.L1 = max(M13, M24);
  b.L2 = M13 * v_norm + M24 * mu_abs;
  b.L3 = h.xi;
  b.L4 = (h.M1 * v_norm + h.M2 * mu_abs) * v_norm + (h.M3 * v_norm + h.M4 * mu_abs) * mu_abs;
  b.ell_x = h.d_u;
  b.ell_alpha = h.d_lambda;
  return b;
}

BranchBox validate_segment(const Anchor& a, const SegmentHypotheses& h) {
  Interval mu_abs = abs(Interval(a.mu));
  Interval v_norm(a.v.lpNorm<Eigen::Infinity>());
  BranchBox box;
  box.base = a;
  box.hyp = h;
  box.bounds = derive_extended_constants(h, mu_abs, v_norm);
  const CiftBounds& b = box.bounds;
  if (!((Interval(4.0) * b.K * b.K * b.rho).hi() < 1.0)) throw ValidationFailed("4K^2 rho < 1", "not satisfied");
  DeltaConstraint extra;
  extra.direction_norm = max(mu_abs, v_norm).hi();
  extra.box_limit = std::min(h.d_u, h.d_lambda);
  DeltaPair dp = solve_deltas(b, extra);
  if (!(dp.delta_alpha > 0)) throw ValidationFailed("delta_alpha", "no positive step is admissible");
  box.delta_alpha = dp.delta_alpha;
  box.delta_u = dp.delta_x;
  box.delta_min = dp.delta_min;
  return box;
}

bool check_link(const BranchBox& prev, double alpha_k, const IVector& correction, double next_delta_min) {
  IVector t = to_interval(prev.base.direction());
  const Eigen::Index m = t.size();
  Interval ball(-next_delta_min, next_delta_min);
  IVector D(m);
  for (Eigen::Index i = 0; i < m; ++i) D(i) = Interval(alpha_k) * t(i) + correction(i) + ball;
  Interval dt(0.0), tt(0.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    dt += D(i) * t(i);
    tt += sqr(t(i));
  }
  Interval beta = dt / tt;
  IVector w(m);
  for (Eigen::Index i = 0; i < m; ++i) w(i) = D(i) - beta * t(i);
  bool along = abs(beta).hi() < prev.delta_alpha;
  bool across = norm_inf(w).hi() < prev.delta_u;
  return along && across;
}

// ---------------------------------------------------------------------------
// Driver

namespace {

BranchBox validate_adaptive(const ParametrizedMap& F, const Anchor& a, double& d, const ContinuationConfig& cfg) {
  for (;;) {
    try {
      return validate_segment(a, segment_hypotheses(F, a, d, d, cfg.recipe));
    } catch (const ValidationFailed&) {
      d *= 0.5;
      if (d < cfg.d_min) throw;
    }
  }
}

bool box_binding(const BranchBox& b) {
  double dir = std::max(std::fabs(b.base.mu), b.base.v.lpNorm<Eigen::Infinity>());
  return b.delta_alpha * dir + b.delta_u >= 0.99 * std::min(b.hyp.d_u, b.hyp.d_lambda);
}

}  // namespace

ContinuationResult continue_branch(const ParametrizedMap& F, double p0, const Eigen::VectorXd& u0,
                                   const ContinuationConfig& cfg) {
  const Eigen::Index n = F.dim();
  ContinuationResult res;
  auto stop = [&](const std::string& reason, const std::string& detail) {
    res.stop_reason = reason;
    res.stop_detail = detail;
    return res;
  };

  Eigen::VectorXd hint = Eigen::VectorXd::Zero(n + 1);
  hint(0) = cfg.initial_mu_sign;
  Anchor cur;
  cur.p = p0;
  cur.u = u0;
  try {
    Eigen::VectorXd t = tangent_estimate(F, p0, u0, &hint);
    cur.mu = t(0);
    cur.v = t.tail(n);
  } catch (const TangentUndefined& e) {
    return stop("tangent", e.what());
  }

  double d = cfg.d_init;
  try {
    res.boxes.push_back(validate_adaptive(F, cur, d, cfg));
  } catch (const ValidationFailed& e) {
    return stop("validation", "step 0: " + std::string(e.what()));
  }
  if (cfg.on_box) cfg.on_box(res.boxes.back(), 0);
  if (box_binding(res.boxes.back())) d = std::min(2 * d, cfg.d_max);

  int crossings = 0;
  for (int step = 1; step < cfg.max_steps; ++step) {
    BranchBox& prev = res.boxes.back();
    const Anchor& base = prev.base;
    double alpha = cfg.alpha_frac * prev.delta_alpha;
    std::string failure, detail;
    BranchBox next;
    Eigen::VectorXd y;
    int iters = 0;
    bool linked = false;
    for (int attempt = 0; attempt < 4 && !linked; ++attempt, alpha *= 0.5) {
      failure.clear();
      try {
        y = newton_correct(F, base, alpha, cfg.corrector_iter, cfg.corrector_tol, &iters);
      } catch (const CorrectorFailed& e) {
        failure = "corrector";
        detail = e.what();
        continue;
      }
      Anchor a;
      a.p = base.p + alpha * base.mu + y(0);
      a.u = base.u + alpha * base.v + y.tail(n);
      try {
        Eigen::VectorXd prev_t = base.direction();
        Eigen::VectorXd t = tangent_estimate(F, a.p, a.u, &prev_t);
        a.mu = t(0);
        a.v = t.tail(n);
      } catch (const TangentUndefined& e) {
        return stop("tangent", "step " + std::to_string(step) + ": " + e.what());
      }
      double d_try = d;
      try {
        next = validate_adaptive(F, a, d_try, cfg);
      } catch (const ValidationFailed& e) {
        return stop("validation", "step " + std::to_string(step) + ": " + e.what());
      }
      d = d_try;
      IVector corr(n + 1);
      corr(0) = Interval(a.p) - Interval(base.p) - Interval(alpha) * Interval(base.mu);
      for (Eigen::Index k = 0; k < n; ++k)
        corr(1 + k) = Interval(a.u(k)) - Interval(base.u(k)) - Interval(alpha) * Interval(base.v(k));
      linked = check_link(prev, alpha, corr, next.delta_min);
      if (!linked) {
        failure = "link";
        detail = "linking inequalities fail at alpha = " + std::to_string(alpha);
      }
    }
    if (!linked) return stop(failure, "step " + std::to_string(step) + ": " + detail);
    alpha *= 2;  // undo the loop increment
    prev.alpha_step = alpha;
    prev.correction = y;
    prev.corrector_iterations = iters;
    next.linked_to_previous = true;
    res.all_linked = res.all_linked && prev.alpha_step > 0;
    double p_prev = prev.base.p;
    res.boxes.push_back(std::move(next));
    if (cfg.on_box) cfg.on_box(res.boxes.back(), step);
    if (box_binding(res.boxes.back())) d = std::min(2 * d, cfg.d_max);

    if (cfg.target_p) {
      double tp = *cfg.target_p;
      double p_now = res.boxes.back().base.p;
      if ((p_prev - tp) * (p_now - tp) <= 0 && p_prev != tp) {
        if (++crossings >= cfg.target_crossing) return stop("target", "step " + std::to_string(step));
      }
    }
  }
  return stop("max_steps", std::to_string(cfg.max_steps));
}

Stability classify_stability(const CoralModel<double>& m, double lambda, const Eigen::VectorXd& x) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m.jacobian_x(lambda, x), false);
  Stability s;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (std::abs(es.eigenvalues()(k)) > 1.0) ++s.index;
  s.stable = s.index == 0;
  return s;
}

double raw_segment_length(const CoralFamily& fam, const BranchBox& box) {
  double len = std::fabs(fam.kappa() * box.base.mu);
  len = std::max(len, fam.scale().cwiseProduct(box.base.v).lpNorm<Eigen::Infinity>());
  return box.delta_alpha * len;
}

void write_branch_csv(std::ostream& os, const CoralFamily& fam, const std::vector<BranchBox>& boxes) {
  const Eigen::Index n = fam.dim();
  os << "R,lambda";
  for (Eigen::Index k = 1; k <= n; ++k) os << ",x" << k;
  os << ",P,delta_alpha,delta_u,delta_min,stability\n";
  os << std::setprecision(17);
  for (const BranchBox& b : boxes) {
    double lambda = fam.lambda_of_p(b.base.p);
    Eigen::VectorXd x = fam.x_of_u(b.base.u);
    Stability st = classify_stability(fam.model(), lambda, x);
    os << fam.R_of_p(b.base.p) << ',' << lambda;
    for (Eigen::Index k = 0; k < n; ++k) os << ',' << x(k);
    os << ',' << fam.model().density(x) << ',' << b.delta_alpha << ',' << b.delta_u << ',' << b.delta_min << ','
       << (st.stable ? std::string("stable") : "unstable(" + std::to_string(st.index) + ")") << '\n';
  }
}

}  // namespace certibif
