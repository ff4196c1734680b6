#include "certibif/dynamics.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

namespace certibif {

namespace {

void check_finite(const Eigen::VectorXd& x, long t) {
  if (!x.allFinite()) throw OrbitDiverged("iterate " + std::to_string(t) + " is not finite");
}

}  // namespace

OrbitSample iterate(const CoralModel<double>& m, double lambda, const Eigen::VectorXd& x0, long n, long skip) {
  OrbitSample o;
  o.lambda = lambda;
  o.transient_skipped = skip;
  o.points.resize(m.dim(), n);
  Eigen::VectorXd x = x0;
  for (long t = 1; t <= skip; ++t) {
    x = m.step(lambda, x);
    check_finite(x, t);
  }
  for (long t = 0; t < n; ++t) {
    x = m.step(lambda, x);
    check_finite(x, skip + t + 1);
    o.points.col(t) = x;
  }
  return o;
}

Eigen::Matrix2Xd iterate_plane(const CoralModel<double>& m, double lambda, const Eigen::VectorXd& x0, long n,
                               long skip) {
  Eigen::Matrix2Xd out(2, n);
  Eigen::VectorXd x = x0;
  for (long t = 1; t <= skip + n; ++t) {
    x = m.step(lambda, x);
    check_finite(x, t);
    if (t > skip) out.col(t - skip - 1) = x.head(2);
  }
  return out;
}

Eigen::VectorXd initial_vector(const CoralModel<double>& m, double density) {
  return m.coeffs().a * (density / m.coeffs().pa);
}

namespace {

// Angle increments in (-pi, pi].
std::vector<double> increments(const Eigen::Matrix2Xd& pts, const Eigen::Vector2d& c) {
  const long n = pts.cols();
  std::vector<double> th(n), d(n > 0 ? n - 1 : 0);
  for (long t = 0; t < n; ++t) {
    double dx = pts(0, t) - c(0), dy = pts(1, t) - c(1);
    if (dx == 0 && dy == 0) throw RotationUndefined("orbit hits the centre");
    th[t] = std::atan2(dy, dx);
  }
  for (long t = 0; t + 1 < n; ++t) {
    double a = th[t + 1] - th[t];
    a = std::remainder(a, 2 * M_PI);
    if (a <= -M_PI) a += 2 * M_PI;
    d[t] = a;
  }
  return d;
}

double weighted_mean(const std::vector<double>& d, long N) {
  double num = 0, den = 0;
  for (long t = 0; t < N; ++t) {
    double s = (t + 0.5) / static_cast<double>(N);
    double w = std::exp(-1.0 / (s * (1.0 - s)));
    num += w * d[t];
    den += w;
  }
  return num / den;
}

double to_unit(double revolutions) { return revolutions - std::floor(revolutions); }

}  // namespace

RotationResult rotation_number(const Eigen::Matrix2Xd& pts, const Eigen::Vector2d& center) {
  std::vector<double> d = increments(pts, center);
  const long N = static_cast<long>(d.size());
  if (N < 10) throw RotationUndefined("too few iterates");
  long pos = 0, neg = 0;
  for (double a : d) (a > 0 ? pos : neg) += (a != 0);
  if (std::min(pos, neg) > 0) throw RotationUndefined("angle increments change sign");
  RotationResult r;
  r.center = center;
  r.iterates_used = N;
  double full = weighted_mean(d, N) / (2 * M_PI);
  double part = weighted_mean(d, static_cast<long>(0.8 * N)) / (2 * M_PI);
  r.rho = to_unit(full);
  r.convergence_gap = std::fabs(full - part);
  return r;
}

double rotation_number_unweighted(const Eigen::Matrix2Xd& pts, const Eigen::Vector2d& center) {
  std::vector<double> d = increments(pts, center);
  double s = std::accumulate(d.begin(), d.end(), 0.0);
  return to_unit(s / static_cast<double>(d.size()) / (2 * M_PI));
}

AngleProfile angle_profile(const Eigen::Matrix2Xd& pts, const Eigen::Vector2d& center, int bins) {
  std::vector<double> d = increments(pts, center);
  std::vector<double> sum(bins, 0.0);
  std::vector<long> count(bins, 0);
  for (size_t t = 0; t < d.size(); ++t) {
    double th = std::atan2(pts(1, t) - center(1), pts(0, t) - center(0));
    double s = th / (2 * M_PI);
    s -= std::floor(s);
    int b = std::min(bins - 1, static_cast<int>(s * bins));
    sum[b] += d[t] / (2 * M_PI);
    count[b]++;
  }
  AngleProfile ap;
  ap.angle.resize(bins);
  ap.increment.assign(bins, 0.0);
  ap.interpolated.assign(bins, false);
  std::vector<int> filled;
  for (int b = 0; b < bins; ++b) {
    ap.angle[b] = (b + 0.5) / bins;
    if (count[b] > 0) {
      ap.increment[b] = sum[b] / static_cast<double>(count[b]);
      filled.push_back(b);
    }
  }
  if (filled.empty()) throw RotationUndefined("empty angle profile");
  // Periodic linear interpolation across empty bins.
  for (int b = 0; b < bins; ++b) {
    if (count[b] > 0) continue;
    ap.interpolated[b] = true;
    auto it = std::lower_bound(filled.begin(), filled.end(), b);
    int hi = it == filled.end() ? filled.front() + bins : *it;
    int lo = it == filled.begin() ? filled.back() - bins : *(it - 1);
    double w = static_cast<double>(b - lo) / (hi - lo);
    ap.increment[b] = (1 - w) * ap.increment[(lo + bins) % bins] + w * ap.increment[hi % bins];
  }
  int best = filled.front();
  for (int b : filled)
    if (ap.increment[b] < ap.increment[best]) best = b;
  ap.min_angle = ap.angle[best];
  ap.min_increment = ap.increment[best];
  return ap;
}

Rational parse_rational(const std::string& s) {
  auto fail = [&] { return DomainError("not a rational number: '" + s + "'"); };
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rational r;
    auto a = std::from_chars(s.data(), s.data() + slash, r.p);
    auto b = std::from_chars(s.data() + slash + 1, s.data() + s.size(), r.q);
    if (a.ec != std::errc() || b.ec != std::errc() || a.ptr != s.data() + slash ||
        b.ptr != s.data() + s.size() || r.q <= 0)
      throw fail();
    long long g = std::gcd(r.p, r.q);
    return {r.p / g, r.q / g};
  }
  long long p = 0, q = 1;
  bool neg = false, dot = false, digits = false;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (i == 0 && (c == '-' || c == '+')) {
      neg = c == '-';
    } else if (c == '.' && !dot) {
      dot = true;
    } else if (c >= '0' && c <= '9') {
      if (p > 100000000000000LL || q > 100000000000000LL) throw fail();
      p = 10 * p + (c - '0');
      if (dot) q *= 10;
      digits = true;
    } else {
      throw fail();
    }
  }
  if (!digits) throw fail();
  long long g = std::gcd(p, q);
  return {neg ? -p / g : p / g, q / g};
}

Rational farey_min_denominator(const Rational& lo, const Rational& hi) {
  using i128 = __int128;
  auto less = [](i128 a, i128 b, const Rational& r) { return a * r.q < r.p * b; };     // a/b < r
  auto greater = [](i128 a, i128 b, const Rational& r) { return a * r.q > r.p * b; };  // a/b > r
  if (lo.q <= 0 || hi.q <= 0 || lo.p < 0 || (i128)lo.p * hi.q > (i128)hi.p * lo.q)
    throw DomainError("farey search needs 0 <= lo <= hi");
  if (lo.p == 0) return {0, 1};
  i128 lp = 0, lq = 1, rp = 1, rq = 0;
  for (;;) {
    i128 mp = lp + rp, mq = lq + rq;
    if (less(mp, mq, lo)) {
      // Move the left end towards the right end in one batch: largest k with (l + k r) < lo.
      i128 num = (i128)lo.p * lq - lp * lo.q;
      i128 den = rp * lo.q - (i128)lo.p * rq;
      i128 k = (num + den - 1) / den - 1;
      if (k < 1) k = 1;
      lp += k * rp;
      lq += k * rq;
    } else if (greater(mp, mq, hi)) {
      i128 num = rp * hi.q - (i128)hi.p * rq;
      i128 den = (i128)hi.p * lq - lp * hi.q;
      i128 k = (num + den - 1) / den - 1;
      if (k < 1) k = 1;
      rp += k * lp;
      rq += k * lq;
    } else {
      return {static_cast<long long>(mp), static_cast<long long>(mq)};
    }
  }
}

}  // namespace certibif
