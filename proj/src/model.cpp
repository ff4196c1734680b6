#include "certibif/model.hpp"

#include <fstream>
#include <functional>
#include <sstream>

namespace certibif {

CoralParams CoralParams::table1() {
  CoralParams p;
  p.d = 13;
  p.S = {0.89, 0.63, 0.70, 0.52, 0.44, 0.29, 0.57, 0.33, 0.75, 1, 0.33, 1};
  p.F = {0, 0, 0.36, 0.64, 0.82, 0.97, 0.98, 0.99, 1, 1, 1, 1, 1};
  return p;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_number(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty()) return x;
  } catch (const std::exception&) {
  }
  throw DomainError("parameter '" + key + "': not a number: '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_number(key, trim(item)));
  return out;
}

}  // namespace

CoralParams CoralParams::parse(const std::string& text) {
  CoralParams p = table1();
  bool d_set = false, s_set = false, f_set = false;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError("parameter file line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "d") {
      p.d = static_cast<int>(to_number(key, val));
      d_set = true;
    } else if (key == "S") {
      p.S = to_list(key, val);
      s_set = true;
    } else if (key == "F") {
      p.F = to_list(key, val);
      f_set = true;
    } else if (key == "c1") {
      p.c1 = to_number(key, val);
    } else if (key == "c2") {
      p.c2 = to_number(key, val);
    } else if (key == "alpha") {
      p.alpha = to_number(key, val);
    } else if (key == "beta") {
      p.beta = to_number(key, val);
    } else if (key == "omega") {
      p.omega = to_number(key, val);
    } else if (key == "p_coef") {
      p.p_coef = to_number(key, val);
    } else if (key == "p_exp") {
      p.p_exp = to_number(key, val);
    } else {
      throw DomainError("parameter file: unknown key '" + key + "'");
    }
  }
  if (d_set && !(s_set && f_set) && p.d != 13)
    throw DomainError("parameter file: changing d requires S and F");
  p.validate();
  return p;
}

CoralParams CoralParams::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open parameter file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void CoralParams::validate() const {
  if (d < 2) throw DomainError("d must be at least 2");
  if (static_cast<int>(S.size()) != d - 1) throw DomainError("S must have d-1 entries");
  if (static_cast<int>(F.size()) != d) throw DomainError("F must have d entries");
  for (double s : S)
    if (!(s >= 0 && s <= 1)) throw DomainError("survival rates must lie in [0, 1]");
  for (double f : F)
    if (!(f >= 0)) throw DomainError("fertility rates must be nonnegative");
  if (F[0] != 0 || F[1] != 0) throw DomainError("F_1 and F_2 must vanish");
  if (!(c1 > 0 && c2 > 0 && alpha > 0 && beta > 0)) throw DomainError("phi constants must be positive");
  if (!(beta > alpha)) throw DomainError("beta must exceed alpha");
  if (!(omega > 0)) throw DomainError("omega must be positive");
  if (!(p_coef > 0)) throw DomainError("p_coef must be positive");
}

std::string CoralParams::to_text() const {
  std::ostringstream os;
  os.precision(17);
  auto list = [&os](const std::vector<double>& v) {
    for (size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << "\n";
  };
  os << "d = " << d << "\n";
  os << "S = ";
  list(S);
  os << "F = ";
  list(F);
  os << "c1 = " << c1 << "\nc2 = " << c2 << "\nalpha = " << alpha << "\nbeta = " << beta
     << "\nomega = " << omega << "\np_coef = " << p_coef << "\np_exp = " << p_exp << "\n";
  return os.str();
}

template class CoralModel<double>;
template class CoralModel<Interval>;
template struct CoralCoefficients<double>;
template struct CoralCoefficients<Interval>;

namespace {

double bisect(const std::function<double(double)>& h, double lo, double hi) {
  double flo = h(lo);
  for (int it = 0; it < 200; ++it) {
    double m = 0.5 * (lo + hi);
    if (m <= lo || m >= hi) break;
    double fm = h(m);
    if (fm == 0) return m;
    if ((fm < 0) == (flo < 0)) {
      lo = m;
      flo = fm;
    } else {
      hi = m;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double fold_density(const CoralModel<double>& m) {
  // phi increases up to the fold and decreases after it.
  auto e1 = [&m](double y) { return m.phi_jet(y).d1; };
  double hi = 1.0;
  while (e1(hi) > 0) hi *= 2;  // phi' > 0 left of the fold
  return bisect(e1, 0.0, hi);
}

BranchPoint branch_point_from_density(const CoralModel<double>& m, double P) {
  const auto& c = m.coeffs();
  BranchPoint bp;
  bp.P = P;
  bp.R = 1.0 / m.phi(P);
  bp.lambda = bp.R / c.ba;
  bp.x = c.a * (P / c.pa);
  return bp;
}

BranchPoint branch_point_at_R(const CoralModel<double>& m, double R, bool upper) {
  double Pf = fold_density(m);
  double target = 1.0 / R;
  if (m.phi(Pf) < target) throw DomainError("R is below the fold; no nontrivial fixed point");
  auto h = [&](double P) { return m.phi(P) - target; };
  double P;
  if (upper) {
    double hi = 2 * Pf;
    while (h(hi) > 0) hi *= 2;
    P = bisect(h, Pf, hi);
  } else {
    if (h(0.0) >= 0) throw DomainError("R is above the transcritical point; lower branch is negative");
    P = bisect(h, 0.0, Pf);
  }
  return branch_point_from_density(m, P);
}

std::vector<double> solve_branch_1d(const CoralModel<double>& m, double lambda, double x1_max, int grid) {
  const auto& c = m.coeffs();
  std::vector<double> roots{0.0};
  // Nonzero roots solve lambda (b.a) phi(pa x1) = 1.
  auto h = [&](double x1) { return lambda * c.ba * m.phi(c.pa * x1) - 1.0; };
  double prev_x = 0.0, prev_h = h(0.0);
  for (int i = 1; i <= grid; ++i) {
    double x = x1_max * i / grid;
    double hx = h(x);
    if (hx == 0.0) {
      roots.push_back(x);
    } else if ((hx < 0) != (prev_h < 0) && prev_h != 0.0) {
      roots.push_back(bisect(h, prev_x, x));
    }
    prev_x = x;
    prev_h = hx;
  }
  return roots;
}

}  // namespace certibif
