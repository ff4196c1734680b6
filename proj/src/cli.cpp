#include "certibif/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "certibif/bifurcation.hpp"
#include "certibif/certificate_json.hpp"
#include "certibif/continuation.hpp"
#include "certibif/dynamics.hpp"

namespace certibif {

namespace {

struct UsageError : Error {
  using Error::Error;
};

// Output target: a file when a path is given, `fallback` otherwise.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw UsageError("cannot write '" + path + "'");
    os_ = file_.get();
  }
  std::ostream& operator*() { return *os_; }
  bool active() const { return os_ != nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

std::unique_ptr<Sink> optional_sink(const std::string& path) {
  if (path.empty()) return nullptr;
  static std::ostringstream devnull;
  return std::make_unique<Sink>(path, devnull);
}

Eigen::VectorXd parse_x0(const std::string& spec, const CoralModel<double>& m) {
  Eigen::VectorXd y = initial_vector(m);
  if (!spec.empty() && spec.back() == 'y') {
    std::string c = spec.substr(0, spec.size() - 1);
    double factor = c.empty() ? 1.0 : parse_decimal(c);
    return factor * y;
  }
  std::ifstream in(spec);
  if (!in) throw UsageError("x0 must be a preset like 1.5y or a readable file: '" + spec + "'");
  std::vector<double> vals;
  std::string tok;
  while (in >> tok) {
    std::stringstream ss(tok);
    std::string part;
    while (std::getline(ss, part, ','))
      if (!part.empty()) vals.push_back(parse_decimal(part));
  }
  if (static_cast<Eigen::Index>(vals.size()) != m.dim())
    throw UsageError("x0 file must contain " + std::to_string(m.dim()) + " numbers");
  return Eigen::Map<Eigen::VectorXd>(vals.data(), m.dim());
}

std::string stability_label(const Stability& s) {
  return s.stable ? "stable" : "unstable(" + std::to_string(s.index) + ")";
}

LipschitzRecipe parse_recipe(const std::string& s) {
  if (s == "mean-value") return LipschitzRecipe::MeanValue;
  if (s == "row-sum") return LipschitzRecipe::RowSum;
  throw UsageError("recipe must be mean-value or row-sum");
}

struct BranchOptions {
  double from_R = 300;
  std::optional<double> to_R;
  int crossing = 1;
  int max_steps = 5000;
  double alpha_frac = 0.8;
  double d_init = 1e-4;
  std::string precondition = "auto";
  std::string recipe = "mean-value";
};

void add_branch_options(CLI::App* c, BranchOptions& o) {
  c->add_option("--from-R", o.from_R, "start on the upper branch at this R")->capture_default_str();
  c->add_option("--to-R", o.to_R, "stop when the branch crosses this R");
  c->add_option("--to-R-crossing", o.crossing, "stop at the k-th crossing of --to-R")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  c->add_option("--max-steps", o.max_steps)->capture_default_str()->check(CLI::PositiveNumber);
  c->add_option("--alpha-frac", o.alpha_frac, "predictor step as a fraction of delta_alpha")
      ->capture_default_str()
      ->check(CLI::Range(1e-6, 0.999999));
  c->add_option("--d-init", o.d_init, "initial box radius")->capture_default_str()->check(CLI::PositiveNumber);
  c->add_option("--precondition", o.precondition)
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "on", "off"}));
  c->add_option("--recipe", o.recipe, "Lipschitz recipe")
      ->capture_default_str()
      ->check(CLI::IsMember({"mean-value", "row-sum"}));
}

struct BranchRun {
  CoralFamily fam;
  ContinuationResult res;
};

BranchRun run_branch(const CoralParams& prm, const BranchOptions& o) {
  bool pre = o.precondition != "off";
  CoralFamily fam = pre ? CoralFamily::preconditioned(prm, o.from_R) : CoralFamily::raw(prm);
  BranchPoint bp = branch_point_at_R(fam.model(), o.from_R, true);
  ContinuationConfig cfg;
  cfg.max_steps = o.max_steps;
  cfg.alpha_frac = o.alpha_frac;
  cfg.d_init = o.d_init;
  cfg.recipe = parse_recipe(o.recipe);
  if (o.to_R) cfg.target_p = fam.p_of_R(*o.to_R);
  cfg.target_crossing = o.crossing;
  ContinuationResult res = continue_branch(fam, fam.p_of_R(o.from_R), fam.u_of_x(bp.x), cfg);
  return {std::move(fam), std::move(res)};
}

void print_interval(std::ostream& os, const std::string& name, const Interval& x) {
  os << name << " = " << decimal_string(x.mid()) << "  [" << decimal_string(x.lo()) << ", "
     << decimal_string(x.hi()) << "]\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Validated continuation and bifurcation certificates for the red coral model", "certibif"};
  app.require_subcommand(1);
  std::string params_path;
  app.add_option("--params", params_path, "key = value parameter file (defaults to the built-in table)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "iterate the map and write the orbit as CSV");
  double sim_R = 0;
  std::string sim_x0 = "1.5y", sim_out;
  long sim_years = 100, sim_skip = 0;
  sim->add_option("--R", sim_R, "basic reproduction number")->required();
  sim->add_option("--x0", sim_x0, "initial state: <c>y (y has P = 1500) or a file")->capture_default_str();
  sim->add_option("--years", sim_years)->capture_default_str()->check(CLI::NonNegativeNumber);
  sim->add_option("--skip", sim_skip, "transient iterates to drop")->capture_default_str();
  sim->add_option("--out", sim_out, "CSV path (default stdout)");

  // branch
  auto* br = app.add_subcommand("branch", "validated continuation of the nontrivial branch");
  BranchOptions bo;
  std::string br_out, br_json;
  add_branch_options(br, bo);
  br->add_option("--out", br_out, "CSV path, one row per box");
  br->add_option("--json", br_json, "JSON certificate chain");

  // validate-ns / validate-sn
  double ell = 1e-6;
  std::string cert_out, cert_recipe = "mean-value";
  auto* vns = app.add_subcommand("validate-ns", "certify the Neimark-Sacker point");
  auto* vsn = app.add_subcommand("validate-sn", "certify the saddle-node point");
  for (auto* c : {vns, vsn}) {
    c->add_option("--ell", ell, "radius of the Lipschitz box")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--recipe", cert_recipe)->capture_default_str()->check(CLI::IsMember({"mean-value", "row-sum"}));
    c->add_option("--out", cert_out, "JSON path (default stdout)");
  }

  // transcritical
  auto* tc = app.add_subcommand("transcritical", "closed-form transcritical point on the trivial branch");
  std::string tc_json;
  tc->add_option("--json", tc_json, "JSON path");

  // rotation
  auto* rot = app.add_subcommand("rotation", "weighted Birkhoff rotation numbers about a centre");
  std::string rot_range, rot_center = "2500,2500", rot_out, rot_profile, rot_x0 = "1.5y";
  long rot_n = 50000, rot_skip = 10000;
  int rot_bins = 200;
  rot->add_option("--R-range", rot_range, "a:b:n")->required();
  rot->add_option("--center", rot_center)->capture_default_str();
  rot->add_option("--iterates", rot_n)->capture_default_str()->check(CLI::Range(10L, 100000000L));
  rot->add_option("--skip", rot_skip)->capture_default_str()->check(CLI::NonNegativeNumber);
  rot->add_option("--x0", rot_x0)->capture_default_str();
  rot->add_option("--bins", rot_bins, "angle profile bins")->capture_default_str()->check(CLI::PositiveNumber);
  rot->add_option("--out", rot_out, "CSV path (default stdout)");
  rot->add_option("--profile", rot_profile, "CSV path for the angle profiles");

  // farey
  auto* fa = app.add_subcommand("farey", "fraction with the smallest denominator in [lo, hi]");
  std::string fa_lo, fa_hi;
  fa->add_option("lo", fa_lo)->required();
  fa->add_option("hi", fa_hi)->required();

  // diagram
  auto* dg = app.add_subcommand("diagram", "bifurcation diagram: validated branch plus the trivial branch");
  BranchOptions dgo;
  dgo.max_steps = 30000;
  std::string dg_out;
  double dg_Rmax = 300, dg_dR = 0.5;
  add_branch_options(dg, dgo);
  dg->add_option("--R-max", dg_Rmax, "largest R on the trivial branch")->capture_default_str();
  dg->add_option("--R-step", dg_dR, "R spacing on the trivial branch")->capture_default_str()->check(CLI::PositiveNumber);
  dg->add_option("--out", dg_out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 2;
  }

  try {
    CoralParams prm = params_path.empty() ? CoralParams::table1() : CoralParams::load(params_path);

    if (*sim) {
      Sink sink(sim_out, out);
      CoralModel<double> m(prm);
      Eigen::VectorXd x0 = parse_x0(sim_x0, m);
      OrbitSample o = iterate(m, m.R_to_lambda(sim_R), x0, sim_years, sim_skip);
      std::ostream& os = *sink;
      os << "t";
      for (Eigen::Index k = 1; k <= m.dim(); ++k) os << ",x" << k;
      os << ",P\n" << std::setprecision(17);
      for (long t = 0; t < sim_years; ++t) {
        os << sim_skip + t + 1;
        for (Eigen::Index k = 0; k < m.dim(); ++k) os << ',' << o.points(k, t);
        os << ',' << m.density(o.points.col(t)) << '\n';
      }
      return 0;
    }

    if (*br) {
      auto csv = optional_sink(br_out);
      auto js = optional_sink(br_json);
      BranchRun run = run_branch(prm, bo);
      const auto& boxes = run.res.boxes;
      if (csv) write_branch_csv(**csv, run.fam, boxes);
      if (js) **js << branch_to_json(run.res, run.fam).dump(2) << '\n';
      double max_dmin = 0, min_R = 1e300;
      for (const BranchBox& b : boxes) {
        max_dmin = std::max(max_dmin, b.delta_min);
        min_R = std::min(min_R, run.fam.R_of_p(b.base.p));
      }
      out << "boxes: " << boxes.size() << "\n";
      out << "stop: " << run.res.stop_reason << " (" << run.res.stop_detail << ")\n";
      if (!boxes.empty()) {
        const BranchBox& last = boxes.back();
        out << "last box: R = " << run.fam.R_of_p(last.base.p)
            << ", P = " << run.fam.model().density(run.fam.x_of_u(last.base.u)) << "\n";
        out << "min R: " << min_R << "\n";
        out << "max delta_min: " << max_dmin << "\n";
      }
      const std::string& why = run.res.stop_reason;
      if (why == "target" || why == "max_steps") return 0;
      err << "validation stopped at stage '" << why << "': " << run.res.stop_detail << "\n";
      return 1;
    }

    if (*vns || *vsn) {
      Sink sink(cert_out, out);
      CertifyOptions opt;
      opt.cift.ell = ell;
      opt.cift.recipe = parse_recipe(cert_recipe);
      BifCertificate c = *vns ? certify_ns(approximate_ns(prm), prm, opt) : certify_sn(approximate_sn(prm), prm, opt);
      *sink << to_json(c).dump(2) << '\n';
      return 0;
    }

    if (*tc) {
      auto js = optional_sink(tc_json);
      TranscriticalResult t = transcritical_analysis(prm);
      print_interval(out, "R*", t.R_star);
      print_interval(out, "lambda*", t.lambda_star);
      print_interval(out, "nondegeneracy_1", t.nd1);
      print_interval(out, "nondegeneracy_2", t.nd2);
      out << "eigen_residual <= " << decimal_string(t.eigen_residual) << "\n";
      if (js) **js << to_json(t).dump(2) << '\n';
      if (!t.nd1.excludes_zero() || !t.nd2.excludes_zero()) {
        err << "nondegeneracy interval contains 0\n";
        return 1;
      }
      return 0;
    }

    if (*rot) {
      Sink sink(rot_out, out);
      auto prof = optional_sink(rot_profile);
      double a = 0, b = 0;
      long n = 0;
      {
        std::replace(rot_range.begin(), rot_range.end(), ':', ' ');
        std::istringstream ss(rot_range);
        if (!(ss >> a >> b >> n) || n < 1) throw UsageError("--R-range must be a:b:n");
      }
      Eigen::Vector2d c;
      {
        auto comma = rot_center.find(',');
        if (comma == std::string::npos) throw UsageError("--center must be x,y");
        c << parse_decimal(rot_center.substr(0, comma)), parse_decimal(rot_center.substr(comma + 1));
      }
      CoralModel<double> m(prm);
      Eigen::VectorXd x0 = parse_x0(rot_x0, m);
      std::ostream& os = *sink;
      os << "R,rho,convergence_gap,min_angle,min_increment\n" << std::setprecision(17);
      if (prof) **prof << "R,angle,increment,interpolated\n" << std::setprecision(17);
      for (long i = 0; i < n; ++i) {
        double R = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
        try {
          Eigen::Matrix2Xd pts = iterate_plane(m, m.R_to_lambda(R), x0, rot_n + 1, rot_skip);
          RotationResult r = rotation_number(pts, c);
          AngleProfile ap = angle_profile(pts, c, rot_bins);
          os << R << ',' << r.rho << ',' << r.convergence_gap << ',' << ap.min_angle << ',' << ap.min_increment << '\n';
          if (prof)
            for (size_t k = 0; k < ap.angle.size(); ++k)
              **prof << R << ',' << ap.angle[k] << ',' << ap.increment[k] << ',' << (ap.interpolated[k] ? 1 : 0) << '\n';
        } catch (const RotationUndefined& e) {
          os << R << ",undefined,,,\n";
        }
      }
      return 0;
    }

    if (*fa) {
      Rational f = farey_min_denominator(parse_rational(fa_lo), parse_rational(fa_hi));
      out << f.p << "/" << f.q << "\n";
      return 0;
    }

    if (*dg) {
      Sink sink(dg_out, out);
      BranchRun run = run_branch(prm, dgo);
      std::ostream& os = *sink;
      os << "branch,R,P,stability,delta_u\n" << std::setprecision(17);
      CoralModel<double> m(prm);
      Eigen::VectorXd zero = Eigen::VectorXd::Zero(m.dim());
      for (double R = 0; R <= dg_Rmax + 1e-12; R += dg_dR)
        os << "trivial," << R << ",0," << stability_label(classify_stability(m, m.R_to_lambda(R), zero)) << ",0\n";
      for (const BranchBox& b : run.res.boxes) {
        double lambda = run.fam.lambda_of_p(b.base.p);
        Eigen::VectorXd x = run.fam.x_of_u(b.base.u);
        os << "nontrivial," << run.fam.R_of_p(b.base.p) << ',' << m.density(x) << ','
           << stability_label(classify_stability(m, lambda, x)) << ',' << b.delta_u << '\n';
      }
      return 0;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationFailed& e) {
    err << "validation failed at stage '" << e.stage() << "': " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace certibif
