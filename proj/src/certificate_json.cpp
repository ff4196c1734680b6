#include "certibif/certificate_json.hpp"

#include <charconv>

namespace certibif {

std::string decimal_string(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_decimal(const std::string& s) {
  double x = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw DomainError("bad decimal '" + s + "'");
  return x;
}

json to_json(const Interval& x) { return json{{"lo", decimal_string(x.lo())}, {"hi", decimal_string(x.hi())}}; }

Interval interval_from_json(const json& j) {
  return Interval(parse_decimal(j.at("lo").get<std::string>()), parse_decimal(j.at("hi").get<std::string>()));
}

namespace {

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(decimal_string(v(k)));
  return a;
}

json vec_json(const IVector& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(to_json(v(k)));
  return a;
}

}  // namespace

json to_json(const CiftBounds& b) {
  return json{{"rho", to_json(b.rho)}, {"K", to_json(b.K)},       {"L1", to_json(b.L1)},
              {"L2", to_json(b.L2)},   {"L3", to_json(b.L3)},     {"L4", to_json(b.L4)},
              {"ell_x", decimal_string(b.ell_x)}, {"ell_alpha", decimal_string(b.ell_alpha)}};
}

json to_json(const ZeroCertificate& c) {
  return json{{"system", c.system},
              {"anchor", vec_json(c.anchor)},
              {"bounds", to_json(c.bounds)},
              {"delta_accuracy", decimal_string(c.delta_accuracy)},
              {"delta_uniqueness", decimal_string(c.delta_uniqueness)},
              {"preconditioner_hash", c.preconditioner_hash}};
}

json to_json(const BifCertificate& c) {
  json j;
  j["kind"] = c.kind;
  j["R"] = to_json(c.R);
  j["lambda"] = to_json(c.lambda);
  j["x1"] = to_json(c.x1);
  j["P"] = to_json(c.P);
  json cond = json::object();
  for (const auto& [k, v] : c.conditions) cond[k] = to_json(v);
  j["conditions"] = cond;
  json checks = json::object();
  for (const auto& [k, v] : c.checks) checks[k] = v;
  j["checks"] = checks;
  if (c.spectrum_inside >= 0) j["spectrum_inside"] = c.spectrum_inside;
  j["zero"] = to_json(c.zero);
  j["enclosure"] = vec_json(c.enclosure);
  return j;
}

json to_json(const TranscriticalResult& t) {
  return json{{"kind", "transcritical"},
              {"R_star", to_json(t.R_star)},
              {"lambda_star", to_json(t.lambda_star)},
              {"v", vec_json(t.v)},
              {"w", vec_json(t.w)},
              {"nondegeneracy_1", to_json(t.nd1)},
              {"nondegeneracy_2", to_json(t.nd2)},
              {"eigen_residual", decimal_string(t.eigen_residual)}};
}

json to_json(const BranchBox& b, const CoralFamily& fam) {
  return json{{"R", decimal_string(fam.R_of_p(b.base.p))},
              {"p", decimal_string(b.base.p)},
              {"u", vec_json(b.base.u)},
              {"mu", decimal_string(b.base.mu)},
              {"v", vec_json(b.base.v)},
              {"alpha_step", decimal_string(b.alpha_step)},
              {"delta_alpha", decimal_string(b.delta_alpha)},
              {"delta_u", decimal_string(b.delta_u)},
              {"delta_min", decimal_string(b.delta_min)},
              {"d_box", decimal_string(b.hyp.d_u)},
              {"bounds", to_json(b.bounds)},
              {"linked_to_previous", b.linked_to_previous}};
}

json branch_to_json(const ContinuationResult& r, const CoralFamily& fam) {
  json j;
  j["coordinates"] = fam.is_preconditioned() ? "preconditioned" : "raw";
  j["kappa"] = decimal_string(fam.kappa());
  j["scale"] = vec_json(fam.scale());
  j["stop_reason"] = r.stop_reason;
  j["stop_detail"] = r.stop_detail;
  j["all_linked"] = r.all_linked;
  json boxes = json::array();
  for (const BranchBox& b : r.boxes) boxes.push_back(to_json(b, fam));
  j["boxes"] = boxes;
  return j;
}

}  // namespace certibif
