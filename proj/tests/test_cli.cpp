#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "certibif/certificate_json.hpp"
#include "certibif/cli.hpp"

using namespace certibif;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "certibif");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) { return "/tmp/certibif_test_" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("farey") {
  Run r = run({"farey", "0.126", "0.129"});
  CHECK(r.code == 0);
  CHECK(r.out == "5/39\n");
}

TEST_CASE("transcritical") {
  Run r = run({"transcritical"});
  CHECK(r.code == 0);
  CHECK(r.out.find("R* = 72.2222") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"simulate"}).code == 2);
  CHECK(run({"branch", "--precondition", "maybe"}).code == 2);
  CHECK(run({"rotation", "--R-range", "1:2"}).code == 2);
  Run w = run({"validate-sn", "--out", "/nonexistent/dir/cert.json"});
  CHECK(w.code == 2);
  CHECK(w.err.find("cannot write") != std::string::npos);
  CHECK(run({"--params", "/nonexistent/params.txt", "transcritical"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("params file changes the model") {
  std::string path = tmp("params.txt");
  {
    std::ofstream f(path);
    f << "c1 = 2e5\n";
  }
  Run r = run({"--params", path, "transcritical"});
  CHECK(r.code == 0);
  CHECK(r.out.find("R* = 65 ") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("validate-sn writes a JSON certificate that round-trips") {
  std::string path = tmp("sn.json");
  Run r = run({"validate-sn", "--out", path});
  CHECK(r.code == 0);
  json j = json::parse(slurp(path));
  CHECK(j["kind"] == "saddle_node");
  Interval R = interval_from_json(j["R"]);
  CHECK(R.contains(12.278640225));
  CHECK(to_json(R) == j["R"]);
  CHECK(std::stod(j["zero"]["delta_accuracy"].get<std::string>()) <= 1e-10);
  std::remove(path.c_str());
}

TEST_CASE("validate-ns prints to stdout") {
  Run r = run({"validate-ns"});
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["spectrum_inside"] == 11);
  CHECK(interval_from_json(j["conditions"]["e"]).hi() < 0);
}

TEST_CASE("validate failure exits 1 with the stage") {
  Run r = run({"validate-ns", "--ell", "1e-30"});
  CHECK(r.code == 1);
  CHECK(r.err.find("stage") != std::string::npos);
}

TEST_CASE("simulate") {
  Run r = run({"simulate", "--R", "29.15", "--years", "5", "--x0", "0.5y"});
  CHECK(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 6);
  CHECK(r.out.rfind("t,x1,", 0) == 0);
  std::string x0 = tmp("x0.txt");
  {
    std::ofstream f(x0);
    for (int k = 0; k < 13; ++k) f << (k ? "," : "") << 10.0;
  }
  CHECK(run({"simulate", "--R", "29.15", "--years", "2", "--x0", x0}).code == 0);
  {
    std::ofstream f(x0);
    f << "1,2,3";
  }
  CHECK(run({"simulate", "--R", "29.15", "--years", "2", "--x0", x0}).code == 2);
  std::remove(x0.c_str());
}

TEST_CASE("branch to a target R") {
  std::string csv = tmp("branch.csv"), js = tmp("branch.json");
  Run r = run({"branch", "--to-R", "290", "--out", csv, "--json", js});
  CHECK(r.code == 0);
  CHECK(r.out.find("stop: target") != std::string::npos);
  json j = json::parse(slurp(js));
  CHECK(j["all_linked"] == true);
  CHECK(j["boxes"].size() >= 2);
  CHECK(slurp(csv).rfind("R,lambda,", 0) == 0);
  std::remove(csv.c_str());
  std::remove(js.c_str());
}

TEST_CASE("rotation and diagram") {
  Run r = run({"rotation", "--R-range", "160.31:170:2", "--iterates", "20000", "--skip", "5000"});
  CHECK(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3);
  Run d = run({"diagram", "--max-steps", "50", "--R-max", "10", "--R-step", "1"});
  CHECK(d.code == 0);
  CHECK(d.out.find("trivial,10,0,stable") != std::string::npos);
  CHECK(d.out.find("nontrivial,300") != std::string::npos);
}

}
