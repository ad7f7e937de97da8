#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "catch_amalgamated.hpp"

#include <json.hpp>
#include <suita/cli.hpp>

namespace {

struct CliResult {
  int code = -1;
  std::string text;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  const int code = suita::cli::run(args, out);
  return {code, out.str()};
}

const std::string disc_json = R"({"type":"unit_disc"})";
const std::string annulus_json = R"({"type":"annulus","q":0.25})";

nlohmann::json parse_tail_json(const std::string& text) {
  // payload first, JSON report last; find the final top-level object
  const auto pos = text.rfind("\n{");
  REQUIRE(pos != std::string::npos);
  return nlohmann::json::parse(text.substr(pos + 1));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("cli dispatch table covers every command") {
  REQUIRE(suita::cli::command_table.size() == 9);
  const std::set<std::string> expected = {"kernel", "green",     "capacity",  "ratio", "scan",
                                          "variation", "extension", "map",   "selftest"};
  std::set<std::string> got;
  for (const auto& entry : suita::cli::command_table) {
    REQUIRE(entry.handler != nullptr);
    REQUIRE(std::string(entry.help).size() > 0);
    got.insert(entry.name);
  }
  REQUIRE(got == expected);
}

TEST_CASE("kernel command emits the kernel estimate") {
  const auto res = run_cli({"kernel", "--domain", disc_json, "--z0", "0.3", "0"});
  REQUIRE(res.code == 0);
  const auto j = nlohmann::json::parse(res.text);
  REQUIRE(j["K"][0].get<double>() ==
          Catch::Approx(1.0 / (suita::pi * suita::sq(1.0 - 0.09))).epsilon(1e-12));
  REQUIRE(j["K"][1].get<double>() == 0.0);
  REQUIRE(j["method"] == "closed_form");

  // off-diagonal evaluation through --t
  const auto off = run_cli({"kernel", "--domain", disc_json, "--z0", "0", "0", "--t", "0.5", "0"});
  REQUIRE(off.code == 0);
  const auto jo = nlohmann::json::parse(off.text);
  REQUIRE(jo["K"][0].get<double>() == Catch::Approx(1.0 / suita::pi).epsilon(1e-12));
}

TEST_CASE("green and capacity commands") {
  const auto g = run_cli({"green", "--domain", disc_json, "--z0", "0", "0", "--t", "0.5", "0"});
  REQUIRE(g.code == 0);
  REQUIRE(nlohmann::json::parse(g.text)["G"].get<double>() ==
          Catch::Approx(std::log(0.5)).epsilon(1e-12));

  const auto c = run_cli({"capacity", "--domain", disc_json, "--z0", "0.3", "0"});
  REQUIRE(c.code == 0);
  const auto jc = nlohmann::json::parse(c.text);
  REQUIRE(jc["capacity"].get<double>() == Catch::Approx(1.0 / 0.91).epsilon(1e-12));
  REQUIRE(jc.contains("err"));
  REQUIRE(jc.contains("method"));
}

TEST_CASE("ratio command reports the full record") {
  const auto res = run_cli({"ratio", "--domain", disc_json, "--z0", "0.3", "0"});
  REQUIRE(res.code == 0);
  const auto j = nlohmann::json::parse(res.text);
  REQUIRE(j["ratio"].get<double>() == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(j["curvature"].get<double>() == Catch::Approx(-4.0).epsilon(1e-10));
  REQUIRE(j["z0"][0].get<double>() == 0.3);
  REQUIRE(j["method_K"] == "closed_form");
}

TEST_CASE("scan command is deterministic and honors --grid") {
  const std::vector<std::string> args = {"scan", "--domain", disc_json, "--grid", "6",
                                         "--seed", "7"};
  const auto first = run_cli(args);
  const auto second = run_cli(args);
  REQUIRE(first.code == 0);
  REQUIRE(first.text == second.text);
  std::istringstream lines(first.text);
  std::string line;
  std::getline(lines, line);
  REQUIRE(line == "z0_re,z0_im,K,c,ratio,curvature,method_K,method_c");
  int rows = 0;
  while (std::getline(lines, line))
    if (!line.empty()) ++rows;
  REQUIRE(rows == 6);
}

TEST_CASE("variation command emits trace csv plus report json") {
  const auto res = run_cli({"variation", "--domain", disc_json, "--z0", "0.2", "0", "--s-geom",
                            "0.1", "1.0", "4"});
  REQUIRE(res.code == 0);
  REQUIRE(res.text.rfind("re_tau,logK,c_tau,logK_plus_2tau,method\n", 0) == 0);
  const auto rep = parse_tail_json(res.text);
  REQUIRE(rep["pass"].get<bool>());
  REQUIRE(std::abs(rep["slope_tail"].get<double>() + 2.0) < 1e-6);
  // terminal s = 0 row is appended automatically
  REQUIRE(res.text.find("\n0,") != std::string::npos);
}

TEST_CASE("out flag routes the payload to a file") {
  const std::string path = "cli_trace_out.csv";
  std::remove(path.c_str());
  const auto res = run_cli({"variation", "--domain", disc_json, "--z0", "0.2", "0", "--s-geom",
                            "0.1", "1.0", "4", "--out", path});
  REQUIRE(res.code == 0);
  const std::string file = slurp(path);
  REQUIRE(file.rfind("re_tau,", 0) == 0);
  // stdout then carries only the report
  const auto rep = nlohmann::json::parse(res.text);
  REQUIRE(rep["pass"].get<bool>());
  std::remove(path.c_str());

  const std::string scan_path = "cli_scan_out.csv";
  std::remove(scan_path.c_str());
  const auto scan = run_cli({"scan", "--domain", disc_json, "--grid", "4", "--out", scan_path});
  REQUIRE(scan.code == 0);
  REQUIRE(scan.text.empty());
  REQUIRE(slurp(scan_path).rfind("z0_re,", 0) == 0);
  std::remove(scan_path.c_str());
}

TEST_CASE("map command emits samples and a validation report") {
  const auto res = run_cli({"map", "--domain", disc_json, "--z0", "0", "0", "--s", "-1", "--grid",
                            "4"});
  REQUIRE(res.code == 0);
  REQUIRE(res.text.rfind("t_re,t_im,f0_re,f0_im\n", 0) == 0);
  const auto rep = parse_tail_json(res.text);
  REQUIRE(rep["pass"].get<bool>());
  REQUIRE(rep["derivative_positive"].get<bool>());
  REQUIRE(rep["green_residual"].get<double>() < 1e-6);
}

TEST_CASE("extension command on both routes") {
  const auto closed = run_cli({"extension", "--domain", disc_json, "--z0", "0.5", "0"});
  REQUIRE(closed.code == 0);
  const auto jc = nlohmann::json::parse(closed.text);
  REQUIRE(jc["route"] == "kernel_formula");
  REQUIRE(jc["norm"].get<double>() == Catch::Approx(std::sqrt(suita::pi)).epsilon(1e-12));

  const auto qp = run_cli({"extension", "--domain", annulus_json, "--z0", "0.5", "0", "--qp",
                           "--grid", "128"});
  REQUIRE(qp.code == 0);
  const auto jq = nlohmann::json::parse(qp.text);
  REQUIRE(jq["route"] == "constrained_qp");
  REQUIRE(jq.contains("coefficients"));
  const auto jc_ann = nlohmann::json::parse(
      run_cli({"extension", "--domain", annulus_json, "--z0", "0.5", "0"}).text);
  REQUIRE(jq["norm"].get<double>() ==
          Catch::Approx(jc_ann["norm"].get<double>()).epsilon(5e-3));
}

TEST_CASE("kernel command can dump the gram matrix") {
  const std::string path = "cli_gram.csv";
  std::remove(path.c_str());
  const auto res = run_cli({"kernel", "--domain", annulus_json, "--z0", "0.5", "0", "--grid",
                            "64", "--dump-gram", path});
  REQUIRE(res.code == 0);
  const std::string gram = slurp(path);
  REQUIRE(gram.find("i,") != std::string::npos);
  std::istringstream lines(gram);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line))
    if (!line.empty()) ++rows;
  REQUIRE(rows == 33);  // 16 positive powers + constant + 16 negative powers
  std::remove(path.c_str());
}

TEST_CASE("validation failures exit 2 with an error report") {
  const auto missing = run_cli({"ratio", "--z0", "0.3", "0"});
  REQUIRE(missing.code == 2);
  const auto jm = nlohmann::json::parse(missing.text);
  REQUIRE(jm["error"] == "invalid-arguments");
  REQUIRE(jm["kind"] == "validation");

  const auto badflag = run_cli({"ratio", "--domain", disc_json, "--z0", "0.3", "0", "--bogus"});
  REQUIRE(badflag.code == 2);
  REQUIRE(nlohmann::json::parse(badflag.text)["error"] == "invalid-arguments");

  const auto badjson = run_cli({"ratio", "--domain", "{oops", "--z0", "0", "0"});
  REQUIRE(badjson.code == 2);
  REQUIRE(nlohmann::json::parse(badjson.text)["error"] == "invalid-domain");

  const auto badq = run_cli({"ratio", "--domain", R"({"type":"annulus","q":1.5})", "--z0", "0.5",
                             "0"});
  REQUIRE(badq.code == 2);
  REQUIRE(nlohmann::json::parse(badq.text)["error"] == "invalid-domain");

  const auto nosub = run_cli({});
  REQUIRE(nosub.code == 2);

  const auto arity = run_cli({"ratio", "--domain", disc_json, "--z0", "0.3"});
  REQUIRE(arity.code == 2);
}

TEST_CASE("numerical failures exit 3") {
  const auto res = run_cli(
      {"green", "--domain", disc_json, "--z0", "0.3", "0", "--t", "0.3", "0"});
  REQUIRE(res.code == 3);
  const auto j = nlohmann::json::parse(res.text);
  REQUIRE(j["error"] == "pole-collision");
  REQUIRE(j["kind"] == "numerical");
}

TEST_CASE("help exits zero and lists the commands") {
  const auto res = run_cli({"--help"});
  REQUIRE(res.code == 0);
  for (const auto& entry : suita::cli::command_table)
    REQUIRE(res.text.find(entry.name) != std::string::npos);
}

TEST_CASE("selftest sweeps every module and is deterministic") {
  const auto first = run_cli({"selftest"});
  REQUIRE(first.code == 0);
  REQUIRE(first.text.find("FAIL") == std::string::npos);
  for (const char* prefix : {"geometry/", "green/", "bergman/", "suita/", "variation/",
                             "extension/", "mapping/", "io/"})
    REQUIRE(first.text.find(prefix) != std::string::npos);
  const auto second = run_cli({"selftest"});
  REQUIRE(second.text == first.text);
}
