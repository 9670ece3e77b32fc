#include <doctest.h>

#include "approx.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("cbs_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run cbs(const std::string& args, const std::string& env = "") {
  const fs::path o = scratch() / "stdout.txt", e = scratch() / "stderr.txt";
  const std::string cmd = "cd '" + scratch().string() + "' && " + env + " '" CBS_CLI_PATH "' " + args + " >'" +
                          o.string() + "' 2>'" + e.string() + "'";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(o), slurp(e)};
}

std::vector<std::vector<double>> parse_csv(const std::string& text, std::string* header = nullptr) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("enhancement-curve") {
  const fs::path out = scratch() / "curve.csv";
  REQUIRE(cbs("enhancement-curve --out " + out.string()).code == 0);
  std::string header;
  const auto rows = parse_csv(slurp(out), &header);
  CHECK(header == "s,alpha_analytic,alpha_numeric,abs_diff");
  REQUIRE(rows.size() == 61);
  CHECK(rows.front()[0] == rel(1e-3));
  CHECK(rows.front()[2] == rel(2.0 - 1e-3 / 4, 1e-6));
  CHECK(rows.back()[0] == rel(1e3));
  CHECK(std::abs(rows.back()[2] - 23.0 / 21) < 1e-3);
  for (const auto& r : rows) CHECK(r[3] <= 1e-8 * r[1]);

  // Twelve or more significant digits in the output.
  std::istringstream in(slurp(out));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line.substr(line.find(',') + 1, line.find(',', line.find(',') + 1) - line.find(',') - 1).size() >= 13);

  REQUIRE(cbs("enhancement-curve --out " + (scratch() / "curve2.csv").string()).code == 0);
  CHECK(slurp(out) == slurp(scratch() / "curve2.csv"));

  const Run lin = cbs("enhancement-curve --s-min 1 --s-max 3 --points 3 --linear-spacing --format json --out -");
  REQUIRE(lin.code == 0);
  const auto j = nlohmann::json::parse(lin.out);
  CHECK(j["rows"].size() == 3);
  CHECK(j["rows"][1][0].get<double>() == rel(2.0));
}

TEST_CASE("exit codes") {
  CHECK(cbs("enhancement-curve --s-min 10 --s-max 1 --out -").code == 1);
  CHECK(cbs("enhancement-curve --points 1 --out -").code == 1);
  CHECK(cbs("no-such-command").code == 1);
  CHECK(cbs("enhancement-curve --out /nonexistent-dir/sub/curve.csv").code == 2);
  CHECK(cbs("spectrum --omega 10 --method oracle_weak --out -").code == 1);
  CHECK(cbs("spectrum --omega 1 --method oracle_strong --out -").code == 1);
  CHECK(cbs("validate --profile lenient --out -").code == 1);
  CHECK(cbs("mc-average --samples 5 --out -").code == 1);
}

TEST_CASE("configuration file") {
  const fs::path cfg = scratch() / "run.cfg";
  std::ofstream(cfg) << "# curve settings\npoints = 5\ns-min = 0.01\n\nlog-spacing = true\n";
  Run r = cbs("enhancement-curve --config " + cfg.string() + " --out -");
  REQUIRE(r.code == 0);
  CHECK(parse_csv(r.out).size() == 5);
  CHECK(parse_csv(r.out).front()[0] == rel(0.01));

  r = cbs("enhancement-curve --config " + cfg.string() + " --points 7 --out -");
  REQUIRE(r.code == 0);
  CHECK(parse_csv(r.out).size() == 7);

  std::ofstream(cfg) << "points = 5\nbogus-key = 3\n";
  r = cbs("enhancement-curve --config " + cfg.string() + " --out -");
  CHECK(r.code == 1);
  CHECK(r.err.find("bogus-key") != std::string::npos);
}

TEST_CASE("default output directory") {
  const fs::path dir = scratch() / "outdir";
  fs::create_directories(dir);
  REQUIRE(cbs("enhancement-curve --points 4", "CBS_OUTPUT_DIR='" + dir.string() + "'").code == 0);
  CHECK(fs::exists(dir / "enhancement_curve.csv"));
}

TEST_CASE("spectrum") {
  SUBCASE("weak driving") {
    const fs::path out = scratch() / "weak.csv";
    REQUIRE(cbs("spectrum --omega 0.1 --points 201 --out " + out.string()).code == 0);
    std::string header;
    const auto rows = parse_csv(slurp(out), &header);
    CHECK(header == "nu_over_gamma,ladder_inel,crossed_inel");
    REQUIRE(rows.size() == 201);
    std::size_t peak = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i][2] <= rows[i][1] * (1 + 1e-12));
      if (rows[i][1] > rows[peak][1]) peak = i;
    }
    CHECK(rows[peak][0] == 0.0);
    const auto meta = nlohmann::json::parse(slurp(fs::path(out.string() + ".meta.json")));
    CHECK(meta["method"] == "numeric");
    CHECK(meta["omega_over_gamma"].get<double>() == rel(0.1));
    CHECK(meta["ladder_inel_integral"].get<double>() == rel(1.0));
    CHECK(meta.contains("ladder_el_weight"));
    CHECK(meta.contains("saturation"));
  }
  SUBCASE("strong driving has negative crossed regions") {
    const Run r = cbs("spectrum --omega 10 --points 201 --format json --out -");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    double lowest = 0.0;
    for (const auto& row : j["rows"]) lowest = std::min(lowest, row[2].get<double>());
    CHECK(lowest < 0.0);
  }
  SUBCASE("oracle methods and raw units") {
    const Run w = cbs("spectrum --omega 0.1 --method oracle_weak --raw --nu-min -1 --nu-max 1 --points 3 --out -");
    REQUIRE(w.code == 0);
    const auto rows = parse_csv(w.out);
    CHECK(rows[1][1] == rel(std::pow(0.1, 4) / M_PI, 1e-12));
    CHECK(cbs("spectrum --omega 20 --method oracle_strong --points 11 --out -").code == 0);
  }
}

TEST_CASE("mc-average") {
  Run r = cbs("mc-average --samples 2000 --points 3 --out -");
  REQUIRE(r.code == 0);
  CHECK(r.err.empty());
  std::string header;
  const auto rows = parse_csv(r.out, &header);
  CHECK(header == "theta,k_ell_theta,mc_mean,mc_std_error,analytic_crossed,analytic_ladder");
  CHECK(rows.size() == 3);
  CHECK(cbs("mc-average --samples 2000 --points 3 --out -").out == r.out);
  CHECK(cbs("mc-average --samples 2000 --points 3 --seed 2 --out -").out != r.out);

  r = cbs("mc-average --samples 2000 --points 2 --theta-max 0.02 --out -");
  CHECK(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);
}

TEST_CASE("validate") {
  const fs::path out = scratch() / "report.json";
  const Run r = cbs("validate -q --out " + out.string());
  CHECK((r.code == 0 || r.code == 3));
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["checks"].size() >= 12);
  CHECK((r.code == 0) == j["all_pass"].get<bool>());
  bool alpha = false, closure = false;
  for (const auto& c : j["checks"]) {
    REQUIRE(c.contains("check"));
    REQUIRE(c.contains("expected"));
    REQUIRE(c.contains("actual"));
    REQUIRE(c.contains("tol"));
    REQUIRE(c.contains("pass"));
    if (c["check"].get<std::string>().find("alpha") != std::string::npos && c["expected"].is_number() &&
        std::abs(c["expected"].get<double>() - 1.759758) < 1e-6)
      alpha = true;
    if (c["criterion"] == 5 && c["tol"].get<double>() == 1e-6) closure = true;
  }
  CHECK(alpha);
  CHECK(closure);
}
