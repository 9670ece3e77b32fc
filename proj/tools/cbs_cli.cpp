// cbs: data files for the enhancement curve, double-scattering spectra and the
// configuration-average check, plus the validation report.
//
// Exit codes: 0 success, 1 usage or parameter error, 2 I/O error,
// 3 validation failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cbs/config_average.hpp"
#include "cbs/errors.hpp"
#include "cbs/oracle.hpp"
#include "cbs/perturbative.hpp"
#include "cbs/spectrum.hpp"
#include "cbs/validation.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kOutputDirEnv = "CBS_OUTPUT_DIR";

enum Exit { kOk = 0, kUsage = 1, kIo = 2, kValidation = 3 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  json metadata = json::object();
};

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

// `--out` wins; otherwise the default name goes to $CBS_OUTPUT_DIR or the cwd.
std::string resolve_output(const std::string& out, const std::string& fallback) {
  if (!out.empty()) return out;
  const char* dir = std::getenv(kOutputDirEnv);
  return (dir && *dir) ? (fs::path(dir) / fallback).string() : fallback;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw IoError("write to '" + path + "' failed");
}

// CSV: header row, then data. Metadata, when present, goes to a sidecar
// <path>.meta.json so the CSV stays a plain table.
void write_table(const Table& t, const std::string& path, const std::string& format) {
  if (format == "json") {
    json j;
    j["columns"] = t.columns;
    j["rows"] = json::array();
    for (const auto& r : t.rows) {
      json row = json::array();
      for (double v : r) row.push_back(json::parse(number(v)));
      j["rows"].push_back(row);
    }
    if (!t.metadata.empty()) j["metadata"] = t.metadata;
    write_text(path, j.dump(2) + "\n");
    return;
  }
  std::ostringstream s;
  for (std::size_t i = 0; i < t.columns.size(); ++i) s << (i ? "," : "") << t.columns[i];
  s << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s << (i ? "," : "") << number(r[i]);
    s << "\n";
  }
  write_text(path, s.str());
  if (!t.metadata.empty() && path != "-") write_text(path + ".meta.json", t.metadata.dump(2) + "\n");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// `key = value` lines, `#` comments, blank lines ignored.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw CLI::ValidationError(path + ":" + std::to_string(lineno) + ": empty key");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

// Splices config entries into argv right after the subcommand name, so that
// explicit flags later on the command line take precedence.
std::vector<std::string> apply_config(CLI::App& app, std::vector<std::string> args) {
  std::optional<std::string> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!config) return args;

  std::size_t pos = args.size();
  CLI::App* sub = nullptr;
  for (std::size_t i = 0; i < args.size() && !sub; ++i) {
    for (CLI::App* s : app.get_subcommands({})) {
      if (s->get_name() == args[i]) {
        sub = s;
        pos = i + 1;
      }
    }
  }
  if (!sub) throw CLI::ValidationError("--config needs a command");
  std::vector<std::string> extra;
  for (const auto& [key, value] : read_config(*config)) {
    const std::string flag = "--" + key;
    if (!sub->get_option_no_throw(flag) || key == "help")
      throw CLI::ValidationError("unknown configuration key '" + key + "' for command " + sub->get_name());
    extra.push_back(flag + "=" + value);
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(pos), extra.begin(), extra.end());
  return args;
}

// ---------------------------------------------------------------- commands

struct CurveArgs {
  double s_min = 1e-3;
  double s_max = 1e3;
  int points = 61;
  bool log_spacing = true;
  std::string out;
  std::string format = "csv";
};

int cmd_enhancement_curve(const CurveArgs& a) {
  if (!(a.s_min > 0.0) || !(a.s_max > a.s_min)) throw cbs::DomainError("need 0 < s-min < s-max");
  if (a.points < 2) throw cbs::DomainError("need points >= 2");
  Table t;
  t.columns = {"s", "alpha_analytic", "alpha_numeric", "abs_diff"};
  for (int i = 0; i < a.points; ++i) {
    const double f = static_cast<double>(i) / (a.points - 1);
    double s = a.log_spacing ? a.s_min * std::pow(a.s_max / a.s_min, f) : a.s_min + f * (a.s_max - a.s_min);
    if (i == a.points - 1) s = a.s_max;
    const auto m = cbs::build_double_scattering(cbs::PhysParams::from_saturation(s), cbs::Configuration{});
    const double numeric = cbs::intensity_terms(m.pert, m.config).enhancement();
    const double analytic = cbs::oracle::enhancement_factor(s);
    t.rows.push_back({s, analytic, numeric, std::abs(numeric - analytic)});
  }
  write_table(t, resolve_output(a.out, "enhancement_curve." + a.format), a.format);
  return kOk;
}

struct SpectrumArgs {
  double omega = 10.0;
  double delta = 0.0;
  std::optional<double> nu_min;
  std::optional<double> nu_max;
  int points = 2001;
  std::string method = "numeric";
  bool raw = false;
  std::string out;
  std::string format = "csv";
};

int cmd_spectrum(const SpectrumArgs& a) {
  const cbs::PhysParams p{1.0, a.omega, a.delta};
  p.validate();
  if (!(a.omega > 0.0)) throw cbs::DomainError("spectrum needs omega > 0");
  const double edge = 2.5 * a.omega + 10.0;
  const double lo = a.nu_min.value_or(-edge), hi = a.nu_max.value_or(edge);
  if (!(hi > lo) || a.points < 2) throw cbs::DomainError("need nu-min < nu-max and points >= 2");
  if (a.method != "numeric" && a.delta != 0.0) throw cbs::DomainError("oracle spectra exist only at delta = 0");
  if (a.method == "oracle_weak" && a.omega > 0.3) throw cbs::DomainError("oracle_weak needs omega <= 0.3 gamma");
  if (a.method == "oracle_strong" && a.omega < 10.0) throw cbs::DomainError("oracle_strong needs omega >= 10 gamma");
  if (a.delta != 0.0) std::cerr << "warning: delta != 0 output is not validated\n";

  const std::vector<double> grid = cbs::linear_grid(lo, hi, a.points);
  Table t;
  t.columns = {"nu_over_gamma", "ladder_inel", "crossed_inel"};
  double ladder_el = 0.0, crossed_el = 0.0, ladder_inel_total = 0.0, crossed_inel_total = 0.0;
  json extra = json::object();

  if (a.method == "numeric") {
    const cbs::SpectrumResult spec = cbs::cbs_spectrum(p, cbs::Configuration{}, grid);
    const cbs::SpectrumTotals totals = cbs::integrate_spectrum(spec);
    for (std::size_t i = 0; i < grid.size(); ++i) t.rows.push_back({grid[i], spec.ladder_inel[i], spec.crossed_inel[i]});
    ladder_el = spec.ladder_el_weight;
    crossed_el = spec.crossed_el_weight;
    ladder_inel_total = totals.ladder_inelastic;
    crossed_inel_total = totals.crossed_inelastic;
    extra["max_asymmetry"] = spec.max_asymmetry;
    extra["symmetrized"] = spec.symmetrized;
  } else if (a.method == "oracle_weak" || a.method == "oracle_strong") {
    const bool weak = a.method == "oracle_weak";
    for (double nu : grid) {
      const auto d = weak ? cbs::oracle::weak_field_spectra(nu, a.omega) : cbs::oracle::strong_field_spectra(nu, a.omega);
      t.rows.push_back({nu, d.ladder, d.crossed});
    }
    const double s = p.saturation();
    const auto el = cbs::oracle::elastic_terms(s);
    ladder_el = el.ladder;
    crossed_el = el.crossed;
    const double o2 = a.omega * a.omega;
    ladder_inel_total = weak ? 7.0 / 16.0 * o2 * o2 : 14.0 / 3.0 / o2;
    crossed_inel_total = weak ? 3.0 / 8.0 * o2 * o2 : 4.0 / 9.0 / o2;
  } else {
    throw cbs::DomainError("unknown method '" + a.method + "' (numeric, oracle_weak, oracle_strong)");
  }

  const double scale = a.raw ? 1.0 : 1.0 / ladder_inel_total;
  for (auto& r : t.rows) {
    r[1] *= scale;
    r[2] *= scale;
  }
  t.metadata["method"] = a.method;
  t.metadata["omega_over_gamma"] = a.omega;
  t.metadata["delta_over_gamma"] = a.delta;
  t.metadata["saturation"] = p.saturation();
  t.metadata["normalization"] = a.raw ? "raw (units of 2|g~|^2/15)" : "ladder inelastic integral = 1";
  t.metadata["scale_applied"] = scale;
  t.metadata["ladder_el_weight"] = ladder_el * scale;
  t.metadata["crossed_el_weight"] = crossed_el * scale;
  t.metadata["ladder_inel_integral"] = ladder_inel_total * scale;
  t.metadata["crossed_inel_integral"] = crossed_inel_total * scale;
  for (const auto& [k, v] : extra.items()) t.metadata[k] = v;
  write_table(t, resolve_output(a.out, "spectrum_" + a.method + "." + a.format), a.format);
  return kOk;
}

struct ValidateArgs {
  std::string profile = "default";
  std::string out;
  bool quiet = false;
};

int cmd_validate(const ValidateArgs& a) {
  const cbs::ValidationOptions opt = cbs::validation_profile(a.profile);
  const auto records = cbs::run_validation(opt, [&](const cbs::CheckRecord& r) {
    if (!a.quiet) std::cerr << (r.pass ? "ok   " : "FAIL ") << "[" << r.criterion << "] " << r.check << "\n";
  });
  json report;
  report["profile"] = a.profile;
  report["checks"] = json::array();
  int failed = 0;
  for (const auto& r : records) {
    failed += r.pass ? 0 : 1;
    report["checks"].push_back({{"criterion", r.criterion},
                                {"check", r.check},
                                {"expected", r.expected},
                                {"actual", r.actual},
                                {"tol", r.tol},
                                {"mode", cbs::to_string(r.mode)},
                                {"pass", r.pass}});
  }
  report["total"] = records.size();
  report["failed"] = failed;
  report["all_pass"] = failed == 0;
  write_text(resolve_output(a.out, "validation.json"), report.dump(2) + "\n");
  return failed == 0 ? kOk : kValidation;
}

struct McArgs {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  double ell_k0 = 100.0;
  double width_frac = 0.5;
  double theta_max = 0.005;
  int points = 11;
  std::string out;
  std::string format = "csv";
};

int cmd_mc_average(const McArgs& a) {
  cbs::AverageSpec spec{a.samples, a.seed, a.ell_k0, a.width_frac};
  spec.validate();
  if (!(a.theta_max >= 0.0) || a.points < 1) throw cbs::DomainError("need theta-max >= 0 and points >= 1");
  if (!cbs::small_angle_expansion_valid(a.theta_max, a.ell_k0))
    std::fprintf(stderr, "warning: k_ell * theta reaches %.3g > 0.5; the analytic columns leave their range of validity\n",
                 a.ell_k0 * a.theta_max);
  Table t;
  t.columns = {"theta", "k_ell_theta", "mc_mean", "mc_std_error", "analytic_crossed", "analytic_ladder"};
  for (int i = 0; i < a.points; ++i) {
    const double theta = a.points == 1 ? a.theta_max : a.theta_max * i / (a.points - 1);
    const cbs::McEstimate e = cbs::mc_average(spec, theta);
    const cbs::AngularFactors f = cbs::angular_factor(theta, a.ell_k0);
    t.rows.push_back({theta, a.ell_k0 * theta, e.mean, e.std_error, f.crossed, f.ladder});
  }
  t.metadata = {{"samples", a.samples}, {"seed", a.seed}, {"ell_k0", a.ell_k0}, {"width_frac", a.width_frac}};
  write_table(t, resolve_output(a.out, "mc_average." + a.format), a.format);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent backscattering by two driven atoms: curves, spectra and validation", "cbs"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.footer(std::string("Options may also come from --config FILE (lines 'key = value', '#' comments).\n"
                         "Default output directory: $") +
             kOutputDirEnv + " (else the working directory). Use --out - for stdout.");
  std::string config_unused;
  app.add_option("--config", config_unused, "key = value file with option defaults for the command");

  CurveArgs curve;
  auto* c = app.add_subcommand("enhancement-curve", "alpha(s): analytic vs master-equation numeric");
  c->add_option("--s-min", curve.s_min, "smallest saturation")->capture_default_str();
  c->add_option("--s-max", curve.s_max, "largest saturation")->capture_default_str();
  c->add_option("--points", curve.points, "number of rows")->capture_default_str();
  c->add_flag("--log-spacing,!--linear-spacing", curve.log_spacing, "log (default) or linear spacing in s");
  c->add_option("-o,--out", curve.out, "output file");
  c->add_option("--format", curve.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  SpectrumArgs spec;
  auto* s = app.add_subcommand("spectrum", "inelastic ladder and crossed spectra");
  s->add_option("--omega", spec.omega, "Rabi frequency / gamma")->capture_default_str();
  s->add_option("--delta", spec.delta, "detuning / gamma (numeric only, unvalidated)")->capture_default_str();
  s->add_option("--nu-min", spec.nu_min, "lowest nu / gamma (default -(2.5 Omega + 10))");
  s->add_option("--nu-max", spec.nu_max, "highest nu / gamma (default 2.5 Omega + 10)");
  s->add_option("--points", spec.points, "grid points")->capture_default_str();
  s->add_option("--method", spec.method, "numeric, oracle_weak or oracle_strong")
      ->check(CLI::IsMember({"numeric", "oracle_weak", "oracle_strong"}))
      ->capture_default_str();
  s->add_flag("--raw", spec.raw, "units of 2|g~|^2/15 instead of unit ladder integral");
  s->add_option("-o,--out", spec.out, "output file");
  s->add_option("--format", spec.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  ValidateArgs val;
  auto* v = app.add_subcommand("validate", "run the acceptance checks, write a JSON report");
  v->add_option("--profile", val.profile, "default or strict (tolerances halved)")->capture_default_str();
  v->add_option("-o,--out", val.out, "report file");
  v->add_flag("-q,--quiet", val.quiet, "no per-check progress on stderr");

  McArgs mc;
  auto* m = app.add_subcommand("mc-average", "Monte Carlo crossed angular factor vs small-angle law");
  m->add_option("--samples", mc.samples, "samples per angle")->capture_default_str();
  m->add_option("--seed", mc.seed, "RNG seed")->capture_default_str();
  m->add_option("--ell-k0", mc.ell_k0, "k0 * mean free path")->capture_default_str();
  m->add_option("--width-frac", mc.width_frac, "half-width of the distance distribution / ell")->capture_default_str();
  m->add_option("--theta-max", mc.theta_max, "largest detection angle (rad)")->capture_default_str();
  m->add_option("--points", mc.points, "number of angles from 0 to theta-max")->capture_default_str();
  m->add_option("-o,--out", mc.out, "output file");
  m->add_option("--format", mc.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = apply_config(app, std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }

  try {
    if (*c) return cmd_enhancement_curve(curve);
    if (*s) return cmd_spectrum(spec);
    if (*v) return cmd_validate(val);
    if (*m) return cmd_mc_average(mc);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const cbs::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
