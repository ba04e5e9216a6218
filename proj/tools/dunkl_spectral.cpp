// dunkl-spectral: command-line front end for the spectral toolkit.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dunkl/halfline.hpp"
#include "dunkl/hermite.hpp"
#include "dunkl/io.hpp"
#include "dunkl/quadrature.hpp"
#include "dunkl/verify.hpp"

using namespace dunkl;
using nlohmann::json;

namespace {

enum Exit { ok = 0, failed_checks = 1, validation = 2, numerical = 3, io_failure = 4 };

struct RunConfig {
  double sigma = 0.5;
  double s = 1.0;
  std::size_t K = 40;
  std::size_t N = 0;
  double grid_extent_factor = 1.5;
  std::uint64_t seed = 42;
  std::string format = "json";
  std::string out = ".";
  std::string config_path;
};

/// Fills every field that was not given on the command line from the config file.
void merge_config_file(RunConfig& cfg, const CLI::App& app) {
  if (cfg.config_path.empty()) return;
  json j;
  try {
    j = json::parse(io::read_file(cfg.config_path));
  } catch (const json::exception& e) {
    throw io::IoError(cfg.config_path + ": " + e.what());
  }
  if (!j.is_object()) throw io::IoError(cfg.config_path + ": expected a JSON object");
  auto given = [&](const char* flag) { return app.count(flag) > 0; };
  try {
    if (j.contains("sigma") && !given("--sigma")) cfg.sigma = j["sigma"].get<double>();
    if (j.contains("s") && !given("--s")) cfg.s = j["s"].get<double>();
    if (j.contains("K") && !given("--K")) cfg.K = j["K"].get<std::size_t>();
    if (j.contains("N") && !given("--N")) cfg.N = j["N"].get<std::size_t>();
    if (j.contains("grid_extent_factor") && !given("--grid-extent-factor"))
      cfg.grid_extent_factor = j["grid_extent_factor"].get<double>();
    if (j.contains("seed") && !given("--seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (!given("--format")) {
      if (j.contains("output_format")) cfg.format = j["output_format"].get<std::string>();
      if (j.contains("format")) cfg.format = j["format"].get<std::string>();
    }
    if (j.contains("out") && !given("--out")) cfg.out = j["out"].get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(cfg.config_path + ": " + e.what());
  }
}

SigmaParams<double> params_of(const RunConfig& cfg) {
  if (!(cfg.grid_extent_factor > 0)) throw ValidationError("grid-extent-factor must be > 0");
  if (cfg.format != "json" && cfg.format != "csv") throw ValidationError("format must be json or csv");
  SigmaParams<double> p(cfg.sigma, cfg.s);
  if (cfg.N % 2 == 1 && p.sigma() < 0) throw ValidationError("N must be even when sigma < 0");
  return p;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) throw io::IoError("cannot create output directory '" + cfg.out + "': " + ec.message());
  return (std::filesystem::path(cfg.out) / name).string();
}

/// "0,1,2", "0..5" or a mix such as "0..3,8".
std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  auto number = [&](const std::string& t) -> std::size_t {
    std::size_t used = 0;
    long v = -1;
    try {
      v = std::stol(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size() || v < 0) throw ValidationError("bad index '" + t + "' in list '" + text + "'");
    return static_cast<std::size_t>(v);
  };
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    const std::size_t dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(number(item));
    } else {
      const std::size_t a = number(item.substr(0, dots)), b = number(item.substr(dots + 2));
      if (b < a) throw ValidationError("empty range '" + item + "'");
      for (std::size_t k = a; k <= b; ++k) out.push_back(k);
    }
    pos = comma + 1;
  }
  return out;
}

std::vector<double> display_grid(double E, int n) {
  // cell centres: symmetric and never exactly 0
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = -E + (i + 0.5) * 2 * E / n;
  return x;
}

int cmd_basis(const RunConfig& cfg, const std::string& klist, int points) {
  const auto p = params_of(cfg);
  const auto ks = parse_index_list(klist);
  for (std::size_t k : ks) {
    const double E = cfg.grid_extent_factor * std::max(turning_point(k, p), 1.0);
    const auto xs = display_grid(E, points);
    std::string csv = "x,phi,xi\n";
    for (double x : xs)
      csv += io::fmt(x) + "," + io::fmt(eval_phi(k, x, p)) + "," + io::fmt(eval_xi(k, x, p)) + "\n";
    const auto path = out_path(cfg, "basis_k" + std::to_string(k) + ".csv");
    io::write_file(path, csv);
    std::cout << path << "\n";
  }
  return ok;
}

CoeffVector<double> builtin_transform(const std::string& fn, std::size_t K, const SigmaParams<double>& p,
                                      std::size_t N) {
  if (fn.rfind("phi", 0) == 0) {
    const auto k = parse_index_list(fn.substr(3));
    if (k.size() != 1) throw ValidationError("--fn phiK takes a single index");
    if (k[0] > K) throw ValidationError("--fn " + fn + " needs K >= " + std::to_string(k[0]));
    return analyze([&](double x) { return eval_phi(k[0], x, p); }, K, p, N);
  }
  if (fn == "gauss") return analyze([](double x) { return std::exp(-x * x); }, K, p, N);
  throw ValidationError("unknown built-in function '" + fn + "' (phiK or gauss)");
}

int cmd_transform(const RunConfig& cfg, const std::string& fn, const std::string& input, bool inverse,
                  bool strict, const std::string& parity, int points) {
  const auto p = params_of(cfg);
  if (inverse) {
    if (input.empty()) throw ValidationError("--inverse needs --input coefficient JSON");
    const auto c = io::coeffs_from_json_text(io::read_file(input));
    const double E = cfg.grid_extent_factor * turning_point(c.order(), c.params);
    const auto g = synthesize(c, display_grid(E, points));
    const auto path = out_path(cfg, "samples.csv");
    io::write_file(path, io::columns_to_csv("x", "f", g.nodes, g.values));
    std::cout << path << "\n";
    return ok;
  }
  if (fn.empty() == input.empty()) throw ValidationError("transform needs exactly one of --fn or --input");
  CoeffVector<double> c = fn.empty() ? [&] {
    auto g = io::read_grid_csv(input);
    if (!parity.empty()) g.parity = parse_parity(parity);
    return analyze(g, cfg.K, p, cfg.N);
  }()
                                     : builtin_transform(fn, cfg.K, p, cfg.N);
  if (!parity.empty()) {
    const auto par = parse_parity(parity);
    if (par) c = project(c, *par);
  } else {
    detect_parity(c);
  }
  const auto path = out_path(cfg, cfg.format == "csv" ? "coeffs.csv" : "coeffs.json");
  io::write_file(path, cfg.format == "csv" ? io::coeffs_to_csv(c) : io::dump(io::to_json(c)) + "\n");
  std::cout << path << "\n";
  if (c.truncation_warning) {
    std::cerr << "warning: spectrum not resolved at K=" << cfg.K << " (trailing coefficients above 1e-8)\n";
    if (strict) return numerical;
  }
  return ok;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite, std::size_t trials) {
  VerifyConfig v;
  v.sigma = cfg.sigma;
  v.s = cfg.s;
  v.K = cfg.K;
  v.N = cfg.N;
  v.grid_extent_factor = cfg.grid_extent_factor;
  v.seed = cfg.seed;
  v.trials = trials;
  params_of(cfg);
  const json report = run_suite(suite, v);
  const std::string text = io::dump(report) + "\n";
  std::cout << text;
  if (!cfg.out.empty() && cfg.out != ".") io::write_file(out_path(cfg, "verify_" + suite + ".json"), text);
  return report["pass"].get<bool>() ? ok : failed_checks;
}

PowerLawProblem<double> problem_of(const RunConfig& cfg, double c1, double c2, const std::string& problem_file,
                                   bool s_given) {
  PowerLawProblem<double> prob{c1, c2, cfg.s};
  if (!problem_file.empty()) {
    json j;
    try {
      j = json::parse(io::read_file(problem_file));
      prob.c1 = j.at("c1").get<double>();
      prob.c2 = j.at("c2").get<double>();
      if (j.contains("s") && !s_given) prob.s = j["s"].get<double>();
    } catch (const json::exception& e) {
      throw io::IoError(problem_file + ": " + e.what());
    }
  }
  if (!(prob.s > 0) || !std::isfinite(prob.s)) throw ValidationError("s must be > 0");
  return prob;
}

int cmd_halfline_extensions(const RunConfig& cfg, const PowerLawProblem<double>& prob) {
  const json j{{"c1", prob.c1}, {"c2", prob.c2}, {"s", prob.s}, {"roots", io::to_json(extension_roots(prob))},
               {"extensions", extensions(prob).size()}};
  const std::string text = io::dump(j) + "\n";
  io::write_file(out_path(cfg, "extensions.json"), text);
  std::cout << text;
  return ok;
}

const HalfLineExtension<double>& pick(const std::vector<HalfLineExtension<double>>& exts, std::size_t which) {
  if (exts.empty()) throw ValidationError("no admissible extension for this (c1, c2)");
  if (which >= exts.size())
    throw ValidationError("--extension " + std::to_string(which) + " out of range (have " +
                          std::to_string(exts.size()) + ")");
  return exts[which];
}

int cmd_halfline_eigen(const RunConfig& cfg, const PowerLawProblem<double>& prob, const std::string& klist,
                       std::size_t which) {
  const auto exts = extensions(prob);
  const auto& ext = pick(exts, which);
  const auto ks = parse_index_list(klist);
  std::vector<double> kk, lam;
  for (std::size_t k : ks) {
    kk.push_back(double(k));
    lam.push_back(ext.eigenvalue(k));
  }
  std::string text;
  std::string name;
  if (cfg.format == "csv") {
    text = "k,lambda\n";
    for (std::size_t i = 0; i < ks.size(); ++i) text += std::to_string(ks[i]) + "," + io::fmt(lam[i]) + "\n";
    name = "eigen.csv";
  } else {
    json rows = json::array();
    for (std::size_t i = 0; i < ks.size(); ++i) rows.push_back({{"k", ks[i]}, {"lambda", lam[i]}});
    text = io::dump(json{{"a", ext.a}, {"sigma", ext.sigma()}, {"s", prob.s}, {"eigenvalues", rows}}) + "\n";
    name = "eigen.json";
  }
  io::write_file(out_path(cfg, name), text);
  std::cout << text;
  return ok;
}

int cmd_halfline_solve(const RunConfig& cfg, const PowerLawProblem<double>& prob, double shift,
                       const std::string& input, std::size_t which) {
  if (input.empty()) throw ValidationError("solve needs --input g.csv");
  const auto exts = extensions(prob);
  const auto& ext = pick(exts, which);
  const auto g = io::read_grid_csv(input);
  const auto sol = solve(ext, g, cfg.K, shift);
  if (sol.slow_decay) std::cerr << "warning: coefficients of g/h decay slowly (|d_K| > 1e-6 max|d|)\n";
  const auto u = sol.on(g.nodes);
  const auto path = out_path(cfg, "u.csv");
  io::write_file(path, io::columns_to_csv("x", "u", u.nodes, u.values));
  std::cout << path << "\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral toolkit for the Dunkl harmonic oscillator"};
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--sigma", cfg.sigma, "Dunkl parameter sigma > -1/2");
  app.add_option("--s", cfg.s, "oscillator scale s > 0");
  app.add_option("--K", cfg.K, "truncation order");
  app.add_option("--N", cfg.N, "quadrature nodes (0: automatic; even when sigma < 0)");
  app.add_option("--grid-extent-factor", cfg.grid_extent_factor, "grid extent in units of the turning point");
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--format", cfg.format, "json or csv");
  app.add_option("--config", cfg.config_path, "JSON config file (flags override it)");
  app.add_option("--out", cfg.out, "output directory");
  app.fallthrough();

  auto* basis = app.add_subcommand("basis", "sample phi_k and xi_k");
  std::string klist = "0";
  int points = 801;
  basis->add_option("--k", klist, "indices, e.g. 0,1,2 or 0..5")->required();
  basis->add_option("--points", points, "samples per function")->check(CLI::PositiveNumber);

  auto* transform = app.add_subcommand("transform", "samples -> coefficients (or back with --inverse)");
  std::string fn, input, parity;
  bool inverse = false, strict = false;
  transform->add_option("--fn", fn, "built-in function: phiK or gauss");
  transform->add_option("--input", input, "CSV of x,f samples (or coefficient JSON with --inverse)");
  transform->add_flag("--inverse", inverse, "coefficients -> samples");
  transform->add_flag("--strict", strict, "fail when the spectrum is not resolved");
  transform->add_option("--parity", parity, "even, odd or mixed");
  transform->add_option("--points", points, "samples for --inverse")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "run invariant suites");
  std::string suite = "all";
  std::size_t trials = 200;
  verify->add_option("--suite", suite, "algebra, embeddings, decay, halfline or all");
  verify->add_option("--trials", trials, "random trials per embedding");

  auto* halfline = app.add_subcommand("halfline", "power-law operators on the half-line");
  double c1 = 0, c2 = 0, shift = 0;
  std::string problem_file;
  std::size_t which = 0;
  halfline->add_option("--c1", c1, "coefficient of -2 x^{-1} d/dx");
  halfline->add_option("--c2", c2, "coefficient of x^{-2}");
  halfline->add_option("--problem", problem_file, "problem JSON {c1, c2, s}");
  halfline->add_option("--extension", which, "index of the extension (sorted by a)");
  halfline->require_subcommand(1);
  auto* h_ext = halfline->add_subcommand("extensions", "list admissible extensions");
  auto* h_eig = halfline->add_subcommand("eigen", "eigenvalue table");
  std::string eig_k = "0..5";
  h_eig->add_option("--k", eig_k, "indices, e.g. 0..5");
  auto* h_solve = halfline->add_subcommand("solve", "(P - shift) u = g");
  h_solve->add_option("--shift", shift, "spectral shift");
  h_solve->add_option("--input", input, "CSV of x,g samples on x > 0")->required();
  halfline->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : validation;
  }

  try {
    merge_config_file(cfg, app);
    if (*basis) return cmd_basis(cfg, klist, points);
    if (*transform) return cmd_transform(cfg, fn, input, inverse, strict, parity, points);
    if (*verify) return cmd_verify(cfg, suite, trials);
    if (*halfline) {
      if (cfg.format != "json" && cfg.format != "csv") throw ValidationError("format must be json or csv");
      const auto prob = problem_of(cfg, c1, c2, problem_file, app.count("--s") > 0);
      if (*h_ext) return cmd_halfline_extensions(cfg, prob);
      if (*h_eig) return cmd_halfline_eigen(cfg, prob, eig_k, which);
      if (*h_solve) return cmd_halfline_solve(cfg, prob, shift, input, which);
    }
  } catch (const io::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return io_failure;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return validation;
  } catch (const SingularPointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return validation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return numerical;
  }
  return ok;
}
