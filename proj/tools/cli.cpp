// gamow: batch front-end for Jordan-chain resonance states, density
// operators, line shapes and pole fits. Exit codes: 0 ok, 2 usage or domain
// error, 3 I/O failure, 4 numerical failure.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gamow/density.hpp"
#include "gamow/fitting.hpp"
#include "gamow/io.hpp"
#include "gamow/lineshape.hpp"
#include "gamow/semigroup.hpp"

namespace {

using gamow::ErrorCode;
using gamow::io::json;

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kIo = 3;
constexpr int kNumerical = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return kIo;
    case ErrorCode::NonConvergence:
    case ErrorCode::IllConditioned:
    case ErrorCode::AllFitsFailed:
    case ErrorCode::NonFinite:
    case ErrorCode::Overflow: return kNumerical;
    default: return kUsage;
  }
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
    return;
  }
  gamow::io::write_text_file(out_path, content);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    std::size_t used = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError("malformed number '" + item + "' in list '" + text + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(v)) {
      throw UsageError("malformed number '" + item + "' in list '" + text + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- evolve

struct EvolveArgs {
  double er = 0.0, gamma = 0.0, t_max = 0.0;
  int order = 1, k = 0, steps = 100;
  std::string out;
};

int cmd_evolve(const EvolveArgs& a) {
  if (a.t_max < 0.0) throw UsageError("--t-max must satisfy t >= 0 (evolution is a forward semigroup)");
  const gamow::ComplexPole pole(a.er, a.gamma, a.order);
  if (a.k < 0 || a.k >= a.order) throw UsageError("--k must satisfy 0 <= k < order");
  const gamow::TimeGrid grid = gamow::TimeGrid::span(a.t_max, a.steps);

  std::string csv = "t";
  for (int i = 0; i < a.order; ++i) {
    csv += ",re_c" + std::to_string(i) + ",im_c" + std::to_string(i);
  }
  csv += '\n';
  for (const double t : grid.times()) {
    const gamow::GamowState s = gamow::evolve_ket(pole, a.k, t);
    std::vector<double> row{t};
    for (int i = 0; i < a.order; ++i) {
      row.push_back(s[i].real());
      row.push_back(s[i].imag());
    }
    csv += gamow::io::csv_row(row);
  }
  emit(a.out, csv);
  return kOk;
}

// --------------------------------------------------------------- density

struct DensityArgs {
  double er = 0.0, gamma = 0.0, t_max = 0.0, tol = 1e-10;
  int order = 1, n = 0, steps = 100;
  std::string out;
};

int cmd_density(const DensityArgs& a) {
  if (a.t_max < 0.0) throw UsageError("--t-max must satisfy t >= 0 (evolution is a forward semigroup)");
  const gamow::ComplexPole pole(a.er, a.gamma, a.order);
  if (a.n < 0 || a.n >= a.order) throw UsageError("--n must satisfy 0 <= n < order");
  const gamow::TimeGrid grid = gamow::TimeGrid::span(a.t_max, a.steps);
  const gamow::GamowOperator w0 = gamow::build_density(pole, a.n);
  const double norm0 = w0.matrix().norm();

  std::string csv = "t,frobenius_norm,norm_ratio,max_deviation\n";
  for (const double t : grid.times()) {
    const gamow::GamowOperator wt = gamow::evolve_density(w0, t);
    const double norm = wt.matrix().norm();
    const double dev = gamow::max_abs(std::exp(a.gamma * t) * wt.matrix() - w0.matrix());
    csv += gamow::io::csv_row({t, norm, norm / norm0, dev});
  }
  const gamow::ExponentialCheck check = gamow::check_exponential(w0, grid, a.tol);
  emit(a.out, csv);
  std::cout << "is_exponential: " << (check.is_exponential ? "true" : "false") << '\n'
            << "max_deviation: " << gamow::io::format_double(check.max_deviation) << '\n';
  return kOk;
}

// ------------------------------------------------------------ uniqueness

struct UniquenessArgs {
  double er = 1.0, gamma = 1.0, tol = gamow::kDefaultRankTolerance;
  int order = 1;
  std::string out;
};

int cmd_uniqueness(const UniquenessArgs& a) {
  const gamow::ComplexPole pole(a.er, a.gamma, a.order);
  const gamow::ExponentialSubspace space = gamow::exponential_subspace_report(pole, a.tol);

  json report;
  report["order"] = a.order;
  report["tolerance"] = a.tol;
  report["dimension"] = space.basis.size();
  json basis = json::array();
  for (const gamow::GamowOperator& b : space.basis) basis.push_back(gamow::io::operator_to_json(b));
  report["basis_matrices"] = std::move(basis);
  json residuals = json::array();
  for (int m = 0; m < a.order; ++m) {
    const double res = gamow::projection_residual(space.basis, gamow::build_density(pole, m));
    residuals.push_back(json{{"n", m}, {"residual", res}});
  }
  report["projection_residuals"] = std::move(residuals);
  json sv = json::array();
  for (Eigen::Index i = 0; i < space.singular_values.size(); ++i) sv.push_back(space.singular_values(i));
  report["singular_values"] = std::move(sv);
  const std::string text = json_text(report);
  if (!a.out.empty() && a.out != "-") gamow::io::write_text_file(a.out, text);
  std::cout << text;
  return kOk;
}

// ------------------------------------------------------------- lineshape

struct LineshapeArgs {
  double er = 0.0, gamma = 0.0, e_min = 0.0, e_max = 0.0;
  int points = 201;
  std::string weights = "1", out;
};

int cmd_lineshape(const LineshapeArgs& a) {
  const std::vector<double> weights = parse_list(a.weights);
  const gamow::ComplexPole pole(a.er, a.gamma, static_cast<int>(weights.size()));
  const gamow::Series s = gamow::sample_series(
      [&](double e) { return gamow::higher_order_lineshape(e, pole, weights); },
      {a.e_min, a.e_max, a.points}, "lineshape");
  std::ostringstream out;
  gamow::io::write_series_csv(out, s, {"E", "value"});
  emit(a.out, out.str());
  return kOk;
}

// ------------------------------------------------------------------- fit

struct FitArgs {
  std::string data, init, out;
  int max_order = 0, max_iterations = 500;
  double threshold = 0.05;
};

int cmd_fit(const FitArgs& a) {
  gamow::Series data;
  gamow::PoleModel init;
  try {
    data = gamow::io::read_series_csv_file(a.data);
    init = gamow::io::model_from_json(json::parse(gamow::io::read_text_file(a.init)));
  } catch (const gamow::Error& e) {
    throw UsageError(e.what());
  } catch (const json::exception& e) {
    throw UsageError(std::string("init JSON: ") + e.what());
  }
  if (init.poles.empty()) throw UsageError("init model has no poles");
  gamow::FitOptions opts;
  opts.max_iterations = a.max_iterations;

  json report;
  try {
    if (a.max_order > 0) {
      const gamow::OrderSelection sel =
          gamow::select_order(data, init.poles.front().z, a.max_order, a.threshold, opts);
      report = gamow::io::fit_to_json(sel.selected().fit);
      report["selection"] = gamow::io::selection_to_json(sel);
    } else {
      report = gamow::io::fit_to_json(gamow::fit_poles(data, init, opts));
    }
  } catch (const gamow::NonConvergenceError& e) {
    report = gamow::io::fit_to_json(e.partial());
    report["error"] = e.what();
    emit(a.out, json_text(report));
    std::cerr << "gamow fit: " << e.what() << '\n';
    return kNumerical;
  }
  emit(a.out, json_text(report));
  return kOk;
}

// ----------------------------------------------------------------- synth

struct SynthArgs {
  std::string model, out;
  double e_min = 0.0, e_max = 4.0, noise = 0.0;
  int points = 401;
  unsigned seed = 1;
};

int cmd_synth(const SynthArgs& a) {
  gamow::PoleModel model;
  try {
    model = gamow::io::model_from_json(json::parse(gamow::io::read_text_file(a.model)));
  } catch (const gamow::Error& e) {
    throw UsageError(e.what());
  } catch (const json::exception& e) {
    throw UsageError(std::string("model JSON: ") + e.what());
  }
  if (a.noise < 0.0) throw UsageError("--noise must be >= 0");
  std::mt19937_64 rng(a.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  gamow::Series s = gamow::sample_series(
      [&](double e) { return gamow::model_intensity(model, e); }, {a.e_min, a.e_max, a.points});
  if (a.noise > 0.0) {
    for (auto& y : s.y) y *= 1.0 + a.noise * normal(rng);
  }
  std::ostringstream out;
  gamow::io::write_series_csv(out, s, {"E", "intensity"});
  emit(a.out, out.str());
  return kOk;
}

// ---------------------------------------------------------------- config

// Flags given on the command line win over keys from --config: each config
// key becomes "--key value" only when that flag is absent from argv.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (config_path.empty()) return args;

  json cfg;
  try {
    cfg = json::parse(gamow::io::read_text_file(config_path));
  } catch (const std::exception& e) {
    throw UsageError("cannot read config " + config_path + ": " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");

  std::vector<std::string> merged = args;
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    bool present = false;
    for (const std::string& a : args) present = present || a == flag || a.rfind(flag + "=", 0) == 0;
    if (present) continue;
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_number_integer()) {
      text = std::to_string(value.get<long long>());
    } else if (value.is_number()) {
      text = gamow::io::format_double(value.get<double>());
    } else if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_number()) throw UsageError("config list '" + key + "' must hold numbers");
        text += (i ? "," : "") + gamow::io::format_double(value[i].get<double>());
      }
    } else {
      throw UsageError("unsupported config value for '" + key + "'");
    }
    merged.push_back(flag);
    merged.push_back(text);
  }
  return merged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-order Gamow states: evolution, density operators, line shapes, pole fits", "gamow"};
  app.require_subcommand(1);
  std::string config;

  EvolveArgs ev;
  auto* evolve = app.add_subcommand("evolve", "Evolve a Jordan-chain vector |k> and write its coefficients");
  evolve->add_option("--er", ev.er, "Resonance energy E_R")->required();
  evolve->add_option("--gamma", ev.gamma, "Width Gamma (> 0)")->required();
  evolve->add_option("--order", ev.order, "Pole order r")->capture_default_str();
  evolve->add_option("--k", ev.k, "Chain index 0 <= k < r")->capture_default_str();
  evolve->add_option("--t-max", ev.t_max, "Final time (t >= 0)")->required();
  evolve->add_option("--steps", ev.steps, "Number of time intervals")->capture_default_str();
  evolve->add_option("--out", ev.out, "Output CSV (default stdout)");
  evolve->add_option("--config", config, "JSON file with the same keys as the flags");

  DensityArgs de;
  auto* density = app.add_subcommand("density", "Evolve W^(n) and test the exponential decay law");
  density->add_option("--er", de.er, "Resonance energy E_R")->required();
  density->add_option("--gamma", de.gamma, "Width Gamma (> 0)")->required();
  density->add_option("--order", de.order, "Pole order r")->capture_default_str();
  density->add_option("--n", de.n, "Density order 0 <= n < r")->capture_default_str();
  density->add_option("--t-max", de.t_max, "Final time (t >= 0)")->required();
  density->add_option("--steps", de.steps, "Number of time intervals")->capture_default_str();
  density->add_option("--tol", de.tol, "Decay-law tolerance")->capture_default_str();
  density->add_option("--out", de.out, "Output CSV (default stdout)");
  density->add_option("--config", config, "JSON file with the same keys as the flags");

  UniquenessArgs un;
  auto* uniqueness = app.add_subcommand("uniqueness", "Basis of all purely exponentially decaying operators");
  uniqueness->add_option("--order", un.order, "Pole order r")->required();
  uniqueness->add_option("--tol", un.tol, "Relative SVD rank tolerance")->capture_default_str();
  uniqueness->add_option("--er", un.er, "Resonance energy E_R")->capture_default_str();
  uniqueness->add_option("--gamma", un.gamma, "Width Gamma (> 0)")->capture_default_str();
  uniqueness->add_option("--out", un.out, "Also write the JSON report here");
  uniqueness->add_option("--config", config, "JSON file with the same keys as the flags");

  LineshapeArgs ls;
  auto* lineshape = app.add_subcommand("lineshape", "Breit-Wigner plus weighted energy derivatives");
  lineshape->add_option("--er", ls.er, "Resonance energy E_R")->required();
  lineshape->add_option("--gamma", ls.gamma, "Width Gamma (> 0)")->required();
  lineshape->add_option("--weights", ls.weights, "Comma-separated weights w0,w1,...")->capture_default_str();
  lineshape->add_option("--e-min", ls.e_min, "First energy")->required();
  lineshape->add_option("--e-max", ls.e_max, "Last energy")->required();
  lineshape->add_option("--points", ls.points, "Number of samples")->capture_default_str();
  lineshape->add_option("--out", ls.out, "Output CSV (default stdout)");
  lineshape->add_option("--config", config, "JSON file with the same keys as the flags");

  FitArgs fi;
  auto* fit = app.add_subcommand("fit", "Least-squares pole fit of intensity data");
  fit->add_option("--data", fi.data, "CSV with columns E, intensity")->required();
  fit->add_option("--init", fi.init, "Initial pole model JSON")->required();
  fit->add_option("--max-order", fi.max_order, "Select the order among 1..N (0: fit init as given)")
      ->capture_default_str();
  fit->add_option("--threshold", fi.threshold, "Residual plateau threshold")->capture_default_str();
  fit->add_option("--max-iterations", fi.max_iterations, "Iteration cap")->capture_default_str();
  fit->add_option("--out", fi.out, "Output JSON (default stdout)");
  fit->add_option("--config", config, "JSON file with the same keys as the flags");

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "Sample |a(E)|^2 of a pole model, optionally with noise");
  synth->add_option("--model", sy.model, "Pole model JSON")->required();
  synth->add_option("--e-min", sy.e_min, "First energy")->capture_default_str();
  synth->add_option("--e-max", sy.e_max, "Last energy")->capture_default_str();
  synth->add_option("--points", sy.points, "Number of samples")->capture_default_str();
  synth->add_option("--noise", sy.noise, "Relative Gaussian noise level")->capture_default_str();
  synth->add_option("--seed", sy.seed, "Noise seed")->capture_default_str();
  synth->add_option("--out", sy.out, "Output CSV (default stdout)");
  synth->add_option("--config", config, "JSON file with the same keys as the flags");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config(args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);

    if (evolve->parsed()) return cmd_evolve(ev);
    if (density->parsed()) return cmd_density(de);
    if (uniqueness->parsed()) return cmd_uniqueness(un);
    if (lineshape->parsed()) return cmd_lineshape(ls);
    if (fit->parsed()) return cmd_fit(fi);
    if (synth->parsed()) return cmd_synth(sy);
    return kUsage;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "gamow: " << e.what() << '\n';
    return kUsage;
  } catch (const gamow::Error& e) {
    std::cerr << "gamow: " << gamow::to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  }
}
