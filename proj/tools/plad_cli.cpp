#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "plad/csv.hpp"
#include "plad/diagnostics.hpp"
#include "plad/experiment.hpp"
#include "plad/lad_solver.hpp"
#include "plad/lasso.hpp"
#include "plad/noise.hpp"
#include "plad/penalty.hpp"
#include "plad/report.hpp"

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::optional<double> parse_real(const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

plad::SolverBackend parse_backend(const std::string& name) {
  if (name == "interior-point") return plad::SolverBackend::InteriorPoint;
  if (name == "simplex") return plad::SolverBackend::Simplex;
  if (name == "tableau") return plad::SolverBackend::Tableau;
  throw plad::DomainError("unknown solver '" + name + "'");
}

json to_json(const plad::Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const std::vector<plad::Index>& v) {
  json out = json::array();
  for (auto i : v) out.push_back(i);
  return out;
}

// Non-finite numbers become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void emit(const json& doc, const std::string& out) {
  const std::string text = doc.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    plad::write_text_file(out, text);
  }
}

struct Design {
  plad::DesignMatrix x;
  plad::Vector column_scales;  // normalized column = raw column * scale
};

Design load_design(const std::string& path) {
  const plad::Matrix raw = plad::csv::read_matrix(path);
  plad::DesignMatrix x = plad::normalize_columns(raw);
  plad::Vector scales(raw.cols());
  for (plad::Index j = 0; j < raw.cols(); ++j) {
    scales[j] = std::sqrt(static_cast<double>(raw.rows())) / raw.col(j).norm();
  }
  return {std::move(x), std::move(scales)};
}

// ---- fit ----------------------------------------------------------------

struct FitArgs {
  std::string x, y, lambda = "default", method = "plad", solver = "interior-point", out;
  double c = 1.1, alpha = 0.05, q = 3.0, tol = 1e-8;
  std::optional<double> sigma;
  int reps = 1000;
  std::uint64_t seed = 0;
  bool refit = false;
};

int run_fit(const FitArgs& args) {
  const Design design = load_design(args.x);
  const plad::Vector y = plad::csv::read_vector(args.y);
  if (y.size() != design.x.n()) {
    throw plad::DimensionMismatch("y has " + std::to_string(y.size()) + " entries, X has " +
                                  std::to_string(design.x.n()) + " rows");
  }
  const plad::Index n = design.x.n();
  const plad::Index p = design.x.p();
  json doc;
  doc["n"] = n;
  doc["p"] = p;
  doc["method"] = args.method;
  doc["column_scales"] = to_json(design.column_scales);

  const auto numeric = parse_real(args.lambda);
  const auto penalty_start = Clock::now();

  if (args.method == "lasso") {
    double lambda = 0.0;
    json penalty;
    if (numeric) {
      lambda = *numeric;
      penalty["rule"] = "fixed";
    } else {
      if (!args.sigma) throw plad::DomainError("--method lasso needs --sigma or a numeric --lambda");
      lambda = plad::lasso_penalty_known_sigma(*args.sigma, plad::penalty_default(n, p));
      penalty["rule"] = "sigma_times_default";
      penalty["sigma"] = *args.sigma;
    }
    penalty["lambda"] = lambda;
    doc["penalty"] = penalty;
    const double penalty_seconds = seconds_since(penalty_start);
    const auto fit_start = Clock::now();
    const plad::LassoFit fit = plad::fit_lasso(design.x, y, lambda, std::min(args.tol, 1e-10));
    doc["coefficients"] = to_json(fit.coefficients.beta);
    doc["support"] = to_json(fit.coefficients.support);
    doc["objective"] = fit.objective;
    doc["kkt_gap"] = fit.kkt_gap;
    doc["iterations"] = fit.iterations;
    doc["status"] = plad::to_string(fit.status);
    doc["timings"] = {{"penalty_seconds", penalty_seconds}, {"fit_seconds", seconds_since(fit_start)}};
    emit(doc, args.out);
    return fit.status == plad::LassoStatus::Optimal ? 0 : 3;
  }
  if (args.method != "plad") throw plad::DomainError("unknown method '" + args.method + "'");

  plad::PenaltySpec spec;
  spec.c = args.c;
  spec.alpha = args.alpha;
  spec.q = args.q;
  spec.mc_reps = args.reps;
  spec.seed = args.seed;
  if (numeric) {
    spec.rule = plad::PenaltyRule::Fixed;
    spec.fixed_value = *numeric;
  } else {
    spec.rule = plad::parse_penalty_rule(args.lambda);
  }
  const plad::PenaltyChoice choice = plad::choose_penalty(design.x, spec);
  const double penalty_seconds = seconds_since(penalty_start);
  json penalty = {{"rule", plad::to_string(choice.rule)},
                  {"lambda", choice.lambda},
                  {"c", args.c},
                  {"alpha", args.alpha},
                  {"dead_columns", to_json(choice.dead_columns)},
                  {"warnings", choice.warnings}};
  if (choice.a_alpha) penalty["a_alpha"] = *choice.a_alpha;
  doc["penalty"] = penalty;

  plad::SolverOptions options;
  options.tol = args.tol;
  options.backend = parse_backend(args.solver);
  const auto fit_start = Clock::now();
  const plad::FitResult fit = plad::fit_plad(design.x, y, choice.lambda, options);
  const double fit_seconds = seconds_since(fit_start);
  doc["coefficients"] = to_json(fit.coefficients.beta);
  doc["support"] = to_json(fit.coefficients.support);
  doc["objective"] = fit.objective;
  doc["kkt_gap"] = fit.kkt_gap;
  doc["iterations"] = fit.iterations;
  doc["status"] = plad::to_string(fit.status);
  doc["solver"] = plad::to_string(options.backend);
  doc["warnings"] = fit.warnings;
  json timings = {{"penalty_seconds", penalty_seconds}, {"fit_seconds", fit_seconds}};
  int code = fit.status == plad::SolverStatus::IterationLimit ? 3 : 0;
  if (args.refit) {
    const auto refit_start = Clock::now();
    const plad::FitResult refit =
        plad::refit_on_support(design.x, y, fit.coefficients.support, options);
    timings["refit_seconds"] = seconds_since(refit_start);
    doc["refit"] = {{"coefficients", to_json(refit.coefficients.beta)},
                    {"objective", refit.objective},
                    {"kkt_gap", refit.kkt_gap},
                    {"status", plad::to_string(refit.status)}};
    if (refit.status == plad::SolverStatus::IterationLimit) code = 3;
  }
  doc["timings"] = timings;
  emit(doc, args.out);
  return code;
}

// ---- penalty ------------------------------------------------------------

struct PenaltyArgs {
  std::string x, rule = "default";
  double c = 1.1, alpha = 0.05, q = 3.0;
  int reps = 1000;
  std::uint64_t seed = 0;
};

int run_penalty(const PenaltyArgs& args) {
  const Design design = load_design(args.x);
  plad::PenaltySpec spec;
  spec.rule = plad::parse_penalty_rule(args.rule);
  if (spec.rule == plad::PenaltyRule::Fixed) throw plad::DomainError("use fit --lambda <value> for a fixed penalty");
  spec.c = args.c;
  spec.alpha = args.alpha;
  spec.q = args.q;
  spec.mc_reps = args.reps;
  spec.seed = args.seed;
  const plad::PenaltyChoice choice = plad::choose_penalty(design.x, spec);
  json doc = {{"rule", plad::to_string(choice.rule)},
              {"lambda", choice.lambda},
              {"n", design.x.n()},
              {"p", design.x.p()},
              {"c", args.c},
              {"alpha", args.alpha},
              {"a_alpha", plad::a_of_alpha(args.alpha, design.x.p())},
              {"dead_column_count", choice.dead_columns.size()},
              {"dead_columns", to_json(choice.dead_columns)},
              {"warnings", choice.warnings}};
  const plad::MomentCondition moment =
      choice.moment ? *choice.moment : plad::moment_condition(design.x, args.q, args.alpha);
  doc["moment_condition"] = {{"q", moment.q}, {"b", moment.b}, {"admissible", moment.admissible}};
  if (spec.rule == plad::PenaltyRule::MonteCarloQuantile) {
    doc["mc"] = {{"reps", args.reps}, {"seed", args.seed}};
  }
  emit(doc, "");
  return 0;
}

// ---- diagnose -----------------------------------------------------------

struct DiagnoseArgs {
  std::string x, noise = "gaussian", out;
  plad::Index k = 5;
  double c = 1.1, c2 = 1.01;
  std::optional<double> a, lambda, noise_scale;
  std::int64_t samples = 5000, budget = 50000;
  std::uint64_t seed = 0;
};

json to_json(const plad::RestrictedEigenvalues& re) {
  return {{"k", re.k},           {"c_bar", re.c_bar},     {"kappa_l", re.kappa_l},
          {"kappa_u", re.kappa_u}, {"eta_l", re.eta_l},     {"eta_u", re.eta_u},
          {"method", plad::to_string(re.method)}, {"samples", re.samples},
          {"optimistic", re.optimistic}};
}

int run_diagnose(const DiagnoseArgs& args) {
  const Design design = load_design(args.x);
  const plad::DesignMatrix& x = design.x;
  const plad::Index n = x.n();
  const plad::Index p = x.p();
  if (args.k < 1 || args.k > p) throw plad::DomainError("--k must lie in 1..p");
  const plad::RestrictedConeParams cone = plad::RestrictedConeParams::from_c(args.c, args.k);
  const double lambda = args.lambda ? *args.lambda : plad::penalty_default(n, p);

  const plad::NoiseModel noise =
      plad::NoiseModel::make(plad::parse_noise_family(args.noise), args.noise_scale);
  const double a = args.a ? *args.a : plad::certify_scale_parameter(noise);

  const plad::SparseEigenBounds bounds = plad::sparse_eigen_bounds(x, args.k, args.budget, args.seed);
  const plad::RestrictedEigenvalues re =
      plad::restricted_eigenvalues(x, args.k, cone.c_bar, args.samples, args.seed);
  const plad::RestrictedEigenvalues re1 =
      plad::restricted_eigenvalues(x, args.k, 1.0, args.samples, args.seed + 1);

  json doc = {{"n", n}, {"p", p}, {"k", args.k}, {"c", args.c}, {"c_bar", cone.c_bar},
              {"lambda", lambda}};
  doc["noise"] = {{"family", plad::to_string(noise.family)},
                  {"scale", noise.scale},
                  {"a", a},
                  {"a_source", args.a ? "user" : "certified"}};
  doc["sparse_eigenvalues"] = {{"k", bounds.k},
                               {"lambda_u", bounds.lambda_u},
                               {"lambda_l", bounds.lambda_l},
                               {"method", plad::to_string(bounds.method)},
                               {"samples", bounds.samples}};
  doc["restricted_eigenvalues"] = to_json(re);
  doc["restricted_eigenvalues_c_bar_1"] = to_json(re1);
  doc["screening_dead_columns"] = to_json(plad::screening_check(x, lambda));
  try {
    const plad::TheoremBoundReport t =
        plad::evaluate_theorem_bound(n, p, args.k, args.c, a, args.c2, bounds, re, lambda, &re1);
    json theorem = {{"c", t.c},
                    {"c_bar", t.c_bar},
                    {"a", t.a},
                    {"c2", t.c2},
                    {"c1", t.c1},
                    {"lambda", t.lambda},
                    {"condition_lhs", t.condition_lhs},
                    {"condition_rhs", t.condition_rhs},
                    {"condition_i_holds", t.condition_i_holds},
                    {"error_bound", number(t.error_bound)},
                    {"probability_floor", t.probability_floor},
                    {"optimistic", t.optimistic}};
    theorem["noiseless_condition"] =
        t.noiseless_condition ? json(*t.noiseless_condition) : json(nullptr);
    doc["theorem_bound"] = theorem;
  } catch (const plad::NonpositiveEta& e) {
    doc["theorem_bound"] = {{"error", e.what()}};
  }
  emit(doc, args.out);
  return 0;
}

// ---- simulate -----------------------------------------------------------

struct SimulateArgs {
  int table = 0;
  std::string preset = "desk", format = "json", out, config;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
  bool theorem_check = false;
};

int run_simulate(const SimulateArgs& args) {
  const plad::ScalePreset preset = plad::parse_scale_preset(args.preset);
  const std::uint64_t seed = args.seed.value_or(20240601);
  plad::ExperimentConfig config =
      args.table == 0 ? plad::preset_config(preset, seed) : plad::table_config(args.table, preset, seed);
  if (!args.config.empty()) {
    std::ifstream in(args.config);
    if (!in) throw plad::IoError("cannot read " + args.config);
    std::stringstream text;
    text << in.rdbuf();
    plad::apply_config_override(config, text.str());
  }
  if (args.reps) config.reps = *args.reps;
  if (args.seed) config.seed = *args.seed;
  if (args.theorem_check) config.theorem_check = true;
  if (config.cells.empty()) throw plad::DomainError("no cells to run: give --table or a config with cells");
  config.validate();

  const plad::ReportFormat format = plad::parse_report_format(args.format);
  const plad::ExperimentReport report = plad::run_experiment(config);
  const std::string text = plad::render_report(report, format);
  if (args.out.empty()) {
    std::cout << text;
  } else {
    plad::write_text_file(args.out, text);
  }
  for (const auto& cell : report.cells) {
    if (cell.failures > 0) {
      std::cerr << "cell " << cell.id << ": " << cell.failures << " failed replication(s)\n";
    }
  }
  return report.complete() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"L1-penalized least absolute deviation regression"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit PLAD (or the lasso) to CSV data");
  fit_cmd->add_option("--x", fit.x, "Design matrix CSV (columns are normalized)")->required();
  fit_cmd->add_option("--y", fit.y, "Response CSV")->required();
  fit_cmd->add_option("--lambda", fit.lambda,
                      "Penalty value or rule: default|asymptotic|simple|refined|mc")
      ->capture_default_str();
  fit_cmd->add_option("--c", fit.c, "Penalty multiplier")->capture_default_str();
  fit_cmd->add_option("--alpha", fit.alpha, "Penalty level")->capture_default_str();
  fit_cmd->add_option("--q", fit.q, "Moment order for the refined rule")->capture_default_str();
  fit_cmd->add_option("--reps", fit.reps, "Draws for the mc rule")->capture_default_str();
  fit_cmd->add_option("--seed", fit.seed, "Seed for the mc rule")->capture_default_str();
  fit_cmd->add_flag("--refit", fit.refit, "Also refit plain LAD on the selected support");
  fit_cmd->add_option("--tol", fit.tol, "Optimality tolerance")->capture_default_str();
  fit_cmd->add_option("--solver", fit.solver, "interior-point|simplex|tableau")->capture_default_str();
  fit_cmd->add_option("--method", fit.method, "plad|lasso")->capture_default_str();
  fit_cmd->add_option("--sigma", fit.sigma, "Noise level for the lasso penalty sigma*sqrt(2n log p)");
  fit_cmd->add_option("--out", fit.out, "Output JSON path (stdout if omitted)");

  PenaltyArgs penalty;
  auto* penalty_cmd = app.add_subcommand("penalty", "Compute a penalty level");
  penalty_cmd->add_option("--x", penalty.x, "Design matrix CSV")->required();
  penalty_cmd->add_option("--rule", penalty.rule, "default|asymptotic|simple|refined|mc")
      ->capture_default_str();
  penalty_cmd->add_option("--c", penalty.c)->capture_default_str();
  penalty_cmd->add_option("--alpha", penalty.alpha)->capture_default_str();
  penalty_cmd->add_option("--q", penalty.q)->capture_default_str();
  penalty_cmd->add_option("--reps", penalty.reps)->capture_default_str();
  penalty_cmd->add_option("--seed", penalty.seed)->capture_default_str();

  DiagnoseArgs diagnose;
  auto* diagnose_cmd = app.add_subcommand("diagnose", "Design diagnostics and the error bound");
  diagnose_cmd->add_option("--x", diagnose.x, "Design matrix CSV")->required();
  diagnose_cmd->add_option("--k", diagnose.k, "Sparsity level")->capture_default_str();
  diagnose_cmd->add_option("--c", diagnose.c)->capture_default_str();
  diagnose_cmd->add_option("--c2", diagnose.c2, "Probability constant C2 (> 1)")->capture_default_str();
  diagnose_cmd->add_option("--samples", diagnose.samples, "Cone directions sampled")->capture_default_str();
  diagnose_cmd->add_option("--budget", diagnose.budget, "Subset budget for sparse eigenvalues")
      ->capture_default_str();
  diagnose_cmd->add_option("--seed", diagnose.seed)->capture_default_str();
  diagnose_cmd->add_option("--lambda", diagnose.lambda, "Penalty (default sqrt(2 n log p))");
  diagnose_cmd->add_option("--a", diagnose.a, "Noise scale constant (default: certified)");
  diagnose_cmd->add_option("--noise", diagnose.noise, "Noise family for certifying a")
      ->capture_default_str();
  diagnose_cmd->add_option("--noise-scale", diagnose.noise_scale);
  diagnose_cmd->add_option("--out", diagnose.out, "Output JSON path (stdout if omitted)");

  SimulateArgs simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run a seeded simulation study");
  simulate_cmd->add_option("--table", simulate.table, "1, 2 or 3")->check(CLI::Range(1, 3));
  simulate_cmd->add_option("--preset", simulate.preset, "paper|desk")->capture_default_str();
  simulate_cmd->add_option("--reps", simulate.reps);
  simulate_cmd->add_option("--seed", simulate.seed);
  simulate_cmd->add_option("--format", simulate.format, "json|csv|markdown")->capture_default_str();
  simulate_cmd->add_option("--config", simulate.config, "JSON override file");
  simulate_cmd->add_flag("--theorem-check", simulate.theorem_check,
                         "Evaluate the error bound in every replication");
  simulate_cmd->add_option("--out", simulate.out, "Output path (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit_cmd) return run_fit(fit);
    if (*penalty_cmd) return run_penalty(penalty);
    if (*diagnose_cmd) return run_diagnose(diagnose);
    if (*simulate_cmd) return run_simulate(simulate);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
