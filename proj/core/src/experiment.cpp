#include "plad/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "plad/diagnostics.hpp"
#include "plad/lasso.hpp"
#include "plad/parallel.hpp"
#include "plad/penalty.hpp"
#include "plad/rng.hpp"

namespace plad {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// FNV-1a, so a cell keeps its random streams when cells are reordered.
std::uint64_t hash_id(const std::string& id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : id) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

CellSpec make_cell(std::string id, std::string row, std::string column, NoiseModel noise) {
  CellSpec cell;
  cell.id = std::move(id);
  cell.row_label = std::move(row);
  cell.column_label = std::move(column);
  cell.noise = noise;
  return cell;
}

void score(MethodOutcome& out, const Coefficients& fit, const Vector& beta,
           const std::vector<Index>& truth) {
  const Vector h = fit.beta - beta;
  out.sq_error = h.squaredNorm();
  out.l2_error = std::sqrt(out.sq_error);
  out.type_i = count_missed(truth, fit.support);
  out.type_ii = count_false_selections(truth, fit.support);
  out.support_size = static_cast<Index>(fit.support.size());
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

constexpr double kTheoremC = 1.1;
constexpr double kTheoremC2 = 1.01;

TheoremCheck theorem_check(const ExperimentConfig& config, const CellSpec& cell,
                           const DesignMatrix& x, double lambda, double l2_error,
                           std::uint64_t seed) {
  TheoremCheck out;
  if (cell.noise.scale == 0.0) return out;  // noiseless: covered by exact recovery
  out.a = certify_scale_parameter(cell.noise);
  if (!(out.a > 0.0)) return out;
  const double c_bar = (kTheoremC - 1.0) / (kTheoremC + 1.0);
  const SparseEigenBounds bounds = sparse_eigen_bounds(x, config.k, 5000, derive_seed(seed, {7}));
  const RestrictedEigenvalues re =
      restricted_eigenvalues(x, config.k, c_bar, 1000, derive_seed(seed, {8}));
  const TheoremBoundReport report = evaluate_theorem_bound(
      config.n, config.p, config.k, kTheoremC, out.a, kTheoremC2, bounds, re, lambda);
  out.measured = true;
  out.eta_l = re.eta_l;
  out.lambda_u = bounds.lambda_u;
  out.error_bound = report.error_bound;
  out.condition_i = report.condition_i_holds;
  out.within_bound = l2_error <= report.error_bound;
  return out;
}

}  // namespace

const char* to_string(ScalePreset preset) noexcept {
  return preset == ScalePreset::Paper ? "paper" : "desk";
}

ScalePreset parse_scale_preset(const std::string& name) {
  if (name == "paper") return ScalePreset::Paper;
  if (name == "desk") return ScalePreset::Desk;
  throw DomainError("unknown preset '" + name + "' (expected paper or desk)");
}

Vector ExperimentConfig::beta() const {
  if (!beta_true.empty()) return Eigen::Map<const Vector>(beta_true.data(), static_cast<Index>(beta_true.size()));
  Vector out = Vector::Zero(p);
  out.head(std::min(k, p)).setConstant(3.0);
  return out;
}

double ExperimentConfig::plad_lambda(const CellSpec& cell) const {
  if (cell.lambda) return *cell.lambda;
  return std::sqrt(cell.penalty_factor * static_cast<double>(n) * std::log(static_cast<double>(p)));
}

double ExperimentConfig::lasso_lambda(const CellSpec& cell) const {
  return lasso_penalty_known_sigma(cell.lasso_sigma, penalty_default(n, p));
}

void ExperimentConfig::validate() const {
  if (n < 1 || p < 2 || k < 1 || k > p) throw DomainError("config: need n >= 1, p >= 2, 1 <= k <= p");
  if (reps < 1) throw DomainError("config: reps must be positive");
  if (!beta_true.empty() && static_cast<Index>(beta_true.size()) != p) {
    throw DomainError("config: beta must have length p");
  }
  std::vector<std::string> ids;
  for (const CellSpec& cell : cells) {
    if (cell.id.empty()) throw DomainError("config: every cell needs an id");
    if (std::find(ids.begin(), ids.end(), cell.id) != ids.end()) {
      throw DomainError("config: duplicate cell id '" + cell.id + "'");
    }
    ids.push_back(cell.id);
    if (!(cell.noise.scale >= 0.0)) throw DomainError("config: noise scale must be >= 0");
    if (cell.lambda && !(*cell.lambda >= 0.0)) throw DomainError("config: lambda must be >= 0");
    if (!(cell.penalty_factor > 0.0)) throw DomainError("config: penalty_factor must be > 0");
    if (!(cell.lasso_sigma >= 0.0)) throw DomainError("config: lasso_sigma must be >= 0");
  }
}

ExperimentConfig preset_config(ScalePreset preset, std::uint64_t seed) {
  ExperimentConfig config;
  config.preset = preset;
  config.seed = seed;
  config.reps = preset == ScalePreset::Paper ? 200 : 50;
  return config;
}

ExperimentConfig table_config(int table, ScalePreset preset, std::uint64_t seed) {
  ExperimentConfig config = preset_config(preset, seed);
  config.table = table;
  switch (table) {
    case 1: {
      const std::pair<const char*, NoiseFamily> noises[] = {{"N(0,1)", NoiseFamily::Gaussian},
                                                            {"t(2)", NoiseFamily::StudentT2},
                                                            {"Cauchy", NoiseFamily::Cauchy}};
      const double factors[] = {1.5, 2.0, 3.0, 4.0};
      for (const auto& [label, family] : noises) {
        for (int i = 0; i < 4; ++i) {
          CellSpec cell = make_cell(std::string("t1.") + to_string(family) + ".lambda" + std::to_string(i + 1),
                                    label, "lambda" + std::to_string(i + 1), NoiseModel::make(family));
          cell.penalty_factor = factors[i];
          cell.refit = true;
          config.cells.push_back(cell);
        }
      }
      break;
    }
    case 2:
      for (double sigma : {0.0, 0.25, 0.5, 1.0, 3.0}) {
        CellSpec cell = make_cell("t2.sigma" + format_number(sigma), "Gaussian",
                                  "sigma=" + format_number(sigma),
                                  NoiseModel::make(NoiseFamily::Gaussian, sigma));
        cell.lasso = true;
        cell.lasso_sigma = sigma;
        config.cells.push_back(cell);
      }
      break;
    case 3: {
      const std::pair<const char*, NoiseFamily> cases[] = {{"a", NoiseFamily::HeteroGaussian},
                                                           {"b", NoiseFamily::HeteroT2},
                                                           {"c", NoiseFamily::HeteroMixture}};
      for (const auto& [label, family] : cases) {
        CellSpec cell = make_cell(std::string("t3.case_") + label, to_string(family),
                                  std::string("case (") + label + ")", NoiseModel::make(family));
        cell.refit = true;
        config.cells.push_back(cell);
      }
      break;
    }
    default:
      throw DomainError("table must be 1, 2 or 3");
  }
  return config;
}

void apply_config_override(ExperimentConfig& config, const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("config override: ") + e.what());
  }
  if (!doc.is_object()) throw DomainError("config override must be a JSON object");
  try {
    if (doc.contains("n")) config.n = doc["n"].get<Index>();
    if (doc.contains("p")) config.p = doc["p"].get<Index>();
    if (doc.contains("k")) config.k = doc["k"].get<Index>();
    if (doc.contains("reps")) config.reps = doc["reps"].get<int>();
    if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("preset")) {
      config.preset = parse_scale_preset(doc["preset"].get<std::string>());
      if (!doc.contains("reps")) config.reps = preset_config(config.preset).reps;
    }
    if (doc.contains("fixed_design")) config.fixed_design = doc["fixed_design"].get<bool>();
    if (doc.contains("theorem_check")) config.theorem_check = doc["theorem_check"].get<bool>();
    if (doc.contains("beta")) config.beta_true = doc["beta"].get<std::vector<double>>();
    if (doc.contains("tol")) config.solver.tol = doc["tol"].get<double>();
    if (doc.contains("solver")) {
      const auto name = doc["solver"].get<std::string>();
      if (name == "interior-point") config.solver.backend = SolverBackend::InteriorPoint;
      else if (name == "simplex") config.solver.backend = SolverBackend::Simplex;
      else if (name == "tableau") config.solver.backend = SolverBackend::Tableau;
      else throw DomainError("unknown solver '" + name + "'");
    }
    if (doc.value("replace_cells", false)) {
      config.cells.clear();
      config.table = 0;
    }
    if (doc.contains("cells")) {
      for (const auto& patch : doc["cells"]) {
        const auto id = patch.at("id").get<std::string>();
        auto it = std::find_if(config.cells.begin(), config.cells.end(),
                               [&](const CellSpec& c) { return c.id == id; });
        if (it == config.cells.end()) {
          CellSpec fresh;
          fresh.id = id;
          fresh.row_label = id;
          config.cells.push_back(fresh);
          it = std::prev(config.cells.end());
        }
        CellSpec& cell = *it;
        if (patch.contains("row_label")) cell.row_label = patch["row_label"].get<std::string>();
        if (patch.contains("column_label")) cell.column_label = patch["column_label"].get<std::string>();
        if (patch.contains("noise")) {
          const auto& noise = patch["noise"];
          const NoiseFamily family = noise.contains("family")
                                         ? parse_noise_family(noise["family"].get<std::string>())
                                         : cell.noise.family;
          std::optional<double> scale;
          if (noise.contains("params") && noise["params"].contains("scale")) {
            scale = noise["params"]["scale"].get<double>();
          } else if (noise.contains("params") && noise["params"].contains("sigma")) {
            scale = noise["params"]["sigma"].get<double>();
          } else if (family == cell.noise.family) {
            scale = cell.noise.scale;
          }
          cell.noise = NoiseModel::make(family, scale, noise.value("seed", cell.noise.seed));
        }
        if (patch.contains("lambda")) {
          if (patch["lambda"].is_null()) cell.lambda.reset();
          else cell.lambda = patch["lambda"].get<double>();
        }
        if (patch.contains("penalty_factor")) {
          cell.penalty_factor = patch["penalty_factor"].get<double>();
          cell.lambda.reset();
        }
        if (patch.contains("methods")) {
          cell.plad = cell.refit = cell.lasso = false;
          for (const auto& m : patch["methods"]) {
            const auto name = m.get<std::string>();
            if (name == "plad") cell.plad = true;
            else if (name == "refit") cell.plad = cell.refit = true;
            else if (name == "lasso") cell.lasso = true;
            else throw DomainError("unknown method '" + name + "'");
          }
        }
        if (patch.contains("lasso_sigma")) cell.lasso_sigma = patch["lasso_sigma"].get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("config override: ") + e.what());
  }
  config.validate();
}

std::uint64_t replication_seed(const ExperimentConfig& config, const CellSpec& cell, int rep) {
  return derive_seed(config.seed, {hash_id(cell.id), static_cast<std::uint64_t>(rep)});
}

DesignMatrix replication_design(const ExperimentConfig& config, const CellSpec& cell, int rep) {
  const std::uint64_t seed = config.fixed_design
                                 ? derive_seed(config.seed, {0xde5157ULL})
                                 : derive_seed(replication_seed(config, cell, rep), {1});
  Rng rng(seed);
  Matrix raw(config.n, config.p);
  for (Index j = 0; j < config.p; ++j) {
    for (Index i = 0; i < config.n; ++i) raw(i, j) = rng.normal();
  }
  return normalize_columns(raw);
}

ReplicationRecord run_replication(const ExperimentConfig& config, std::size_t cell_index, int rep) {
  const CellSpec& cell = config.cells.at(cell_index);
  ReplicationRecord out;
  out.rep = rep;
  out.seed = replication_seed(config, cell, rep);

  const Vector beta = config.beta();
  std::vector<Index> truth;
  for (Index j = 0; j < beta.size(); ++j) {
    if (std::abs(beta[j]) > kSupportEpsilon) truth.push_back(j);
  }
  const DesignMatrix x = replication_design(config, cell, rep);
  const Vector z = sample(cell.noise, config.n, derive_seed(out.seed, {2, cell.noise.seed}));
  const Vector y = x.values() * beta + z;

  std::optional<Coefficients> plad_fit;
  if (cell.plad) {
    out.plad.ran = true;
    const auto start = Clock::now();
    try {
      const double lambda = config.plad_lambda(cell);
      FitResult fit = fit_plad(x, y, lambda, config.solver);
      out.plad.seconds = seconds_since(start);
      out.plad.status = to_string(fit.status);
      out.plad.kkt_gap = fit.kkt_gap;
      score(out.plad, fit.coefficients, beta, truth);
      out.plad.ok = true;
      plad_fit = std::move(fit.coefficients);
      if (config.theorem_check) {
        out.theorem = theorem_check(config, cell, x, lambda, out.plad.l2_error, out.seed);
      }
    } catch (const std::exception& e) {
      out.plad.seconds = seconds_since(start);
      out.plad.error = e.what();
    }
  }
  if (cell.refit) {
    out.refit.ran = true;
    const auto start = Clock::now();
    try {
      if (!plad_fit) throw Error("no PLAD fit to refit");
      FitResult fit = refit_on_support(x, y, plad_fit->support, config.solver);
      out.refit.seconds = seconds_since(start);
      out.refit.status = fit.warnings.empty() ? to_string(fit.status) : fit.warnings.front();
      out.refit.kkt_gap = fit.kkt_gap;
      score(out.refit, fit.coefficients, beta, truth);
      out.refit.ok = true;
    } catch (const std::exception& e) {
      out.refit.seconds = seconds_since(start);
      out.refit.error = e.what();
    }
  }
  if (cell.lasso) {
    out.lasso.ran = true;
    const auto start = Clock::now();
    try {
      LassoFit fit = fit_lasso(x, y, config.lasso_lambda(cell));
      out.lasso.seconds = seconds_since(start);
      out.lasso.status = to_string(fit.status);
      out.lasso.kkt_gap = fit.kkt_gap;
      score(out.lasso, fit.coefficients, beta, truth);
      out.lasso.ok = true;
    } catch (const std::exception& e) {
      out.lasso.seconds = seconds_since(start);
      out.lasso.error = e.what();
    }
  }
  return out;
}

std::optional<double> CellReport::metric(const std::string& name) const {
  for (const auto& [key, value] : metrics) {
    if (key == name) return value;
  }
  return std::nullopt;
}

const CellReport* ExperimentReport::cell(const std::string& id) const {
  for (const CellReport& c : cells) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

bool ExperimentReport::complete() const {
  return std::all_of(cells.begin(), cells.end(), [](const CellReport& c) { return c.failures == 0; });
}

void aggregate(CellReport& cell) {
  cell.metrics.clear();
  cell.failures = 0;
  auto summarize = [&](const std::string& prefix, MethodOutcome ReplicationRecord::*member,
                       bool median_only) {
    std::vector<double> sq, l2, type_i, type_ii, secs;
    bool ran = false;
    for (const ReplicationRecord& r : cell.replications) {
      const MethodOutcome& m = r.*member;
      if (!m.ran) continue;
      ran = true;
      if (!m.ok) {
        ++cell.failures;
        continue;
      }
      sq.push_back(m.sq_error);
      l2.push_back(m.l2_error);
      type_i.push_back(static_cast<double>(m.type_i));
      type_ii.push_back(static_cast<double>(m.type_ii));
      secs.push_back(m.seconds);
    }
    if (!ran) return;
    cell.metrics.emplace_back(prefix + ".completed", static_cast<double>(sq.size()));
    if (sq.empty()) return;
    if (!median_only) {
      cell.metrics.emplace_back(prefix + ".mean_sq_error", mean_of(sq));
      cell.metrics.emplace_back(prefix + ".mean_l2_error", mean_of(l2));
    }
    cell.metrics.emplace_back(prefix + ".median_sq_error", median_of(sq));
    if (median_only) cell.metrics.emplace_back(prefix + ".mean_sq_error", mean_of(sq));
    cell.metrics.emplace_back(prefix + ".mean_type_i", mean_of(type_i));
    cell.metrics.emplace_back(prefix + ".mean_type_ii", mean_of(type_ii));
    cell.metrics.emplace_back(prefix + ".mean_seconds", mean_of(secs));
  };
  summarize("plad", &ReplicationRecord::plad, false);
  summarize("refit", &ReplicationRecord::refit, true);
  summarize("lasso", &ReplicationRecord::lasso, false);

  int measured = 0;
  int violations = 0;
  double worst_ratio = 0.0;
  for (const ReplicationRecord& r : cell.replications) {
    if (!r.theorem.measured) continue;
    ++measured;
    if (!r.theorem.within_bound) ++violations;
    worst_ratio = std::max(worst_ratio, r.plad.l2_error / r.theorem.error_bound);
  }
  if (measured > 0) {
    cell.metrics.emplace_back("theorem.measured", measured);
    cell.metrics.emplace_back("theorem.violations", violations);
    cell.metrics.emplace_back("theorem.max_error_to_bound", worst_ratio);
  }
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto start = Clock::now();
  ExperimentReport report;
  report.config = {config.table, to_string(config.preset), config.n, config.p, config.k,
                   config.reps, config.seed, config.fixed_design, config.theorem_check, {}};
  const Vector beta = config.beta();
  report.config.beta_true.assign(beta.data(), beta.data() + beta.size());

  const std::size_t reps = static_cast<std::size_t>(config.reps);
  std::vector<ReplicationRecord> records(config.cells.size() * reps);
  parallel_for(records.size(), [&](std::size_t job) {
    records[job] = run_replication(config, job / reps, static_cast<int>(job % reps));
  });

  for (std::size_t c = 0; c < config.cells.size(); ++c) {
    const CellSpec& spec = config.cells[c];
    CellReport cell;
    cell.id = spec.id;
    cell.row_label = spec.row_label;
    cell.column_label = spec.column_label;
    cell.noise_family = to_string(spec.noise.family);
    cell.noise_scale = spec.noise.scale;
    cell.lambda = spec.plad ? config.plad_lambda(spec) : 0.0;
    cell.lasso_lambda = spec.lasso ? config.lasso_lambda(spec) : 0.0;
    cell.replications.assign(records.begin() + static_cast<std::ptrdiff_t>(c * reps),
                             records.begin() + static_cast<std::ptrdiff_t>((c + 1) * reps));
    aggregate(cell);
    report.cells.push_back(std::move(cell));
  }
  report.seconds = seconds_since(start);
  return report;
}

ExperimentReport run_table(int table, ScalePreset preset, std::uint64_t seed) {
  return run_experiment(table_config(table, preset, seed));
}

}  // namespace plad
