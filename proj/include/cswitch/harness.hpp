#pragma once
// Seeded replication loops, MSE / bias aggregation and result files.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cswitch/dynamics.hpp"
#include "cswitch/exposure.hpp"

namespace cswitch {

struct InstanceSpec {
  std::string generator = "stationary";  // stationary | nonstationary | multi_unit
  std::size_t n_units = 1;
  std::size_t horizon = 256;
  std::size_t m = 30;
  std::size_t h = 2;
  double rho = 0.25;
  std::size_t ell_opt = 0;  // nonstationary piece length; 0 means ceil(30 ln T)
  double sigma = 1.0;
  bool clamp = false;
};

struct DesignSpec {
  std::string clustering = "singleton";  // singleton | whole | line_segments | lattice
  std::size_t width = 1;                 // segment width, or tile side for lattice
  std::size_t block_length = 1;
};

struct EstimatorSpec {
  std::string kind = "ht";  // ht | dim | dimbi
  std::string label;
  std::size_t radius = 0;
  double delta = 0.0;
  std::size_t burn_in = 0;
};

struct ExperimentConfig {
  std::string scenario;
  InstanceSpec instance;
  DesignSpec design;
  std::vector<EstimatorSpec> estimators;
  std::size_t n_instances = 20;
  std::size_t n_draws = 50;
  std::uint64_t seed = 1;
};

/// Throws ValidationError on unknown constructors, zero counts or
/// inconsistent sizes.
void validate(const ExperimentConfig& cfg);

nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// A config file holds either one experiment object or {"experiments": [...]}.
std::vector<ExperimentConfig> configs_from_json(const nlohmann::json& doc);
std::vector<ExperimentConfig> load_configs(const std::string& path);

/// Instance number k of the config, drawn from seed (master, k). The same
/// instance index gives the same instance across configs.
Instance make_instance(const InstanceSpec& spec, std::uint64_t master_seed, std::size_t index);

Clustering make_clustering(const DesignSpec& spec, std::size_t n_units);

ExposureSpec make_exposure_spec(const DesignSpec& design, const EstimatorSpec& est, std::size_t n_units);

struct ReportRow {
  std::string scenario;
  std::string estimator;
  std::size_t n_units = 0;
  std::size_t horizon = 0;
  std::size_t block_length = 0;
  std::size_t radius = 0;
  std::size_t burn_in = 0;
  std::size_t n_instances = 0;
  std::size_t n_draws = 0;
  double gate = 0.0;  // mean over instances
  double mse = 0.0;
  double bias = 0.0;
  double bias_ci95 = 0.0;
  double variance = 0.0;
  double retained_frac = 0.0;
  std::size_t dropped_draws = 0;
  std::size_t n_effective = 0;
  std::uint64_t seed = 0;
};

struct ReplicationReport {
  std::vector<ReportRow> rows;
  std::vector<ExperimentConfig> configs;
};

/// For each instance: exact GATE once, then n_draws designs, panels and
/// estimates. Draw (k, d) uses seed (master, k, d), and results are folded in
/// (instance, draw) order, so the output does not depend on `workers`.
/// Estimator failures are counted as dropped draws.
ReplicationReport run_experiment(const ExperimentConfig& cfg, std::size_t workers = 1);
ReplicationReport run_experiments(const std::vector<ExperimentConfig>& cfgs, std::size_t workers = 1);

/// OLS slope of ln y on ln x. Throws ValidationError on nonpositive values or
/// fewer than two distinct x.
double loglog_slope(const std::vector<std::pair<double, double>>& points);

void write_csv(std::ostream& out, const ReplicationReport& report);

/// Writes the CSV to `path` and the configs to `path`.config.json.
void emit_results(const ReplicationReport& report, const std::string& path);

}  // namespace cswitch
