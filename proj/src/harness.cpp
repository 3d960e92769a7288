#include "cswitch/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <thread>

#include "cswitch/error.hpp"
#include "cswitch/estimators.hpp"
#include "cswitch/generators.hpp"
#include "cswitch/rng.hpp"

namespace cswitch {

namespace {

const char* const kGenerators[] = {"stationary", "nonstationary", "multi_unit"};
const char* const kClusterings[] = {"singleton", "whole", "line_segments", "lattice"};
const char* const kEstimators[] = {"ht", "dim", "dimbi"};

template <std::size_t K>
bool one_of(const std::string& s, const char* const (&names)[K]) {
  return std::find(std::begin(names), std::end(names), s) != std::end(names);
}

std::size_t default_ell_opt(std::size_t horizon) {
  return static_cast<std::size_t>(std::ceil(30.0 * std::log(static_cast<double>(horizon))));
}

// Runs fn(k) for k in [0, count) on up to `workers` threads.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const auto k = next.fetch_add(1);
        if (k >= count || failed.load()) return;
        try {
          fn(k);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct Estimate {
  bool ok = false;
  double value = 0.0;
  double retained = 0.0;
};

}  // namespace

void validate(const ExperimentConfig& cfg) {
  const auto& in = cfg.instance;
  require(one_of(in.generator, kGenerators), "unknown generator '" + in.generator + "'");
  require(in.n_units >= 1 && in.horizon >= 1, "N and T must be >= 1");
  require(in.generator == "multi_unit" || in.generator == "stationary" || in.n_units == 1,
          "the nonstationary generator is single-unit");
  require(in.rho >= 0.0 && in.rho < 1.0, "rho must lie in [0, 1)");
  require(in.sigma >= 0.0, "sigma must be >= 0");
  require(one_of(cfg.design.clustering, kClusterings), "unknown clustering '" + cfg.design.clustering + "'");
  require(cfg.design.block_length >= 1, "block length must be >= 1");
  require(cfg.design.width >= 1, "cluster width must be >= 1");
  if (cfg.design.clustering == "lattice") {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(in.n_units))));
    require(side * side == in.n_units, "lattice clustering needs a square number of units");
  }
  require(!cfg.estimators.empty(), "at least one estimator required");
  for (const auto& e : cfg.estimators) {
    require(one_of(e.kind, kEstimators), "unknown estimator '" + e.kind + "'");
    require(e.delta >= 0.0 && e.delta < 1.0, "delta must lie in [0, 1)");
    require(e.kind != "dimbi" || e.burn_in < cfg.design.block_length, "burn-in must be below the block length");
  }
  require(cfg.n_instances >= 1 && cfg.n_draws >= 1, "replication counts must be >= 1");
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json est = nlohmann::json::array();
  for (const auto& e : cfg.estimators) {
    est.push_back({{"kind", e.kind}, {"label", e.label}, {"r", e.radius}, {"delta", e.delta}, {"b", e.burn_in}});
  }
  const auto& in = cfg.instance;
  return {{"scenario", cfg.scenario},
          {"instance",
           {{"generator", in.generator},
            {"N", in.n_units},
            {"T", in.horizon},
            {"m", in.m},
            {"h", in.h},
            {"rho", in.rho},
            {"ell_opt", in.ell_opt},
            {"sigma", in.sigma},
            {"clamp", in.clamp}}},
          {"design", {{"clustering", cfg.design.clustering}, {"width", cfg.design.width}, {"ell", cfg.design.block_length}}},
          {"estimators", est},
          {"n_instances", cfg.n_instances},
          {"n_draws", cfg.n_draws},
          {"seed", cfg.seed}};
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  try {
    ExperimentConfig cfg;
    cfg.scenario = doc.value("scenario", std::string("custom"));
    if (doc.contains("instance")) {
      const auto& j = doc.at("instance");
      auto& in = cfg.instance;
      in.generator = j.value("generator", in.generator);
      in.n_units = j.value("N", in.n_units);
      in.horizon = j.value("T", in.horizon);
      in.m = j.value("m", in.m);
      in.h = j.value("h", in.h);
      in.rho = j.value("rho", in.rho);
      in.ell_opt = j.value("ell_opt", in.ell_opt);
      in.sigma = j.value("sigma", in.sigma);
      in.clamp = j.value("clamp", in.clamp);
    }
    if (doc.contains("design")) {
      const auto& j = doc.at("design");
      cfg.design.clustering = j.value("clustering", cfg.design.clustering);
      cfg.design.width = j.value("width", cfg.design.width);
      cfg.design.block_length = j.value("ell", cfg.design.block_length);
    }
    for (const auto& j : doc.value("estimators", nlohmann::json::array())) {
      EstimatorSpec e;
      e.kind = j.value("kind", e.kind);
      e.label = j.value("label", e.kind);
      e.radius = j.value("r", e.radius);
      e.delta = j.value("delta", e.delta);
      e.burn_in = j.value("b", e.burn_in);
      cfg.estimators.push_back(e);
    }
    cfg.n_instances = doc.value("n_instances", cfg.n_instances);
    cfg.n_draws = doc.value("n_draws", cfg.n_draws);
    cfg.seed = doc.value("seed", cfg.seed);
    validate(cfg);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
}

std::vector<ExperimentConfig> configs_from_json(const nlohmann::json& doc) {
  require(doc.is_object(), "config must be a JSON object");
  std::vector<ExperimentConfig> out;
  if (doc.contains("experiments")) {
    require(doc.at("experiments").is_array(), "'experiments' must be an array");
    for (const auto& j : doc.at("experiments")) out.push_back(config_from_json(j));
  } else {
    out.push_back(config_from_json(doc));
  }
  return out;
}

std::vector<ExperimentConfig> load_configs(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open config file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("cannot parse " + path + ": " + e.what());
  }
  return configs_from_json(doc);
}

Instance make_instance(const InstanceSpec& spec, std::uint64_t master_seed, std::size_t index) {
  Rng rng = make_rng(master_seed, {index});
  GeneratorOptions opts{spec.sigma, spec.clamp};
  if (spec.generator == "stationary") return stationary_instance(spec.n_units, spec.horizon, spec.m, rng, opts);
  if (spec.generator == "nonstationary") {
    const auto ell = spec.ell_opt == 0 ? default_ell_opt(spec.horizon) : spec.ell_opt;
    return nonstationary_single_instance(spec.horizon, spec.m, std::max<std::size_t>(ell, 1), spec.rho, rng, opts);
  }
  if (spec.generator == "multi_unit") return multi_unit_instance(spec.n_units, spec.horizon, spec.m, spec.h, rng, opts);
  throw ValidationError("unknown generator '" + spec.generator + "'");
}

Clustering make_clustering(const DesignSpec& spec, std::size_t n_units) {
  if (spec.clustering == "singleton") return singleton_clustering(n_units);
  if (spec.clustering == "whole") return whole_clustering(n_units);
  if (spec.clustering == "line_segments") return line_segment_clustering(n_units, spec.width);
  if (spec.clustering == "lattice") {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n_units))));
    require(side * side == n_units, "lattice clustering needs a square number of units");
    return lattice_uniform_clustering(side, spec.width);
  }
  throw ValidationError("unknown clustering '" + spec.clustering + "'");
}

ExposureSpec make_exposure_spec(const DesignSpec& design, const EstimatorSpec& est, std::size_t n_units) {
  return ExposureSpec{est.radius, Fraction::from_double(est.delta), design.block_length,
                      make_clustering(design, n_units)};
}

ReplicationReport run_experiment(const ExperimentConfig& cfg, std::size_t workers) {
  validate(cfg);
  const auto n_est = cfg.estimators.size();
  const auto n_units = cfg.instance.n_units;
  const auto horizon = cfg.instance.horizon;

  std::vector<std::optional<Instance>> instances(cfg.n_instances);
  std::vector<double> gates(cfg.n_instances);
  parallel_for(cfg.n_instances, workers, [&](std::size_t k) {
    instances[k].emplace(make_instance(cfg.instance, cfg.seed, k));
    gates[k] = gate_oracle(*instances[k]);
  });

  const auto pi = make_clustering(cfg.design, n_units);
  const TimeBlocks blocks(horizon, cfg.design.block_length);
  const auto& graph = instances[0]->graph();
  std::vector<std::optional<ExposureSpec>> specs(n_est);
  std::vector<std::optional<ExposureProbabilities>> probs(n_est);
  for (std::size_t e = 0; e < n_est; ++e) {
    if (cfg.estimators[e].kind != "ht") continue;
    specs[e] = make_exposure_spec(cfg.design, cfg.estimators[e], n_units);
    probs[e].emplace(graph, *specs[e], horizon);
  }

  const auto n_cells = cfg.n_instances * cfg.n_draws;
  std::vector<Estimate> results(n_cells * n_est);
  parallel_for(n_cells, workers, [&](std::size_t cell) {
    const auto k = cell / cfg.n_draws;
    const auto d = cell % cfg.n_draws;
    Rng rng = make_rng(cfg.seed, {k, d});
    const auto w = sample_switchback(pi, blocks, rng);
    const auto panel = simulate_panel(*instances[k], w, rng);
    for (std::size_t e = 0; e < n_est; ++e) {
      const auto& spec = cfg.estimators[e];
      Estimate& out = results[cell * n_est + e];
      try {
        if (spec.kind == "ht") {
          const auto r = ht_truncated(panel, graph, *specs[e], *probs[e]);
          out = {true, r.delta_hat, r.retained_fraction};
        } else {
          const auto r = dimbi(panel, cfg.design.block_length, spec.kind == "dim" ? 0 : spec.burn_in);
          out = {true, r.delta_hat,
                 static_cast<double>(r.n_treated_used + r.n_control_used) / static_cast<double>(n_units * horizon)};
        }
      } catch (const EstimatorUndefined&) {
        out = {};
      }
    }
  });

  ReplicationReport report;
  report.configs.push_back(cfg);
  double gate_mean = 0.0;
  for (double g : gates) gate_mean += g;
  gate_mean /= static_cast<double>(cfg.n_instances);

  for (std::size_t e = 0; e < n_est; ++e) {
    const auto& spec = cfg.estimators[e];
    double sum = 0.0, sum_sq = 0.0, retained = 0.0;
    std::size_t used = 0;
    for (std::size_t cell = 0; cell < n_cells; ++cell) {
      const auto& r = results[cell * n_est + e];
      if (!r.ok) continue;
      const double err = r.value - gates[cell / cfg.n_draws];
      sum += err;
      sum_sq += err * err;
      retained += r.retained;
      ++used;
    }
    ReportRow row;
    row.scenario = cfg.scenario;
    row.estimator = spec.label.empty() ? spec.kind : spec.label;
    row.n_units = n_units;
    row.horizon = horizon;
    row.block_length = cfg.design.block_length;
    row.radius = spec.kind == "ht" ? spec.radius : 0;
    row.burn_in = spec.kind == "dimbi" ? spec.burn_in : 0;
    row.n_instances = cfg.n_instances;
    row.n_draws = cfg.n_draws;
    row.gate = gate_mean;
    row.dropped_draws = n_cells - used;
    row.n_effective = used;
    row.seed = cfg.seed;
    if (used == 0) {
      row.mse = row.bias = row.variance = row.bias_ci95 = row.retained_frac = std::nan("");
    } else {
      const double n = static_cast<double>(used);
      row.mse = sum_sq / n;
      row.bias = sum / n;
      row.variance = row.mse - row.bias * row.bias;
      row.bias_ci95 = used > 1 ? 1.96 * std::sqrt(std::max(0.0, row.variance) / (n - 1.0)) : 0.0;
      row.retained_frac = retained / n;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

ReplicationReport run_experiments(const std::vector<ExperimentConfig>& cfgs, std::size_t workers) {
  ReplicationReport all;
  for (const auto& cfg : cfgs) {
    auto r = run_experiment(cfg, workers);
    all.rows.insert(all.rows.end(), r.rows.begin(), r.rows.end());
    all.configs.insert(all.configs.end(), r.configs.begin(), r.configs.end());
  }
  return all;
}

double loglog_slope(const std::vector<std::pair<double, double>>& points) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : points) {
    require(x > 0.0 && y > 0.0, "log-log fit needs positive values");
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(points.size());
  const double denom = n * sxx - sx * sx;
  require(points.size() >= 2 && denom > 1e-12 * std::max(1.0, n * sxx), "log-log fit needs two distinct x values");
  return (n * sxy - sx * sy) / denom;
}

void write_csv(std::ostream& out, const ReplicationReport& report) {
  out << "scenario,estimator,N,T,ell,r,b,n_instances,n_draws,gate,mse,bias,bias_ci95,variance,retained_frac,"
         "dropped_draws,seed\n";
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::string(buf);
  };
  for (const auto& r : report.rows) {
    out << r.scenario << ',' << r.estimator << ',' << r.n_units << ',' << r.horizon << ',' << r.block_length << ','
        << r.radius << ',' << r.burn_in << ',' << r.n_instances << ',' << r.n_draws << ',' << num(r.gate) << ','
        << num(r.mse) << ',' << num(r.bias) << ',' << num(r.bias_ci95) << ',' << num(r.variance) << ','
        << num(r.retained_frac) << ',' << r.dropped_draws << ',' << r.seed << '\n';
  }
}

void emit_results(const ReplicationReport& report, const std::string& path) {
  std::ofstream csv(path, std::ios::binary);
  require(static_cast<bool>(csv), "cannot write " + path);
  write_csv(csv, report);
  csv.close();
  require(!csv.fail(), "error writing " + path);

  nlohmann::json doc = nlohmann::json::array();
  for (const auto& cfg : report.configs) doc.push_back(to_json(cfg));
  std::ofstream side(path + ".config.json", std::ios::binary);
  require(static_cast<bool>(side), "cannot write " + path + ".config.json");
  side << nlohmann::json{{"experiments", doc}}.dump(2) << '\n';
}

}  // namespace cswitch
