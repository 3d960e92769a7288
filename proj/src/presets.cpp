#include "cswitch/presets.hpp"

#include <cmath>

#include "cswitch/error.hpp"

namespace cswitch {

PresetOptions full_scale(PresetOptions opts) {
  opts.n_instances = 100;
  opts.n_draws = 100;
  return opts;
}

std::size_t scaled_log_length(double x, const PresetOptions& opts) {
  require(x > 1.0, "log length needs x > 1");
  const double lg = opts.log10 ? std::log10(x) : std::log(x);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(opts.mixing_scale * lg)));
}

namespace {

ExperimentConfig base_config(const std::string& scenario, const PresetOptions& opts) {
  ExperimentConfig cfg;
  cfg.scenario = scenario;
  cfg.n_instances = opts.n_instances;
  cfg.n_draws = opts.n_draws;
  cfg.seed = opts.seed;
  cfg.instance.m = opts.m;
  cfg.instance.h = opts.h;
  cfg.instance.rho = opts.rho;
  cfg.instance.sigma = opts.sigma;
  return cfg;
}

EstimatorSpec ht(const std::string& label, std::size_t r) {
  EstimatorSpec e;
  e.kind = "ht";
  e.label = label;
  e.radius = r;
  return e;
}

}  // namespace

std::vector<ExperimentConfig> preset_single_unit(std::size_t horizon, SingleScenario scenario,
                                                 const PresetOptions& opts) {
  require(horizon >= 64, "single-unit presets need T >= 64");
  const auto ell_opt = scaled_log_length(static_cast<double>(horizon), opts);
  const std::string name = scenario == SingleScenario::stationary ? "stationary" : "nonstationary";

  ExperimentConfig base = base_config(name, opts);
  base.instance.generator = name;
  base.instance.n_units = 1;
  base.instance.horizon = horizon;
  base.instance.ell_opt = scenario == SingleScenario::nonstationary ? ell_opt : 0;
  base.design.clustering = "singleton";

  std::vector<ExperimentConfig> out;
  auto add = [&](std::size_t ell, EstimatorSpec est) {
    auto cfg = base;
    cfg.design.block_length = ell;
    cfg.estimators = {std::move(est)};
    out.push_back(std::move(cfg));
  };
  add(ell_opt, ht("HT-OPT", ell_opt));

  EstimatorSpec dim_spec;
  dim_spec.kind = "dim";
  dim_spec.label = "DIM";
  add(ell_opt, dim_spec);

  EstimatorSpec dimbi_spec;
  dimbi_spec.kind = "dimbi";
  dimbi_spec.label = "DIMBI";
  dimbi_spec.burn_in = ell_opt / 2;
  add(ell_opt, dimbi_spec);

  const std::size_t ell_small = 8;
  add(ell_small, ht("HT-small", 3 * ell_small));
  add((horizon + 7) / 8, ht("HT-large", ell_opt));
  return out;
}

std::vector<ExperimentConfig> preset_multi_unit(Scaling scaling, std::size_t size, const PresetOptions& opts) {
  std::size_t n = size, t = size;
  std::string scenario = "N=T";
  auto exact_root = [](std::size_t x) {
    const auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(x))));
    require(r * r == x, "size must be a perfect square for this scaling");
    return r;
  };
  if (scaling == Scaling::n_sqrt_t) {
    n = exact_root(size);
    scenario = "N=sqrtT";
  } else if (scaling == Scaling::t_sqrt_n) {
    t = exact_root(size);
    scenario = "T=sqrtN";
  }
  require(n >= 1 && t >= 2, "multi-unit presets need N >= 1 and T >= 2");

  const auto ell = scaled_log_length(static_cast<double>(t), opts);
  const auto r = scaled_log_length(static_cast<double>(n) * static_cast<double>(t), opts);

  ExperimentConfig base = base_config(scenario, opts);
  base.instance.generator = "multi_unit";
  base.instance.n_units = n;
  base.instance.horizon = t;

  std::vector<ExperimentConfig> out;
  auto add = [&](const std::string& label, const std::string& clustering, std::size_t width, std::size_t block) {
    auto cfg = base;
    cfg.design.clustering = clustering;
    cfg.design.width = width;
    cfg.design.block_length = block;
    cfg.estimators = {ht(label, r)};
    out.push_back(std::move(cfg));
  };
  add("HT-pure-switchback", "whole", 1, ell);
  add("HT-pure-AB", "line_segments", std::max<std::size_t>(opts.h, 1), t);
  add("HT-clustered", "line_segments", std::max<std::size_t>(opts.h, 1), ell);
  return out;
}

std::vector<std::string> preset_names() {
  return {"mse-single-stationary", "mse-single-nonstationary", "scaling-NT", "scaling-NsqrtT", "scaling-TsqrtN",
          "mse-vs-m"};
}

std::vector<ExperimentConfig> named_preset(const std::string& name, const PresetOptions& opts,
                                           std::optional<std::size_t> horizon) {
  std::vector<std::size_t> single_t{512, 1024, 2048, 4096};
  if (horizon) single_t = {*horizon};
  std::vector<ExperimentConfig> out;
  auto append = [&](std::vector<ExperimentConfig> cfgs) { out.insert(out.end(), cfgs.begin(), cfgs.end()); };

  if (name == "mse-single-stationary" || name == "mse-single-nonstationary") {
    const auto sc = name == "mse-single-stationary" ? SingleScenario::stationary : SingleScenario::nonstationary;
    for (auto t : single_t) append(preset_single_unit(t, sc, opts));
    return out;
  }
  if (name == "mse-vs-m") {
    for (std::size_t m : {10, 30, 100}) {
      auto o = opts;
      o.m = m;
      for (auto t : single_t) {
        auto cfgs = preset_single_unit(t, SingleScenario::stationary, o);
        for (auto& c : cfgs) c.scenario = "stationary-m" + std::to_string(m);
        append(std::move(cfgs));
      }
    }
    return out;
  }
  require(!horizon, "--T applies to single-unit presets only");
  if (name == "scaling-NT") {
    for (std::size_t s : {32, 64, 128}) append(preset_multi_unit(Scaling::n_eq_t, s, opts));
    return out;
  }
  if (name == "scaling-NsqrtT") {
    for (std::size_t s : {256, 1024, 4096}) append(preset_multi_unit(Scaling::n_sqrt_t, s, opts));
    return out;
  }
  if (name == "scaling-TsqrtN") {
    for (std::size_t s : {256, 1024, 4096}) append(preset_multi_unit(Scaling::t_sqrt_n, s, opts));
    return out;
  }
  throw ValidationError("unknown preset '" + name + "'");
}

}  // namespace cswitch
