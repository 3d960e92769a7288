#pragma once
// Benchmark configurations for the single-unit and multi-unit studies.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cswitch/harness.hpp"

namespace cswitch {

struct PresetOptions {
  std::size_t n_instances = 20;
  std::size_t n_draws = 50;
  std::uint64_t seed = 1;
  std::size_t m = 30;
  std::size_t h = 2;
  double rho = 0.25;
  double sigma = 1.0;
  double mixing_scale = 30.0;  // the constant in ell = scale * log T
  bool log10 = false;          // base-10 logarithm instead of natural
};

/// Full-scale replication counts (100 instances x 100 draws).
PresetOptions full_scale(PresetOptions opts);

/// ceil(scale * log(x)), at least 1.
std::size_t scaled_log_length(double x, const PresetOptions& opts);

enum class SingleScenario { stationary, nonstationary };

/// HT-OPT, DIM, DIMBI, HT-small and HT-large, one config each.
std::vector<ExperimentConfig> preset_single_unit(std::size_t horizon, SingleScenario scenario,
                                                 const PresetOptions& opts = {});

enum class Scaling { n_eq_t, n_sqrt_t, t_sqrt_n };

/// Pure switchback, pure A/B and clustered switchback on the line graph.
/// `size` is N = T for n_eq_t, T for n_sqrt_t and N for t_sqrt_n.
std::vector<ExperimentConfig> preset_multi_unit(Scaling scaling, std::size_t size, const PresetOptions& opts = {});

std::vector<std::string> preset_names();

/// Configs for a named preset. `horizon` restricts the single-unit presets to
/// one T (and is rejected by the multi-unit ones).
std::vector<ExperimentConfig> named_preset(const std::string& name, const PresetOptions& opts = {},
                                           std::optional<std::size_t> horizon = {});

}  // namespace cswitch
