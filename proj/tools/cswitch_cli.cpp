// Command-line front end: run experiments, presets and bound checks.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "cswitch/bounds.hpp"
#include "cswitch/error.hpp"
#include "cswitch/exposure.hpp"
#include "cswitch/generators.hpp"
#include "cswitch/harness.hpp"
#include "cswitch/mixing.hpp"
#include "cswitch/presets.hpp"

using namespace cswitch;

namespace {

struct Common {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  bool full_scale = false;
  std::optional<std::size_t> horizon;
};

std::vector<ExperimentConfig> resolve(const Common& c) {
  if (!c.preset.empty() && !c.config.empty()) throw ValidationError("give either --config or --preset, not both");
  std::vector<ExperimentConfig> cfgs;
  if (!c.preset.empty()) {
    PresetOptions opts;
    if (c.full_scale) opts = full_scale(opts);
    if (c.seed) opts.seed = *c.seed;
    cfgs = named_preset(c.preset, opts, c.horizon);
  } else if (!c.config.empty()) {
    cfgs = load_configs(c.config);
    for (auto& cfg : cfgs) {
      if (c.seed) cfg.seed = *c.seed;
      if (c.full_scale) {
        cfg.n_instances = 100;
        cfg.n_draws = 100;
      }
    }
  } else {
    throw ValidationError("a --config or --preset is required");
  }
  return cfgs;
}

int run_and_emit(const Common& c) {
  const auto cfgs = resolve(c);
  const auto report = run_experiments(cfgs, c.workers);
  if (c.out.empty()) {
    write_csv(std::cout, report);
  } else {
    emit_results(report, c.out);
    std::cerr << "wrote " << report.rows.size() << " rows to " << c.out << "\n";
  }
  for (const auto& row : report.rows) {
    if (row.n_effective == 0) {
      std::cerr << "estimator " << row.estimator << " was undefined on every draw\n";
      return 2;
    }
  }
  return 0;
}

int print_gate(const Common& c) {
  std::cout << "scenario,N,T,instance,gate\n";
  for (const auto& cfg : resolve(c)) {
    for (std::size_t k = 0; k < cfg.n_instances; ++k) {
      const auto inst = make_instance(cfg.instance, cfg.seed, k);
      std::printf("%s,%zu,%zu,%zu,%.10g\n", cfg.scenario.c_str(), cfg.instance.n_units, cfg.instance.horizon, k,
                  gate_oracle(inst));
    }
  }
  return 0;
}

int dump_exposure(const Common& c) {
  std::ofstream file;
  if (!c.out.empty()) {
    file.open(c.out);
    if (!file) throw ValidationError("cannot write " + c.out);
  }
  std::ostream& out = c.out.empty() ? std::cout : file;
  for (const auto& cfg : resolve(c)) {
    const auto inst = make_instance(cfg.instance, cfg.seed, 0);
    for (const auto& est : cfg.estimators) {
      if (est.kind != "ht") continue;
      const auto spec = make_exposure_spec(cfg.design, est, cfg.instance.n_units);
      ExposureProbabilities probs(inst.graph(), spec, cfg.instance.horizon);
      out << "# " << cfg.scenario << ' ' << est.label << " ell=" << cfg.design.block_length << " r=" << est.radius
          << " p_min=" << probs.overall_min() << '\n';
      probs.write_csv(out);
    }
  }
  return 0;
}

int verify_bounds(const Common& c) {
  const std::uint64_t seed = c.seed.value_or(1);
  std::ofstream file;
  if (!c.out.empty()) {
    file.open(c.out);
    if (!file) throw ValidationError("cannot write " + c.out);
  }
  std::ostream& out = c.out.empty() ? std::cout : file;
  std::size_t failed = 0, total = 0;
  auto emit = [&](BoundReport r) {
    r.seed = seed;
    ++total;
    failed += !r.passed;
    write_jsonl(out, r);
  };

  const std::size_t m = 3;
  const auto up = clipped_random_walk_kernel(m, 0.9);
  const auto down = clipped_random_walk_kernel(m, 0.1);
  const auto mix = estimate_tmix(up);
  const auto n = 2 * m + 1;

  for (std::size_t window = 5; window <= 20; window += 5) {
    std::vector<const TabularKernel*> a(window + 10, &up), b(window + 10, &up);
    for (std::size_t s = 0; s < 10; ++s) b[s] = &down;
    emit(check_tv_decay(a, b, point_mass(n, m), point_mass(n, m), window, mix));
  }

  Rng rng = make_rng(seed, {0xc0});
  for (int k = 0; k < 50; ++k) emit(check_cond_cov(random_cond_cov_pmf(rng)));

  GeneratorOptions opts{0.0, true};
  Rng gen = make_rng(seed, {0x1d});
  const auto inst = stationary_instance(1, 20, m, gen, opts);
  const TimeBlocks blocks(20, 4);
  const auto all = designs_in_event(singleton_clustering(1), blocks, [](const TreatmentMatrix&) { return true; });
  for (std::size_t lag = 1; lag <= 10; ++lag) {
    emit(check_cov_outcomes(inst, all, 0, 5, 0, 5 + lag, mix.t_mix, rng));
    emit(check_cov_outcomes(inst, all, 0, 5, 0, 5 + lag, mix.t_mix, rng, 0, mix.prefactor));
  }

  // Kernels that contract in one step, where the plain envelope applies.
  const auto contracting = contracting_single_instance(20, m, 0.3, gen, opts);
  const double t_contract = contraction_tmix(contracting.kernels());
  for (std::size_t lag = 1; lag <= 10; ++lag) {
    emit(check_cov_outcomes(contracting, all, 0, 5, 0, 5 + lag, t_contract, rng));
  }
  emit(check_initial_state(inst, point_mass(n, 0), point_mass(n, n - 1), constant_policy(1, 1, 20), 0, mix.t_mix));

  std::cerr << total - failed << "/" << total << " checks passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustered switchback experiments: simulation, estimation and bound checks"};
  app.require_subcommand(1);
  Common c;

  auto add_common = [&](CLI::App* sub, bool allow_preset) {
    sub->add_option("--config", c.config, "JSON experiment config");
    if (allow_preset) {
      sub->add_option("--preset", c.preset, "named preset");
      sub->add_option("--T", c.horizon, "restrict a single-unit preset to one horizon");
    }
    sub->add_option("--seed", c.seed, "master seed (overrides the config)");
    sub->add_option("--out", c.out, "output path (stdout if omitted)");
    sub->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--full-scale", c.full_scale, "100 instances x 100 draws");
  };

  auto* simulate = app.add_subcommand("simulate", "run experiments from a config file or preset");
  add_common(simulate, true);

  auto* preset = app.add_subcommand("preset", "run a named preset");
  preset->add_option("name", c.preset, "one of: mse-single-stationary, mse-single-nonstationary, scaling-NT, "
                                       "scaling-NsqrtT, scaling-TsqrtN, mse-vs-m")
      ->required();
  preset->add_option("--T", c.horizon, "restrict a single-unit preset to one horizon");
  preset->add_option("--seed", c.seed, "master seed");
  preset->add_option("--out", c.out, "output path (stdout if omitted)");
  preset->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
  preset->add_flag("--full-scale", c.full_scale, "100 instances x 100 draws");

  auto* verify = app.add_subcommand("verify-bounds", "run the lemma checks and print JSON lines");
  verify->add_option("--seed", c.seed, "master seed");
  verify->add_option("--out", c.out, "output path (stdout if omitted)");

  auto* gate = app.add_subcommand("gate", "print the exact GATE of each generated instance");
  add_common(gate, true);

  auto* exposure = app.add_subcommand("exposure", "dump exposure probabilities for each HT estimator");
  add_common(exposure, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*simulate || *preset) return run_and_emit(c);
    if (*verify) return verify_bounds(c);
    if (*gate) return print_gate(c);
    if (*exposure) return dump_exposure(c);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const EstimatorUndefined& e) {
    std::cerr << "estimator undefined: " << e.what() << "\n";
    return 2;
  } catch (const NotMixing& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
