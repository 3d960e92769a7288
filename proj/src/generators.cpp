#include "cswitch/generators.hpp"

#include <memory>

#include "cswitch/design.hpp"
#include "cswitch/error.hpp"

namespace cswitch {

namespace {

std::vector<double> draw_beta(std::size_t count, Rng& rng) {
  std::vector<double> beta(count);
  for (auto& b : beta) b = 1.0 + 0.2 * uniform01(rng);
  return beta;
}

Instance assemble(InterferenceGraph g, std::shared_ptr<const KernelFamily> kernels, std::size_t horizon,
                  std::size_t m, std::vector<double> alpha, std::vector<double> beta, GeneratorOptions opts) {
  const auto n = g.size();
  auto graph = std::make_shared<const InterferenceGraph>(std::move(g));
  auto outcomes = std::make_shared<const AffineOutcome>(n, horizon, scaled_walk_states(m), std::move(alpha),
                                                        std::move(beta), opts.sigma, opts.clamp);
  return Instance(graph, std::move(kernels), outcomes, {point_mass(2 * m + 1, m)}, horizon);
}

}  // namespace

Instance stationary_instance(std::size_t n_units, std::size_t horizon, std::size_t m, Rng& rng,
                             GeneratorOptions opts) {
  require(n_units >= 1 && horizon >= 1, "N and T must be positive");
  auto kernels = std::make_shared<const FractionalWalkFamily>(m, std::vector<std::size_t>(n_units, 1));
  std::vector<double> alpha(n_units * horizon, 0.0);
  auto beta = draw_beta(n_units * horizon, rng);
  return assemble(InterferenceGraph::build(n_units, {}), kernels, horizon, m, std::move(alpha), std::move(beta),
                  opts);
}

Instance contracting_single_instance(std::size_t horizon, std::size_t m, double restart, Rng& rng,
                                     GeneratorOptions opts) {
  require(horizon >= 1, "T must be positive");
  require(restart > 0.0 && restart <= 1.0, "restart probability must lie in (0, 1]");
  const std::vector<double> uniform(2 * m + 1, 1.0 / static_cast<double>(2 * m + 1));
  auto kernels = std::make_shared<const ArmKernelFamily>(
      with_restart(clipped_random_walk_kernel(m, 0.1), restart, uniform),
      with_restart(clipped_random_walk_kernel(m, 0.9), restart, uniform));
  std::vector<double> alpha(horizon, 0.0);
  auto beta = draw_beta(horizon, rng);
  return assemble(InterferenceGraph::build(1, {}), kernels, horizon, m, std::move(alpha), std::move(beta), opts);
}

Instance nonstationary_single_instance(std::size_t horizon, std::size_t m, std::size_t ell_opt, double rho,
                                       Rng& rng, GeneratorOptions opts) {
  require(horizon >= 1 && ell_opt >= 1, "T and ell must be positive");
  require(rho >= 0.0 && rho < 1.0, "rho must lie in [0, 1)");
  auto kernels = std::make_shared<const FractionalWalkFamily>(m, std::vector<std::size_t>{1});

  double piece_values[8];
  for (double& v : piece_values) v = uniform01(rng);
  std::vector<double> alpha(horizon);
  for (std::size_t t = 0; t < horizon; ++t) alpha[t] = piece_values[piece_index(t, horizon, 8)];

  const TimeBlocks blocks(horizon, ell_opt);
  std::vector<double> beta(horizon);
  for (std::size_t t = 1; t <= horizon; ++t) {
    const auto k = blocks.block_of(t);
    const double len = static_cast<double>(blocks.last_round(k) - blocks.first_round(k) + 1);
    const double pos = static_cast<double>(position_in_block(t, ell_opt));
    const double u = uniform01(rng);
    beta[t - 1] = pos > (1.0 - rho) * len ? 0.0 : 1.0 + 0.2 * u;
  }
  return assemble(InterferenceGraph::build(1, {}), kernels, horizon, m, std::move(alpha), std::move(beta), opts);
}

Instance multi_unit_instance(std::size_t n_units, std::size_t horizon, std::size_t m, std::size_t h, Rng& rng,
                             GeneratorOptions opts) {
  require(n_units >= 1 && horizon >= 1, "N and T must be positive");
  auto kernels =
      std::make_shared<const FractionalWalkFamily>(m, std::vector<std::size_t>(n_units, 2 * h + 1));

  double grid[8][8];
  for (auto& row : grid) {
    for (double& v : row) v = uniform01(rng);
  }
  std::vector<double> alpha(n_units * horizon);
  for (std::size_t i = 0; i < n_units; ++i) {
    for (std::size_t t = 0; t < horizon; ++t) {
      alpha[i * horizon + t] = grid[piece_index(i, n_units, 8)][piece_index(t, horizon, 8)];
    }
  }
  auto beta = draw_beta(n_units * horizon, rng);
  return assemble(line_graph(n_units, h), kernels, horizon, m, std::move(alpha), std::move(beta), opts);
}

}  // namespace cswitch
