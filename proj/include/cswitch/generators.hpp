#pragma once
// Random instance generators for the clipped-random-walk benchmarks.

#include <cstddef>

#include "cswitch/dynamics.hpp"
#include "cswitch/rng.hpp"

namespace cswitch {

struct GeneratorOptions {
  double sigma = 1.0;
  bool clamp = false;  // clamp mean outcomes to [0, 1]
};

/// N independent units (empty graph), walk on -m..m with p_up 0.9 under
/// treatment and 0.1 under control. alpha = 0, beta_it = 1 + 0.2 U(0,1).
Instance stationary_instance(std::size_t n_units, std::size_t horizon, std::size_t m, Rng& rng,
                             GeneratorOptions opts = {});

/// One unit. alpha is constant on 8 equal pieces of [T] with U(0,1) values.
/// beta_t = 0 when t falls in the final rho fraction of its block of length
/// ell_opt, otherwise 1 + 0.2 U(0,1).
Instance nonstationary_single_instance(std::size_t horizon, std::size_t m, std::size_t ell_opt, double rho,
                                       Rng& rng, GeneratorOptions opts = {});

/// Line graph with h-hop interference. alpha_it constant on an 8 x 8 grid of
/// unit x round pieces with U(0,1) values, beta_it = 1 + 0.2 U(0,1), and
/// p_up = 0.1 + 0.8 (#treated within h hops) / (2h + 1).
Instance multi_unit_instance(std::size_t n_units, std::size_t horizon, std::size_t m, std::size_t h, Rng& rng,
                             GeneratorOptions opts = {});

/// One unit whose kernels satisfy one-step TV contraction: the 0.1 / 0.9
/// walks on -m..m, each restarting from the uniform law with probability
/// `restart`. alpha = 0, beta_t = 1 + 0.2 U(0,1).
Instance contracting_single_instance(std::size_t horizon, std::size_t m, double restart, Rng& rng,
                                     GeneratorOptions opts = {});

/// Index of the piece holding position x in [0, n) when split into k equal pieces.
inline std::size_t piece_index(std::size_t x, std::size_t n, std::size_t k) { return x * k / n; }

}  // namespace cswitch
