#pragma once
// Empirical mixing time of a kernel from the decay of d(k), the largest TV
// distance between two rows of P^k.

#include <cstddef>
#include <vector>

#include "cswitch/dynamics.hpp"

namespace cswitch {

struct MixingEstimate {
  double t_mix = 0.0;
  /// Smallest C >= 1 with d(k) <= C exp(-k / t_mix) over the inspected steps.
  double prefactor = 1.0;
  std::size_t tail_points = 0;
  /// d(k) for k = 1, 2, ...; stops early once it falls to 1e-10.
  std::vector<double> max_pair_tv;
};

enum class PairSet {
  all,      // every pair of point masses
  extreme,  // first and last state only; exact for monotone chains
};

/// Least-squares fit of ln d(k) on the tail 1e-10 < d(k) < 0.5, returning
/// -1/slope. At least 10 tail points are needed unless d collapses to 1e-10
/// first; a collapse at step k0 with too few points gives k0 / ln(1e15).
/// Throws NotMixing if d never drops below 0.5 or the fit is flat.
MixingEstimate estimate_tmix(const TabularKernel& k, std::size_t horizon = 20000, PairSet pairs = PairSet::all);

/// Largest estimate over the family's kernels.
MixingEstimate estimate_tmix(const KernelFamily& family, std::size_t horizon = 20000,
                             PairSet pairs = PairSet::all);

/// -1 / ln(c) for c the largest Dobrushin coefficient over the family: the
/// smallest t_mix for which every kernel contracts TV by e^{-1/t_mix} in one
/// step. Throws NotMixing when some coefficient is 1; returns 0 when all are 0.
double contraction_tmix(const KernelFamily& family);
double contraction_tmix(const TabularKernel& k);

}  // namespace cswitch
