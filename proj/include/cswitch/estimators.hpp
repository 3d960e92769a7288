#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cswitch/dynamics.hpp"
#include "cswitch/exposure.hpp"

namespace cswitch {

struct HTOutput {
  double delta_hat = 0.0;
  /// Per (unit, round) terms, unit-major, when requested.
  std::optional<std::vector<double>> terms;
  /// Fraction of (unit, round, arm) triples with exposure indicator 1.
  double retained_fraction = 0.0;
};

/// Radius-r truncated Horvitz-Thompson estimate of the GATE. Unexposed terms
/// contribute 0 without touching p. Throws EstimatorUndefined if any
/// exposure probability is 0.
HTOutput ht_truncated(const ObservedPanel& panel, const InterferenceGraph& g, const ExposureSpec& spec,
                      const ExposureProbabilities& probs, bool keep_terms = false);

struct DIMBIOutput {
  double delta_hat = 0.0;
  std::size_t n_treated_used = 0;
  std::size_t n_control_used = 0;
  std::size_t burn_in = 0;
};

/// Difference of pooled means over rounds with position_in_block(t, ell) > b.
/// Pools every unit of the panel. Throws EstimatorUndefined if either arm
/// retains no observation.
DIMBIOutput dimbi(const ObservedPanel& panel, std::size_t block_length, std::size_t burn_in);

/// dimbi with b = 0.
DIMBIOutput dim(const ObservedPanel& panel, std::size_t block_length);

}  // namespace cswitch
