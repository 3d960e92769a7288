#include "cswitch/estimators.hpp"

#include <algorithm>
#include <string>

#include "cswitch/error.hpp"

namespace cswitch {

HTOutput ht_truncated(const ObservedPanel& panel, const InterferenceGraph& g, const ExposureSpec& spec,
                      const ExposureProbabilities& probs, bool keep_terms) {
  const auto n = panel.units();
  const auto horizon = panel.horizon();
  require(g.size() == n, "graph and panel disagree on N");
  require(probs.units() == n && probs.horizon() == horizon, "exposure table shape does not match the panel");
  require(panel.y.size() == n * horizon, "panel outcomes have the wrong size");
  if (probs.overall_min() <= 0.0) throw EstimatorUndefined("an exposure probability is zero");

  HTOutput out;
  if (keep_terms) out.terms.emplace(n * horizon, 0.0);
  double total = 0.0;
  std::size_t exposed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    // streak[a]: consecutive passing rounds ending at t.
    const std::vector<std::uint8_t> flags[2] = {fraction_flags(panel.w, g, i, 0, spec.delta),
                                                fraction_flags(panel.w, g, i, 1, spec.delta)};
    std::size_t streak[2] = {0, 0};
    for (std::size_t t = 1; t <= horizon; ++t) {
      double term = 0.0;
      const std::size_t window = std::min(t, spec.radius + 1);
      for (std::uint8_t a = 0; a < 2; ++a) {
        streak[a] = flags[a][t - 1] ? streak[a] + 1 : 0;
        if (streak[a] < window) continue;
        ++exposed;
        const double y = panel(i, t) / probs(i, t, a);
        term += a == 1 ? y : -y;
      }
      total += term;
      if (keep_terms) (*out.terms)[i * horizon + t - 1] = term;
    }
  }
  const double cells = static_cast<double>(n * horizon);
  out.delta_hat = total / cells;
  out.retained_fraction = static_cast<double>(exposed) / (2.0 * cells);
  return out;
}

DIMBIOutput dimbi(const ObservedPanel& panel, std::size_t block_length, std::size_t burn_in) {
  require(block_length >= 1, "block length must be >= 1");
  require(burn_in < block_length, "burn-in must be smaller than the block length");
  double sum[2] = {0.0, 0.0};
  std::size_t count[2] = {0, 0};
  for (std::size_t i = 0; i < panel.units(); ++i) {
    for (std::size_t t = 1; t <= panel.horizon(); ++t) {
      if (position_in_block(t, block_length) <= burn_in) continue;
      const auto a = panel.w(i, t);
      sum[a] += panel(i, t);
      ++count[a];
    }
  }
  if (count[0] == 0 || count[1] == 0) {
    throw EstimatorUndefined("insufficient arm data: no retained " + std::string(count[1] == 0 ? "treated" : "control") +
                             " observations");
  }
  DIMBIOutput out;
  out.delta_hat = sum[1] / static_cast<double>(count[1]) - sum[0] / static_cast<double>(count[0]);
  out.n_treated_used = count[1];
  out.n_control_used = count[0];
  out.burn_in = burn_in;
  return out;
}

DIMBIOutput dim(const ObservedPanel& panel, std::size_t block_length) { return dimbi(panel, block_length, 0); }

}  // namespace cswitch
