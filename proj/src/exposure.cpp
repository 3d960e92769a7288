#include "cswitch/exposure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "cswitch/error.hpp"

namespace cswitch {

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

std::size_t count_arm(const TreatmentMatrix& w, std::span<const std::size_t> nb, std::size_t round,
                      std::uint8_t arm) {
  std::size_t c = 0;
  for (auto j : nb) c += w(j, round) == arm;
  return c;
}

std::vector<std::size_t> neighborhood_weights(const InterferenceGraph& g, const Clustering& pi, std::size_t unit) {
  std::vector<std::size_t> weights;
  for (const auto& cw : touching_clusters(g, pi, unit)) weights.push_back(cw.weight);
  return weights;
}

void check_spec(const InterferenceGraph& g, const ExposureSpec& spec) {
  require(spec.block_length >= 1, "block length must be >= 1");
  require(spec.delta.den > 0 && spec.delta.num >= 0 && spec.delta.num < spec.delta.den,
          "delta must lie in [0, 1)");
  require(spec.clustering.num_units() == g.size(), "clustering does not cover the graph's units");
}

}  // namespace

bool exposure_indicator(const TreatmentMatrix& w, const InterferenceGraph& g, std::size_t unit, std::size_t round,
                        std::uint8_t arm, const ExposureSpec& spec) {
  const auto nb = g.closed_neighborhood(unit);
  const std::size_t first = round > spec.radius ? round - spec.radius : 1;
  for (std::size_t t = first; t <= round; ++t) {
    if (!meets_fraction(count_arm(w, nb, t, arm), nb.size(), spec.delta)) return false;
  }
  return true;
}

std::vector<std::uint8_t> fraction_flags(const TreatmentMatrix& w, const InterferenceGraph& g, std::size_t unit,
                                         std::uint8_t arm, Fraction delta) {
  const auto nb = g.closed_neighborhood(unit);
  std::vector<std::uint8_t> flags(w.horizon());
  for (std::size_t t = 1; t <= w.horizon(); ++t) {
    flags[t - 1] = meets_fraction(count_arm(w, nb, t, arm), nb.size(), delta);
  }
  return flags;
}

double block_pass_probability_enum(std::span<const std::size_t> weights, Fraction delta) {
  const auto d = weights.size();
  require(d <= 30, "too many clusters to enumerate; use the DP");
  const std::size_t total = std::accumulate(weights.begin(), weights.end(), std::size_t{0});
  std::uint64_t passing = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
    std::size_t sum = 0;
    for (std::size_t j = 0; j < d; ++j) {
      if (mask >> j & 1) sum += weights[j];
    }
    passing += meets_fraction(sum, total, delta);
  }
  return std::ldexp(static_cast<double>(passing), -static_cast<int>(d));
}

double block_pass_probability_dp(std::span<const std::size_t> weights, Fraction delta) {
  const std::size_t total = std::accumulate(weights.begin(), weights.end(), std::size_t{0});
  // prob[s] = P[weighted sum of the coins seen so far = s]
  std::vector<double> prob(total + 1, 0.0);
  prob[0] = 1.0;
  std::size_t reach = 0;
  for (auto m : weights) {
    for (std::size_t s = reach + 1; s-- > 0;) {
      const double half = 0.5 * prob[s];
      prob[s] = half;
      prob[s + m] += half;
    }
    reach += m;
  }
  double pass = 0.0;
  for (std::size_t s = 0; s <= total; ++s) {
    if (meets_fraction(s, total, delta)) pass += prob[s];
  }
  return pass;
}

double block_pass_probability(std::span<const std::size_t> weights, Fraction delta) {
  return weights.size() <= 20 ? block_pass_probability_enum(weights, delta)
                              : block_pass_probability_dp(weights, delta);
}

std::size_t blocks_in_window(std::size_t round, std::size_t radius, std::size_t block_length) {
  const std::size_t first = round > radius ? round - radius : 1;
  return (round - 1) / block_length - (first - 1) / block_length + 1;
}

double exposure_probability_exact(const InterferenceGraph& g, const ExposureSpec& spec, std::size_t horizon,
                                  std::size_t unit, std::size_t round, std::uint8_t arm) {
  check_spec(g, spec);
  require(round >= 1 && round <= horizon, "round out of range");
  require(arm <= 1, "arm must be 0 or 1");
  const auto weights = neighborhood_weights(g, spec.clustering, unit);
  const double q = block_pass_probability(weights, spec.delta);
  return std::pow(q, static_cast<double>(blocks_in_window(round, spec.radius, spec.block_length)));
}

double min_exposure_probability(const InterferenceGraph& g, const ExposureSpec& spec, std::size_t horizon,
                                std::size_t unit) {
  check_spec(g, spec);
  const auto weights = neighborhood_weights(g, spec.clustering, unit);
  const double q = block_pass_probability(weights, spec.delta);
  std::size_t most = 1;
  for (std::size_t t = 1; t <= horizon; ++t) {
    most = std::max(most, blocks_in_window(t, spec.radius, spec.block_length));
  }
  return std::pow(q, static_cast<double>(most));
}

ExposureProbabilities::ExposureProbabilities(const InterferenceGraph& g, const ExposureSpec& spec,
                                             std::size_t horizon)
    : horizon_(horizon), p_(g.size() * horizon), p_min_(g.size()) {
  check_spec(g, spec);
  require(horizon >= 1, "horizon must be >= 1");
  std::vector<std::size_t> nblocks(horizon);
  for (std::size_t t = 1; t <= horizon; ++t) nblocks[t - 1] = blocks_in_window(t, spec.radius, spec.block_length);

  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto weights = neighborhood_weights(g, spec.clustering, i);
    const double q = block_pass_probability(weights, spec.delta);
    double lo = 1.0;
    for (std::size_t t = 0; t < horizon; ++t) {
      const double p = std::pow(q, static_cast<double>(nblocks[t]));
      p_[i * horizon + t] = p;
      lo = std::min(lo, p);
    }
    p_min_[i] = lo;
  }
}

double ExposureProbabilities::overall_min() const {
  return p_min_.empty() ? 1.0 : *std::min_element(p_min_.begin(), p_min_.end());
}

void ExposureProbabilities::write_csv(std::ostream& out) const {
  out << "unit,round,p\n";
  char buf[64];
  for (std::size_t i = 0; i < units(); ++i) {
    for (std::size_t t = 1; t <= horizon_; ++t) {
      std::snprintf(buf, sizeof buf, "%.10g", (*this)(i, t));
      out << i << ',' << t << ',' << buf << '\n';
    }
  }
}

double entropy(double delta) {
  require(delta >= 0.0 && delta <= 1.0, "entropy argument must lie in [0, 1]");
  auto term = [](double x) { return x <= 0.0 ? 0.0 : -x * std::log2(x); };
  return term(delta) + term(1.0 - delta);
}

namespace {

double entropy_form(std::size_t d, std::size_t radius, std::size_t block_length, double delta, double denom) {
  require(block_length >= 1, "block length must be >= 1");
  require(delta >= 0.0 && delta < 1.0, "delta must lie in [0, 1)");
  const double reps = 1.0 + static_cast<double>(ceil_div(radius, block_length));
  const double dd = static_cast<double>(d);
  if (delta == 0.0) return std::exp2(-dd * reps);
  const double base = std::exp2(-(1.0 - entropy(delta)) * dd) / denom;
  return std::min(1.0, std::pow(base, reps));
}

}  // namespace

double exposure_lower_bound(std::size_t d, std::size_t radius, std::size_t block_length, double delta) {
  const double denom = std::sqrt(2.0 * std::numbers::pi * delta * (1.0 - delta));
  return entropy_form(d, radius, block_length, delta, denom);
}

double exposure_lower_bound_stirling(std::size_t d, std::size_t radius, std::size_t block_length, double delta) {
  require(block_length >= 1, "block length must be >= 1");
  require(delta >= 0.0 && delta < 1.0, "delta must lie in [0, 1)");
  const double reps = 1.0 + static_cast<double>(ceil_div(radius, block_length));
  const double dd = static_cast<double>(d);
  // One block passes at least when exactly k = floor(delta d) coins miss.
  const auto k = static_cast<std::size_t>(std::floor(delta * dd + 1e-12));
  if (k == 0) return std::exp2(-dd * reps);
  const double frac = static_cast<double>(k) / dd;
  const double base = std::exp2(-(1.0 - entropy(frac)) * dd) / std::sqrt(8.0 * dd * frac * (1.0 - frac));
  return std::min(1.0, std::pow(base, reps));
}

}  // namespace cswitch
