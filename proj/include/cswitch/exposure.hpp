#pragma once
// Radius-r truncated fractional exposure and its exact probability under the
// clustered switchback design.

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "cswitch/design.hpp"
#include "cswitch/fraction.hpp"
#include "cswitch/graph.hpp"

namespace cswitch {

struct ExposureSpec {
  std::size_t radius = 0;
  Fraction delta{};
  std::size_t block_length = 1;
  Clustering clustering;
};

/// 1 iff for every round t' in [max(1, t - r), t] at least a (1 - delta)
/// fraction of N(i) is assigned arm a.
bool exposure_indicator(const TreatmentMatrix& w, const InterferenceGraph& g, std::size_t unit, std::size_t round,
                        std::uint8_t arm, const ExposureSpec& spec);

/// Per-round pass flags for one unit and arm: flag[t-1] = 1 iff round t meets
/// the fraction test. Helper for evaluating the indicator at every round.
std::vector<std::uint8_t> fraction_flags(const TreatmentMatrix& w, const InterferenceGraph& g, std::size_t unit,
                                         std::uint8_t arm, Fraction delta);

/// P[sum_j weight_j Z_j >= (1 - delta) total] for independent fair coins Z_j,
/// where total = sum of weights. Enumerates the 2^d outcomes.
double block_pass_probability_enum(std::span<const std::size_t> weights, Fraction delta);

/// Same quantity by a counting DP over attainable weight sums.
double block_pass_probability_dp(std::span<const std::size_t> weights, Fraction delta);

/// Dispatches to enumeration for at most 20 weights, the DP otherwise.
double block_pass_probability(std::span<const std::size_t> weights, Fraction delta);

/// Number of blocks of length ell meeting the rounds [max(1, t - r), t].
std::size_t blocks_in_window(std::size_t round, std::size_t radius, std::size_t block_length);

/// P[X_ita = 1]; the same for both arms.
double exposure_probability_exact(const InterferenceGraph& g, const ExposureSpec& spec, std::size_t horizon,
                                  std::size_t unit, std::size_t round, std::uint8_t arm);

/// min over t in [1, T] and both arms.
double min_exposure_probability(const InterferenceGraph& g, const ExposureSpec& spec, std::size_t horizon,
                                std::size_t unit);

/// Exposure probabilities for every (unit, round); arm-independent.
class ExposureProbabilities {
 public:
  ExposureProbabilities(const InterferenceGraph& g, const ExposureSpec& spec, std::size_t horizon);

  std::size_t units() const { return p_min_.size(); }
  std::size_t horizon() const { return horizon_; }
  double operator()(std::size_t unit, std::size_t round, std::uint8_t /*arm*/ = 1) const {
    return p_[unit * horizon_ + round - 1];
  }
  double p_min(std::size_t unit) const { return p_min_[unit]; }
  std::span<const double> p_mins() const { return p_min_; }
  double overall_min() const;

  /// "unit,round,p" rows.
  void write_csv(std::ostream& out) const;

 private:
  std::size_t horizon_;
  std::vector<double> p_;
  std::vector<double> p_min_;
};

/// Binary entropy in bits, H(0) = H(1) = 0.
double entropy(double delta);

/// (2^{-(1 - H(delta)) d} / sqrt(2 pi delta (1 - delta)))^{1 + ceil(r / ell)},
/// clamped to 1; delta = 0 gives 2^{-d (1 + ceil(r / ell))}.
double exposure_lower_bound(std::size_t d, std::size_t radius, std::size_t block_length, double delta);

/// Lower bound for d equal-weight clusters from C(d, k) >= 2^{d H(k/d)} /
/// sqrt(8 d (k/d)(1 - k/d)) with k = floor(delta d).
double exposure_lower_bound_stirling(std::size_t d, std::size_t radius, std::size_t block_length, double delta);

}  // namespace cswitch
