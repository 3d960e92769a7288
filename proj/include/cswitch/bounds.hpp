#pragma once
// Closed-form bias / variance / MSE bounds and exact or Monte Carlo checks of
// the supporting lemmas.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cswitch/dynamics.hpp"
#include "cswitch/exposure.hpp"
#include "cswitch/mixing.hpp"

namespace cswitch {

struct BoundReport {
  std::string name;
  double bound = 0.0;
  double measured = 0.0;
  /// bound - measured for upper bounds, measured - bound for lower bounds.
  double slack = 0.0;
  bool passed = false;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
};

/// One JSON object per line: name, bound, measured, passed, seed, config.
void write_jsonl(std::ostream& out, const BoundReport& report);

double bias_bound(std::size_t radius, double t_mix);

/// 8 / (N^2 T) [ (1 + sigma^2)(r + ell) sum_{i~i'} 1/(p_i p_i')
///               + t_mix e^{-(r+ell)/t_mix} sum_i d(i) ],
/// the pair sum running over ordered dependent pairs, self-pairs included.
/// r + ell = 0 is treated as 1 (a single round still contributes).
double variance_bound(const InterferenceGraph& g, const ExposureSpec& spec, std::size_t horizon, double t_mix,
                      double sigma, std::span<const double> p_mins);

/// bias_bound^2 + variance_bound.
double mse_bound(const InterferenceGraph& g, const ExposureSpec& spec, std::size_t horizon, double t_mix,
                 double sigma, std::span<const double> p_mins);

/// ceil(t_mix ln(N T)), at least 1: the block length and radius that balance
/// the two terms.
std::size_t rate_optimal_length(double t_mix, std::size_t n_units, std::size_t horizon);

/// Evolves f0 through seq_a and f0b through seq_b (same length K), whose last
/// `window` kernels must coincide. measured = TV of the final laws; bound =
/// min(1, C e^{-window / t_mix}) times the TV `window` steps earlier, with C
/// and t_mix from `mix`. Also requires TV to be nonincreasing (1e-12) over
/// the common window. config.literal_bound holds the C = 1 envelope.
BoundReport check_tv_decay(std::span<const TabularKernel* const> seq_a, std::span<const TabularKernel* const> seq_b,
                           std::span<const double> f0, std::span<const double> f0b, std::size_t window,
                           const MixingEstimate& mix);

/// Finite joint law of (U, V, X, Y) with U, V binary.
struct JointAtom {
  int u;
  int v;
  double x;
  double y;
  double prob;
};
using JointPmf = std::vector<JointAtom>;

/// Exhaustive Cov(UX, VY) versus pq Cov(X, Y | U = V = 1). Throws
/// ValidationError unless U, V are independent, X is independent of V given U
/// and Y of U given V (tolerance 1e-12), and P[U = V = 1] > 0.
BoundReport check_cond_cov(const JointPmf& pmf);

/// Random law satisfying the preconditions: X = f(U, Z), Y = g(V, Z) with a
/// shared latent Z independent of (U, V), supports of size <= 4.
JointPmf random_cond_cov_pmf(Rng& rng);

/// Cov_A(Y_it, Y_i't') for W uniform over `event` (a list of equally likely
/// designs), against min(1, C e^{-|t - t'| / t_mix}); C = 1 is the plain
/// envelope. Same unit: exact via joint evolution. Different units: Monte
/// Carlo with `reps` draws, bound + 3 SE.
BoundReport check_cov_outcomes(const Instance& instance, std::span<const TreatmentMatrix> event, std::size_t unit_a,
                               std::size_t round_a, std::size_t unit_b, std::size_t round_b, double t_mix,
                               Rng& rng, std::size_t reps = 200000, double prefactor = 1.0);

/// Every cluster x block design (2^{|Pi| * blocks} of them, at most 2^20)
/// for which keep(w) holds.
std::vector<TreatmentMatrix> designs_in_event(const Clustering& pi, const TimeBlocks& blocks,
                                              const std::function<bool(const TreatmentMatrix&)>& keep);

/// Exact gap |E_D[Y_it] - E_D'[Y_it]| under design w. After the onset (first
/// round where the gap is below half its maximum) the gap must be
/// nonincreasing and its log-linear slope at most -(1 - 0.2) / t_mix.
/// measured = fitted slope, bound = -0.8 / t_mix.
BoundReport check_initial_state(const Instance& instance, std::span<const double> d_a, std::span<const double> d_b,
                                const TreatmentMatrix& w, std::size_t unit, double t_mix);

}  // namespace cswitch
