#pragma once
// Markovian state dynamics, outcome models, panel simulation and exact
// distribution evolution.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cswitch/design.hpp"
#include "cswitch/fraction.hpp"
#include "cswitch/graph.hpp"
#include "cswitch/rng.hpp"

namespace cswitch {

/// Row-stochastic matrix over n states, stored densely row-major. Each row
/// also keeps its support and cumulative probabilities for sampling.
class TabularKernel {
 public:
  /// Throws ValidationError if a row has a negative entry or does not sum to 1
  /// within 1e-12.
  TabularKernel(std::size_t n_states, std::vector<double> row_major);

  static TabularKernel identity(std::size_t n_states);

  std::size_t num_states() const { return n_; }
  std::span<const double> row(std::size_t from) const { return {probs_.data() + from * n_, n_}; }
  std::span<const double> matrix() const { return probs_; }
  double prob(std::size_t from, std::size_t to) const { return probs_[from * n_ + to]; }

  /// Next state by inverse CDF over the row's support, u in [0, 1).
  std::size_t sample_next(std::size_t from, double u) const;

  bool operator==(const TabularKernel& other) const { return n_ == other.n_ && probs_ == other.probs_; }

 private:
  std::size_t n_;
  std::vector<double> probs_;
  std::vector<std::size_t> support_begin_;
  std::vector<std::size_t> support_state_;
  std::vector<double> support_cum_;
};

/// Walk on integer states -m..m (index s + m): up with probability p_up, down
/// otherwise, staying put when the move would leave the range.
TabularKernel clipped_random_walk_kernel(std::size_t m, double p_up);

/// (1 - eps) K + eps 1 target^T: with probability eps the chain restarts from
/// `target`. The Dobrushin coefficient of the result is at most 1 - eps.
TabularKernel with_restart(const TabularKernel& k, double eps, std::span<const double> target);

/// Treatments of the closed neighborhood N(i), aligned with
/// InterferenceGraph::closed_neighborhood(i).
using NeighborhoodTreatments = std::span<const std::uint8_t>;

/// If w is within delta of a constant arm (at least a (1 - delta) fraction of
/// N(i) assigned a), returns that arm. Arm 1 is checked first; for
/// delta < 1/2 at most one arm qualifies.
std::optional<std::uint8_t> fne_arm(NeighborhoodTreatments w, Fraction delta);

/// Transition kernels P^w_it. Implementations must be pure in (unit, round, w)
/// and honour delta-FNE: whenever fne_arm(w, delta) == a the kernel equals the
/// one for the constant vector a.
class KernelFamily {
 public:
  virtual ~KernelFamily() = default;
  virtual std::size_t num_states() const = 0;
  virtual const TabularKernel& kernel(std::size_t unit, std::size_t round, NeighborhoodTreatments w) const = 0;
  /// Every kernel the family can return.
  virtual std::vector<const TabularKernel*> distinct_kernels() const = 0;
};

/// Clipped random walk whose up-probability is
///   low + (high - low) * (#treated in N(i)) / normalizer(i).
/// With normalizer 2h+1 on a line graph this is the h-hop interference
/// model; with a single unit and normalizer 1 it is the 0.1 / 0.9 walk.
class FractionalWalkFamily final : public KernelFamily {
 public:
  FractionalWalkFamily(std::size_t m, std::vector<std::size_t> normalizers, Fraction fne_delta = {},
                       double low = 0.1, double high = 0.9);

  std::size_t num_states() const override { return 2 * m_ + 1; }
  const TabularKernel& kernel(std::size_t unit, std::size_t round, NeighborhoodTreatments w) const override;
  std::vector<const TabularKernel*> distinct_kernels() const override;

  /// Up-probability after delta-FNE snapping.
  double p_up(std::size_t unit, NeighborhoodTreatments w) const;

  std::size_t cap() const { return m_; }

 private:
  std::size_t treated_count(std::size_t unit, NeighborhoodTreatments w) const;

  std::size_t m_;
  std::vector<std::size_t> normalizers_;
  Fraction delta_;
  double low_;
  double high_;
  // kernels_[d][k]: normalizer d, k treated neighbors (k <= max neighborhood).
  std::vector<std::vector<TabularKernel>> kernels_;
};

/// One kernel per arm, selected by the delta-FNE arm of N(i); neighborhoods
/// that are not within delta of either arm use `mixed`.
class ArmKernelFamily final : public KernelFamily {
 public:
  ArmKernelFamily(TabularKernel control, TabularKernel treated, std::optional<TabularKernel> mixed = {},
                  Fraction fne_delta = {});

  std::size_t num_states() const override { return control_.num_states(); }
  const TabularKernel& kernel(std::size_t unit, std::size_t round, NeighborhoodTreatments w) const override;
  std::vector<const TabularKernel*> distinct_kernels() const override;

 private:
  TabularKernel control_;
  TabularKernel treated_;
  std::optional<TabularKernel> mixed_;
  Fraction delta_;
};

/// Mean outcome functions mu_it(s, w) plus additive mean-zero Gaussian noise.
class OutcomeModel {
 public:
  explicit OutcomeModel(double noise_sigma) : sigma_(noise_sigma) {}
  virtual ~OutcomeModel() = default;

  virtual double mean(std::size_t unit, std::size_t round, std::size_t state,
                      NeighborhoodTreatments w) const = 0;

  /// mean() for every state; the default loops.
  virtual void mean_vector(std::size_t unit, std::size_t round, NeighborhoodTreatments w,
                           std::span<double> out) const;

  double noise_sigma() const { return sigma_; }

 private:
  double sigma_;
};

/// mu_it(s) = alpha_it + beta_it * x_s with x_s = state_values[s], optionally
/// clamped to [0, 1]. Does not depend on treatments.
class AffineOutcome final : public OutcomeModel {
 public:
  AffineOutcome(std::size_t n_units, std::size_t horizon, std::vector<double> state_values,
                std::vector<double> alpha, std::vector<double> beta, double noise_sigma, bool clamp);

  double mean(std::size_t unit, std::size_t round, std::size_t state, NeighborhoodTreatments w) const override;
  void mean_vector(std::size_t unit, std::size_t round, NeighborhoodTreatments w,
                   std::span<double> out) const override;

  double alpha(std::size_t unit, std::size_t round) const { return alpha_[unit * horizon_ + round - 1]; }
  double beta(std::size_t unit, std::size_t round) const { return beta_[unit * horizon_ + round - 1]; }
  bool clamped() const { return clamp_; }

 private:
  std::size_t n_units_;
  std::size_t horizon_;
  std::vector<double> state_values_;
  std::vector<double> alpha_;
  std::vector<double> beta_;
  bool clamp_;
};

/// State values s / m for the walk on -m..m; m = 0 gives the single state 0.
std::vector<double> scaled_walk_states(std::size_t m);

/// Everything the simulator needs: graph, kernels, outcomes, initial state
/// distributions and the horizon. Immutable and shareable across threads.
class Instance {
 public:
  /// `initial` holds either one distribution shared by all units or one per
  /// unit. Throws ValidationError on inconsistent sizes or unnormalized
  /// distributions.
  Instance(std::shared_ptr<const InterferenceGraph> graph, std::shared_ptr<const KernelFamily> kernels,
           std::shared_ptr<const OutcomeModel> outcomes, std::vector<std::vector<double>> initial,
           std::size_t horizon);

  std::size_t units() const { return graph_->size(); }
  std::size_t horizon() const { return horizon_; }
  std::size_t num_states() const { return kernels_->num_states(); }

  const InterferenceGraph& graph() const { return *graph_; }
  const KernelFamily& kernels() const { return *kernels_; }
  const OutcomeModel& outcomes() const { return *outcomes_; }
  std::span<const double> initial(std::size_t unit) const {
    return initial_.size() == 1 ? initial_[0] : initial_[unit];
  }

  std::shared_ptr<const InterferenceGraph> graph_ptr() const { return graph_; }

  /// Same model with different initial distributions.
  Instance with_initial(std::vector<std::vector<double>> initial) const;

 private:
  std::shared_ptr<const InterferenceGraph> graph_;
  std::shared_ptr<const KernelFamily> kernels_;
  std::shared_ptr<const OutcomeModel> outcomes_;
  std::vector<std::vector<double>> initial_;
  std::size_t horizon_;
};

/// Point mass on state index `state`.
std::vector<double> point_mass(std::size_t n_states, std::size_t state);

/// What an estimator may see: the design and the outcomes.
struct ObservedPanel {
  TreatmentMatrix w;
  std::vector<double> y;  // unit-major, N x T

  std::size_t units() const { return w.units(); }
  std::size_t horizon() const { return w.horizon(); }
  double operator()(std::size_t unit, std::size_t round) const { return y[unit * w.horizon() + round - 1]; }
};

/// Units evolve independently given W. For each unit: S_1 ~ D_i, then per
/// round Y_it = mu_it(S_it, W_N(i),t) + eps_it and S_{i,t+1} ~ P(.|S_it).
/// Throws ValidationError if W's shape does not match the instance.
ObservedPanel simulate_panel(const Instance& instance, const TreatmentMatrix& w, Rng& rng);

/// f_{k+1} = f_k P_k. Returns kernels.size() + 1 distributions, f0 first.
std::vector<std::vector<double>> evolve_distribution(std::span<const double> f0,
                                                     std::span<const TabularKernel* const> kernels);

/// Exact state distributions of `unit` at rounds 1..T under the fixed design W.
std::vector<std::vector<double>> state_marginals(const Instance& instance, const TreatmentMatrix& w,
                                                 std::size_t unit);

/// E[Y_it | W] for t = 1..T.
std::vector<double> exact_mean_outcomes(const Instance& instance, const TreatmentMatrix& w, std::size_t unit);

/// E[Y_it | W = a 1] for t = 1..T.
std::vector<double> constant_policy_means(const Instance& instance, std::size_t unit, std::uint8_t arm);

/// E[Y_it | W = a 1].
double mean_outcome_exact(const Instance& instance, std::size_t unit, std::size_t round, std::uint8_t arm);

/// Global average treatment effect, exact: (1/NT) sum of
/// E[Y_it | W = 1] - E[Y_it | W = 0].
double gate_oracle(const Instance& instance);

/// (1/2) ||f - g||_1.
double tv_distance(std::span<const double> f, std::span<const double> g);

/// max over row pairs of the TV distance; the one-step contraction factor.
double dobrushin_coefficient(const TabularKernel& k);

/// up-probability of the h-hop line model:
/// 0.1 + 0.8 / (2h+1) * #{j : |i - j| <= h, W_jt = 1}.
double multi_unit_p_up(const InterferenceGraph& g, std::size_t h, const TreatmentMatrix& w,
                       std::size_t unit, std::size_t round);

}  // namespace cswitch
