#include "cswitch/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "cswitch/error.hpp"
#include "cswitch/simd/kernels.hpp"

namespace cswitch {

// ---------------------------------------------------------------------------
// Fraction

Fraction Fraction::from_double(double value) {
  require(value >= 0.0 && value < 1.0, "threshold must lie in [0, 1)");
  // Continued-fraction convergents until the approximation is exact to 1e-12
  // or the denominator would exceed 10^6.
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double x = value;
  Fraction best{0, 1};
  for (int iter = 0; iter < 64; ++iter) {
    const auto a = static_cast<std::int64_t>(std::floor(x));
    const std::int64_t h2 = a * h1 + h0;
    const std::int64_t k2 = a * k1 + k0;
    if (k2 > 1'000'000) break;
    best = {h2, k2};
    if (std::fabs(static_cast<double>(h2) / static_cast<double>(k2) - value) < 1e-12) break;
    const double frac = x - static_cast<double>(a);
    if (frac < 1e-15) break;
    x = 1.0 / frac;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
  }
  return best;
}

// ---------------------------------------------------------------------------
// TabularKernel

TabularKernel::TabularKernel(std::size_t n_states, std::vector<double> row_major)
    : n_(n_states), probs_(std::move(row_major)) {
  require(n_ >= 1, "kernel needs at least one state");
  require(probs_.size() == n_ * n_, "kernel matrix must be n x n");
  support_begin_.reserve(n_ + 1);
  for (std::size_t s = 0; s < n_; ++s) {
    support_begin_.push_back(support_state_.size());
    double total = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      const double p = probs_[s * n_ + j];
      require(p >= 0.0 && std::isfinite(p), "kernel row " + std::to_string(s) + " has an invalid entry");
      if (p > 0.0) {
        total += p;
        support_state_.push_back(j);
        support_cum_.push_back(total);
      }
    }
    require(std::fabs(total - 1.0) <= 1e-12, "kernel row " + std::to_string(s) + " does not sum to 1");
  }
  support_begin_.push_back(support_state_.size());
}

TabularKernel TabularKernel::identity(std::size_t n_states) {
  std::vector<double> m(n_states * n_states, 0.0);
  for (std::size_t s = 0; s < n_states; ++s) m[s * n_states + s] = 1.0;
  return TabularKernel(n_states, std::move(m));
}

std::size_t TabularKernel::sample_next(std::size_t from, double u) const {
  const auto begin = support_begin_[from];
  const auto end = support_begin_[from + 1];
  const double target = u * support_cum_[end - 1];
  for (auto k = begin; k + 1 < end; ++k) {
    if (target < support_cum_[k]) return support_state_[k];
  }
  return support_state_[end - 1];
}

TabularKernel clipped_random_walk_kernel(std::size_t m, double p_up) {
  require(p_up >= 0.0 && p_up <= 1.0 && std::isfinite(p_up), "p_up must be a probability");
  const std::size_t n = 2 * m + 1;
  std::vector<double> probs(n * n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    probs[s * n + std::min(s + 1, n - 1)] += p_up;
    probs[s * n + (s == 0 ? 0 : s - 1)] += 1.0 - p_up;
  }
  return TabularKernel(n, std::move(probs));
}

TabularKernel with_restart(const TabularKernel& k, double eps, std::span<const double> target) {
  require(eps >= 0.0 && eps <= 1.0, "restart probability must lie in [0, 1]");
  const auto n = k.num_states();
  require(target.size() == n, "restart target has the wrong size");
  std::vector<double> probs(n * n);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t j = 0; j < n; ++j) probs[s * n + j] = (1.0 - eps) * k.prob(s, j) + eps * target[j];
  }
  return TabularKernel(n, std::move(probs));
}

// ---------------------------------------------------------------------------
// Kernel families

std::optional<std::uint8_t> fne_arm(NeighborhoodTreatments w, Fraction delta) {
  std::size_t treated = 0;
  for (auto v : w) treated += v;
  if (meets_fraction(treated, w.size(), delta)) return std::uint8_t{1};
  if (meets_fraction(w.size() - treated, w.size(), delta)) return std::uint8_t{0};
  return std::nullopt;
}

FractionalWalkFamily::FractionalWalkFamily(std::size_t m, std::vector<std::size_t> normalizers,
                                           Fraction fne_delta, double low, double high)
    : m_(m), normalizers_(std::move(normalizers)), delta_(fne_delta), low_(low), high_(high) {
  require(!normalizers_.empty(), "one normalizer per unit required");
  const auto max_norm = *std::max_element(normalizers_.begin(), normalizers_.end());
  require(*std::min_element(normalizers_.begin(), normalizers_.end()) >= 1, "normalizers must be >= 1");
  kernels_.resize(max_norm + 1);
  for (std::size_t d = 1; d <= max_norm; ++d) {
    if (std::find(normalizers_.begin(), normalizers_.end(), d) == normalizers_.end()) continue;
    for (std::size_t k = 0; k <= d; ++k) {
      const double p = low_ + (high_ - low_) * static_cast<double>(k) / static_cast<double>(d);
      kernels_[d].push_back(clipped_random_walk_kernel(m_, p));
    }
  }
}

std::size_t FractionalWalkFamily::treated_count(std::size_t unit, NeighborhoodTreatments w) const {
  if (auto arm = fne_arm(w, delta_)) return *arm == 1 ? w.size() : 0;
  std::size_t treated = 0;
  for (auto v : w) treated += v;
  (void)unit;
  return treated;
}

double FractionalWalkFamily::p_up(std::size_t unit, NeighborhoodTreatments w) const {
  const auto d = normalizers_[unit];
  const auto k = std::min(treated_count(unit, w), d);
  return low_ + (high_ - low_) * static_cast<double>(k) / static_cast<double>(d);
}

const TabularKernel& FractionalWalkFamily::kernel(std::size_t unit, std::size_t /*round*/,
                                                  NeighborhoodTreatments w) const {
  const auto d = normalizers_[unit];
  return kernels_[d][std::min(treated_count(unit, w), d)];
}

std::vector<const TabularKernel*> FractionalWalkFamily::distinct_kernels() const {
  std::vector<const TabularKernel*> out;
  for (const auto& row : kernels_) {
    for (const auto& k : row) out.push_back(&k);
  }
  return out;
}

ArmKernelFamily::ArmKernelFamily(TabularKernel control, TabularKernel treated,
                                 std::optional<TabularKernel> mixed, Fraction fne_delta)
    : control_(std::move(control)), treated_(std::move(treated)), mixed_(std::move(mixed)), delta_(fne_delta) {
  require(control_.num_states() == treated_.num_states(), "arm kernels must share a state space");
  require(!mixed_ || mixed_->num_states() == control_.num_states(), "mixed kernel state space mismatch");
}

const TabularKernel& ArmKernelFamily::kernel(std::size_t, std::size_t, NeighborhoodTreatments w) const {
  const auto arm = fne_arm(w, delta_);
  if (!arm) return mixed_ ? *mixed_ : control_;
  return *arm == 1 ? treated_ : control_;
}

std::vector<const TabularKernel*> ArmKernelFamily::distinct_kernels() const {
  std::vector<const TabularKernel*> out{&control_, &treated_};
  if (mixed_) out.push_back(&*mixed_);
  return out;
}

// ---------------------------------------------------------------------------
// Outcomes

void OutcomeModel::mean_vector(std::size_t unit, std::size_t round, NeighborhoodTreatments w,
                               std::span<double> out) const {
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = mean(unit, round, s, w);
}

AffineOutcome::AffineOutcome(std::size_t n_units, std::size_t horizon, std::vector<double> state_values,
                             std::vector<double> alpha, std::vector<double> beta, double noise_sigma,
                             bool clamp)
    : OutcomeModel(noise_sigma),
      n_units_(n_units),
      horizon_(horizon),
      state_values_(std::move(state_values)),
      alpha_(std::move(alpha)),
      beta_(std::move(beta)),
      clamp_(clamp) {
  require(noise_sigma >= 0.0, "noise sigma must be >= 0");
  require(alpha_.size() == n_units * horizon && beta_.size() == n_units * horizon,
          "alpha and beta must be N x T");
}

double AffineOutcome::mean(std::size_t unit, std::size_t round, std::size_t state,
                           NeighborhoodTreatments) const {
  const auto idx = unit * horizon_ + round - 1;
  const double v = alpha_[idx] + beta_[idx] * state_values_[state];
  return clamp_ ? std::clamp(v, 0.0, 1.0) : v;
}

void AffineOutcome::mean_vector(std::size_t unit, std::size_t round, NeighborhoodTreatments,
                                std::span<double> out) const {
  const auto idx = unit * horizon_ + round - 1;
  for (std::size_t s = 0; s < out.size(); ++s) {
    const double v = alpha_[idx] + beta_[idx] * state_values_[s];
    out[s] = clamp_ ? std::clamp(v, 0.0, 1.0) : v;
  }
}

std::vector<double> scaled_walk_states(std::size_t m) {
  std::vector<double> values(2 * m + 1);
  for (std::size_t s = 0; s < values.size(); ++s) {
    values[s] = m == 0 ? 0.0 : (static_cast<double>(s) - static_cast<double>(m)) / static_cast<double>(m);
  }
  return values;
}

// ---------------------------------------------------------------------------
// Instance

Instance::Instance(std::shared_ptr<const InterferenceGraph> graph, std::shared_ptr<const KernelFamily> kernels,
                   std::shared_ptr<const OutcomeModel> outcomes, std::vector<std::vector<double>> initial,
                   std::size_t horizon)
    : graph_(std::move(graph)),
      kernels_(std::move(kernels)),
      outcomes_(std::move(outcomes)),
      initial_(std::move(initial)),
      horizon_(horizon) {
  require(graph_ && kernels_ && outcomes_, "instance components must be set");
  require(horizon_ >= 1, "horizon must be >= 1");
  require(initial_.size() == 1 || initial_.size() == graph_->size(),
          "initial distributions: one shared or one per unit");
  for (const auto& f : initial_) {
    require(f.size() == kernels_->num_states(), "initial distribution has the wrong number of states");
    double total = 0.0;
    for (double p : f) {
      require(p >= 0.0, "initial distribution has a negative entry");
      total += p;
    }
    require(std::fabs(total - 1.0) <= 1e-12, "initial distribution does not sum to 1");
  }
}

Instance Instance::with_initial(std::vector<std::vector<double>> initial) const {
  return Instance(graph_, kernels_, outcomes_, std::move(initial), horizon_);
}

std::vector<double> point_mass(std::size_t n_states, std::size_t state) {
  std::vector<double> f(n_states, 0.0);
  f.at(state) = 1.0;
  return f;
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

void gather(const InterferenceGraph& g, const TreatmentMatrix& w, std::size_t unit, std::size_t round,
            std::vector<std::uint8_t>& out) {
  const auto nb = g.closed_neighborhood(unit);
  out.resize(nb.size());
  for (std::size_t k = 0; k < nb.size(); ++k) out[k] = w(nb[k], round);
}

std::size_t sample_initial(std::span<const double> f, double u) {
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t s = 0; s < f.size(); ++s) {
    if (f[s] <= 0.0) continue;
    acc += f[s];
    last = s;
    if (u < acc) return s;
  }
  return last;
}

void check_shape(const Instance& instance, const TreatmentMatrix& w) {
  require(w.units() == instance.units() && w.horizon() == instance.horizon(),
          "treatment matrix shape does not match the instance");
}

}  // namespace

ObservedPanel simulate_panel(const Instance& instance, const TreatmentMatrix& w, Rng& rng) {
  check_shape(instance, w);
  const auto n = instance.units();
  const auto horizon = instance.horizon();
  const auto& g = instance.graph();
  const auto& outcomes = instance.outcomes();
  const double sigma = outcomes.noise_sigma();
  std::normal_distribution<double> noise(0.0, 1.0);

  ObservedPanel panel{w, std::vector<double>(n * horizon)};
  std::vector<std::uint8_t> nb;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t state = sample_initial(instance.initial(i), uniform01(rng));
    for (std::size_t t = 1; t <= horizon; ++t) {
      gather(g, w, i, t, nb);
      double y = outcomes.mean(i, t, state, nb);
      if (sigma > 0.0) y += sigma * noise(rng);
      panel.y[i * horizon + t - 1] = y;
      const auto& k = instance.kernels().kernel(i, t, nb);
      require(k.num_states() == instance.num_states(), "kernel state space mismatch");
      state = k.sample_next(state, uniform01(rng));
    }
  }
  return panel;
}

// ---------------------------------------------------------------------------
// Exact evolution

std::vector<std::vector<double>> evolve_distribution(std::span<const double> f0,
                                                     std::span<const TabularKernel* const> kernels) {
  std::vector<std::vector<double>> out;
  out.reserve(kernels.size() + 1);
  out.emplace_back(f0.begin(), f0.end());
  for (const TabularKernel* k : kernels) {
    require(k->num_states() == f0.size(), "kernel and distribution sizes differ");
    std::vector<double> next(f0.size());
    simd::vec_mat(out.back(), k->matrix(), next);
    out.push_back(std::move(next));
  }
  return out;
}

namespace {

// Calls visit(t, f_t, nb_t) for t = 1..T where f_t is the exact state law of
// `unit` at round t and nb_t the neighborhood treatments supplied by fill.
template <typename Fill, typename Visit>
void walk_marginals(const Instance& instance, std::size_t unit, Fill&& fill, Visit&& visit) {
  const auto n_states = instance.num_states();
  std::vector<double> f(instance.initial(unit).begin(), instance.initial(unit).end());
  std::vector<double> next(n_states);
  std::vector<std::uint8_t> nb;
  for (std::size_t t = 1; t <= instance.horizon(); ++t) {
    fill(t, nb);
    visit(t, std::span<const double>(f), std::span<const std::uint8_t>(nb));
    if (t == instance.horizon()) break;
    simd::vec_mat(f, instance.kernels().kernel(unit, t, nb).matrix(), next);
    f.swap(next);
  }
}

}  // namespace

std::vector<std::vector<double>> state_marginals(const Instance& instance, const TreatmentMatrix& w,
                                                 std::size_t unit) {
  check_shape(instance, w);
  std::vector<std::vector<double>> out;
  walk_marginals(
      instance, unit, [&](std::size_t t, std::vector<std::uint8_t>& nb) { gather(instance.graph(), w, unit, t, nb); },
      [&](std::size_t, std::span<const double> f, std::span<const std::uint8_t>) {
        out.emplace_back(f.begin(), f.end());
      });
  return out;
}

std::vector<double> exact_mean_outcomes(const Instance& instance, const TreatmentMatrix& w, std::size_t unit) {
  check_shape(instance, w);
  std::vector<double> means;
  std::vector<double> mu(instance.num_states());
  walk_marginals(
      instance, unit, [&](std::size_t t, std::vector<std::uint8_t>& nb) { gather(instance.graph(), w, unit, t, nb); },
      [&](std::size_t t, std::span<const double> f, std::span<const std::uint8_t> nb) {
        instance.outcomes().mean_vector(unit, t, nb, mu);
        means.push_back(simd::dot(f, mu));
      });
  return means;
}

std::vector<double> constant_policy_means(const Instance& instance, std::size_t unit, std::uint8_t arm) {
  require(arm <= 1, "arm must be 0 or 1");
  const auto width = instance.graph().closed_neighborhood(unit).size();
  std::vector<double> means;
  std::vector<double> mu(instance.num_states());
  walk_marginals(
      instance, unit, [&](std::size_t, std::vector<std::uint8_t>& nb) { nb.assign(width, arm); },
      [&](std::size_t t, std::span<const double> f, std::span<const std::uint8_t> nb) {
        instance.outcomes().mean_vector(unit, t, nb, mu);
        means.push_back(simd::dot(f, mu));
      });
  return means;
}

double mean_outcome_exact(const Instance& instance, std::size_t unit, std::size_t round, std::uint8_t arm) {
  require(round >= 1 && round <= instance.horizon(), "round out of range");
  return constant_policy_means(instance, unit, arm)[round - 1];
}

double gate_oracle(const Instance& instance) {
  double total = 0.0;
  for (std::size_t i = 0; i < instance.units(); ++i) {
    const auto treated = constant_policy_means(instance, i, 1);
    const auto control = constant_policy_means(instance, i, 0);
    for (std::size_t t = 0; t < treated.size(); ++t) total += treated[t] - control[t];
  }
  return total / static_cast<double>(instance.units() * instance.horizon());
}

double tv_distance(std::span<const double> f, std::span<const double> g) {
  return 0.5 * simd::l1_distance(f, g);
}

double dobrushin_coefficient(const TabularKernel& k) {
  double worst = 0.0;
  for (std::size_t x = 0; x < k.num_states(); ++x) {
    for (std::size_t y = x + 1; y < k.num_states(); ++y) {
      worst = std::max(worst, tv_distance(k.row(x), k.row(y)));
    }
  }
  return std::min(worst, 1.0);
}

double multi_unit_p_up(const InterferenceGraph& g, std::size_t h, const TreatmentMatrix& w, std::size_t unit,
                       std::size_t round) {
  std::size_t treated = 0;
  for (std::size_t j : g.closed_neighborhood(unit)) treated += w(j, round);
  return 0.1 + 0.8 * static_cast<double>(treated) / static_cast<double>(2 * h + 1);
}

}  // namespace cswitch
