#include "cswitch/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "cswitch/error.hpp"
#include "cswitch/simd/kernels.hpp"

namespace cswitch {

void write_jsonl(std::ostream& out, const BoundReport& report) {
  nlohmann::json j{{"name", report.name},         {"bound", report.bound}, {"measured", report.measured},
                   {"passed", report.passed},     {"seed", report.seed},   {"config", report.config}};
  out << j.dump() << '\n';
}

double bias_bound(std::size_t radius, double t_mix) {
  require(t_mix > 0.0, "t_mix must be positive");
  return 2.0 * std::exp(-static_cast<double>(radius) / t_mix);
}

double variance_bound(const InterferenceGraph& g, const ExposureSpec& spec, std::size_t horizon, double t_mix,
                      double sigma, std::span<const double> p_mins) {
  require(t_mix > 0.0, "t_mix must be positive");
  require(horizon >= 1, "horizon must be >= 1");
  const auto n = g.size();
  require(p_mins.size() == n, "one p_min per unit required");
  for (double p : p_mins) require(p > 0.0, "p_min must be positive");

  const auto dep = dependence_edges(g, spec.clustering);
  double pair_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (auto j : dep.partners(i)) pair_sum += 1.0 / (p_mins[i] * p_mins[j]);
  }
  double degree_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) degree_sum += static_cast<double>(cluster_degree(g, spec.clustering, i));

  const double span = static_cast<double>(std::max<std::size_t>(spec.radius + spec.block_length, 1));
  const double nn = static_cast<double>(n);
  return 8.0 / (nn * nn * static_cast<double>(horizon)) *
         ((1.0 + sigma * sigma) * span * pair_sum + t_mix * std::exp(-span / t_mix) * degree_sum);
}

double mse_bound(const InterferenceGraph& g, const ExposureSpec& spec, std::size_t horizon, double t_mix,
                 double sigma, std::span<const double> p_mins) {
  const double b = bias_bound(spec.radius, t_mix);
  return b * b + variance_bound(g, spec, horizon, t_mix, sigma, p_mins);
}

std::size_t rate_optimal_length(double t_mix, std::size_t n_units, std::size_t horizon) {
  require(t_mix > 0.0, "t_mix must be positive");
  const double v = std::ceil(t_mix * std::log(static_cast<double>(n_units) * static_cast<double>(horizon)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(v));
}

// ---------------------------------------------------------------------------

BoundReport check_tv_decay(std::span<const TabularKernel* const> seq_a, std::span<const TabularKernel* const> seq_b,
                           std::span<const double> f0, std::span<const double> f0b, std::size_t window,
                           const MixingEstimate& mix) {
  require(seq_a.size() == seq_b.size(), "kernel sequences differ in length");
  require(window <= seq_a.size(), "window longer than the sequences");
  require(f0.size() == f0b.size(), "initial laws differ in size");
  const auto k = seq_a.size();
  for (std::size_t s = k - window; s < k; ++s) {
    require(seq_a[s] == seq_b[s] || *seq_a[s] == *seq_b[s], "sequences must agree on the final window");
  }
  const auto fa = evolve_distribution(f0, seq_a);
  const auto fb = evolve_distribution(f0b, seq_b);

  bool monotone = true;
  double prev = tv_distance(fa[k - window], fb[k - window]);
  const double start = prev;
  for (std::size_t s = k - window + 1; s <= k; ++s) {
    const double tv = tv_distance(fa[s], fb[s]);
    if (tv > prev + 1e-12) monotone = false;
    prev = tv;
  }
  const double envelope = std::exp(-static_cast<double>(window) / mix.t_mix);

  BoundReport r;
  r.name = "tv_decay";
  r.measured = prev;
  r.bound = std::min(1.0, mix.prefactor * envelope) * start;
  r.slack = r.bound - r.measured;
  r.passed = monotone && r.measured <= r.bound + 1e-12;
  r.config = {{"window", window},
              {"steps", k},
              {"t_mix", mix.t_mix},
              {"prefactor", mix.prefactor},
              {"tv_at_window_start", start},
              {"monotone", monotone},
              {"literal_bound", envelope * start}};
  return r;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kPmfTol = 1e-12;

double prob_where(const JointPmf& pmf, const std::function<bool(const JointAtom&)>& pred) {
  double p = 0.0;
  for (const auto& a : pmf) {
    if (pred(a)) p += a.prob;
  }
  return p;
}

// Checks that `value(atom)` is independent of `other(atom)` given cond(atom) = c
// for each c in {0, 1} with positive mass.
void require_cond_indep(const JointPmf& pmf, int (*cond)(const JointAtom&), double (*value)(const JointAtom&),
                        int (*other)(const JointAtom&), const char* what) {
  for (int c = 0; c <= 1; ++c) {
    const double pc = prob_where(pmf, [&](const JointAtom& a) { return cond(a) == c; });
    if (pc <= kPmfTol) continue;
    std::map<double, double> pv;
    std::map<std::pair<double, int>, double> pvo;
    double po[2] = {0, 0};
    for (const auto& a : pmf) {
      if (cond(a) != c) continue;
      pv[value(a)] += a.prob / pc;
      pvo[{value(a), other(a)}] += a.prob / pc;
      po[other(a)] += a.prob / pc;
    }
    for (const auto& [x, p] : pv) {
      for (int o = 0; o <= 1; ++o) {
        const auto it = pvo.find({x, o});
        const double joint = it == pvo.end() ? 0.0 : it->second;
        require(std::fabs(joint - p * po[o]) <= kPmfTol, what);
      }
    }
  }
}

}  // namespace

BoundReport check_cond_cov(const JointPmf& pmf) {
  double total = 0.0;
  for (const auto& a : pmf) {
    require((a.u == 0 || a.u == 1) && (a.v == 0 || a.v == 1), "U and V must be binary");
    require(a.prob >= 0.0, "negative probability");
    total += a.prob;
  }
  require(std::fabs(total - 1.0) <= kPmfTol, "pmf does not sum to 1");

  const double p = prob_where(pmf, [](const JointAtom& a) { return a.u == 1; });
  const double q = prob_where(pmf, [](const JointAtom& a) { return a.v == 1; });
  const double p11 = prob_where(pmf, [](const JointAtom& a) { return a.u == 1 && a.v == 1; });
  require(std::fabs(p11 - p * q) <= kPmfTol, "U and V are not independent");
  require(p11 > kPmfTol, "P[U = V = 1] must be positive");
  require_cond_indep(
      pmf, [](const JointAtom& a) { return a.u; }, [](const JointAtom& a) { return a.x; },
      [](const JointAtom& a) { return a.v; }, "X is not independent of V given U");
  require_cond_indep(
      pmf, [](const JointAtom& a) { return a.v; }, [](const JointAtom& a) { return a.y; },
      [](const JointAtom& a) { return a.u; }, "Y is not independent of U given V");

  double e_uxvy = 0, e_ux = 0, e_vy = 0, e_xy11 = 0, e_x11 = 0, e_y11 = 0;
  for (const auto& a : pmf) {
    e_uxvy += a.prob * a.u * a.x * a.v * a.y;
    e_ux += a.prob * a.u * a.x;
    e_vy += a.prob * a.v * a.y;
    if (a.u == 1 && a.v == 1) {
      e_xy11 += a.prob * a.x * a.y / p11;
      e_x11 += a.prob * a.x / p11;
      e_y11 += a.prob * a.y / p11;
    }
  }
  BoundReport r;
  r.name = "cond_cov";
  r.measured = e_uxvy - e_ux * e_vy;
  r.bound = p * q * (e_xy11 - e_x11 * e_y11);
  r.slack = std::fabs(r.measured - r.bound);
  r.passed = r.slack <= 1e-12;
  r.config = {{"p", p}, {"q", q}, {"atoms", pmf.size()}};
  return r;
}

JointPmf random_cond_cov_pmf(Rng& rng) {
  auto random_pmf = [&](std::size_t k) {
    std::vector<double> w(k);
    double s = 0.0;
    for (auto& x : w) s += (x = 0.05 + uniform01(rng));
    for (auto& x : w) x /= s;
    return w;
  };
  auto support = [&](std::size_t k) {
    std::vector<double> v(k);
    for (auto& x : v) x = std::round((uniform01(rng) * 4.0 - 2.0) * 8.0) / 8.0;
    return v;
  };
  const double p = 0.1 + 0.8 * uniform01(rng);
  const double q = 0.1 + 0.8 * uniform01(rng);
  const std::size_t nz = 1 + rng() % 3;
  const auto pz = random_pmf(nz);
  const std::size_t nx = 1 + rng() % 4;
  const std::size_t ny = 1 + rng() % 4;
  const auto xs = support(nx);
  const auto ys = support(ny);
  // Conditional laws of X given (U, Z) and of Y given (V, Z).
  std::vector<std::vector<double>> px(2 * nz), py(2 * nz);
  for (auto& v : px) v = random_pmf(nx);
  for (auto& v : py) v = random_pmf(ny);

  std::map<std::tuple<int, int, double, double>, double> merged;
  for (int u = 0; u <= 1; ++u) {
    for (int v = 0; v <= 1; ++v) {
      const double puv = (u ? p : 1 - p) * (v ? q : 1 - q);
      for (std::size_t z = 0; z < nz; ++z) {
        for (std::size_t a = 0; a < nx; ++a) {
          for (std::size_t b = 0; b < ny; ++b) {
            merged[{u, v, xs[a], ys[b]}] += puv * pz[z] * px[u * nz + z][a] * py[v * nz + z][b];
          }
        }
      }
    }
  }
  JointPmf pmf;
  for (const auto& [key, prob] : merged) {
    pmf.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key), prob});
  }
  return pmf;
}

// ---------------------------------------------------------------------------

std::vector<TreatmentMatrix> designs_in_event(const Clustering& pi, const TimeBlocks& blocks,
                                              const std::function<bool(const TreatmentMatrix&)>& keep) {
  const auto coins = pi.num_clusters() * blocks.count();
  require(coins <= 20, "too many cluster x block coins to enumerate");
  std::vector<TreatmentMatrix> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << coins); ++mask) {
    TreatmentMatrix w(pi.num_units(), blocks.horizon());
    for (std::size_t c = 0; c < pi.num_clusters(); ++c) {
      for (std::size_t k = 0; k < blocks.count(); ++k) {
        const auto arm = static_cast<std::uint8_t>(mask >> (c * blocks.count() + k) & 1);
        for (auto i : pi.members(c)) {
          for (std::size_t t = blocks.first_round(k); t <= blocks.last_round(k); ++t) w.set(i, t, arm);
        }
      }
    }
    if (keep(w)) out.push_back(std::move(w));
  }
  return out;
}

namespace {

void neighborhood_of(const Instance& inst, const TreatmentMatrix& w, std::size_t unit, std::size_t round,
                     std::vector<std::uint8_t>& nb) {
  const auto idx = inst.graph().closed_neighborhood(unit);
  nb.resize(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) nb[k] = w(idx[k], round);
}

// E[Y_a Y_b | w] and the two means for one unit, rounds a <= b.
std::tuple<double, double, double> same_unit_moments(const Instance& inst, const TreatmentMatrix& w,
                                                     std::size_t unit, std::size_t a, std::size_t b) {
  const auto n = inst.num_states();
  const auto marg = state_marginals(inst, w, unit);
  std::vector<std::uint8_t> nb;
  std::vector<double> mu_a(n), mu_b(n), g(n), next(n);
  neighborhood_of(inst, w, unit, a, nb);
  inst.outcomes().mean_vector(unit, a, nb, mu_a);
  neighborhood_of(inst, w, unit, b, nb);
  inst.outcomes().mean_vector(unit, b, nb, mu_b);

  // g(s) = E[mu_b(S_b) | S_a = s]
  g = mu_b;
  for (std::size_t t = b; t-- > a;) {
    neighborhood_of(inst, w, unit, t, nb);
    simd::mat_vec(inst.kernels().kernel(unit, t, nb).matrix(), g, next);
    g.swap(next);
  }
  double cross = 0.0;
  for (std::size_t s = 0; s < n; ++s) cross += marg[a - 1][s] * mu_a[s] * g[s];
  if (a == b) cross += inst.outcomes().noise_sigma() * inst.outcomes().noise_sigma();
  return {cross, simd::dot(marg[a - 1], mu_a), simd::dot(marg[b - 1], mu_b)};
}

}  // namespace

BoundReport check_cov_outcomes(const Instance& instance, std::span<const TreatmentMatrix> event, std::size_t unit_a,
                               std::size_t round_a, std::size_t unit_b, std::size_t round_b, double t_mix,
                               Rng& rng, std::size_t reps, double prefactor) {
  require(!event.empty(), "conditioning event is empty");
  require(t_mix > 0.0, "t_mix must be positive");
  const auto lag = round_a > round_b ? round_a - round_b : round_b - round_a;

  BoundReport r;
  r.name = "cov_outcomes";
  r.bound = std::min(1.0, prefactor * std::exp(-static_cast<double>(lag) / t_mix));
  r.config = {{"unit_a", unit_a}, {"unit_b", unit_b}, {"round_a", round_a},   {"round_b", round_b},
              {"t_mix", t_mix},   {"prefactor", prefactor}, {"designs", event.size()}};

  if (unit_a == unit_b) {
    const auto lo = std::min(round_a, round_b);
    const auto hi = std::max(round_a, round_b);
    double cross = 0.0, ma = 0.0, mb = 0.0;
    for (const auto& w : event) {
      const auto [c, a, b] = same_unit_moments(instance, w, unit_a, lo, hi);
      cross += c;
      ma += a;
      mb += b;
    }
    const double k = static_cast<double>(event.size());
    r.measured = cross / k - (ma / k) * (mb / k);
    r.slack = r.bound - r.measured;
    r.passed = r.measured <= r.bound + 1e-12;
    r.config["method"] = "exact";
    return r;
  }

  std::vector<double> ya(reps), yb(reps);
  for (std::size_t k = 0; k < reps; ++k) {
    const auto& w = event[rng() % event.size()];
    const auto panel = simulate_panel(instance, w, rng);
    ya[k] = panel(unit_a, round_a);
    yb[k] = panel(unit_b, round_b);
  }
  double ma = 0.0, mb = 0.0;
  for (std::size_t k = 0; k < reps; ++k) {
    ma += ya[k];
    mb += yb[k];
  }
  const double n = static_cast<double>(reps);
  ma /= n;
  mb /= n;
  double c = 0.0, c2 = 0.0;
  for (std::size_t k = 0; k < reps; ++k) {
    const double prod = (ya[k] - ma) * (yb[k] - mb);
    c += prod;
    c2 += prod * prod;
  }
  c /= n;
  const double se = std::sqrt(std::max(0.0, c2 / n - c * c) / n);
  r.measured = c;
  r.slack = r.bound + 3.0 * se - r.measured;
  r.passed = r.measured <= r.bound + 3.0 * se;
  r.config["method"] = "monte_carlo";
  r.config["reps"] = reps;
  r.config["se"] = se;
  return r;
}

BoundReport check_initial_state(const Instance& instance, std::span<const double> d_a, std::span<const double> d_b,
                                const TreatmentMatrix& w, std::size_t unit, double t_mix) {
  require(t_mix > 0.0, "t_mix must be positive");
  const auto inst_a = instance.with_initial({std::vector<double>(d_a.begin(), d_a.end())});
  const auto inst_b = instance.with_initial({std::vector<double>(d_b.begin(), d_b.end())});
  const auto mean_a = exact_mean_outcomes(inst_a, w, unit);
  const auto mean_b = exact_mean_outcomes(inst_b, w, unit);
  std::vector<double> gap(mean_a.size());
  double peak = 0.0;
  for (std::size_t t = 0; t < gap.size(); ++t) {
    gap[t] = std::fabs(mean_a[t] - mean_b[t]);
    peak = std::max(peak, gap[t]);
  }

  BoundReport r;
  r.name = "initial_state";
  r.bound = -0.8 / t_mix;
  r.config = {{"t_mix", t_mix}, {"unit", unit}, {"horizon", gap.size()}, {"peak_gap", peak}};
  if (peak <= 1e-15) {
    r.measured = -INFINITY;
    r.slack = INFINITY;
    r.passed = true;
    r.config["note"] = "identical means";
    return r;
  }

  std::size_t onset = 0;
  while (gap[onset] >= 0.5 * peak) ++onset;
  bool monotone = true;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t t = onset; t < gap.size(); ++t) {
    if (t > onset && gap[t] > gap[t - 1] + 1e-12) monotone = false;
    if (gap[t] <= 1e-12) continue;
    const double x = static_cast<double>(t + 1);
    const double y = std::log(gap[t]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  double slope = -INFINITY;
  if (n >= 2) {
    const double nn = static_cast<double>(n);
    slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  }
  r.measured = slope;
  r.slack = r.bound - slope;
  r.passed = monotone && slope <= r.bound;
  r.config["onset_round"] = onset + 1;
  r.config["fit_points"] = n;
  r.config["monotone"] = monotone;
  return r;
}

}  // namespace cswitch
