#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "cswitch/bounds.hpp"
#include "cswitch/error.hpp"
#include "cswitch/generators.hpp"
#include "support.hpp"

using namespace cswitch;

TEST_SUITE("bounds") {
  TEST_CASE("bias bound") {
    CHECK(bias_bound(0, 3.0) == doctest::Approx(2.0));
    const double t = 2.5;
    CHECK(bias_bound(static_cast<std::size_t>(std::round(t * std::log(2.0) * 1000)), t * 1000) ==
          doctest::Approx(1.0).epsilon(1e-3));
    CHECK(bias_bound(10, 2.0) == doctest::Approx(0.0134758940).epsilon(1e-9));
    CHECK(bias_bound(50, 1e-3) == 0.0);
    CHECK_THROWS_AS(bias_bound(1, 0.0), ValidationError);
  }

  TEST_CASE("variance bound by hand") {
    const auto g = InterferenceGraph::build(2, {});
    const ExposureSpec spec{1, {}, 1, singleton_clustering(2)};
    const std::vector<double> p{0.25, 0.25};
    CHECK(variance_bound(g, spec, 4, 1.0, 0.0, p) == doctest::Approx(32.0 + std::exp(-2.0)));
    CHECK(variance_bound(g, spec, 4, 1.0, 1.0, p) == doctest::Approx(64.0 + std::exp(-2.0)));
    // The mixing term vanishes as t_mix -> 0.
    CHECK(variance_bound(g, spec, 4, 1e-6, 0.0, p) == doctest::Approx(32.0));
    CHECK(mse_bound(g, spec, 4, 1.0, 0.0, p) ==
          doctest::Approx(4.0 * std::exp(-2.0) + 32.0 + std::exp(-2.0)));
  }

  TEST_CASE("variance bound scaling in the special designs") {
    // No interference with singleton clusters: ~ 1 / (N T) at fixed r, ell.
    const ExposureSpec s4{2, {}, 2, singleton_clustering(4)};
    const ExposureSpec s16{2, {}, 2, singleton_clustering(16)};
    const auto v4 = variance_bound(InterferenceGraph::build(4, {}), s4, 100, 1.0, 1.0, std::vector<double>(4, 0.25));
    const auto v16 =
        variance_bound(InterferenceGraph::build(16, {}), s16, 100, 1.0, 1.0, std::vector<double>(16, 0.25));
    CHECK(v4 / v16 == doctest::Approx(4.0));

    // Whole-graph clustering: independent of N up to the O(1/N) mixing term.
    const ExposureSpec w4{2, {}, 2, whole_clustering(4)};
    const ExposureSpec w16{2, {}, 2, whole_clustering(16)};
    const auto u4 = variance_bound(line_graph(4, 1), w4, 100, 1.0, 1.0, std::vector<double>(4, 0.25));
    const auto u16 = variance_bound(line_graph(16, 1), w16, 100, 1.0, 1.0, std::vector<double>(16, 0.25));
    CHECK(u4 == doctest::Approx(u16).epsilon(1e-3));
    CHECK(u4 >= u16);
  }

  TEST_CASE("rate optimal length") {
    CHECK(rate_optimal_length(30.0, 1, 512) == 188);
    CHECK(rate_optimal_length(1.0, 1, 1) == 1);
    CHECK(rate_optimal_length(2.0, 10, 10) == 10);
  }

  TEST_CASE("TV decay") {
    const auto up = clipped_random_walk_kernel(3, 0.9);
    const auto down = clipped_random_walk_kernel(3, 0.1);
    const auto mix = estimate_tmix(up);

    std::vector<const TabularKernel*> same(12, &up);
    const auto zero = check_tv_decay(same, same, point_mass(7, 3), point_mass(7, 3), 6, mix);
    CHECK(zero.measured == 0.0);
    CHECK(zero.passed);

    const TabularKernel flat(2, {0.4, 0.6, 0.4, 0.6});
    std::vector<const TabularKernel*> one(1, &flat);
    const auto collapse = check_tv_decay(one, one, point_mass(2, 0), point_mass(2, 1), 1, mix);
    CHECK(collapse.measured == 0.0);
    CHECK(collapse.passed);

    for (std::size_t window = 5; window <= 20; window += 5) {
      std::vector<const TabularKernel*> a(window + 10, &up), b(window + 10, &up);
      for (std::size_t s = 0; s < 10; ++s) b[s] = &down;
      const auto r = check_tv_decay(a, b, point_mass(7, 3), point_mass(7, 3), window, mix);
      CHECK(r.passed);
      CHECK(r.measured <= r.bound);
      CHECK(r.config.contains("literal_bound"));
    }

    std::vector<const TabularKernel*> a(4, &up), b(4, &down);
    CHECK_THROWS_AS(check_tv_decay(a, b, point_mass(7, 3), point_mass(7, 3), 2, mix), ValidationError);
  }

  TEST_CASE("conditional covariance identity") {
    // X = Y = 1.
    JointPmf ones{{0, 0, 1, 1, 0.25}, {0, 1, 1, 1, 0.25}, {1, 0, 1, 1, 0.25}, {1, 1, 1, 1, 0.25}};
    const auto r1 = check_cond_cov(ones);
    CHECK(r1.passed);
    CHECK(std::fabs(r1.measured) <= 1e-12);

    // X = f(U), Y = g(V).
    JointPmf det{{0, 0, 2, -1, 0.25}, {0, 1, 2, 5, 0.25}, {1, 0, 7, -1, 0.25}, {1, 1, 7, 5, 0.25}};
    const auto r2 = check_cond_cov(det);
    CHECK(r2.passed);
    CHECK(std::fabs(r2.bound) <= 1e-12);

    Rng rng(21);
    for (int k = 0; k < 50; ++k) {
      const auto r = check_cond_cov(random_cond_cov_pmf(rng));
      REQUIRE(r.passed);
      REQUIRE(std::fabs(r.measured - r.bound) <= 1e-12);
    }

    // U and V dependent.
    JointPmf bad{{0, 0, 1, 1, 0.5}, {1, 1, 1, 1, 0.5}};
    CHECK_THROWS_AS(check_cond_cov(bad), ValidationError);
    // X depends on V given U.
    JointPmf leak{{0, 0, 0, 0, 0.25}, {0, 1, 1, 0, 0.25}, {1, 0, 0, 0, 0.25}, {1, 1, 1, 0, 0.25}};
    CHECK_THROWS_AS(check_cond_cov(leak), ValidationError);
  }

  TEST_CASE("covariance of outcomes") {
    GeneratorOptions opts{0.0, true};
    Rng gen(22), rng(23);
    const TimeBlocks blocks(20, 4);
    const auto all = designs_in_event(singleton_clustering(1), blocks, [](const TreatmentMatrix&) { return true; });
    CHECK(all.size() == 32);

    // Same round: the bound is 1 and clamped outcomes have variance <= 1/4.
    const auto walk = stationary_instance(1, 20, 3, gen, opts);
    const auto mix = estimate_tmix(walk.kernels());
    const auto same = check_cov_outcomes(walk, all, 0, 7, 0, 7, mix.t_mix, rng);
    CHECK(same.bound == 1.0);
    CHECK(same.passed);

    // Restart kernels contract in one step, so the plain envelope holds.
    const auto contracting = contracting_single_instance(20, 3, 0.3, gen, opts);
    const double tc = contraction_tmix(contracting.kernels());
    for (std::size_t lag = 1; lag <= 10; ++lag) {
      CHECK(check_cov_outcomes(contracting, all, 0, 5, 0, 5 + lag, tc, rng).passed);
    }
    // The clipped walk needs the fitted prefactor.
    for (std::size_t lag = 1; lag <= 10; ++lag) {
      CHECK(check_cov_outcomes(walk, all, 0, 5, 0, 5 + lag, mix.t_mix, rng, 0, mix.prefactor).passed);
    }

    // Different units with sigma = 0 and a fixed design: independent.
    Rng g2(24);
    const auto pair = stationary_instance(2, 10, 2, g2, opts);
    const std::vector<TreatmentMatrix> fixed{constant_policy(1, 2, 10)};
    const auto cross = check_cov_outcomes(pair, fixed, 0, 6, 1, 6, 1.0, rng, 50000);
    CHECK(cross.passed);
    CHECK(std::fabs(cross.measured) <= 0.01);
  }

  TEST_CASE("designs in event") {
    const auto pi = singleton_clustering(2);
    const TimeBlocks blocks(4, 2);
    const auto all = designs_in_event(pi, blocks, [](const TreatmentMatrix&) { return true; });
    CHECK(all.size() == 16);
    const auto first_on =
        designs_in_event(pi, blocks, [](const TreatmentMatrix& w) { return w(0, 1) == 1; });
    CHECK(first_on.size() == 8);
    for (const auto& w : all) CHECK(w.is_cluster_block_constant(pi, blocks));
    CHECK_THROWS_AS(designs_in_event(singleton_clustering(6), TimeBlocks(16, 4), [](const TreatmentMatrix&) {
                      return true;
                    }),
                    ValidationError);
  }

  TEST_CASE("initial state is forgotten") {
    GeneratorOptions opts{0.0, false};
    Rng gen(25);
    const auto inst = stationary_instance(1, 40, 3, gen, opts);
    const auto mix = estimate_tmix(inst.kernels());
    const auto r = check_initial_state(inst, point_mass(7, 0), point_mass(7, 6), constant_policy(1, 1, 40), 0,
                                       mix.t_mix);
    CHECK(r.passed);

    const auto same = check_initial_state(inst, point_mass(7, 2), point_mass(7, 2), constant_policy(1, 1, 40), 0,
                                          mix.t_mix);
    CHECK(same.passed);
    CHECK(same.config.at("peak_gap") == 0.0);
  }

  TEST_CASE("jsonl output") {
    BoundReport r{"x", 1.0, 0.5, 0.5, true, 7, nlohmann::json{{"k", 1}}};
    std::ostringstream out;
    write_jsonl(out, r);
    const auto j = nlohmann::json::parse(out.str());
    CHECK(j.at("name") == "x");
    CHECK(j.at("passed") == true);
    CHECK(j.at("seed") == 7);
    CHECK(j.at("config").at("k") == 1);
  }
}
