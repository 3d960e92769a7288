#include <doctest.h>

#include <cmath>

#include "cswitch/dynamics.hpp"
#include "cswitch/error.hpp"
#include "cswitch/mixing.hpp"
#include "support.hpp"

using namespace cswitch;

TEST_SUITE("mixing") {
  TEST_CASE("rows-identical kernel collapses in one step") {
    const TabularKernel k(3, {0.2, 0.3, 0.5, 0.2, 0.3, 0.5, 0.2, 0.3, 0.5});
    const auto est = estimate_tmix(k);
    CHECK(est.t_mix <= 1.0);
    CHECK(est.t_mix > 0.0);
    REQUIRE_FALSE(est.max_pair_tv.empty());
    CHECK(est.max_pair_tv.front() == 0.0);
  }

  TEST_CASE("identity kernel does not mix") {
    CHECK_THROWS_AS(estimate_tmix(TabularKernel::identity(3), 500), NotMixing);
    CHECK_THROWS_AS(contraction_tmix(TabularKernel::identity(2)), NotMixing);
  }

  TEST_CASE("d(k) is nonincreasing") {
    Rng rng(3);
    for (int rep = 0; rep < 20; ++rep) {
      const auto k = testing::random_kernel(6, rng, 0.3);
      try {
        const auto est = estimate_tmix(k, 5000);
        for (std::size_t j = 1; j < est.max_pair_tv.size(); ++j) {
          REQUIRE(est.max_pair_tv[j] <= est.max_pair_tv[j - 1] + 1e-12);
        }
      } catch (const NotMixing&) {
        // sparse random kernels can be reducible
      }
    }
  }

  TEST_CASE("clipped walk estimates grow with m and are frozen") {
    struct Row {
      std::size_t m;
      double t_mix;
    };
    // Regression values from the exact evolution of the p = 0.9 walk.
    const Row rows[] = {{3, 1.6364880969485713}, {5, 1.8611711090987797}, {10, 2.1667461012050047},
                        {30, 2.9198687323771741}};
    double prev = 0.0;
    for (const auto& row : rows) {
      const auto est = estimate_tmix(clipped_random_walk_kernel(row.m, 0.9));
      CHECK(est.t_mix == doctest::Approx(row.t_mix).epsilon(1e-9));
      CHECK(est.t_mix > prev);
      CHECK(est.tail_points >= 10);
      CHECK(est.prefactor >= 1.0);
      prev = est.t_mix;
    }
  }

  TEST_CASE("extreme pairs agree with all pairs on the monotone walk") {
    const auto k = clipped_random_walk_kernel(5, 0.9);
    const auto a = estimate_tmix(k, 20000, PairSet::all);
    const auto b = estimate_tmix(k, 20000, PairSet::extreme);
    CHECK(a.t_mix == doctest::Approx(b.t_mix).epsilon(1e-6));
  }

  TEST_CASE("family estimate is the worst kernel") {
    const FractionalWalkFamily fam(3, std::vector<std::size_t>{1});
    const auto fam_est = estimate_tmix(fam);
    const auto up = estimate_tmix(clipped_random_walk_kernel(3, 0.9));
    const auto down = estimate_tmix(clipped_random_walk_kernel(3, 0.1));
    CHECK(fam_est.t_mix == doctest::Approx(std::max(up.t_mix, down.t_mix)));
  }

  TEST_CASE("contraction rate") {
    CHECK(contraction_tmix(TabularKernel(2, {0.5, 0.5, 0.5, 0.5})) == 0.0);
    const double p = 0.2, q = 0.3;
    CHECK(contraction_tmix(TabularKernel(2, {1 - p, p, q, 1 - q})) == doctest::Approx(-1.0 / std::log(0.5)));
    const std::vector<double> uniform(7, 1.0 / 7.0);
    const ArmKernelFamily fam(with_restart(clipped_random_walk_kernel(3, 0.1), 0.3, uniform),
                              with_restart(clipped_random_walk_kernel(3, 0.9), 0.3, uniform));
    const double tc = contraction_tmix(fam);
    CHECK(tc == doctest::Approx(-1.0 / std::log(0.7)));
    CHECK_THROWS_AS(contraction_tmix(FractionalWalkFamily(3, std::vector<std::size_t>{1})), NotMixing);
  }
}
