#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "cswitch/design.hpp"
#include "cswitch/error.hpp"
#include "support.hpp"

using namespace cswitch;

TEST_SUITE("design") {
  TEST_CASE("time blocks") {
    const TimeBlocks b(10, 4);
    REQUIRE(b.count() == 3);
    CHECK(b.first_round(0) == 1);
    CHECK(b.last_round(0) == 4);
    CHECK(b.first_round(1) == 5);
    CHECK(b.last_round(1) == 8);
    CHECK(b.first_round(2) == 9);
    CHECK(b.last_round(2) == 10);
    CHECK(b.block_of(9) == 2);
    CHECK(TimeBlocks(6, 6).count() == 1);
    CHECK(TimeBlocks(5, 1).count() == 5);
    CHECK(TimeBlocks(3, 10).last_round(0) == 3);
    CHECK_THROWS_AS(TimeBlocks(5, 0), ValidationError);
    CHECK_THROWS_AS(TimeBlocks(0, 2), ValidationError);
  }

  TEST_CASE("position in block") {
    CHECK(position_in_block(1, 4) == 1);
    CHECK(position_in_block(4, 4) == 4);
    CHECK(position_in_block(5, 4) == 1);
    CHECK(position_in_block(7, 1) == 1);
  }

  TEST_CASE("constant policies") {
    const auto ones = constant_policy(1, 3, 5);
    const auto zeros = constant_policy(0, 3, 5);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t t = 1; t <= 5; ++t) {
        CHECK(ones(i, t) == 1);
        CHECK(zeros(i, t) == 0);
      }
    }
    CHECK(ones.is_cluster_block_constant(singleton_clustering(3), TimeBlocks(5, 1)));
    CHECK(ones.is_cluster_block_constant(whole_clustering(3), TimeBlocks(5, 5)));
    CHECK(ones.flipped() == zeros);
    CHECK_THROWS_AS(constant_policy(2, 1, 1), ValidationError);
  }

  TEST_CASE("whole graph, one block gives a constant matrix") {
    Rng rng(1);
    int ones = 0;
    for (int k = 0; k < 200; ++k) {
      const auto w = sample_switchback(whole_clustering(4), TimeBlocks(6, 6), rng);
      const auto first = w(0, 1);
      for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t t = 1; t <= 6; ++t) REQUIRE(w(i, t) == first);
      }
      ones += first;
    }
    CHECK(ones > 60);
    CHECK(ones < 140);
  }

  TEST_CASE("sampled designs are cluster x block constant") {
    Rng rng(2);
    for (int k = 0; k < 300; ++k) {
      const auto n = 1 + rng() % 12;
      const auto horizon = 1 + rng() % 30;
      const auto pi = testing::random_clustering(n, 1 + rng() % n, rng);
      const TimeBlocks blocks(horizon, 1 + rng() % horizon);
      REQUIRE(sample_switchback(pi, blocks, rng).is_cluster_block_constant(pi, blocks));
    }
  }

  TEST_CASE("same seed, same design") {
    const auto pi = line_segment_clustering(10, 3);
    const TimeBlocks blocks(40, 7);
    Rng a(99), b(99);
    CHECK(sample_switchback(pi, blocks, a) == sample_switchback(pi, blocks, b));
  }

  TEST_CASE("coins are consumed cluster-major") {
    const auto pi = line_segment_clustering(4, 2);
    const TimeBlocks blocks(4, 2);
    Rng rng(123), replay(123);
    const auto w = sample_switchback(pi, blocks, rng);
    for (std::size_t c = 0; c < 2; ++c) {
      for (std::size_t k = 0; k < 2; ++k) {
        const int coin = fair_coin(replay);
        CHECK(w(pi.members(c)[0], blocks.first_round(k)) == coin);
      }
    }
  }

  TEST_CASE("marginal P[W_it = 1] = 1/2") {
    const auto pi = line_segment_clustering(3, 2);
    const TimeBlocks blocks(5, 2);
    const int draws = 100000;
    std::vector<int> count(15, 0);
    for (int s = 0; s < draws; ++s) {
      Rng rng = make_rng(2024, {static_cast<std::uint64_t>(s)});
      const auto w = sample_switchback(pi, blocks, rng);
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t t = 1; t <= 5; ++t) count[i * 5 + t - 1] += w(i, t);
      }
    }
    const double se = 0.5 / std::sqrt(static_cast<double>(draws));
    for (int c : count) CHECK(std::fabs(c / static_cast<double>(draws) - 0.5) <= 3.0 * se);
  }

  TEST_CASE("two clusters, two blocks: 16 equally likely matrices") {
    const auto pi = singleton_clustering(2);
    const TimeBlocks blocks(2, 1);
    const int draws = 100000;
    std::array<int, 16> hist{};
    for (int s = 0; s < draws; ++s) {
      Rng rng = make_rng(77, {static_cast<std::uint64_t>(s)});
      const auto w = sample_switchback(pi, blocks, rng);
      hist[w(0, 1) | w(0, 2) << 1 | w(1, 1) << 2 | w(1, 2) << 3]++;
    }
    double chi2 = 0.0;
    const double expected = draws / 16.0;
    for (int h : hist) chi2 += (h - expected) * (h - expected) / expected;
    // 0.999 quantile of chi-square with 15 degrees of freedom.
    CHECK(chi2 < 37.697);
  }

  TEST_CASE("bit csv") {
    TreatmentMatrix w(2, 3);
    w.set(0, 2, 1);
    w.set(1, 1, 1);
    w.set(1, 3, 1);
    std::ostringstream out;
    write_csv(out, w);
    CHECK(out.str() == "0,1,0\n1,0,1\n");
  }
}
