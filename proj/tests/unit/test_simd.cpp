#include <doctest.h>

#include <cmath>
#include <vector>

#include "cswitch/simd/kernels.hpp"
#include "support.hpp"

using namespace cswitch;
namespace simd = cswitch::simd;

namespace {

std::vector<double> random_vector(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = 2.0 * uniform01(rng) - 1.0;
  return v;
}

struct IsaGuard {
  ~IsaGuard() { simd::reset_isa(); }
};

template <typename Fn>
auto under(simd::Isa isa, Fn&& fn) {
  simd::force_isa(isa);
  return fn();
}

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("scalar is always available and names are stable") {
    CHECK(simd::isa_available(simd::Isa::scalar));
    CHECK(simd::isa_name(simd::Isa::scalar) == "scalar");
    CHECK(simd::isa_name(simd::Isa::avx2) == "avx2");
  }

  TEST_CASE("forcing an unavailable variant throws") {
    IsaGuard guard;
    if (simd::isa_available(simd::Isa::avx2)) {
      simd::force_isa(simd::Isa::avx2);
      CHECK(simd::active_isa() == simd::Isa::avx2);
    } else {
      CHECK_THROWS_AS(simd::force_isa(simd::Isa::avx2), std::invalid_argument);
    }
    simd::force_isa(simd::Isa::scalar);
    CHECK(simd::active_isa() == simd::Isa::scalar);
  }

  TEST_CASE("scalar reference values") {
    const std::vector<double> a{1, 2, 3}, b{4, -5, 6};
    CHECK(simd::scalar::dot(a, b) == doctest::Approx(12.0));
    CHECK(simd::scalar::l1_distance(a, b) == doctest::Approx(3 + 7 + 3));
    // [1 2] * [[1 2 3],[4 5 6]] = [9 12 15]
    const std::vector<double> x{1, 2}, m{1, 2, 3, 4, 5, 6};
    std::vector<double> out(3);
    simd::scalar::vec_mat(x, m, out);
    CHECK(out == std::vector<double>{9, 12, 15});
    // [[1 2 3],[4 5 6]] * [1 0 -1] = [-2 -2]
    std::vector<double> col{1, 0, -1}, out2(2);
    simd::scalar::mat_vec(m, col, out2);
    CHECK(out2 == std::vector<double>{-2, -2});
  }

  TEST_CASE("avx2 matches scalar on every length and shape") {
    if (!simd::isa_available(simd::Isa::avx2)) return;
    IsaGuard guard;
    Rng rng(11);
    for (std::size_t n = 0; n <= 67; ++n) {
      const auto a = random_vector(n, rng);
      const auto b = random_vector(n, rng);
      const double d_ref = under(simd::Isa::scalar, [&] { return simd::dot(a, b); });
      const double d_vec = under(simd::Isa::avx2, [&] { return simd::dot(a, b); });
      CHECK(d_vec == doctest::Approx(d_ref).epsilon(1e-12));
      const double l_ref = under(simd::Isa::scalar, [&] { return simd::l1_distance(a, b); });
      const double l_vec = under(simd::Isa::avx2, [&] { return simd::l1_distance(a, b); });
      CHECK(l_vec == doctest::Approx(l_ref).epsilon(1e-12));

      for (std::size_t cols : {std::size_t{1}, std::size_t{3}, std::size_t{4}, std::size_t{9}, n + 1}) {
        const auto m = random_vector(n * cols, rng);
        std::vector<double> ref(cols), vec(cols);
        under(simd::Isa::scalar, [&] { simd::vec_mat(a, m, ref); return 0; });
        under(simd::Isa::avx2, [&] { simd::vec_mat(a, m, vec); return 0; });
        for (std::size_t j = 0; j < cols; ++j) CHECK(vec[j] == doctest::Approx(ref[j]).epsilon(1e-12));

        const auto xc = random_vector(cols, rng);
        std::vector<double> ref2(n), vec2(n);
        under(simd::Isa::scalar, [&] { simd::mat_vec(m, xc, ref2); return 0; });
        under(simd::Isa::avx2, [&] { simd::mat_vec(m, xc, vec2); return 0; });
        for (std::size_t j = 0; j < n; ++j) CHECK(vec2[j] == doctest::Approx(ref2[j]).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("distribution evolution agrees across variants") {
    if (!simd::isa_available(simd::Isa::avx2)) return;
    IsaGuard guard;
    Rng rng(5);
    const auto k = testing::random_kernel(61, rng);
    const auto f0 = testing::random_distribution(61, rng);
    std::vector<const TabularKernel*> seq(50, &k);
    const auto ref = under(simd::Isa::scalar, [&] { return evolve_distribution(f0, seq); });
    const auto vec = under(simd::Isa::avx2, [&] { return evolve_distribution(f0, seq); });
    for (std::size_t t = 0; t < ref.size(); ++t) {
      CHECK(tv_distance(ref[t], vec[t]) < 1e-13);
    }
  }
}
