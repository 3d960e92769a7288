#include "cswitch/mixing.hpp"

#include <algorithm>
#include <cmath>

#include "cswitch/error.hpp"
#include "cswitch/simd/kernels.hpp"

namespace cswitch {

namespace {

constexpr double kFloor = 1e-10;
constexpr std::size_t kMinTail = 10;

std::vector<double> pair_decay(const TabularKernel& k, std::size_t horizon, PairSet pairs) {
  const auto n = k.num_states();
  std::vector<double> out;
  if (n == 1) {
    out.push_back(0.0);
    return out;
  }

  // Rows of P^j for the tracked starting states.
  std::vector<std::size_t> starts;
  if (pairs == PairSet::extreme) {
    starts = {0, n - 1};
  } else {
    for (std::size_t s = 0; s < n; ++s) starts.push_back(s);
  }
  std::vector<std::vector<double>> rows;
  for (auto s : starts) rows.emplace_back(k.row(s).begin(), k.row(s).end());
  std::vector<double> next(n);

  for (std::size_t step = 1; step <= horizon; ++step) {
    if (step > 1) {
      for (auto& r : rows) {
        simd::vec_mat(r, k.matrix(), next);
        r.swap(next);
      }
    }
    double worst = 0.0;
    for (std::size_t a = 0; a < rows.size(); ++a) {
      for (std::size_t b = a + 1; b < rows.size(); ++b) worst = std::max(worst, tv_distance(rows[a], rows[b]));
    }
    out.push_back(worst);
    if (worst <= kFloor) break;
  }
  return out;
}

}  // namespace

MixingEstimate estimate_tmix(const TabularKernel& k, std::size_t horizon, PairSet pairs) {
  MixingEstimate est;
  est.max_pair_tv = pair_decay(k, horizon, pairs);
  const auto& d = est.max_pair_tv;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (d[j] > kFloor && d[j] < 0.5) {
      const double x = static_cast<double>(j + 1);
      const double y = std::log(d[j]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
  }
  est.tail_points = n;
  const bool collapsed = !d.empty() && d.back() <= kFloor;

  if (n >= kMinTail || (collapsed && n >= 2)) {
    const double nn = static_cast<double>(n);
    const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    if (!(slope < 0.0)) throw NotMixing("distance between rows does not decay");
    est.t_mix = -1.0 / slope;
  } else if (collapsed) {
    est.t_mix = static_cast<double>(d.size()) / std::log(1e15);
  } else if (n == 0) {
    throw NotMixing("distance between rows never drops below 0.5 within the horizon");
  } else {
    throw NotMixing("too few decaying steps within the horizon to fit a rate");
  }

  est.prefactor = 1.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    est.prefactor = std::max(est.prefactor, d[j] * std::exp(static_cast<double>(j + 1) / est.t_mix));
  }
  return est;
}

MixingEstimate estimate_tmix(const KernelFamily& family, std::size_t horizon, PairSet pairs) {
  MixingEstimate worst;
  bool first = true;
  for (const TabularKernel* k : family.distinct_kernels()) {
    auto est = estimate_tmix(*k, horizon, pairs);
    if (first || est.t_mix > worst.t_mix) worst = std::move(est);
    first = false;
  }
  require(!first, "kernel family is empty");
  return worst;
}

double contraction_tmix(const TabularKernel& k) {
  const double c = dobrushin_coefficient(k);
  if (c >= 1.0) throw NotMixing("Dobrushin coefficient is 1: no one-step contraction");
  return c <= 0.0 ? 0.0 : -1.0 / std::log(c);
}

double contraction_tmix(const KernelFamily& family) {
  double worst = 0.0;
  for (const TabularKernel* k : family.distinct_kernels()) worst = std::max(worst, contraction_tmix(*k));
  return worst;
}

}  // namespace cswitch
