#include "cswitch/design.hpp"

#include <algorithm>

#include "cswitch/error.hpp"

namespace cswitch {

TimeBlocks::TimeBlocks(std::size_t horizon, std::size_t block_length)
    : horizon_(horizon), block_length_(block_length) {
  require(horizon >= 1, "horizon must be >= 1");
  require(block_length >= 1, "block length must be >= 1");
}

std::size_t TimeBlocks::last_round(std::size_t block) const {
  return std::min((block + 1) * block_length_, horizon_);
}

bool TreatmentMatrix::is_cluster_block_constant(const Clustering& pi, const TimeBlocks& blocks) const {
  for (const auto& members : pi.clusters()) {
    for (std::size_t k = 0; k < blocks.count(); ++k) {
      const auto first = (*this)(members.front(), blocks.first_round(k));
      for (std::size_t u : members) {
        for (std::size_t t = blocks.first_round(k); t <= blocks.last_round(k); ++t) {
          if ((*this)(u, t) != first) return false;
        }
      }
    }
  }
  return true;
}

TreatmentMatrix TreatmentMatrix::flipped() const {
  TreatmentMatrix out = *this;
  for (auto& v : out.data_) v = static_cast<std::uint8_t>(1 - v);
  return out;
}

TreatmentMatrix sample_switchback(const Clustering& pi, const TimeBlocks& blocks, Rng& rng) {
  TreatmentMatrix w(pi.num_units(), blocks.horizon());
  for (std::size_t c = 0; c < pi.num_clusters(); ++c) {
    for (std::size_t k = 0; k < blocks.count(); ++k) {
      const auto arm = static_cast<std::uint8_t>(fair_coin(rng));
      for (std::size_t u : pi.members(c)) {
        for (std::size_t t = blocks.first_round(k); t <= blocks.last_round(k); ++t) w.set(u, t, arm);
      }
    }
  }
  return w;
}

TreatmentMatrix constant_policy(std::uint8_t arm, std::size_t n_units, std::size_t horizon) {
  require(arm <= 1, "arm must be 0 or 1");
  return TreatmentMatrix(n_units, horizon, arm);
}

void write_csv(std::ostream& out, const TreatmentMatrix& w) {
  for (std::size_t i = 0; i < w.units(); ++i) {
    for (std::size_t t = 1; t <= w.horizon(); ++t) {
      if (t > 1) out << ',';
      out << static_cast<int>(w(i, t));
    }
    out << '\n';
  }
}

}  // namespace cswitch
