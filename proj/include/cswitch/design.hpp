#pragma once
// Time blocking and clustered switchback treatment assignment.
//
// Rounds are 1-indexed everywhere in the public interface: round t ranges
// over 1..T.

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include "cswitch/graph.hpp"
#include "cswitch/rng.hpp"

namespace cswitch {

/// Uniform partition of rounds 1..T into blocks of `block_length`; only the
/// last block may be shorter.
class TimeBlocks {
 public:
  /// Throws ValidationError if horizon < 1 or block_length < 1.
  TimeBlocks(std::size_t horizon, std::size_t block_length);

  std::size_t horizon() const { return horizon_; }
  std::size_t block_length() const { return block_length_; }
  std::size_t count() const { return (horizon_ + block_length_ - 1) / block_length_; }

  /// 0-based index of the block holding round t.
  std::size_t block_of(std::size_t round) const { return (round - 1) / block_length_; }

  /// First and last round (inclusive) of block k.
  std::size_t first_round(std::size_t block) const { return block * block_length_ + 1; }
  std::size_t last_round(std::size_t block) const;

 private:
  std::size_t horizon_;
  std::size_t block_length_;
};

/// Offset of round t inside its block, in 1..ell.
inline std::size_t position_in_block(std::size_t round, std::size_t block_length) {
  return round - block_length * ((round - 1) / block_length);
}

/// Binary N x T matrix W.
class TreatmentMatrix {
 public:
  TreatmentMatrix() = default;
  TreatmentMatrix(std::size_t n_units, std::size_t horizon, std::uint8_t fill = 0)
      : n_(n_units), t_(horizon), data_(n_units * horizon, fill) {}

  std::size_t units() const { return n_; }
  std::size_t horizon() const { return t_; }

  std::uint8_t operator()(std::size_t unit, std::size_t round) const {
    return data_[unit * t_ + round - 1];
  }
  void set(std::size_t unit, std::size_t round, std::uint8_t arm) {
    data_[unit * t_ + round - 1] = arm;
  }

  /// Treatments of `unit` for rounds 1..T.
  std::span<const std::uint8_t> row(std::size_t unit) const {
    return {data_.data() + unit * t_, t_};
  }

  /// True if W is constant on every cluster x block rectangle.
  bool is_cluster_block_constant(const Clustering& pi, const TimeBlocks& blocks) const;

  /// Arms swapped (W -> 1 - W).
  TreatmentMatrix flipped() const;

  bool operator==(const TreatmentMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t t_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Draws one fair coin per (cluster, block) rectangle, consuming coins in
/// (cluster id ascending, block index ascending) order.
TreatmentMatrix sample_switchback(const Clustering& pi, const TimeBlocks& blocks, Rng& rng);

/// All entries equal to `arm`.
TreatmentMatrix constant_policy(std::uint8_t arm, std::size_t n_units, std::size_t horizon);

/// Row-major bit CSV: one line per unit, T comma-separated 0/1 values.
void write_csv(std::ostream& out, const TreatmentMatrix& w);

}  // namespace cswitch
