#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace idlab {

/// Counter-based random stream (Philox4x32-10). The output sequence is a pure
/// function of (seed, stream_id, draw index), so independent experiment cells
/// can draw reproducibly without sharing any mutable state.
class RngStream {
 public:
  using result_type = std::uint32_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform();
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Derive an independent child stream; children with distinct ids never overlap.
  RngStream child(std::uint64_t sub_id) const;

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

}  // namespace idlab
