#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace umcmc {

using PhiloxCounter = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;

/// One application of the Philox4x64-10 bijection.
PhiloxCounter philox4x64_10(PhiloxCounter counter, PhiloxKey key);

/// Counter-based random stream keyed by (seed, stream_id).
///
/// The Philox key is the pair (seed, stream_id) and the counter is the
/// position in the stream, so creating the stream for any replicate is O(1)
/// and its output does not depend on which thread runs it. The output
/// sequence coincides with numpy's `Philox(key=[seed, stream_id])`.
///
/// A stream must be owned by one replicate at a time; it is movable and
/// copyable (a copy replays the same future draws).
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();

  /// Standard normal draw.
  double normal();

  /// An independent stream keyed by a fresh draw from this one and `index`.
  /// Successive calls to `child_key()` followed by `RngStream(key, index)`
  /// give reproducible families of sub-streams (e.g. one per CFTP time step).
  std::uint64_t child_key() { return (*this)(); }

  std::uint64_t seed() const { return key_[0]; }
  std::uint64_t stream_id() const { return key_[1]; }

  /// Number of 64-bit words drawn so far.
  std::uint64_t position() const { return draws_; }

 private:
  PhiloxKey key_;
  PhiloxCounter counter_{};
  PhiloxCounter buffer_{};
  int buffer_pos_ = 4;
  std::uint64_t draws_ = 0;
};

}  // namespace umcmc
