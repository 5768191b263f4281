#pragma once

// Counter-based random numbers. A draw is a pure function of
// (seed, stream_id, attempt, x1, x2, counter), so per-direction draws do not
// depend on which other directions were visited.

#include <cstdint>
#include <limits>

namespace cvxlines {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// 53-bit uniform in [0,1).
constexpr double to_unit(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  // Keyed draws.
  std::uint64_t bits_at(std::uint64_t attempt, std::int64_t x1, std::int64_t x2,
                        std::uint64_t counter) const noexcept;
  double uniform_at(std::uint64_t attempt, std::int64_t x1, std::int64_t x2,
                    std::uint64_t counter) const noexcept {
    return to_unit(bits_at(attempt, x1, x2, counter));
  }

  // Sequential draws from the stream's own counter.
  std::uint64_t operator()() noexcept;
  double uniform() noexcept { return to_unit((*this)()); }
  // Exp(1) variate.
  double exponential() noexcept;

  // Independent child stream, e.g. one per replicate or per attempt.
  RngStream derive(std::uint64_t sub) const noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace cvxlines
