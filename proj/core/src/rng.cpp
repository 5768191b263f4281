#include "cvxlines/rng.hpp"

#include <cmath>

namespace cvxlines {

namespace {

std::uint64_t absorb(std::uint64_t h, std::uint64_t v) noexcept {
  return splitmix64(h ^ splitmix64(v + 0x632be59bd9b4e019ULL));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : seed_(seed), stream_id_(stream_id), key_(absorb(splitmix64(seed), stream_id)) {}

std::uint64_t RngStream::bits_at(std::uint64_t attempt, std::int64_t x1, std::int64_t x2,
                                 std::uint64_t counter) const noexcept {
  std::uint64_t h = absorb(key_, attempt);
  h = absorb(h, static_cast<std::uint64_t>(x1));
  h = absorb(h, static_cast<std::uint64_t>(x2));
  return absorb(h, counter);
}

std::uint64_t RngStream::operator()() noexcept {
  return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
}

double RngStream::exponential() noexcept {
  // 1 - U lies in (0,1]
  return -std::log1p(-uniform());
}

RngStream RngStream::derive(std::uint64_t sub) const noexcept {
  return RngStream(absorb(key_, sub), stream_id_ ^ 0xd1b54a32d192ed03ULL);
}

}  // namespace cvxlines
