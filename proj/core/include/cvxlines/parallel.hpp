#pragma once

// Deterministic reductions. Every reduction splits the index range into
// fixed-size blocks, sums each block with Neumaier compensation and combines
// block results with a pairwise tree. The block layout depends only on the
// range length, so results are bitwise identical for any thread count.

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace cvxlines {

class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Worker count used by reductions and by replicate loops in the CLI.
// Defaults to std::thread::hardware_concurrency().
unsigned thread_count() noexcept;
void set_thread_count(unsigned threads) noexcept;

// Runs body(begin, end) over [0, count) split into `chunks` contiguous
// pieces, using up to thread_count() threads. Exceptions are rethrown.
void parallel_chunks(std::size_t count, std::size_t chunks,
                     const std::function<void(std::size_t, std::size_t)>& body);

inline constexpr std::size_t kReduceBlock = 2048;

template <std::size_t N, class Fn>
std::array<double, N> deterministic_sum(std::size_t count, Fn&& term) {
  const std::size_t blocks = (count + kReduceBlock - 1) / kReduceBlock;
  std::vector<std::array<double, N>> partial(blocks);
  parallel_chunks(blocks, blocks, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      std::array<CompensatedSum, N> acc{};
      const std::size_t end = std::min(count, (b + 1) * kReduceBlock);
      for (std::size_t i = b * kReduceBlock; i < end; ++i) {
        const std::array<double, N> t = term(i);
        for (std::size_t k = 0; k < N; ++k) acc[k].add(t[k]);
      }
      for (std::size_t k = 0; k < N; ++k) partial[b][k] = acc[k].value();
    }
  });
  if (partial.empty()) return std::array<double, N>{};
  // pairwise tree over blocks
  for (std::size_t stride = 1; stride < partial.size(); stride *= 2) {
    for (std::size_t i = 0; i + stride < partial.size(); i += 2 * stride) {
      for (std::size_t k = 0; k < N; ++k) partial[i][k] += partial[i + stride][k];
    }
  }
  return partial[0];
}

}  // namespace cvxlines
