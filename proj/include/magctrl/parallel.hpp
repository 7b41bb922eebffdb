#pragma once
#include <algorithm>
#include <complex>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

// Parallel primitives. Reductions are blocked with a fixed block size so the
// accumulation order (and therefore the result, bit for bit) does not depend
// on the thread count.
namespace magctrl {

using cplx = std::complex<double>;

inline constexpr std::int64_t kReduceBlock = 4096;

template <class F>
void parallel_for(std::int64_t n, F&& f) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) f(i);
#else
  for (std::int64_t i = 0; i < n; ++i) f(i);
#endif
}

template <class T, class F>
T blocked_sum(std::int64_t n, F&& f) {
  const std::int64_t nb = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<T> partial(static_cast<std::size_t>(nb), T{});
  parallel_for(nb, [&](std::int64_t b) {
    const std::int64_t lo = b * kReduceBlock;
    const std::int64_t hi = std::min(n, lo + kReduceBlock);
    T s{};
    for (std::int64_t i = lo; i < hi; ++i) s += f(i);
    partial[static_cast<std::size_t>(b)] = s;
  });
  T total{};
  for (const T& p : partial) total += p;  // fixed order
  return total;
}

inline std::size_t blocked_count(std::size_t n) {
  return (n + static_cast<std::size_t>(kReduceBlock) - 1) /
         static_cast<std::size_t>(kReduceBlock);
}

// Runs f(block_index, lo, hi) over fixed-size blocks; lets one pass feed
// several per-block accumulators that the caller combines in block order.
template <class F>
void parallel_for_blocks(std::size_t n, F&& f) {
  const std::int64_t nb = static_cast<std::int64_t>(blocked_count(n));
  parallel_for(nb, [&](std::int64_t b) {
    const std::size_t lo = static_cast<std::size_t>(b) *
                           static_cast<std::size_t>(kReduceBlock);
    const std::size_t hi =
        std::min(n, lo + static_cast<std::size_t>(kReduceBlock));
    f(static_cast<std::size_t>(b), lo, hi);
  });
}

template <class F>
double parallel_sum(std::int64_t n, F&& f) {
  return blocked_sum<double>(n, std::forward<F>(f));
}

template <class F>
cplx parallel_sum_c(std::int64_t n, F&& f) {
  return blocked_sum<cplx>(n, std::forward<F>(f));
}

// Serial reference implementations, kept for the comparison tests and the
// kernel benchmark.
namespace ref {

template <class F>
void serial_for(std::int64_t n, F&& f) {
  for (std::int64_t i = 0; i < n; ++i) f(i);
}

template <class T, class F>
T blocked_sum(std::int64_t n, F&& f) {
  const std::int64_t nb = (n + kReduceBlock - 1) / kReduceBlock;
  T total{};
  for (std::int64_t b = 0; b < nb; ++b) {
    const std::int64_t lo = b * kReduceBlock;
    const std::int64_t hi = std::min(n, lo + kReduceBlock);
    T s{};
    for (std::int64_t i = lo; i < hi; ++i) s += f(i);
    total += s;
  }
  return total;
}

template <class F>
double serial_sum(std::int64_t n, F&& f) {
  return blocked_sum<double>(n, std::forward<F>(f));
}

template <class F>
cplx serial_sum_c(std::int64_t n, F&& f) {
  return blocked_sum<cplx>(n, std::forward<F>(f));
}

}  // namespace ref
}  // namespace magctrl
