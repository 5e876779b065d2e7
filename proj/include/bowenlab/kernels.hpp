#pragma once

// Data-parallel kernels. Every kernel has a serial reference and an OpenMP
// version; both walk the same fixed blocks and combine partials in block
// order, so results are bitwise identical for any thread count.

#include <omp.h>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace bowenlab::kernels {

inline constexpr std::size_t kBlock = 4096;

// Compressed sparse rows of a 0/1 matrix.
struct Csr {
  std::vector<std::int64_t> offsets{0};
  std::vector<std::int32_t> targets;

  std::size_t rows() const { return offsets.size() - 1; }
  std::size_t nnz() const { return targets.size(); }
};

Csr transpose(const Csr& m);

int thread_count();
// n <= 0 restores the default (BOWENLAB_THREADS, else all cores).
void set_thread_count(int n);

// y_i = rw_i * sum_{j in row i} cw_j x_j + shift * x_i. Null weights mean 1.
namespace serial {
void weighted_matvec(const Csr& m, const double* rw, const double* cw, const double* x, double* y,
                     double shift);
}
namespace omp {
void weighted_matvec(const Csr& m, const double* rw, const double* cw, const double* x, double* y,
                     double shift);
}
void weighted_matvec(const Csr& m, const double* rw, const double* cw, const double* x, double* y,
                     double shift);

inline std::size_t block_count(std::size_t n) { return (n + kBlock - 1) / kBlock; }

namespace serial {
// Sum of f(i) over [0, n) with fixed block partials; T supports += and copy.
template <class T, class F>
T blocked_sum(std::size_t n, const T& zero, F&& f) {
  const std::size_t nb = block_count(n);
  std::vector<T> partial(nb, zero);
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    T acc = zero;
    for (std::size_t i = b * kBlock; i < end; ++i) acc += f(i);
    partial[b] = acc;
  }
  T total = zero;
  for (const auto& p : partial) total += p;
  return total;
}
}  // namespace serial

namespace omp {
template <class T, class F>
T blocked_sum(std::size_t n, const T& zero, F&& f) {
  const std::size_t nb = block_count(n);
  std::vector<T> partial(nb, zero);
  const auto snb = static_cast<std::int64_t>(nb);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count())
  for (std::int64_t b = 0; b < snb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t end = std::min(n, lo + kBlock);
    T acc = zero;
    for (std::size_t i = lo; i < end; ++i) acc += f(i);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  T total = zero;
  for (const auto& p : partial) total += p;
  return total;
}
}  // namespace omp

template <class T, class F>
T blocked_sum(std::size_t n, const T& zero, F&& f) {
  if (thread_count() > 1 && n > kBlock) return omp::blocked_sum(n, zero, f);
  return serial::blocked_sum(n, zero, f);
}

// Runs f(i) for i in [0, n); f must only write to slot i of its outputs.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  if (thread_count() > 1 && n > 1) {
    const auto sn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_count())
    for (std::int64_t i = 0; i < sn; ++i) f(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) f(i);
  }
}

}  // namespace bowenlab::kernels
