#include "bowenlab/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace bowenlab::kernels {

namespace {

int default_threads() {
  if (const char* env = std::getenv("BOWENLAB_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

std::atomic<int>& thread_setting() {
  static std::atomic<int> n{default_threads()};
  return n;
}

}  // namespace

int thread_count() { return thread_setting().load(std::memory_order_relaxed); }

void set_thread_count(int n) { thread_setting().store(n > 0 ? n : default_threads()); }

Csr transpose(const Csr& m) {
  const std::size_t n = m.rows();
  Csr t;
  t.offsets.assign(n + 1, 0);
  for (auto j : m.targets) ++t.offsets[static_cast<std::size_t>(j) + 1];
  for (std::size_t i = 0; i < n; ++i) t.offsets[i + 1] += t.offsets[i];
  t.targets.resize(m.targets.size());
  std::vector<std::int64_t> cursor(t.offsets.begin(), t.offsets.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto k = m.offsets[i]; k < m.offsets[i + 1]; ++k) {
      const auto j = static_cast<std::size_t>(m.targets[static_cast<std::size_t>(k)]);
      t.targets[static_cast<std::size_t>(cursor[j]++)] = static_cast<std::int32_t>(i);
    }
  }
  return t;
}

namespace {

inline double row_value(const Csr& m, std::size_t i, const double* rw, const double* cw,
                        const double* x, double shift) {
  double acc = 0.0;
  const auto end = m.offsets[i + 1];
  if (cw) {
    for (auto k = m.offsets[i]; k < end; ++k) {
      const auto j = m.targets[static_cast<std::size_t>(k)];
      acc += cw[j] * x[j];
    }
  } else {
    for (auto k = m.offsets[i]; k < end; ++k) acc += x[m.targets[static_cast<std::size_t>(k)]];
  }
  if (rw) acc *= rw[i];
  return acc + shift * x[i];
}

}  // namespace

namespace serial {
void weighted_matvec(const Csr& m, const double* rw, const double* cw, const double* x, double* y,
                     double shift) {
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i) y[i] = row_value(m, i, rw, cw, x, shift);
}
}  // namespace serial

namespace omp {
void weighted_matvec(const Csr& m, const double* rw, const double* cw, const double* x, double* y,
                     double shift) {
  const auto n = static_cast<std::int64_t>(m.rows());
#pragma omp parallel for schedule(static, 1024) num_threads(thread_count())
  for (std::int64_t i = 0; i < n; ++i) {
    y[i] = row_value(m, static_cast<std::size_t>(i), rw, cw, x, shift);
  }
}
}  // namespace omp

void weighted_matvec(const Csr& m, const double* rw, const double* cw, const double* x, double* y,
                     double shift) {
  if (thread_count() > 1 && m.nnz() > 65536) {
    omp::weighted_matvec(m, rw, cw, x, y, shift);
  } else {
    serial::weighted_matvec(m, rw, cw, x, y, shift);
  }
}

}  // namespace bowenlab::kernels
