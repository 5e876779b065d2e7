#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "bowenlab/kernels.hpp"
#include "bowenlab/random.hpp"
#include "bowenlab/symbolic.hpp"

using namespace bowenlab;

namespace {

kernels::Csr random_graph(std::size_t n, int per_row, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  kernels::Csr g;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::int32_t> row;
    for (int k = 0; k < per_row; ++k) row.push_back(static_cast<std::int32_t>(rng() % n));
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    g.targets.insert(g.targets.end(), row.begin(), row.end());
    g.offsets.push_back(static_cast<std::int64_t>(g.targets.size()));
  }
  return g;
}

struct ThreadGuard {
  ~ThreadGuard() { kernels::set_thread_count(0); }
};

}  // namespace

TEST_CASE("serial and parallel matvec agree bitwise") {
  ThreadGuard guard;
  const auto g = random_graph(50000, 7, 3);
  std::vector<double> x(g.rows()), rw(g.rows()), cw(g.rows());
  CounterRng rng(1, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.uniform();
    rw[i] = 0.5 + rng.uniform();
    cw[i] = rng.uniform();
  }
  std::vector<double> ref(x.size());
  kernels::serial::weighted_matvec(g, rw.data(), cw.data(), x.data(), ref.data(), 0.3);
  for (int threads : {1, 2, 3, 8}) {
    kernels::set_thread_count(threads);
    std::vector<double> y(x.size());
    kernels::omp::weighted_matvec(g, rw.data(), cw.data(), x.data(), y.data(), 0.3);
    CHECK(y == ref);
    kernels::weighted_matvec(g, rw.data(), cw.data(), x.data(), y.data(), 0.3);
    CHECK(y == ref);
  }
}

TEST_CASE("matvec against a dense oracle") {
  const auto g = random_graph(40, 5, 9);
  std::vector<double> x(40), y(40);
  for (std::size_t i = 0; i < 40; ++i) x[i] = std::sin(static_cast<double>(i)) + 2.0;
  kernels::serial::weighted_matvec(g, nullptr, nullptr, x.data(), y.data(), 0.0);
  for (std::size_t i = 0; i < 40; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < 40; ++j) {
      const auto b = g.targets.begin() + g.offsets[i], e = g.targets.begin() + g.offsets[i + 1];
      if (std::binary_search(b, e, static_cast<std::int32_t>(j))) acc += x[j];
    }
    CHECK(y[i] == doctest::Approx(acc).epsilon(1e-14));
  }
}

TEST_CASE("blocked sums are independent of the thread count") {
  ThreadGuard guard;
  // Terms of wildly different magnitude make the result order-sensitive.
  auto term = [](std::size_t i) { return std::ldexp(1.0 + 1e-3 * static_cast<double>(i % 13), static_cast<int>(i % 60) - 30); };
  const double ref = kernels::serial::blocked_sum(300001, 0.0, term);
  for (int threads : {1, 2, 5}) {
    kernels::set_thread_count(threads);
    CHECK(kernels::omp::blocked_sum(300001, 0.0, term) == ref);
    CHECK(kernels::blocked_sum(300001, 0.0, term) == ref);
  }
  CHECK(kernels::serial::blocked_sum(0, 1.5, term) == 1.5);
}

TEST_CASE("parallel_for touches each index once") {
  ThreadGuard guard;
  kernels::set_thread_count(4);
  std::vector<int> hits(10007, 0);
  kernels::parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}

TEST_CASE("transpose is an involution") {
  const auto g = random_graph(300, 4, 5);
  const auto t = kernels::transpose(g);
  CHECK(t.nnz() == g.nnz());
  const auto tt = kernels::transpose(t);
  CHECK(tt.offsets == g.offsets);
  CHECK(tt.targets == g.targets);
}

TEST_CASE("thread count setting") {
  ThreadGuard guard;
  kernels::set_thread_count(3);
  CHECK(kernels::thread_count() == 3);
  kernels::set_thread_count(0);
  CHECK(kernels::thread_count() >= 1);
}

TEST_CASE("counter streams depend only on seed and index") {
  CounterRng a(42, 7), b(42, 7), c(42, 8);
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
  }
  CounterRng u(0, 0);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}
