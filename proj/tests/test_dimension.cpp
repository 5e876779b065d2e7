#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <set>

#include "bowenlab/dimension.hpp"
#include "bowenlab/error.hpp"

using namespace bowenlab;

namespace {

const std::string kModelDir = BOWENLAB_MODEL_DIR;
const double kGoldenDim = std::log(std::numbers::phi) / std::log(2.0);
const double kCantorDim = std::log(2.0) / std::log(3.0);

Repeller model(const char* name) { return Repeller(load_model(kModelDir + "/" + name)); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Input;
}

// log_n sum over columns of t_c^(log n / log m).
double mcmullen_oracle(int m_rows, int n_cols, const std::vector<std::pair<int, int>>& digits) {
  std::vector<int> t(static_cast<std::size_t>(n_cols), 0);
  for (const auto& [c, r] : digits) ++t[static_cast<std::size_t>(c)];
  const double theta = std::log(n_cols) / std::log(m_rows);
  double acc = 0.0;
  for (int v : t)
    if (v > 0) acc += std::pow(v, theta);
  return std::log(acc) / std::log(n_cols);
}

std::vector<std::pair<int, int>> random_digits(std::mt19937_64& rng, int m_rows, int n_cols) {
  std::set<std::pair<int, int>> d;
  const int count = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(m_rows * n_cols - 2));
  while (static_cast<int>(d.size()) < count)
    d.insert({static_cast<int>(rng() % static_cast<std::uint64_t>(n_cols)), static_cast<int>(rng() % static_cast<std::uint64_t>(m_rows))});
  return {d.begin(), d.end()};
}

}  // namespace

TEST_CASE("Bowen roots of the shipped models") {
  struct Case {
    const char* name;
    double phi;
    double psi;
  };
  const Case cases[] = {
      {"doubling.json", 1.0, 1.0},          {"doubling_torus.json", 1.0, 1.0},
      {"diag23.json", 2.0, 2.0},            {"shear.json", 2.0, 2.0},
      {"golden_mean.json", kGoldenDim, kGoldenDim}, {"cantor.json", kCantorDim, kCantorDim},
      {"carpet.json", 1.0 + kCantorDim, 1.0 + std::log(4.0 / 3.0) / std::log(2.0)},
  };
  for (const auto& c : cases) {
    CAPTURE(c.name);
    const Repeller rep = model(c.name);
    const auto a = bowen_root(rep, Family::SubAdditivePhi);
    CHECK(std::abs(a.root - c.phi) <= 1e-9);
    CHECK(a.s_lo <= a.root);
    CHECK(a.root <= a.s_hi);
    CHECK(a.s_hi - a.s_lo <= 2 * a.tolerance + 1e-15);
    CHECK_FALSE(a.degenerate);
    CHECK(std::abs(bowen_root(rep, Family::SuperAdditivePsi).root - c.psi) <= 1e-9);
  }
}

TEST_CASE("Phi root dominates Psi root") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto digits = random_digits(rng, 3, 2);
    const Repeller rep(make_carpet(3, 2, digits));
    CHECK(bowen_root(rep, Family::SubAdditivePhi).root >= bowen_root(rep, Family::SuperAdditivePsi).root - 1e-10);
  }
  const Repeller pd = model("perturbed_doubling.json");
  CHECK(bowen_root(pd, Family::SubAdditivePhi).root >= bowen_root(pd, Family::SuperAdditivePsi).root - 1e-10);
}

TEST_CASE("root tolerance and degenerate sets") {
  const Repeller rep = model("doubling.json");
  CHECK(kind_of([&] { bowen_root(rep, Family::SubAdditivePhi, 1e-13); }) == ErrorKind::Input);
  // Only the two fixed points survive: zero entropy.
  const Repeller fixed(rep.model(), forbid_words(rep.model().base_sft(), {{0, 1}, {1, 0}}, 2));
  const auto r = bowen_root(fixed, Family::SubAdditivePhi);
  CHECK(r.degenerate);
  CHECK(r.root == 0.0);
}

TEST_CASE("roots shrink on sub-repellers") {
  const Repeller full = model("diag23.json");
  const auto base = full.model().base_sft();
  double prev = bowen_root(full, Family::SubAdditivePhi).root;
  std::vector<Word> forbidden;
  for (int a = 0; a < 4; ++a) {
    forbidden.push_back({a, a});
    const Repeller sub(full.model(), forbid_words(base, forbidden, 2));
    const double now = bowen_root(sub, Family::SubAdditivePhi).root;
    CHECK(now <= prev + 1e-12);
    prev = now;
  }
}

TEST_CASE("McMullen formula") {
  CHECK(mcmullen_dim(3, 2, {{0, 0}, {0, 2}, {1, 1}, {1, 2}}) == doctest::Approx(1.0 + kCantorDim).epsilon(1e-12));
  CHECK(mcmullen_dim(3, 2, {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}}) == doctest::Approx(2.0).epsilon(1e-12));
  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    const int m = 3 + t % 3, n = 2 + t % 2;
    if (n >= m) continue;
    const auto d = random_digits(rng, m, n);
    CHECK(mcmullen_dim(m, n, d) == doctest::Approx(mcmullen_oracle(m, n, d)).epsilon(1e-12));
  }
  CHECK(kind_of([] { mcmullen_dim(2, 3, {{0, 0}}); }) == ErrorKind::Input);
  CHECK(kind_of([] { mcmullen_dim(3, 2, {{2, 0}}); }) == ErrorKind::Input);
}

TEST_CASE("carpet sandwich") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 20; ++t) {
    const auto digits = random_digits(rng, 3, 2);
    const Repeller rep(make_carpet(3, 2, digits));
    const double psi = bowen_root(rep, Family::SuperAdditivePsi).root;
    const double phi = bowen_root(rep, Family::SubAdditivePhi).root;
    const double mc = mcmullen_dim(3, 2, digits);
    CHECK(psi <= mc + 1e-9);
    CHECK(mc <= phi + 1e-9);
  }
}

TEST_CASE("Caratheodory estimate equals the Bowen root") {
  for (const char* name : {"golden_mean.json", "cantor.json", "diag23.json", "carpet.json"}) {
    CAPTURE(name);
    const Repeller rep = model(name);
    const double root = bowen_root(rep, Family::SubAdditivePhi).root;
    for (int n : {4, 8, 12}) {
      for (double r : {0.01, 0.05}) {
        const auto c = caratheodory_dim(rep, r, n);
        CHECK(std::abs(c.alpha - root) <= 1e-6);
        CHECK_FALSE(c.degenerate);
      }
    }
  }
}

TEST_CASE("Caratheodory estimate metadata and errors") {
  const Repeller cantor = model("cantor.json");
  CHECK(cell_gap(cantor) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(kind_of([&] { caratheodory_dim(cantor, 0.5, 4); }) == ErrorKind::Precondition);
  CHECK(kind_of([&] { caratheodory_dim(cantor, -1.0, 4); }) == ErrorKind::Input);
  CHECK(kind_of([&] { caratheodory_dim(model("perturbed_doubling.json"), 0.01, 4); }) == ErrorKind::Input);
  const Repeller gm = model("golden_mean.json");
  CHECK(cell_gap(gm) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  const auto c = caratheodory_dim(gm, 0.05, 8);
  CHECK_FALSE(c.symbolic_metric);
  const auto touching = caratheodory_dim(model("doubling.json"), 0.05, 8);
  CHECK(touching.symbolic_metric);
  CHECK(touching.symbolic_level == 4);
  CHECK(touching.alpha == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(c.alpha_grid.size() == c.log_partition.size());
  // The plain partition-sum zero is a cruder estimate of the same number.
  CHECK(std::abs(c.partition_alpha - kGoldenDim) < 0.1);
}

TEST_CASE("box-counting dimensions") {
  struct Case {
    Repeller rep;
    double dim;
  };
  std::vector<std::pair<int, int>> all;
  for (int c = 0; c < 2; ++c)
    for (int r = 0; r < 3; ++r) all.push_back({c, r});
  const std::vector<std::pair<Repeller, double>> cases{
      {Repeller(make_carpet(3, 2, all)), 2.0},
      {model("cantor.json"), kCantorDim},
      {model("golden_mean.json"), kGoldenDim},
      {model("carpet.json"), 1.0 + kCantorDim},
  };
  for (const auto& [rep, dim] : cases) {
    const auto b = box_dimension(rep, 12);
    CHECK(std::abs(b.dimension - dim) < 0.05);
    CHECK(b.log_count.size() >= 3);
    CHECK(b.log_count.size() == b.log_inv_delta.size());
  }
  CHECK(kind_of([] { box_dimension(model("cantor.json"), 2); }) == ErrorKind::Input);
  CHECK(kind_of([] { box_dimension(model("shear.json"), 8); }) == ErrorKind::Precondition);
}

TEST_CASE("uniform-fiber carpets") {
  const std::vector<std::vector<std::pair<int, int>>> sets{
      {{0, 0}, {0, 2}, {1, 1}, {1, 2}},
      {{0, 1}, {1, 0}},
      {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}},
  };
  for (const auto& digits : sets) {
    const Repeller rep(make_carpet(3, 2, digits));
    const double mc = mcmullen_dim(3, 2, digits);
    CHECK(std::abs(box_dimension(rep, 12).dimension - mc) < 0.05);
  }
}
