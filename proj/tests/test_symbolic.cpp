#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>

#include "bowenlab/error.hpp"
#include "bowenlab/symbolic.hpp"

using namespace bowenlab;

namespace {

// Number of admissible words of each length, by brute force over all words.
std::uint64_t brute_count(const Sft& s, int len) {
  std::uint64_t count = 0;
  std::vector<std::size_t> w(static_cast<std::size_t>(len), 0);
  const std::size_t k = s.size();
  while (true) {
    bool ok = true;
    for (int i = 0; i + 1 < len && ok; ++i) ok = s.allowed(w[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(i) + 1]);
    if (ok) ++count;
    int pos = len - 1;
    while (pos >= 0 && ++w[static_cast<std::size_t>(pos)] == k) w[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
  }
  return count;
}

// Growth rate of binary words avoiding a run of r zeros: root of
// x^r (2 - x) = 1 in (1, 2).
double run_avoid_growth(int r) {
  double lo = 1.5, hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    (std::pow(m, r) * (2.0 - m) > 1.0 ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("full shift and golden mean entropies") {
  CHECK(topological_entropy(Sft::full_shift(6)) == doctest::Approx(std::log(6.0)).epsilon(1e-13));
  const Sft gm = Sft::from_matrix({{0, 1}, {1, 1}});
  CHECK(topological_entropy(gm) == doctest::Approx(std::log(std::numbers::phi)).epsilon(1e-13));
}

TEST_CASE("forbidding a word of length 3 on the 2-shift") {
  // 010 is the length-3 itinerary of 1/3 under doubling.
  const Sft s = forbid_words(Sft::full_shift(2), {{0, 1, 0}}, 3);
  CHECK(s.size() == 4);
  CHECK(s.label_length() == 2);
  CHECK(s.edge_count() == 7);
  // Word counts from the recoded graph agree with brute force on the 2-shift.
  for (int len = 1; len <= 10; ++len) {
    std::uint64_t brute = 0;
    for (std::uint32_t w = 0; w < (1u << (len + 1)); ++w) {
      bool ok = true;
      for (int i = 0; i + 2 <= len; ++i) ok = ok && ((w >> i) & 7u) != 2u;
      brute += ok;
    }
    CHECK(enumerate_words(s, len).exact.value() == brute);
  }
}

TEST_CASE("avoiding long zero runs approaches full entropy") {
  for (int r : {2, 5, 12}) {
    const Word zeros(static_cast<std::size_t>(r), 0);
    const Sft s = forbid_words(Sft::full_shift(2), {zeros}, r);
    CHECK(topological_entropy(s) == doctest::Approx(std::log(run_avoid_growth(r))).epsilon(1e-11));
  }
}

TEST_CASE("higher block recoding keeps entropy and counts") {
  const Sft gm = Sft::from_matrix({{0, 1}, {1, 1}});
  const Sft h = higher_block(gm, 4);
  CHECK(h.label_length() == 4);
  CHECK(topological_entropy(h) == doctest::Approx(topological_entropy(gm)).epsilon(1e-12));
  CHECK(enumerate_words(h, 5).exact.value() == enumerate_words(gm, 8).exact.value());
  CHECK(enumerate_words(gm, 9).exact.value() == brute_count(gm, 9));
}

TEST_CASE("forbidding everything is an error") {
  CHECK_THROWS_AS(forbid_words(Sft::full_shift(2), {{0}, {1}}, 2), Error);
  try {
    forbid_words(Sft::full_shift(2), {{0}, {1}}, 2);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptySubshift);
  }
}

TEST_CASE("word parsing") {
  const auto w = parse_words("0.0,1.0.1");
  REQUIRE(w.size() == 2);
  CHECK(w[0] == Word{0, 0});
  CHECK(w[1] == Word{1, 0, 1});
  CHECK(format_word(w[1]) == "1.0.1");
  CHECK_THROWS_AS(parse_words("0.x"), Error);
  CHECK(parse_words("").empty());
}

TEST_CASE("components of a reducible subshift") {
  // {0,1} strongly connected, 2 -> 0, {3} with a loop and 3 -> 2.
  const Sft s = Sft::from_matrix({{1, 1, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}, {0, 0, 1, 1}});
  int count = 0;
  const auto comp = strongly_connected_components(s, &count);
  CHECK(count == 3);
  CHECK(comp[0] == comp[1]);
  CHECK(comp[2] != comp[0]);
  CHECK_FALSE(is_irreducible(s));
  const Sft dom = dominant_component(s);
  CHECK(dom.size() == 2);
  CHECK(topological_entropy(dom) == doctest::Approx(std::log(std::numbers::phi)).epsilon(1e-12));
  CHECK(topological_entropy(s) == doctest::Approx(topological_entropy(dom)).epsilon(1e-12));
}

TEST_CASE("Parry measure maximizes entropy") {
  const Sft s = forbid_words(Sft::full_shift(3), {{0, 0}, {1, 2, 1}}, 3);
  const Sft dom = dominant_component(s);
  const auto parry = parry_measure(dom);
  double total = 0.0;
  for (double p : parry.stationary) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t a = 0; a < parry.states(); ++a) {
    double row = 0.0;
    for (auto k = parry.graph.offsets[a]; k < parry.graph.offsets[a + 1]; ++k) row += parry.transition[static_cast<std::size_t>(k)];
    CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
  }
  const double h = topological_entropy(dom);
  CHECK(markov_entropy(parry) == doctest::Approx(h).epsilon(1e-11));
  for (std::uint64_t seed = 0; seed < 50; ++seed) CHECK(markov_entropy(random_markov_measure(dom, seed)) <= h + 1e-12);
}

TEST_CASE("stationary distribution is invariant") {
  const Sft s = Sft::full_shift(3);
  const auto mu = random_markov_measure(s, 11);
  std::vector<double> next(3, 0.0);
  for (std::size_t a = 0; a < 3; ++a)
    for (auto k = mu.graph.offsets[a]; k < mu.graph.offsets[a + 1]; ++k)
      next[static_cast<std::size_t>(mu.graph.targets[static_cast<std::size_t>(k)])] +=
          mu.stationary[a] * mu.transition[static_cast<std::size_t>(k)];
  for (std::size_t a = 0; a < 3; ++a) CHECK(next[a] == doctest::Approx(mu.stationary[a]).epsilon(1e-12));
}

TEST_CASE("Bernoulli measures") {
  const auto mu = bernoulli_measure(Sft::full_shift(2), {0.25, 0.75});
  const double h = -(0.25 * std::log(0.25) + 0.75 * std::log(0.75));
  CHECK(markov_entropy(mu) == doctest::Approx(h).epsilon(1e-13));
  CHECK_THROWS_AS(bernoulli_measure(Sft::from_matrix({{0, 1}, {1, 1}}), {0.5, 0.5}), Error);
}

TEST_CASE("incompatible measures are rejected") {
  const auto mu = parry_measure(Sft::full_shift(2));
  CHECK_THROWS_AS(check_compatible(Sft::from_matrix({{0, 1}, {1, 1}}), mu), Error);
}

TEST_CASE("word enumeration and overflow") {
  const Sft s = Sft::from_matrix({{0, 1}, {1, 1}});
  std::uint64_t visited = 0;
  Word prev;
  for_each_word(s, 10, [&](const Word& w) {
    if (!prev.empty()) CHECK(prev < w);
    prev = w;
    ++visited;
    return true;
  });
  CHECK(visited == enumerate_words(s, 10).exact.value());
  const auto big = enumerate_words(Sft::full_shift(2), 70);
  CHECK_FALSE(big.exact.has_value());
  CHECK(big.log_count == doctest::Approx(70 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("Perron root against a dense eigen-solver") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 9;
    std::vector<std::vector<double>> t(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double v = u(rng) < 0.4 ? 0.0 : u(rng);
        t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
        m(i, j) = v;
      }
    for (int i = 0; i < n; ++i) {  // keep it irreducible
      t[static_cast<std::size_t>(i)][static_cast<std::size_t>((i + 1) % n)] += 0.1;
      m(i, (i + 1) % n) += 0.1;
    }
    const auto ev = m.eigenvalues();
    double rho = 0.0;
    for (int i = 0; i < n; ++i) rho = std::max(rho, std::abs(ev[i]));
    CHECK(spectral_radius(t) == doctest::Approx(rho).epsilon(1e-10));
  }
}

TEST_CASE("Perron iteration on periodic and nilpotent graphs") {
  CHECK(spectral_radius(Sft::from_matrix({{0, 1}, {1, 0}})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spectral_radius(std::vector<std::vector<double>>{{0, 1}, {0, 0}}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(spectral_radius(std::vector<std::vector<double>>{{0, 0}, {0, 0}}), Error);
}

TEST_CASE("pruning removes transient states") {
  const Sft s = Sft::from_matrix({{1, 1, 0}, {1, 1, 0}, {1, 0, 0}});
  const Sft p = prune(s);
  CHECK(p.size() == 2);
}
