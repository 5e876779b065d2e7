#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bowenlab/error.hpp"
#include "bowenlab/kernels.hpp"
#include "bowenlab/pressure.hpp"

using namespace bowenlab;

namespace {

const std::string kModelDir = BOWENLAB_MODEL_DIR;
const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);
const double kLogPhi = std::log(std::numbers::phi);

Repeller model(const char* name) { return Repeller(load_model(kModelDir + "/" + name)); }

// Closed forms for diag(2,3) on the 2-torus.
double diag23_phi(double s) { return s <= 1 ? std::log(6.0) - s * kLog2 : (2 - s) * kLog3; }
double diag23_psi(double s) { return s <= 1 ? std::log(6.0) - s * kLog3 : (2 - s) * kLog2; }

}  // namespace

TEST_CASE("diag(2,3) pressure closed forms") {
  const SpectralPressure p(model("diag23.json"));
  CHECK(p.mode() == SpectralPressure::Mode::Additive);
  for (int i = 0; i <= 40; ++i) {
    const double s = 0.05 * i;
    CHECK(p.value(Family::SubAdditivePhi, s, 1) == doctest::Approx(diag23_phi(s)).epsilon(1e-12));
    CHECK(p.value(Family::SuperAdditivePsi, s, 1) == doctest::Approx(diag23_psi(s)).epsilon(1e-12));
  }
}

TEST_CASE("golden mean pressure is linear in s") {
  const SpectralPressure p(model("golden_mean.json"));
  for (double s : {0.0, 0.3, 0.694, 1.0}) {
    CHECK(p.value(Family::SubAdditivePhi, s, 1) == doctest::Approx(kLogPhi - s * kLog2).epsilon(1e-12));
    CHECK(p.value(Family::SuperAdditivePsi, s, 1) == doctest::Approx(kLogPhi - s * kLog2).epsilon(1e-12));
  }
}

TEST_CASE("pressure at s = 0 is the entropy") {
  for (const char* name : {"diag23.json", "golden_mean.json", "carpet.json", "shear.json", "perturbed_doubling.json"}) {
    CAPTURE(name);
    const SpectralPressure p(model(name));
    const double h = topological_entropy(p.repeller().sft());
    CHECK(p.entropy() == doctest::Approx(h).epsilon(1e-12));
    for (int m : {1, 3}) {
      CHECK(p.value(Family::SubAdditivePhi, 0.0, m) == doctest::Approx(h).epsilon(1e-9));
      CHECK(p.value(Family::SuperAdditivePsi, 0.0, m) == doctest::Approx(h).epsilon(1e-9));
    }
  }
}

TEST_CASE("block transfer operator reproduces additive pressure") {
  const Repeller rep = model("diag23.json");
  const SpectralPressure additive(rep);
  const SpectralPressure blocks(rep, true);
  CHECK(blocks.mode() == SpectralPressure::Mode::Blocks);
  for (double s : {0.4, 1.3, 1.9}) {
    for (Family f : {Family::SubAdditivePhi, Family::SuperAdditivePsi}) {
      const double one = additive.value(f, s, 1);
      CHECK(blocks.value(f, s, 4) == doctest::Approx(one).epsilon(1e-10));
      CHECK(blocks.value(f, s, 1) == doctest::Approx(one).epsilon(1e-10));
    }
  }
}

TEST_CASE("shear pressure vanishes at s = 2") {
  const SpectralPressure p(model("shear.json"));
  CHECK(p.mode() == SpectralPressure::Mode::ConstantCocycle);
  for (int m = 1; m <= 8; ++m) {
    CHECK(std::abs(p.value(Family::SubAdditivePhi, 2.0, m)) < 1e-10);
    CHECK(std::abs(p.value(Family::SuperAdditivePsi, 2.0, m)) < 1e-10);
  }
  const auto lim = pressure_limit(p, Family::SubAdditivePhi, 1.2, 8);
  REQUIRE(lim.bracket.has_value());
  CHECK(lim.bracket->first <= lim.value);
  CHECK(lim.value <= lim.bracket->second);
}

TEST_CASE("sub- and super-additive depth sequences are monotone") {
  for (const char* name : {"shear.json", "perturbed_doubling.json"}) {
    CAPTURE(name);
    const SpectralPressure p(model(name));
    for (double s : {0.3, 0.9}) {
      CHECK_NOTHROW(pressure_limit(p, Family::SubAdditivePhi, s, 8));
      CHECK_NOTHROW(pressure_limit(p, Family::SuperAdditivePsi, s, 8));
    }
  }
  CHECK_THROWS_AS(pressure_limit(model("shear.json"), Family::SubAdditivePhi, 1.0, 1), Error);
}

TEST_CASE("perturbed doubling bracket") {
  const SpectralPressure p(model("perturbed_doubling.json"));
  CHECK(p.mode() == SpectralPressure::Mode::Overlapping);
  for (double s : {0.0, 0.5, 1.0}) {
    const double upper = p.value(Family::SubAdditivePhi, s, 10);
    const double lower = p.value(Family::SuperAdditivePsi, s, 10);
    CHECK(lower <= upper + 1e-12);
    CHECK(upper - lower < 0.02);
  }
  // The absolutely continuous measure gives pressure zero at s = 1.
  CHECK(p.value(Family::SubAdditivePhi, 1.0, 10) >= -1e-9);
  CHECK(p.value(Family::SuperAdditivePsi, 1.0, 10) <= 1e-9);
}

TEST_CASE("pressure is strictly decreasing and Phi dominates Psi") {
  for (const char* name : {"diag23.json", "shear.json", "carpet.json", "cantor.json"}) {
    CAPTURE(name);
    const SpectralPressure p(model(name));
    const int d = p.repeller().dimension();
    double prev_phi = INFINITY, prev_psi = INFINITY;
    for (int i = 0; i <= 20; ++i) {
      const double s = d * i / 20.0;
      const double phi = p.value(Family::SubAdditivePhi, s, 3);
      const double psi = p.value(Family::SuperAdditivePsi, s, 3);
      CHECK(phi < prev_phi);
      CHECK(psi < prev_psi);
      CHECK(phi >= psi - 1e-12);
      prev_phi = phi;
      prev_psi = psi;
    }
  }
}

TEST_CASE("separated sets") {
  const Repeller gm = model("golden_mean.json");
  const auto set = build_separated_set(gm, 10, 0.01);
  CHECK(set.n == 10);
  // Every pair is separated in the Bowen metric.
  for (std::size_t i = 0; i < set.orbits.size(); i += 7)
    for (std::size_t j = i + 1; j < set.orbits.size(); j += 5)
      CHECK(bowen_distance(gm.model(), set.orbits[i], set.orbits[j]) > 0.01);
  for (double s : {0.0, 0.5, 1.0}) {
    const auto e = pressure_separated(gm, Family::SubAdditivePhi, s, 14, 0.01);
    CHECK(e.method == PressureMethod::SeparatedSet);
    CHECK(std::abs(e.value - (kLogPhi - s * kLog2)) < 0.05);
  }
  CHECK_THROWS_AS(build_separated_set(gm, 5, 0.0), Error);
}

TEST_CASE("Bowen distance wraps on the torus") {
  const auto m = load_model(kModelDir + "/doubling_torus.json");
  Vector a(1), b(1);
  a << 0.01;
  b << 0.99;
  CHECK(bowen_distance(m, {a}, {b}) == doctest::Approx(0.02));
}

TEST_CASE("log derivative range") {
  const auto m = load_model(kModelDir + "/perturbed_doubling.json");
  const std::vector<std::uint16_t> word{0};
  const auto [lo, hi] = log_derivative_range(m, word);
  CHECK(lo == doctest::Approx(std::log(2.0 - 2 * M_PI * 0.05)).epsilon(1e-9));
  CHECK(hi == doctest::Approx(std::log(2.0 + 2 * M_PI * 0.05)).epsilon(1e-9));
}

TEST_CASE("variational principle gaps") {
  const Repeller rep = model("diag23.json");
  // Uniform Bernoulli is the equilibrium state for every s.
  const auto parry = parry_measure(rep.sft());
  for (double s : {0.5, 1.5}) CHECK(std::abs(variational_gap(rep, Family::SubAdditivePhi, s, parry)) < 1e-10);
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto mu = random_markov_measure(rep.sft(), k);
    CHECK(variational_gap(rep, Family::SubAdditivePhi, 1.4, mu) >= -1e-10);
    CHECK(variational_gap(rep, Family::SuperAdditivePsi, 0.7, mu) >= -1e-10);
  }
  const Repeller gm = model("golden_mean.json");
  CHECK(std::abs(variational_gap(gm, Family::SubAdditivePhi, 0.0, parry_measure(prune(gm.sft())))) < 1e-10);
}

TEST_CASE("spectral values are thread-count independent") {
  const Repeller rep = model("perturbed_doubling.json");
  kernels::set_thread_count(1);
  const double a = SpectralPressure(rep).value(Family::SubAdditivePhi, 0.7, 9);
  kernels::set_thread_count(4);
  const double b = SpectralPressure(rep).value(Family::SubAdditivePhi, 0.7, 9);
  kernels::set_thread_count(0);
  CHECK(a == b);
}
