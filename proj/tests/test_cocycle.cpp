#include <doctest.h>

#include <cmath>
#include <random>

#include "bowenlab/cocycle.hpp"
#include "bowenlab/kernels.hpp"

using namespace bowenlab;

namespace {

const std::string kModelDir = BOWENLAB_MODEL_DIR;

// Direct definition: full powers of the k smallest (phi) or largest (psi)
// singular values, fractional power of the next one.
double leading_sum(const std::vector<double>& sv, double s) {
  double acc = 0.0;
  int k = 0;
  for (; k + 1 <= s && k < static_cast<int>(sv.size()); ++k) acc += std::log(sv[static_cast<std::size_t>(k)]);
  if (k < static_cast<int>(sv.size())) acc += (s - k) * std::log(sv[static_cast<std::size_t>(k)]);
  return acc;
}

double phi_oracle(std::vector<double> sv, double s) {
  std::sort(sv.begin(), sv.end());
  return leading_sum(sv, s);
}

double psi_oracle(std::vector<double> sv, double s) {
  std::sort(sv.rbegin(), sv.rend());
  return leading_sum(sv, s);
}

Vector logs_of(std::vector<double> sv) {
  std::sort(sv.rbegin(), sv.rend());
  Vector v(static_cast<int>(sv.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = std::log(sv[static_cast<std::size_t>(i)]);
  return v;
}

}  // namespace

TEST_CASE("potentials on diag(2,3)") {
  const Vector l = logs_of({3.0, 2.0});
  CHECK(phi_from_logs(l, 1.5) == doctest::Approx(1.2424533248940002).epsilon(1e-12));
  CHECK(psi_from_logs(l, 1.5) == doctest::Approx(1.4451858789480825).epsilon(1e-12));
  CHECK(phi_from_logs(l, 2.0) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
  CHECK(psi_from_logs(l, 2.0) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
  CHECK(phi_from_logs(l, 0.0) == 0.0);
}

TEST_CASE("potentials against a direct oracle") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int t = 0; t < 1000; ++t) {
    const int d = 1 + t % 3;
    std::vector<double> sv(static_cast<std::size_t>(d));
    for (auto& v : sv) v = u(rng);
    const double s = d * (t % 97) / 96.0;
    const Vector l = logs_of(sv);
    CHECK(phi_from_logs(l, s) == doctest::Approx(phi_oracle(sv, s)).epsilon(1e-12));
    CHECK(psi_from_logs(l, s) == doctest::Approx(psi_oracle(sv, s)).epsilon(1e-12));
    // psi^s >= phi^s for singular values of a single matrix.
    CHECK(psi_from_logs(l, s) >= phi_from_logs(l, s) - 1e-12);
  }
}

TEST_CASE("potentials are continuous in s") {
  const Vector l = logs_of({4.0, 1.5, 0.7});
  for (int k = 1; k <= 2; ++k) {
    for (Family f : {Family::SubAdditivePhi, Family::SuperAdditivePsi}) {
      const double left = potential_from_logs(f, l, k - 1e-12);
      const double right = potential_from_logs(f, l, k + 1e-12);
      CHECK(std::abs(left - right) < 1e-10);
    }
  }
}

TEST_CASE("shear singular values") {
  Matrix a(2, 2);
  a << 2, 1, 0, 3;
  const auto sv = singular_values(a);
  CHECK(sv.values[0] == doctest::Approx(3.2566165).epsilon(1e-7));
  CHECK(sv.values[1] == doctest::Approx(1.8424029).epsilon(1e-7));
}

TEST_CASE("log singular values sum to log |det|") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const int d = 1 + t % 3;
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = n(rng);
    const Vector l = log_elementwise(singular_values(m).values);
    CHECK(l.sum() == doctest::Approx(std::log(std::abs(m.determinant()))).epsilon(1e-9));
  }
}

TEST_CASE("cocycle product on the shear") {
  const auto m = load_model(kModelDir + "/shear.json");
  Vector x(2);
  x << 0.3, 0.7;
  Matrix a(2, 2);
  a << 2, 1, 0, 3;
  const Matrix p = cocycle_product(m, x, 5);
  const Matrix ref = a * a * a * a * a;
  CHECK((p - ref).norm() == doctest::Approx(0.0));
  CHECK(phi_s(m, x, 5, 1.0) <= psi_s(m, x, 5, 1.0));
}

TEST_CASE("sub- and super-additivity") {
  for (const char* name : {"shear.json", "diag23.json", "perturbed_doubling.json", "carpet.json"}) {
    CAPTURE(name);
    const auto m = load_model(kModelDir + "/" + name);
    for (double s : {0.3, 1.0, 1.5, 2.0}) {
      if (s > m.dimension()) continue;
      const auto r = check_subadditivity(m, s, 300, 11);
      CHECK(r.passed);
      CHECK(r.worst_phi_margin >= -1e-9);
      CHECK(r.worst_psi_margin >= -1e-9);
    }
  }
}

TEST_CASE("cylinder logs for locally constant data") {
  const Repeller rep(load_model(kModelDir + "/diag23.json"));
  std::vector<std::int32_t> path{0, 1, 5, 3};
  const Vector l = cylinder_log_singular_values(rep, path);
  CHECK(l[0] == doctest::Approx(4 * std::log(3.0)));
  CHECK(l[1] == doctest::Approx(4 * std::log(2.0)));
}

TEST_CASE("diag(2,3) Lebesgue exponents are exact") {
  const auto m = load_model(kModelDir + "/diag23.json");
  const auto ly = lyapunov_lebesgue(m, 1);
  REQUIRE(ly.exponents.size() == 2);
  CHECK(ly.exponents[0] == std::log(3.0));
  CHECK(ly.exponents[1] == std::log(2.0));
  CHECK_FALSE(ly.monte_carlo);
}

TEST_CASE("perturbed doubling Lebesgue exponent against Ulam") {
  const auto m = load_model(kModelDir + "/perturbed_doubling.json");
  const auto ly = lyapunov_lebesgue(m, 1, 3);
  const double ulam = lyapunov_ulam(m, 4096);
  CHECK(ly.monte_carlo);
  CHECK(std::abs(ly.exponents[0] - ulam) <= 4 * ly.std_error[0] + 1e-3);
  // Doubling itself: the exponent is log 2.
  CHECK(lyapunov_ulam(ModelSpec::perturbed_doubling(0.0), 1024) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("Parry exponents on the golden mean") {
  const auto m = load_model(kModelDir + "/golden_mean.json");
  const Repeller rep(m);
  const auto ly = lyapunov_spectrum(rep, parry_measure(prune(rep.sft())), 1);
  CHECK(ly.exponents[0] == doctest::Approx(std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("Monte Carlo estimates do not depend on the thread count") {
  const Repeller rep(load_model(kModelDir + "/perturbed_doubling.json"));
  const auto mu = parry_measure(rep.sft());
  kernels::set_thread_count(1);
  const auto a = lyapunov_spectrum(rep, mu, 12, 5, 20000);
  kernels::set_thread_count(4);
  const auto b = lyapunov_spectrum(rep, mu, 12, 5, 20000);
  kernels::set_thread_count(0);
  CHECK(a.exponents == b.exponents);
  CHECK(a.std_error == b.std_error);
  const auto c = lyapunov_spectrum(rep, mu, 12, 6, 20000);
  CHECK(c.exponents != a.exponents);
}
