#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "bowenlab/error.hpp"
#include "bowenlab/report.hpp"

namespace bowenlab {

namespace {

ModelSpec interval_doubling() {
  Matrix l(1, 1);
  l(0, 0) = 0.5;
  Vector o0(1), o1(1);
  o0 << 0.0;
  o1 << 0.5;
  return ModelSpec::sft_affine({}, {AffineBranch{l, o0}, AffineBranch{l, o1}});
}

ModelSpec diag23() {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 2;
  a(1, 1) = 3;
  return ModelSpec::linear_toral(a);
}

ModelSpec shear() {
  Matrix a(2, 2);
  a << 2, 1, 0, 3;
  return ModelSpec::linear_toral(a);
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

std::vector<SelftestResult> run_selftest() {
  std::vector<SelftestResult> results;
  auto check = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    SelftestResult r;
    r.name = name;
    try {
      std::tie(r.passed, r.detail) = body();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = e.what();
    }
    results.push_back(r);
  };
  const double log_phi = std::log(std::numbers::phi);

  check("doubling roots equal 1", [] {
    const Repeller rep(interval_doubling());
    const double a = bowen_root(rep, Family::SubAdditivePhi).root;
    const double s = bowen_root(rep, Family::SuperAdditivePsi).root;
    return std::pair{std::abs(a - 1) <= 1e-9 && std::abs(s - 1) <= 1e-9, num(a) + " " + num(s)};
  });
  check("diag(2,3) roots equal 2", [] {
    const Repeller rep(diag23());
    const double a = bowen_root(rep, Family::SubAdditivePhi).root;
    const double s = bowen_root(rep, Family::SuperAdditivePsi).root;
    return std::pair{std::abs(a - 2) <= 1e-9 && std::abs(s - 2) <= 1e-9, num(a) + " " + num(s)};
  });
  check("golden mean root", [&] {
    const auto m = interval_doubling();
    const Repeller gm(m, forbid_words(m.base_sft(), {{0, 0}}, 2));
    const double r = bowen_root(gm, Family::SubAdditivePhi).root;
    return std::pair{std::abs(r - log_phi / std::log(2.0)) <= 1e-9, num(r)};
  });
  check("pressure at s=0 is entropy", [] {
    const Repeller rep(diag23());
    const double p = pressure_spectral(rep, Family::SubAdditivePhi, 0.0, 1).value;
    return std::pair{std::abs(p - std::log(6.0)) <= 1e-9, num(p)};
  });
  check("pressure decreasing and phi above psi", [] {
    const SpectralPressure sp{Repeller(diag23())};
    double prev = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int i = 0; i <= 20; ++i) {
      const double s = 0.1 * i;
      const double phi = sp.value(Family::SubAdditivePhi, s, 1);
      const double psi = sp.value(Family::SuperAdditivePsi, s, 1);
      ok = ok && phi < prev && phi >= psi - 1e-9;
      prev = phi;
    }
    return std::pair{ok, std::string{}};
  });
  check("Pesin identity on diag(2,3)", [] {
    const auto m = diag23();
    const auto ly = lyapunov_lebesgue(m, 1);
    const double h = topological_entropy(m.base_sft());
    const double sum = ly.exponents[0] + ly.exponents[1];
    return std::pair{std::abs(h - sum) <= 1e-9 && ly.exponents[0] == std::log(3.0) && ly.exponents[1] == std::log(2.0),
                     num(h) + " vs " + num(sum)};
  });
  check("sub/super-additivity on the shear", [] {
    const auto r = check_subadditivity(shear(), 1.3, 200, 7);
    return std::pair{r.passed, num(std::min(r.worst_phi_margin, r.worst_psi_margin))};
  });
  check("variational gap nonnegative", [] {
    const Repeller rep(diag23());
    double worst = std::numeric_limits<double>::infinity();
    for (std::uint64_t k = 0; k < 10; ++k)
      worst = std::min(worst, variational_gap(rep, Family::SubAdditivePhi, 1.4, random_markov_measure(rep.sft(), k)));
    return std::pair{worst >= -1e-10, num(worst)};
  });
  check("Caratheodory estimate equals Bowen root", [&] {
    const auto m = interval_doubling();
    const Repeller gm(m, forbid_words(m.base_sft(), {{0, 0}}, 2));
    const auto c = caratheodory_dim(gm, 0.05, 8);
    return std::pair{std::abs(c.alpha - log_phi / std::log(2.0)) <= 1e-6, num(c.alpha)};
  });
  check("carpet sandwich", [] {
    const std::vector<std::pair<int, int>> digits{{0, 0}, {0, 2}, {1, 1}};
    const Repeller rep(make_carpet(3, 2, digits));
    const double s = bowen_root(rep, Family::SuperAdditivePsi).root;
    const double a = bowen_root(rep, Family::SubAdditivePhi).root;
    const double mc = mcmullen_dim(3, 2, digits);
    return std::pair{s <= mc + 1e-9 && mc <= a + 1e-9, num(s) + " <= " + num(mc) + " <= " + num(a)};
  });
  check("parallel kernels match serial", [] {
    const Sft s = forbid_words(Sft::full_shift(6), {{0, 0, 0}}, 7);
    std::vector<double> x(s.size()), y1(s.size()), y2(s.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1.0 + 1e-3 * static_cast<double>(i % 97);
    kernels::serial::weighted_matvec(s.graph(), x.data(), nullptr, x.data(), y1.data(), 0.25);
    kernels::omp::weighted_matvec(s.graph(), x.data(), nullptr, x.data(), y2.data(), 0.25);
    const auto f = [&](std::size_t i) { return std::sin(static_cast<double>(i)); };
    const double a = kernels::serial::blocked_sum(100000, 0.0, f);
    const double b = kernels::omp::blocked_sum(100000, 0.0, f);
    return std::pair{y1 == y2 && a == b, std::string{}};
  });
  check("avoid set stays away from the target", [] {
    const Repeller rep(interval_doubling());
    Vector y(1);
    y << 0.0;
    const auto words = cylinders_hitting(rep, y, 4);
    const Repeller sub(rep.model(), build_avoid_sft(rep, y, 4));
    const auto visits = count_forbidden_visits(sub, words, 100, 1000);
    return std::pair{visits == 0, std::to_string(visits) + " visits"};
  });
  return results;
}

}  // namespace bowenlab
