#include "bowenlab/exceptional.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "bowenlab/error.hpp"
#include "bowenlab/random.hpp"

namespace bowenlab {

namespace {

constexpr double kHullTol = 1e-12;
constexpr int kClosureLevels = 24;
constexpr double kBoundTol = 1e-6;
constexpr double kMonotoneTol = 1e-9;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::vector<Vector> target_copies(const ModelSpec& model, const Vector& y) {
  std::vector<Vector> copies{y};
  if (!model.on_torus()) return copies;
  for (int k = 0; k < y.size(); ++k) {
    if (y[k] != 0.0 && y[k] != 1.0) continue;
    const std::size_t n = copies.size();
    for (std::size_t i = 0; i < n; ++i) {
      Vector c = copies[i];
      c[k] = 1.0 - c[k];
      copies.push_back(c);
    }
  }
  return copies;
}

struct RowMeasures {
  int depth = 1;
  int samples = kMonteCarloSamples;
};

RowMeasures measure_settings(const ModelSpec& model) {
  if (model.additive()) return {1, kMonteCarloSamples};
  if (model.locally_constant()) return {16, kMonteCarloSamples};
  return {20, kMonteCarloSamples};
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

std::string describe(const AvoidRow& r) {
  std::ostringstream os;
  os.precision(10);
  os << "depth " << r.depth << ": h_top=" << r.h_top << " s_star=" << r.s_star << " alpha0=" << r.alpha0
     << " eps_A=" << r.eps_a << " bound_A=" << r.bound_a << " eps_B=" << r.eps_b << " bound_B=" << r.bound_b;
  return os.str();
}

// Equilibrium state of the Phi-potential at alpha0 on the dominant component.
void equilibrium_reference(const Repeller& lambda, AvoidReference& ref, std::uint64_t seed) {
  const auto& model = lambda.model();
  const auto settings = measure_settings(model);
  Sft space = lambda.sft();
  if (!model.locally_constant()) {
    const int l = space.label_length();
    const int m = std::max(10, l);
    if (m > l) space = higher_block(space, m - l + 1);
  }
  const Sft dom = dominant_component(space);
  const Repeller rep(model, dom);
  std::vector<double> pot(dom.size());
  for (std::size_t a = 0; a < dom.size(); ++a) {
    if (model.locally_constant()) {
      pot[a] = phi_from_logs(rep.state_log_singular_values(a), ref.alpha0);
    } else {
      pot[a] = ref.alpha0 * log_derivative_range(model, dom.label(a)).first;
    }
  }
  const double c = *std::min_element(pot.begin(), pot.end());
  std::vector<double> w(pot.size());
  for (std::size_t a = 0; a < pot.size(); ++a) w[a] = std::exp(-(pot[a] - c));
  const auto mu = equilibrium_measure(dom, w);
  ref.h_star = markov_entropy(mu);
  const auto ly = lyapunov_spectrum(rep, mu, settings.depth, seed, settings.samples);
  ref.lyap_star = ly.exponents;
  ref.lyap_star_se = ly.std_error;
}

}  // namespace

double AvoidRow::eps_n() const { return std::isnan(eps_a) ? eps_b : eps_a; }

std::vector<Word> cylinders_hitting(const Repeller& lambda, const Vector& y, int n, AvoidConvention convention) {
  const auto& model = lambda.model();
  require(n >= 1, ErrorKind::Input, "depth must be positive");
  require(y.size() == model.dimension(), ErrorKind::Input, "target has the wrong dimension");
  for (int k = 0; k < y.size(); ++k)
    require(std::isfinite(y[k]) && y[k] >= 0.0 && y[k] <= 1.0, ErrorKind::Input, "target outside [0,1]^d");
  require(model.has_geometry(), ErrorKind::Input, "avoiding a point needs cell geometry");
  const auto copies = target_copies(model, y);
  auto hits = [&](const Word& path) {
    const Box b = lambda.path_hull(path);
    for (const auto& c : copies)
      if (b.contains(c, kHullTol)) return true;
    return false;
  };
  // Some extension by kClosureLevels more symbols still sees the target.
  std::function<bool(Word&, int)> in_closure = [&](Word& path, int more) {
    if (more == 0) return true;
    for (auto b : lambda.sft().successors(static_cast<std::size_t>(path.back()))) {
      path.push_back(b);
      const bool ok = hits(path) && in_closure(path, more - 1);
      path.pop_back();
      if (ok) return true;
    }
    return false;
  };

  std::vector<Word> out;
  // Depth-first in lexicographic order, pruned by the hull test; returns
  // false once the search should stop.
  std::function<bool(Word&)> visit = [&](Word& path) {
    if (!hits(path)) return true;
    if (static_cast<int>(path.size()) == n) {
      if (in_closure(path, kClosureLevels)) {
        out.push_back(path);
        if (convention == AvoidConvention::CoreOnly) return false;
      }
      return true;
    }
    for (auto b : lambda.sft().successors(static_cast<std::size_t>(path.back()))) {
      path.push_back(b);
      const bool go_on = visit(path);
      path.pop_back();
      if (!go_on) return false;
    }
    return true;
  };
  for (std::size_t a = 0; a < lambda.sft().size(); ++a) {
    Word path{static_cast<std::int32_t>(a)};
    if (!visit(path)) break;
  }
  return out;
}

Sft build_avoid_sft(const Repeller& lambda, const Vector& y, int n, AvoidConvention convention) {
  require(n >= 2, ErrorKind::Input, "avoid depth must be at least 2");
  const auto words = cylinders_hitting(lambda, y, n, convention);
  require(!words.empty(), ErrorKind::Input, "target is not in the closure of the repeller");
  return forbid_words(lambda.sft(), words, n);
}

double theorem_a_bound(int d, double eps, double lambda_min) {
  return d - (3.0 * d - 1.0) * eps / (lambda_min + eps);
}

bool theorem_a_hypothesis(int d, double eps, double lambda_min) { return eps < lambda_min / d; }

namespace {

bool integer_valued(double a) { return std::abs(a - std::round(a)) <= 1e-9; }

}  // namespace

double theorem_b_bound(double alpha0, double eps, const std::vector<double>& exponents) {
  const int d = static_cast<int>(exponents.size());
  if (integer_valued(alpha0)) {
    const int k = static_cast<int>(std::lround(alpha0));
    if (k <= 0) return alpha0;
    const double lam = exponents[static_cast<std::size_t>(d - k)];  // lambda_{d-k+1}
    return alpha0 - (3.0 * k - 1.0) * eps / (lam + eps);
  }
  const int k = static_cast<int>(std::floor(alpha0));
  const double lam = exponents[static_cast<std::size_t>(d - k - 1)];  // lambda_{d-k}
  return alpha0 - (alpha0 + 2.0 * k + 1.0) * eps / (lam + eps);
}

bool theorem_b_hypothesis(double alpha0, double eps, const std::vector<double>& exponents) {
  const int d = static_cast<int>(exponents.size());
  if (integer_valued(alpha0)) {
    const int k = static_cast<int>(std::lround(alpha0));
    if (k <= 0) return false;
    return eps < exponents[static_cast<std::size_t>(d - k)] / k;
  }
  const int k = static_cast<int>(std::floor(alpha0));
  return eps < (alpha0 - k) * exponents[static_cast<std::size_t>(d - k - 1)] / (k + 1.0);
}

bool theorem_a_applicable(const Repeller& lambda) {
  const auto& model = lambda.model();
  if (lambda.sft().label_length() != 1 || lambda.sft().size() != prune(model.base_sft()).size()) return false;
  if (lambda.sft().edge_count() != prune(model.base_sft()).edge_count()) return false;
  switch (model.kind()) {
    case ModelKind::LinearToral:
    case ModelKind::PerturbedDoubling:
      return true;
    case ModelKind::SftAffine:
      return model.full_branch();
  }
  return false;
}

AvoidSeries avoid_series(const Repeller& lambda, const Vector& y, int lo, int hi, TheoremSelect theorem,
                         AvoidConvention convention, std::uint64_t seed) {
  require(lo >= 2 && hi >= lo, ErrorKind::Input, "depth range must satisfy 2 <= lo <= hi");
  const auto& model = lambda.model();
  const int d = model.dimension();
  const auto settings = measure_settings(model);
  AvoidSeries series;
  auto& ref = series.reference;
  ref.h_top = topological_entropy(lambda.sft());
  ref.theorem_a = theorem != TheoremSelect::B && theorem_a_applicable(lambda);
  ref.theorem_b = theorem != TheoremSelect::A;
  require(theorem != TheoremSelect::A || ref.theorem_a, ErrorKind::Input,
          "Theorem A needs the full repeller of a map with Lebesgue as invariant reference");
  if (ref.theorem_a) {
    const auto leb = lyapunov_lebesgue(model, settings.depth, seed, settings.samples);
    ref.lebesgue = leb.exponents;
    ref.lebesgue_se = leb.std_error;
  }
  if (ref.theorem_b) {
    const SpectralPressure p(lambda);
    ref.alpha0 = bowen_root(p, Family::SubAdditivePhi).root;
    equilibrium_reference(lambda, ref, seed);
  }

  for (int n = lo; n <= hi; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    AvoidRow row;
    row.depth = n;
    row.eps_a = row.eps_b = row.bound_a = row.bound_b = kNan;
    const Sft sub = build_avoid_sft(lambda, y, n, convention);
    row.n_states = sub.size();
    row.h_top = topological_entropy(sub);
    if (row.h_top <= 1e-12) {
      row.degenerate = true;
      row.lyapunov.assign(static_cast<std::size_t>(d), kNan);
      row.lyapunov_se.assign(static_cast<std::size_t>(d), kNan);
    } else {
      const Repeller rep(model, sub);
      const SpectralPressure p(rep);
      row.s_star = bowen_root(p, Family::SuperAdditivePsi).root;
      row.alpha0 = bowen_root(p, Family::SubAdditivePhi).root;
      const Sft dom = dominant_component(sub);
      const auto ly = lyapunov_spectrum(Repeller(model, dom), parry_measure(dom), settings.depth, seed,
                                        settings.samples);
      row.lyapunov = ly.exponents;
      row.lyapunov_se = ly.std_error;
      const double se_row = max_of(ly.std_error);
      if (ref.theorem_a) {
        row.eps_a = std::max(ref.h_top - row.h_top, max_abs_diff(ref.lebesgue, row.lyapunov));
        row.bound_a = theorem_a_bound(d, row.eps_a, ref.lebesgue.back());
        row.hypothesis_a = theorem_a_hypothesis(d, row.eps_a, ref.lebesgue.back());
        // Monte Carlo exponents are checked at the upper end of their error bar.
        const double eps_check = row.eps_a + 3.0 * (se_row + max_of(ref.lebesgue_se));
        if (row.s_star < theorem_a_bound(d, eps_check, ref.lebesgue.back()) - kBoundTol)
          series.violations.push_back("Theorem A bound fails at " + describe(row));
      }
      if (ref.theorem_b) {
        row.eps_b = std::max(ref.h_star - row.h_top, max_abs_diff(ref.lyap_star, row.lyapunov));
        row.bound_b = theorem_b_bound(ref.alpha0, row.eps_b, ref.lyap_star);
        row.hypothesis_b = theorem_b_hypothesis(ref.alpha0, row.eps_b, ref.lyap_star);
        const double eps_check = row.eps_b + 3.0 * (se_row + max_of(ref.lyap_star_se));
        if (row.alpha0 < theorem_b_bound(ref.alpha0, eps_check, ref.lyap_star) - kBoundTol)
          series.violations.push_back("Theorem B bound fails at " + describe(row));
        if (row.alpha0 > ref.alpha0 + kMonotoneTol)
          series.violations.push_back("alpha0 exceeds the repeller's value at " + describe(row));
      }
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    series.rows.push_back(std::move(row));
  }

  const AvoidRow* prev = nullptr;
  for (const auto& r : series.rows) {
    if (r.degenerate) continue;
    if (prev) {
      if (r.h_top < prev->h_top - kMonotoneTol || r.s_star < prev->s_star - kMonotoneTol ||
          r.alpha0 < prev->alpha0 - kMonotoneTol)
        series.violations.push_back("series not monotone between depth " + std::to_string(prev->depth) + " and " +
                                    describe(r));
    }
    prev = &r;
  }
  return series;
}

AvoidSeries theorem_a_series(const Repeller& lambda, const Vector& y, int lo, int hi, AvoidConvention convention,
                             std::uint64_t seed) {
  return avoid_series(lambda, y, lo, hi, TheoremSelect::A, convention, seed);
}

AvoidSeries theorem_b_series(const Repeller& lambda, const Vector& y, int lo, int hi, AvoidConvention convention,
                             std::uint64_t seed) {
  return avoid_series(lambda, y, lo, hi, TheoremSelect::B, convention, seed);
}

void require_checks(const AvoidSeries& series) {
  if (!series.violations.empty()) fail(ErrorKind::TheoremCheck, series.violations.front());
}

std::size_t count_forbidden_visits(const Repeller& sub, const std::vector<Word>& forbidden_root_words, int orbits,
                                   int steps, std::uint64_t seed) {
  require(orbits >= 1 && steps >= 1, ErrorKind::Input, "need at least one orbit and one step");
  const auto& sft = sub.sft();
  require(!sft.empty(), ErrorKind::EmptySubshift, "empty subshift");
  std::size_t visits = 0;
  for (int o = 0; o < orbits; ++o) {
    CounterRng rng(seed, static_cast<std::uint64_t>(o));
    std::vector<std::int32_t> path;
    std::size_t s = rng.next() % sft.size();
    path.push_back(static_cast<std::int32_t>(s));
    for (int t = 1; t < steps; ++t) {
      const auto succ = sft.successors(s);
      s = static_cast<std::size_t>(succ[rng.next() % succ.size()]);
      path.push_back(static_cast<std::int32_t>(s));
    }
    const auto word = sft.root_word(path);
    for (const auto& f : forbidden_root_words) {
      if (f.empty() || f.size() > word.size()) continue;
      for (std::size_t i = 0; i + f.size() <= word.size(); ++i) {
        if (std::equal(f.begin(), f.end(), word.begin() + static_cast<std::ptrdiff_t>(i))) ++visits;
      }
    }
  }
  return visits;
}

}  // namespace bowenlab
