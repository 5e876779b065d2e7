#include "bowenlab/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bowenlab/error.hpp"
#include "bowenlab/kernels.hpp"
#include "bowenlab/random.hpp"

namespace bowenlab {

namespace {

constexpr double kRenormalize = 1e100;

void check_s(double s, long d) {
  require(std::isfinite(s) && s >= 0.0 && s <= static_cast<double>(d), ErrorKind::Input,
          "s must lie in [0, d]");
}

// Product with a running scale so long products stay finite.
struct ScaledProduct {
  Matrix m;
  double log_scale = 0.0;

  explicit ScaledProduct(int d) : m(Matrix::Identity(d, d)) {}

  void left_multiply(const Matrix& j) {
    m = j * m;
    const double c = m.cwiseAbs().maxCoeff();
    if (c > kRenormalize) {
      m /= c;
      log_scale += std::log(c);
    }
  }

  Vector log_singular_values() const {
    return (log_elementwise(closed_form_singular_values(m)).array() + log_scale).matrix();
  }
};

struct Moments {
  Vector sum;
  Vector sumsq;
  Moments& operator+=(const Moments& o) {
    sum += o.sum;
    sumsq += o.sumsq;
    return *this;
  }
};

std::vector<double> row_cumulative(const MarkovMeasure& mu) {
  std::vector<double> cum(mu.transition.size());
  for (std::size_t a = 0; a < mu.states(); ++a) {
    double acc = 0.0;
    for (auto k = mu.graph.offsets[a]; k < mu.graph.offsets[a + 1]; ++k) {
      acc += mu.transition[static_cast<std::size_t>(k)];
      cum[static_cast<std::size_t>(k)] = acc;
    }
  }
  return cum;
}

std::size_t draw(const double* cum, std::size_t n, double u) {
  // The last entry may be slightly below 1; clamp to the final slot.
  const double target = u * cum[n - 1];
  const auto it = std::upper_bound(cum, cum + n, target);
  return std::min(static_cast<std::size_t>(it - cum), n - 1);
}

LyapunovSpectrum finish(const Vector& mean, const Vector& se, int depth, bool mc, std::string measure) {
  LyapunovSpectrum out;
  std::vector<std::pair<double, double>> pairs;
  for (int i = 0; i < mean.size(); ++i) pairs.emplace_back(mean[i], se[i]);
  std::sort(pairs.begin(), pairs.end(), [](auto a, auto b) { return a.first > b.first; });
  for (auto [m, e] : pairs) {
    out.exponents.push_back(m);
    out.std_error.push_back(e);
  }
  out.depth = depth;
  out.monte_carlo = mc;
  out.measure = std::move(measure);
  return out;
}

}  // namespace

const char* family_name(Family f) { return f == Family::SubAdditivePhi ? "sub" : "super"; }

SingularValueVector singular_values(const Matrix& j, int steps) {
  return SingularValueVector{closed_form_singular_values(j), steps};
}

double phi_from_logs(const Vector& log_sv, double s) {
  const auto d = log_sv.size();
  check_s(s, d);
  const auto k = static_cast<long>(std::floor(s));
  if (k >= d) return log_sv.sum();
  double v = 0.0;
  for (auto i = d - k; i < d; ++i) v += log_sv[i];
  return v + (s - static_cast<double>(k)) * log_sv[d - k - 1];
}

double psi_from_logs(const Vector& log_sv, double s) {
  const auto d = log_sv.size();
  check_s(s, d);
  const auto k = static_cast<long>(std::floor(s));
  if (k >= d) return log_sv.sum();
  double v = 0.0;
  for (long i = 0; i < k; ++i) v += log_sv[i];
  return v + (s - static_cast<double>(k)) * log_sv[k];
}

double potential_from_logs(Family f, const Vector& log_sv, double s) {
  return f == Family::SubAdditivePhi ? phi_from_logs(log_sv, s) : psi_from_logs(log_sv, s);
}

double phi_s(const SingularValueVector& sv, double s) { return phi_from_logs(log_elementwise(sv.values), s); }
double psi_s(const SingularValueVector& sv, double s) { return psi_from_logs(log_elementwise(sv.values), s); }

Matrix cocycle_product(const ModelSpec& model, const Vector& x, int n) {
  require(n >= 1, ErrorKind::Input, "cocycle length must be positive");
  Matrix m = Matrix::Identity(model.dimension(), model.dimension());
  Vector y = x;
  for (int i = 0; i < n; ++i) {
    m = jacobian(model, y) * m;
    if (i + 1 < n) y = evaluate(model, y);
  }
  return m;
}

double phi_s(const ModelSpec& model, const Vector& x, int n, double s) {
  return phi_s(singular_values(cocycle_product(model, x, n), n), s);
}

double psi_s(const ModelSpec& model, const Vector& x, int n, double s) {
  return psi_s(singular_values(cocycle_product(model, x, n), n), s);
}

Vector cylinder_log_singular_values(const Repeller& rep, std::span<const std::int32_t> path) {
  require(!path.empty(), ErrorKind::Input, "cylinder needs at least one symbol");
  const auto& model = rep.model();
  const int d = model.dimension();
  if (!model.locally_constant()) {
    const auto orbit = rep.representative_orbit(path);
    if (d == 1) {
      double acc = 0.0;
      for (const auto& p : orbit) acc += std::log(std::abs(jacobian(model, p)(0, 0)));
      return Vector::Constant(1, acc);
    }
    ScaledProduct prod(d);
    for (const auto& p : orbit) prod.left_multiply(jacobian(model, p));
    return prod.log_singular_values();
  }
  if (model.additive()) {
    Vector acc = Vector::Zero(d);
    for (auto a : path) acc += rep.state_log_singular_values(static_cast<std::size_t>(a));
    return acc;
  }
  ScaledProduct prod(d);
  for (auto a : path) prod.left_multiply(model.symbol_jacobian(rep.base_symbol(static_cast<std::size_t>(a))));
  return prod.log_singular_values();
}

double phi_s(const Repeller& rep, std::span<const std::int32_t> path, double s) {
  return phi_from_logs(cylinder_log_singular_values(rep, path), s);
}

double psi_s(const Repeller& rep, std::span<const std::int32_t> path, double s) {
  return psi_from_logs(cylinder_log_singular_values(rep, path), s);
}

LyapunovSpectrum lyapunov_spectrum(const Repeller& rep, const MarkovMeasure& mu, int depth, std::uint64_t seed,
                                   int samples) {
  require(depth >= 1, ErrorKind::Input, "depth must be positive");
  require(samples >= 2, ErrorKind::Input, "need at least two samples");
  check_compatible(rep.sft(), mu);
  const auto& sft = rep.sft();
  const auto& model = rep.model();
  const int d = model.dimension();
  const Vector zero = Vector::Zero(d);

  const auto count = enumerate_words(sft, depth);
  const bool exhaustive = model.locally_constant() && count.exact && *count.exact <= (std::uint64_t{1} << 24);
  if (exhaustive) {
    std::vector<Vector> state_logs;
    if (model.additive()) {
      state_logs.reserve(sft.size());
      for (std::size_t a = 0; a < sft.size(); ++a) state_logs.push_back(rep.state_log_singular_values(a));
    }
    const Vector total = kernels::blocked_sum(sft.size(), zero, [&](std::size_t start) -> Vector {
      const double p0 = mu.stationary[start];
      if (p0 <= 0.0) return Vector::Zero(d);
      Vector acc = Vector::Zero(d);
      if (depth == 1) {
        const Vector l = model.additive() ? state_logs[start] : rep.state_log_singular_values(start);
        return p0 * l;
      }
      // Depth-first walk with running probability and cocycle.
      struct Frame {
        std::size_t state;
        double prob;
        Vector logs;
        ScaledProduct prod;
        std::int64_t next_edge;
      };
      std::vector<Frame> stack;
      auto make = [&](std::size_t s, double prob, const Frame* parent) {
        Frame f{s, prob, Vector::Zero(d), ScaledProduct(d), mu.graph.offsets[s]};
        if (model.additive()) {
          f.logs = (parent ? parent->logs : Vector(Vector::Zero(d))) + state_logs[s];
        } else {
          if (parent) f.prod = parent->prod;
          f.prod.left_multiply(model.symbol_jacobian(rep.base_symbol(s)));
        }
        return f;
      };
      stack.push_back(make(start, p0, nullptr));
      while (!stack.empty()) {
        auto& top = stack.back();
        if (static_cast<int>(stack.size()) == depth) {
          const Vector l = model.additive() ? top.logs : top.prod.log_singular_values();
          acc += top.prob * l;
          stack.pop_back();
          continue;
        }
        if (top.next_edge >= mu.graph.offsets[top.state + 1]) {
          stack.pop_back();
          continue;
        }
        const auto k = static_cast<std::size_t>(top.next_edge++);
        const double p = top.prob * mu.transition[k];
        if (p <= 0.0) continue;
        const Frame child = make(static_cast<std::size_t>(mu.graph.targets[k]), p, &top);
        stack.push_back(child);
      }
      return acc;
    });
    return finish(total / depth, Vector::Zero(d), depth, false, "markov");
  }

  // Monte Carlo over measure-distributed paths. For non-constant Jacobians the
  // path is extended by a random tail so the starting point is mu-distributed.
  std::vector<double> pi_cum(sft.size());
  double acc = 0.0;
  for (std::size_t a = 0; a < sft.size(); ++a) pi_cum[a] = (acc += mu.stationary[a]);
  const auto cum = row_cumulative(mu);
  const int tail = model.locally_constant() ? 0 : rep.tail_steps();
  const Moments zm{zero, zero};
  const Moments m = kernels::blocked_sum(static_cast<std::size_t>(samples), zm, [&](std::size_t i) {
    CounterRng rng(seed, i);
    std::vector<std::int32_t> path(static_cast<std::size_t>(depth + tail));
    std::size_t s = draw(pi_cum.data(), pi_cum.size(), rng.uniform());
    path[0] = static_cast<std::int32_t>(s);
    for (std::size_t t = 1; t < path.size(); ++t) {
      const auto lo = static_cast<std::size_t>(mu.graph.offsets[s]);
      const auto n = static_cast<std::size_t>(mu.graph.offsets[s + 1]) - lo;
      s = static_cast<std::size_t>(mu.graph.targets[lo + draw(cum.data() + lo, n, rng.uniform())]);
      path[t] = static_cast<std::int32_t>(s);
    }
    Vector l(d);
    if (model.locally_constant()) {
      l = cylinder_log_singular_values(rep, path);
    } else {
      // Orbit of the point coded by the whole random path; the tail only
      // pins down the point, the cocycle uses the first `depth` steps.
      std::vector<Vector> pts(path.size());
      Vector z = Vector::Constant(d, 0.5);
      for (auto t = static_cast<std::ptrdiff_t>(path.size()) - 1; t >= 0; --t) {
        z = model.inverse_branch(rep.base_symbol(static_cast<std::size_t>(path[static_cast<std::size_t>(t)])), z);
        pts[static_cast<std::size_t>(t)] = z;
      }
      ScaledProduct prod(d);
      for (int t = 0; t < depth; ++t) prod.left_multiply(jacobian(model, pts[static_cast<std::size_t>(t)]));
      l = prod.log_singular_values();
    }
    l /= depth;
    return Moments{l, l.cwiseProduct(l)};
  });
  const double n = samples;
  const Vector mean = m.sum / n;
  const Vector var = ((m.sumsq / n) - mean.cwiseProduct(mean)).cwiseMax(0.0) * (n / (n - 1.0));
  return finish(mean, (var / n).cwiseSqrt(), depth, true, "markov");
}

LyapunovSpectrum lyapunov_lebesgue(const ModelSpec& model, int depth, std::uint64_t seed, int samples) {
  require(depth >= 1, ErrorKind::Input, "depth must be positive");
  const int d = model.dimension();
  switch (model.kind()) {
    case ModelKind::LinearToral: {
      ScaledProduct prod(d);
      const Matrix& a = std::get<LinearToralPayload>(model.payload()).matrix;
      for (int i = 0; i < depth; ++i) prod.left_multiply(a);
      return finish(prod.log_singular_values() / depth, Vector::Zero(d), depth, false, "lebesgue");
    }
    case ModelKind::SftAffine: {
      require(model.full_branch(), ErrorKind::Input,
              "Lebesgue is not invariant for this model; use a full-branch model or a Markov measure");
      const Repeller rep(model);
      const auto mu = bernoulli_measure(rep.sft(), model.lebesgue_weights());
      auto out = lyapunov_spectrum(rep, mu, depth, seed, samples);
      out.measure = "lebesgue";
      return out;
    }
    case ModelKind::PerturbedDoubling: {
      // Birkhoff averages from Lebesgue-random starts after a burn-in.
      constexpr int kBurn = 32;
      const Moments zm{Vector::Zero(1), Vector::Zero(1)};
      const Moments m = kernels::blocked_sum(static_cast<std::size_t>(samples), zm, [&](std::size_t i) {
        CounterRng rng(seed, i);
        Vector x = Vector::Constant(1, rng.uniform());
        for (int t = 0; t < kBurn; ++t) x = evaluate(model, x);
        double acc = 0.0;
        for (int t = 0; t < depth; ++t) {
          acc += std::log(jacobian(model, x)(0, 0));
          x = evaluate(model, x);
        }
        const Vector l = Vector::Constant(1, acc / depth);
        return Moments{l, l.cwiseProduct(l)};
      });
      const double n = samples;
      const Vector mean = m.sum / n;
      const Vector var = ((m.sumsq / n) - mean.cwiseProduct(mean)).cwiseMax(0.0) * (n / (n - 1.0));
      return finish(mean, (var / n).cwiseSqrt(), depth, true, "lebesgue");
    }
  }
  fail(ErrorKind::Input, "unsupported model");
}

double lyapunov_ulam(const ModelSpec& model, int bins) {
  require(model.dimension() == 1 && model.has_geometry(), ErrorKind::Input, "Ulam estimator needs a 1-d model");
  require(bins >= 2, ErrorKind::Input, "need at least two bins");
  const double h = 1.0 / bins;
  // Triplets (source bin, target bin, probability).
  std::vector<std::vector<std::pair<std::int32_t, double>>> rows(static_cast<std::size_t>(bins));
  for (int j = 0; j < bins; ++j) {
    for (int a = 0; a < model.alphabet(); ++a) {
      const double lo = model.inverse_branch(a, Vector::Constant(1, j * h))[0];
      const double hi = model.inverse_branch(a, Vector::Constant(1, (j + 1) * h))[0];
      const int first = std::clamp(static_cast<int>(std::floor(lo / h)), 0, bins - 1);
      const int last = std::clamp(static_cast<int>(std::floor(hi / h)), 0, bins - 1);
      for (int i = first; i <= last; ++i) {
        const double overlap = std::min(hi, (i + 1) * h) - std::max(lo, i * h);
        if (overlap > 0.0) rows[static_cast<std::size_t>(i)].emplace_back(j, overlap / h);
      }
    }
  }
  kernels::Csr g;
  std::vector<double> p;
  for (auto& row : rows) {
    std::sort(row.begin(), row.end());
    double total = 0.0;
    for (auto& [j, v] : row) total += v;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k > 0 && row[k].first == row[k - 1].first) {
        p.back() += row[k].second / total;
        continue;
      }
      g.targets.push_back(row[k].first);
      p.push_back(row[k].second / total);
    }
    g.offsets.push_back(static_cast<std::int64_t>(g.targets.size()));
  }
  const auto pi = stationary_distribution(g, p);
  double lambda = 0.0;
  for (int i = 0; i < bins; ++i) {
    auto logd = [&](double x) { return std::log(std::abs(jacobian(model, Vector::Constant(1, x))(0, 0))); };
    const double a = i * h, b = (i + 1) * h;
    const double mean = (logd(a) + 4.0 * logd(0.5 * (a + b)) + logd(b)) / 6.0;
    lambda += pi[static_cast<std::size_t>(i)] * mean;
  }
  return lambda;
}

SubadditivityReport check_subadditivity(const ModelSpec& model, double s, int trials, std::uint64_t seed) {
  require(trials >= 1, ErrorKind::Input, "trials must be positive");
  const int d = model.dimension();
  check_s(s, d);
  SubadditivityReport r;
  r.trials = trials;
  r.worst_phi_margin = std::numeric_limits<double>::infinity();
  r.worst_psi_margin = std::numeric_limits<double>::infinity();
  const Sft& base = model.base_sft();
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t));
    const int n = 1 + static_cast<int>(rng.next() % 12);
    const int m = 1 + static_cast<int>(rng.next() % 12);
    std::vector<Matrix> steps;
    if (model.kind() == ModelKind::SftAffine) {
      // Symbolic orbit inside the repeller.
      std::size_t a = rng.next() % base.size();
      for (int i = 0; i < n + m; ++i) {
        steps.push_back(model.symbol_jacobian(static_cast<int>(a)));
        const auto succ = base.successors(a);
        if (succ.empty()) break;
        a = static_cast<std::size_t>(succ[rng.next() % succ.size()]);
      }
      if (static_cast<int>(steps.size()) < n + m) continue;
    } else {
      Vector x(d);
      for (int i = 0; i < d; ++i) x[i] = rng.uniform();
      for (int i = 0; i < n + m; ++i) {
        steps.push_back(jacobian(model, x));
        x = evaluate(model, x);
      }
    }
    Matrix a = Matrix::Identity(d, d), b = Matrix::Identity(d, d);
    for (int i = 0; i < n; ++i) a = steps[static_cast<std::size_t>(i)] * a;
    for (int i = n; i < n + m; ++i) b = steps[static_cast<std::size_t>(i)] * b;
    const Matrix c = b * a;
    const Vector la = log_elementwise(closed_form_singular_values(a));
    const Vector lb = log_elementwise(closed_form_singular_values(b));
    const Vector lc = log_elementwise(closed_form_singular_values(c));
    const double phi_margin = phi_from_logs(lc, s) - phi_from_logs(la, s) - phi_from_logs(lb, s);
    const double psi_margin = psi_from_logs(la, s) + psi_from_logs(lb, s) - psi_from_logs(lc, s);
    if (phi_margin < r.worst_phi_margin || psi_margin < r.worst_psi_margin) {
      std::ostringstream os;
      os << "trial " << t << " n=" << n << " m=" << m << " phi margin " << phi_margin << " psi margin "
         << psi_margin;
      if (std::min(phi_margin, psi_margin) < std::min(r.worst_phi_margin, r.worst_psi_margin)) r.witness = os.str();
    }
    r.worst_phi_margin = std::min(r.worst_phi_margin, phi_margin);
    r.worst_psi_margin = std::min(r.worst_psi_margin, psi_margin);
  }
  r.passed = r.worst_phi_margin >= -1e-9 && r.worst_psi_margin >= -1e-9;
  return r;
}

}  // namespace bowenlab
