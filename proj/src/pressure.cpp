#include "bowenlab/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "bowenlab/error.hpp"

namespace bowenlab {

namespace {

constexpr std::uint64_t kWordBudget = std::uint64_t{1} << 24;
constexpr std::uint64_t kBlockBudget = std::uint64_t{1} << 22;
constexpr double kBracketTolerance = 1e-6;

double log_sum_exp(const std::vector<double>& v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(v.begin(), v.end());
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

// log rho(diag(exp(-pot)) T) with the weights shifted for range safety.
double log_weighted_radius(const Sft& sft, const std::vector<double>& pot) {
  const double c = *std::min_element(pot.begin(), pot.end());
  std::vector<double> w(pot.size());
  for (std::size_t a = 0; a < pot.size(); ++a) w[a] = std::exp(-(pot[a] - c));
  return std::log(spectral_radius(sft, w)) - c;
}

double transition_of(const MarkovMeasure& mu, std::size_t a, std::size_t b) {
  const auto lo = mu.graph.targets.begin() + mu.graph.offsets[a];
  const auto hi = mu.graph.targets.begin() + mu.graph.offsets[a + 1];
  const auto it = std::lower_bound(lo, hi, static_cast<std::int32_t>(b));
  require(it != hi && *it == static_cast<std::int32_t>(b), ErrorKind::Input, "path not admissible for measure");
  return mu.transition[static_cast<std::size_t>(it - mu.graph.targets.begin())];
}

}  // namespace

double bowen_distance(const ModelSpec& model, const std::vector<Vector>& a, const std::vector<Vector>& b) {
  const bool wrap = model.on_torus();
  double dist = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    for (int k = 0; k < a[i].size(); ++k) {
      double delta = std::abs(a[i][k] - b[i][k]);
      if (wrap) delta = std::min(delta, 1.0 - delta);
      dist = std::max(dist, delta);
    }
  }
  return dist;
}

SeparatedSet build_separated_set(const Repeller& rep, int n, double eps) {
  require(eps > 0.0 && std::isfinite(eps), ErrorKind::Input, "epsilon must be positive");
  require(n >= 1, ErrorKind::Input, "n must be positive");
  const auto count = enumerate_words(rep.sft(), n);
  require(count.exact && *count.exact <= kWordBudget, ErrorKind::Budget,
          "too many cylinders for a separated set; use a smaller n");

  const auto& model = rep.model();
  const int d = model.dimension();
  const bool wrap = model.on_torus();
  const auto cells = static_cast<std::int64_t>(std::min(std::ceil(1.0 / eps), 1e6));
  auto index_of = [&](double x) {
    return std::clamp(static_cast<std::int64_t>(std::floor(x / eps)), std::int64_t{0}, cells - 1);
  };

  SeparatedSet out;
  out.n = n;
  out.epsilon = eps;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
  std::vector<std::uint64_t> keys;
  for_each_word(rep.sft(), n, [&](const Word& w) {
    auto orbit = rep.representative_orbit(w);
    std::int64_t base[kMaxDim] = {0, 0, 0};
    for (int k = 0; k < d; ++k) base[k] = index_of(orbit[0][k]);
    keys.clear();
    const int combos = d == 1 ? 3 : (d == 2 ? 9 : 27);
    for (int c = 0; c < combos; ++c) {
      std::uint64_t key = 0;
      bool ok = true;
      int code = c;
      for (int k = 0; k < d; ++k) {
        std::int64_t idx = base[k] + (code % 3) - 1;
        code /= 3;
        if (idx < 0 || idx >= cells) {
          if (!wrap) {
            ok = false;
            break;
          }
          idx = (idx + cells) % cells;
        }
        key = key * static_cast<std::uint64_t>(cells) + static_cast<std::uint64_t>(idx);
      }
      if (ok) keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (auto key : keys) {
      const auto it = buckets.find(key);
      if (it == buckets.end()) continue;
      for (auto j : it->second) {
        if (bowen_distance(model, orbit, out.orbits[j]) < eps) return true;
      }
    }
    std::uint64_t own = 0;
    for (int k = 0; k < d; ++k) own = own * static_cast<std::uint64_t>(cells) + static_cast<std::uint64_t>(base[k]);
    buckets[own].push_back(static_cast<std::uint32_t>(out.paths.size()));
    out.paths.push_back(w);
    out.orbits.push_back(std::move(orbit));
    return true;
  });
  return out;
}

PressureEstimate pressure_separated(const Repeller& rep, Family family, double s, int n, double eps) {
  const auto set = build_separated_set(rep, n, eps);
  std::vector<double> terms;
  terms.reserve(set.paths.size());
  for (const auto& w : set.paths) terms.push_back(-potential_from_logs(family, cylinder_log_singular_values(rep, w), s));
  PressureEstimate e;
  e.value = log_sum_exp(terms) / n;
  e.method = PressureMethod::SeparatedSet;
  e.family = family;
  e.s = s;
  e.depth = n;
  e.epsilon = eps;
  return e;
}

std::pair<double, double> log_derivative_range(const ModelSpec& model, std::span<const std::uint16_t> word) {
  require(model.dimension() == 1, ErrorKind::Input, "derivative range is for d = 1");
  double lo = 0.0, hi = 1.0;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    lo = model.inverse_branch(*it, Vector::Constant(1, lo))[0];
    hi = model.inverse_branch(*it, Vector::Constant(1, hi))[0];
  }
  if (lo > hi) std::swap(lo, hi);
  auto logd = [&](double x) { return std::log(std::abs(jacobian(model, Vector::Constant(1, x))(0, 0))); };
  double mn = std::min(logd(lo), logd(hi));
  double mx = std::max(logd(lo), logd(hi));
  // Interior critical point of f' for the perturbed doubling map.
  if (lo < 0.5 && 0.5 < hi) {
    mn = std::min(mn, logd(0.5));
    mx = std::max(mx, logd(0.5));
  }
  return {mn, mx};
}

SpectralPressure::SpectralPressure(Repeller rep, bool force_blocks) : rep_(std::move(rep)) {
  const auto& model = rep_.model();
  require(!rep_.sft().empty(), ErrorKind::EmptySubshift, "pressure of an empty subshift");
  if (!model.locally_constant()) {
    require(model.dimension() == 1, ErrorKind::Input, "nonlinear pressure is implemented for d = 1");
    mode_ = Mode::Overlapping;
  } else if (force_blocks) {
    mode_ = Mode::Blocks;
  } else if (model.additive()) {
    mode_ = Mode::Additive;
  } else if (model.kind() == ModelKind::LinearToral) {
    mode_ = Mode::ConstantCocycle;
  } else {
    mode_ = Mode::Blocks;
  }
  if (mode_ == Mode::Additive) {
    state_logs_.reserve(rep_.sft().size());
    for (std::size_t a = 0; a < rep_.sft().size(); ++a) state_logs_.push_back(rep_.state_log_singular_values(a));
  }
}

double SpectralPressure::entropy() const {
  std::lock_guard lock(mutex_);
  if (!entropy_) entropy_ = topological_entropy(rep_.sft());
  return *entropy_;
}

int SpectralPressure::default_depth() const {
  switch (mode_) {
    case Mode::Additive:
      return 1;
    case Mode::ConstantCocycle:
      return 8;
    case Mode::Blocks: {
      int m = 8;
      while (m > 1) {
        const auto c = enumerate_words(rep_.sft(), m);
        if (c.exact && *c.exact <= (kBlockBudget >> 2)) break;
        --m;
      }
      return m;
    }
    case Mode::Overlapping:
      return std::max(10, rep_.sft().label_length());
  }
  return 1;
}

std::shared_ptr<const SpectralPressure::Blocks> SpectralPressure::blocks(int m) const {
  std::lock_guard lock(mutex_);
  if (auto it = blocks_.find(m); it != blocks_.end()) return it->second;
  const auto& sft = rep_.sft();
  const auto count = enumerate_words(sft, m);
  require(count.exact && *count.exact <= kBlockBudget, ErrorKind::Budget,
          "too many m-blocks for the transfer matrix; use a smaller depth");
  auto b = std::make_shared<Blocks>();
  b->begin.assign(sft.size() + 1, 0);
  for_each_word(sft, m, [&](const Word& w) {
    b->paths.push_back(w);
    b->first.push_back(static_cast<std::size_t>(w.front()));
    b->last.push_back(static_cast<std::size_t>(w.back()));
    ++b->begin[static_cast<std::size_t>(w.front()) + 1];
    return true;
  });
  for (std::size_t a = 0; a < sft.size(); ++a) b->begin[a + 1] += b->begin[a];
  b->log_sv.resize(b->paths.size());
  kernels::parallel_for(b->paths.size(),
                        [&](std::size_t i) { b->log_sv[i] = cylinder_log_singular_values(rep_, b->paths[i]); });
  blocks_[m] = b;
  return b;
}

std::shared_ptr<const SpectralPressure::Recoding> SpectralPressure::recoding(int m) const {
  std::lock_guard lock(mutex_);
  if (auto it = recodings_.find(m); it != recodings_.end()) return it->second;
  const auto& model = rep_.model();
  const int l = rep_.sft().label_length();
  auto r = std::make_shared<Recoding>();
  r->sft = m <= l ? rep_.sft() : higher_block(rep_.sft(), m - l + 1);
  const std::size_t n = r->sft.size();
  r->log_min.resize(n);
  r->log_max.resize(n);
  kernels::parallel_for(n, [&](std::size_t a) {
    std::tie(r->log_min[a], r->log_max[a]) = log_derivative_range(model, r->sft.label(a));
  });
  recodings_[m] = r;
  return r;
}

Vector SpectralPressure::power_logs(int m) const {
  std::lock_guard lock(mutex_);
  if (auto it = power_logs_.find(m); it != power_logs_.end()) return it->second;
  const Matrix& a = std::get<LinearToralPayload>(rep_.model().payload()).matrix;
  const int d = rep_.dimension();
  Matrix p = Matrix::Identity(d, d);
  double log_scale = 0.0;
  for (int i = 0; i < m; ++i) {
    p = a * p;
    const double c = p.cwiseAbs().maxCoeff();
    p /= c;
    log_scale += std::log(c);
  }
  Vector logs = (log_elementwise(closed_form_singular_values(p)).array() + log_scale).matrix();
  power_logs_[m] = logs;
  return logs;
}

double SpectralPressure::value(Family family, double s, int m) const {
  require(m >= 1, ErrorKind::Input, "depth must be positive");
  const auto& sft = rep_.sft();
  switch (mode_) {
    case Mode::Additive: {
      std::vector<double> pot(sft.size());
      for (std::size_t a = 0; a < sft.size(); ++a) pot[a] = potential_from_logs(family, state_logs_[a], s);
      return log_weighted_radius(sft, pot);
    }
    case Mode::ConstantCocycle:
      return entropy() - potential_from_logs(family, power_logs(m), s) / m;
    case Mode::Blocks: {
      const auto b = blocks(m);
      const std::size_t n = b->paths.size();
      std::vector<double> pot(n);
      for (std::size_t i = 0; i < n; ++i) pot[i] = potential_from_logs(family, b->log_sv[i], s);
      const double c = *std::min_element(pot.begin(), pot.end());
      std::vector<double> w(n);
      for (std::size_t i = 0; i < n; ++i) w[i] = std::exp(-(pot[i] - c));
      std::vector<double> start(sft.size());
      const auto r = perron(n, [&](const double* x, double* y, double shift) {
        for (std::size_t a = 0; a < sft.size(); ++a) {
          double acc = 0.0;
          for (auto i = b->begin[a]; i < b->begin[a + 1]; ++i) acc += x[i];
          start[a] = acc;
        }
        for (std::size_t i = 0; i < n; ++i) {
          double acc = 0.0;
          for (auto t : sft.successors(b->last[i])) acc += start[static_cast<std::size_t>(t)];
          y[i] = w[i] * acc + shift * x[i];
        }
      });
      require(r.rho > 0.0, ErrorKind::EmptySubshift, "subshift has no infinite paths");
      return (std::log(r.rho) - c) / m;
    }
    case Mode::Overlapping: {
      const auto r = recoding(m);
      const auto& logs = family == Family::SubAdditivePhi ? r->log_min : r->log_max;
      std::vector<double> pot(logs.size());
      for (std::size_t a = 0; a < logs.size(); ++a) pot[a] = potential_from_logs(family, Vector::Constant(1, logs[a]), s);
      return log_weighted_radius(r->sft, pot);
    }
  }
  fail(ErrorKind::Consistency, "unknown pressure mode");
}

double SpectralPressure::variational_gap(Family family, double s, int m, const MarkovMeasure& mu) const {
  const auto& sft = rep_.sft();
  check_compatible(sft, mu);
  const double h = markov_entropy(mu);
  double f = 0.0;
  switch (mode_) {
    case Mode::Additive:
      for (std::size_t a = 0; a < sft.size(); ++a) f -= mu.stationary[a] * potential_from_logs(family, state_logs_[a], s);
      break;
    case Mode::ConstantCocycle:
      f = -potential_from_logs(family, power_logs(m), s) / m;
      break;
    case Mode::Blocks: {
      const auto b = blocks(m);
      for (std::size_t i = 0; i < b->paths.size(); ++i) {
        const auto& w = b->paths[i];
        double p = mu.stationary[static_cast<std::size_t>(w[0])];
        for (std::size_t k = 1; k < w.size(); ++k)
          p *= transition_of(mu, static_cast<std::size_t>(w[k - 1]), static_cast<std::size_t>(w[k]));
        f -= p * potential_from_logs(family, b->log_sv[i], s);
      }
      f /= m;
      break;
    }
    case Mode::Overlapping: {
      require(m <= sft.label_length(), ErrorKind::Input,
              "the measure lives on the repeller's own states; use a depth up to its label length");
      const auto r = recoding(m);
      const auto& logs = family == Family::SubAdditivePhi ? r->log_min : r->log_max;
      for (std::size_t a = 0; a < sft.size(); ++a)
        f -= mu.stationary[a] * potential_from_logs(family, Vector::Constant(1, logs[a]), s);
      break;
    }
  }
  return value(family, s, m) - (h + f);
}

PressureEstimate pressure_spectral(const SpectralPressure& p, Family family, double s, int m) {
  PressureEstimate e;
  e.value = p.value(family, s, m);
  e.method = PressureMethod::SpectralDepthM;
  e.family = family;
  e.s = s;
  e.depth = m;
  return e;
}

PressureEstimate pressure_spectral(const Repeller& rep, Family family, double s, int m) {
  const SpectralPressure p(rep);
  return pressure_spectral(p, family, s, m);
}

PressureEstimate pressure_limit(const SpectralPressure& p, Family family, double s, int m_max) {
  require(m_max >= 2, ErrorKind::Input, "pressure limit needs at least two depths");
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(m_max));
  if (p.mode() == SpectralPressure::Mode::Additive) {
    values.assign(static_cast<std::size_t>(m_max), p.value(family, s, 1));
  } else {
    for (int m = 1; m <= m_max; ++m) values.push_back(p.value(family, s, m));
  }
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double step = values[i] - values[i - 1];
    const bool ok = family == Family::SubAdditivePhi ? step <= kBracketTolerance : step >= -kBracketTolerance;
    if (!ok) {
      std::ostringstream os;
      os.precision(12);
      os << "pressure sequence not monotone at s=" << s << ": depth " << i << " gives " << values[i - 1]
         << ", depth " << i + 1 << " gives " << values[i];
      fail(ErrorKind::Consistency, os.str());
    }
  }
  const auto tail = values.begin() + (m_max + 1) / 2 - 1;
  PressureEstimate e;
  e.value = values.back();
  e.method = PressureMethod::SpectralDepthM;
  e.family = family;
  e.s = s;
  e.depth = m_max;
  e.bracket = std::make_pair(*std::min_element(tail, values.end()), *std::max_element(tail, values.end()));
  return e;
}

PressureEstimate pressure_limit(const Repeller& rep, Family family, double s, int m_max) {
  const SpectralPressure p(rep);
  return pressure_limit(p, family, s, m_max);
}

double variational_gap(const Repeller& rep, Family family, double s, const MarkovMeasure& mu, int m) {
  const SpectralPressure p(rep);
  return p.variational_gap(family, s, m, mu);
}

}  // namespace bowenlab
