#include "bowenlab/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <compare>
#include <limits>
#include <map>
#include <optional>
#include <set>

#include "bowenlab/error.hpp"

namespace bowenlab {

namespace {

constexpr std::uint64_t kExplicitBlocks = std::uint64_t{1} << 16;
constexpr std::size_t kBoxBudget = std::size_t{1} << 22;

template <class F>
double bisect_zero(F&& f, double lo, double hi, double tol, int* iterations = nullptr, double* lo_out = nullptr,
                   double* hi_out = nullptr) {
  int it = 0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++it;
  }
  if (iterations) *iterations = it;
  if (lo_out) *lo_out = lo;
  if (hi_out) *hi_out = hi;
  return 0.5 * (lo + hi);
}

// Interval distance on the line or the circle.
double axis_gap(double a_lo, double a_hi, double b_lo, double b_hi, bool wrap) {
  double g = std::max({0.0, b_lo - a_hi, a_lo - b_hi});
  if (wrap) {
    for (double k : {-1.0, 1.0}) g = std::min(g, std::max({0.0, b_lo + k - a_hi, a_lo - (b_hi + k)}));
  }
  return g;
}

// (1/N) log of the sum over N-cylinders of exp(-phi^alpha).
double log_partition(const SpectralPressure& p, double alpha, int n) {
  const auto& rep = p.repeller();
  const auto& sft = rep.sft();
  switch (p.mode()) {
    case SpectralPressure::Mode::Additive: {
      std::vector<double> w(sft.size());
      for (std::size_t a = 0; a < sft.size(); ++a)
        w[a] = std::exp(-phi_from_logs(rep.state_log_singular_values(a), alpha));
      std::vector<double> v = w, next(sft.size());
      double log_scale = 0.0;
      for (int t = 1; t < n; ++t) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t a = 0; a < sft.size(); ++a)
          for (auto b : sft.successors(a)) next[static_cast<std::size_t>(b)] += v[a];
        double mx = 0.0;
        for (std::size_t b = 0; b < sft.size(); ++b) mx = std::max(mx, next[b] *= w[b]);
        for (auto& x : next) x /= mx;
        log_scale += std::log(mx);
        v.swap(next);
      }
      double total = 0.0;
      for (double x : v) total += x;
      return (std::log(total) + log_scale) / n;
    }
    case SpectralPressure::Mode::ConstantCocycle: {
      const Matrix& a = std::get<LinearToralPayload>(rep.model().payload()).matrix;
      Matrix m = Matrix::Identity(a.rows(), a.cols());
      double log_scale = 0.0;
      for (int i = 0; i < n; ++i) {
        m = a * m;
        const double c = m.cwiseAbs().maxCoeff();
        m /= c;
        log_scale += std::log(c);
      }
      const Vector logs = (log_elementwise(closed_form_singular_values(m)).array() + log_scale).matrix();
      return (enumerate_words(sft, n).log_count - phi_from_logs(logs, alpha)) / n;
    }
    default: {
      std::vector<double> terms;
      for_each_word(sft, n, [&](const Word& w) {
        terms.push_back(-phi_from_logs(cylinder_log_singular_values(rep, w), alpha));
        return true;
      });
      const double mx = *std::max_element(terms.begin(), terms.end());
      double acc = 0.0;
      for (double t : terms) acc += std::exp(t - mx);
      return (mx + std::log(acc)) / n;
    }
  }
}

struct DigitGrid {
  std::vector<int> base;                 // per axis
  std::vector<std::vector<int>> digits;  // per symbol, per axis
};

std::optional<DigitGrid> digit_grid(const ModelSpec& model) {
  if (!model.locally_constant() || !model.has_geometry()) return std::nullopt;
  const int d = model.dimension();
  DigitGrid g;
  const Matrix& j0 = model.symbol_jacobian(0);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k)
      if (i != k && j0(i, k) != 0.0) return std::nullopt;
    const double b = j0(i, i);
    if (b < 2.0 - 1e-12 || std::abs(b - std::round(b)) > 1e-9) return std::nullopt;
    g.base.push_back(static_cast<int>(std::round(b)));
  }
  for (int a = 0; a < model.alphabet(); ++a) {
    if ((model.symbol_jacobian(a) - j0).cwiseAbs().maxCoeff() > 1e-12) return std::nullopt;
    const Vector o = model.inverse_branch(a, Vector::Zero(d));
    std::vector<int> dig;
    for (int i = 0; i < d; ++i) {
      const double v = o[i] * g.base[static_cast<std::size_t>(i)];
      if (std::abs(v - std::round(v)) > 1e-9) return std::nullopt;
      const int e = static_cast<int>(std::round(v));
      if (e < 0 || e >= g.base[static_cast<std::size_t>(i)]) return std::nullopt;
      dig.push_back(e);
    }
    g.digits.push_back(std::move(dig));
  }
  return g;
}

struct PrefixKey {
  std::uint64_t p[kMaxDim] = {0, 0, 0};
  std::uint32_t state = 0;
  auto operator<=>(const PrefixKey&) const = default;
};

void sort_unique(std::vector<PrefixKey>& keys) {
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
}

// Least-squares slope of y against x with RMS residual.
std::pair<double, double> fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (my + slope * (x[i] - mx));
    rss += e * e;
  }
  return {slope, std::sqrt(rss / n)};
}

}  // namespace

BowenRoot bowen_root(const SpectralPressure& p, Family family, double tol, int depth) {
  require(tol >= 1e-12 && std::isfinite(tol), ErrorKind::Input, "tolerance must be at least 1e-12");
  BowenRoot out;
  out.family = family;
  out.tolerance = tol;
  const bool exact = p.mode() == SpectralPressure::Mode::Additive;
  out.depth = exact ? 1 : (depth > 0 ? depth : p.default_depth());
  auto pressure = [&](double s) {
    if (exact) return p.value(family, s, 1);
    return pressure_limit(p, family, s, std::max(2, out.depth)).value;
  };
  const double d = p.repeller().dimension();
  const double h = pressure(0.0);
  if (h <= 1e-12) {
    out.degenerate = true;
    out.pressure_at_root = h;
    return out;
  }
  const double top = pressure(d);
  if (top >= -1e-12) {
    out.root = out.s_lo = out.s_hi = d;
    out.pressure_at_root = top;
    return out;
  }
  out.root = bisect_zero(pressure, 0.0, d, tol, &out.iterations, &out.s_lo, &out.s_hi);
  out.pressure_at_root = pressure(out.root);
  return out;
}

BowenRoot bowen_root(const Repeller& rep, Family family, double tol, int depth) {
  const SpectralPressure p(rep);
  return bowen_root(p, family, tol, depth);
}

double cell_gap(const Repeller& z) {
  const auto& model = z.model();
  if (!model.has_geometry() || z.sft().empty()) return 0.0;
  const auto& hulls = z.hulls();
  std::map<int, Box> by_symbol;
  for (std::size_t a = 0; a < z.sft().size(); ++a) {
    const int sym = z.base_symbol(a);
    auto it = by_symbol.find(sym);
    if (it == by_symbol.end()) {
      by_symbol.emplace(sym, hulls[a]);
    } else {
      it->second = Box::hull(it->second, hulls[a]);
    }
  }
  if (by_symbol.size() < 2) return 0.0;
  double gap = std::numeric_limits<double>::infinity();
  for (auto i = by_symbol.begin(); i != by_symbol.end(); ++i) {
    for (auto j = std::next(i); j != by_symbol.end(); ++j) {
      double g = 0.0;
      for (int k = 0; k < model.dimension(); ++k)
        g = std::max(g, axis_gap(i->second.lo[k], i->second.hi[k], j->second.lo[k], j->second.hi[k], model.on_torus()));
      gap = std::min(gap, g);
    }
  }
  return gap;
}

CaratheodoryEstimate caratheodory_dim(const Repeller& z, double r, int n) {
  require(n >= 1, ErrorKind::Input, "Bowen length must be positive");
  require(r > 0.0 && std::isfinite(r), ErrorKind::Input, "r must be positive");
  CaratheodoryEstimate out;
  out.r = r;
  out.n = n;
  if (z.sft().empty()) {
    out.degenerate = true;
    return out;
  }
  require(z.model().locally_constant(), ErrorKind::Input,
          "Bowen balls match cylinders only for locally constant models");
  out.cell_gap = cell_gap(z);
  double limit = out.cell_gap;
  if (out.cell_gap <= 0.0) {
    out.symbolic_metric = true;
    limit = 1.0;
    out.symbolic_level = static_cast<int>(std::floor(std::log2(1.0 / r)));
  }
  require(r < limit, ErrorKind::Precondition,
          "r must be below the cell gap " + std::to_string(limit) + " so Bowen balls sit inside cylinders");

  const auto count = enumerate_words(z.sft(), n);
  out.block_operator = count.exact && *count.exact <= kExplicitBlocks;
  const SpectralPressure p(z, out.block_operator);
  const SpectralPressure structured(z);
  const double d = z.dimension();
  if (topological_entropy(z.sft()) <= 1e-12) {
    out.degenerate = true;
    return out;
  }
  auto growth = [&](double a) { return p.value(Family::SubAdditivePhi, a, n); };
  out.alpha = growth(d) >= -1e-12 ? d : bisect_zero(growth, 0.0, d, 1e-11);

  const bool partition_ok = structured.mode() != SpectralPressure::Mode::Blocks ||
                            (count.exact && *count.exact <= (std::uint64_t{1} << 22));
  if (partition_ok) {
    auto zn = [&](double a) { return log_partition(structured, a, n); };
    for (int i = 0; i <= 20; ++i) {
      const double a = d * i / 20.0;
      out.alpha_grid.push_back(a);
      out.log_partition.push_back(zn(a));
    }
    out.partition_alpha = zn(d) >= 0.0 ? d : bisect_zero(zn, 0.0, d, 1e-11);
  } else {
    out.partition_alpha = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

BoxDimEstimate box_dimension(const Repeller& z, int max_depth) {
  require(max_depth >= 3, ErrorKind::Input, "need at least three scales");
  const auto& model = z.model();
  require(model.has_geometry(), ErrorKind::Precondition, "box counting needs explicit cell geometry");
  require(!z.sft().empty(), ErrorKind::EmptySubshift, "box dimension of an empty set");
  const int d = model.dimension();
  BoxDimEstimate out;
  const auto grid = digit_grid(model);
  if (grid) {
    out.digit_grid = true;
    const int bmax = *std::max_element(grid->base.begin(), grid->base.end());
    for (int k = 1; k <= max_depth; ++k) {
      std::vector<int> len(static_cast<std::size_t>(d));
      int total = 0;
      double log_inv = 0.0;
      for (int i = 0; i < d; ++i) {
        const int b = grid->base[static_cast<std::size_t>(i)];
        len[static_cast<std::size_t>(i)] =
            std::max(1, static_cast<int>(std::lround(k * std::log(bmax) / std::log(b))));
        total = std::max(total, len[static_cast<std::size_t>(i)]);
        log_inv += len[static_cast<std::size_t>(i)] * std::log(b);
      }
      // Digit prefixes beyond each axis' length are dropped; (prefixes, state)
      // determines every continuation.
      // Digit prefixes beyond each axis' length are dropped; (prefixes, state)
      // determines every continuation.
      auto push_digits = [&](PrefixKey& key, int t, std::size_t state) {
        const auto& dig = grid->digits[static_cast<std::size_t>(z.base_symbol(state))];
        for (int i = 0; i < d; ++i) {
          if (t <= len[static_cast<std::size_t>(i)])
            key.p[i] = key.p[i] * static_cast<std::uint64_t>(grid->base[static_cast<std::size_t>(i)]) +
                       static_cast<std::uint64_t>(dig[static_cast<std::size_t>(i)]);
        }
        key.state = static_cast<std::uint32_t>(state);
      };
      std::vector<PrefixKey> frontier;
      for (std::size_t a = 0; a < z.sft().size(); ++a) {
        PrefixKey key;
        push_digits(key, 1, a);
        frontier.push_back(key);
      }
      bool over = false;
      for (int t = 2; t <= total && !over; ++t) {
        std::vector<PrefixKey> next;
        for (const auto& key : frontier) {
          for (auto b : z.sft().successors(key.state)) {
            PrefixKey k2 = key;
            push_digits(k2, t, static_cast<std::size_t>(b));
            next.push_back(k2);
          }
        }
        sort_unique(next);
        over = next.size() > kBoxBudget;
        frontier.swap(next);
      }
      if (over) break;
      for (auto& key : frontier) key.state = 0;
      sort_unique(frontier);
      const double log_boxes = std::log(static_cast<double>(frontier.size()));
      out.log_inv_delta.push_back(log_inv / d);
      out.log_count.push_back(log_boxes);
      // Skip the next scale when its extrapolated count is over budget.
      const auto m = out.log_count.size();
      if (m >= 2 && 2.0 * log_boxes - out.log_count[m - 2] > std::log(static_cast<double>(kBoxBudget))) break;
    }
  } else {
    // Representatives of cylinders finer than the grid, counted per grid cell.
    const double c = model.contraction();
    for (int j = 1; j <= max_depth; ++j) {
      const double delta = std::ldexp(1.0, -j);
      const int n = std::max(1, static_cast<int>(std::ceil(std::log(delta / 4.0) / std::log(c))));
      const auto count = enumerate_words(z.sft(), n);
      if (!count.exact || *count.exact > kBoxBudget) break;
      std::set<std::vector<std::int64_t>> cells;
      for_each_word(z.sft(), n, [&](const Word& w) {
        const Vector x = z.representative(w);
        std::vector<std::int64_t> key(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) key[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(x[i] / delta));
        cells.insert(std::move(key));
        return true;
      });
      out.log_inv_delta.push_back(j * std::log(2.0));
      out.log_count.push_back(std::log(static_cast<double>(cells.size())));
    }
  }
  require(out.log_count.size() >= 3, ErrorKind::Budget, "fewer than three usable scales; lower the depth budget");
  const auto [slope, residual] = fit_slope(out.log_inv_delta, out.log_count);
  out.dimension = std::clamp(slope, 0.0, static_cast<double>(d));
  out.residual = residual;
  return out;
}

double mcmullen_dim(int m_rows, int n_cols, const std::vector<std::pair<int, int>>& digits) {
  require(n_cols >= 2 && n_cols < m_rows, ErrorKind::Input, "need 2 <= columns < rows");
  require(!digits.empty(), ErrorKind::Input, "carpet needs at least one digit");
  std::set<std::pair<int, int>> unique(digits.begin(), digits.end());
  std::vector<int> t(static_cast<std::size_t>(n_cols), 0);
  for (auto [c, r] : unique) {
    require(c >= 0 && c < n_cols && r >= 0 && r < m_rows, ErrorKind::Input, "digit outside the grid");
    ++t[static_cast<std::size_t>(c)];
  }
  const double theta = std::log(n_cols) / std::log(m_rows);
  double sum = 0.0;
  for (int tj : t)
    if (tj > 0) sum += std::pow(tj, theta);
  return std::log(sum) / std::log(n_cols);
}

ModelSpec make_carpet(int m_rows, int n_cols, const std::vector<std::pair<int, int>>& digits) {
  require(n_cols >= 2 && m_rows >= 2, ErrorKind::Input, "carpet grid too small");
  require(!digits.empty(), ErrorKind::Input, "carpet needs at least one digit");
  std::set<std::pair<int, int>> unique(digits.begin(), digits.end());
  std::vector<AffineBranch> branches;
  for (auto [c, r] : unique) {
    require(c >= 0 && c < n_cols && r >= 0 && r < m_rows, ErrorKind::Input, "digit outside the grid");
    AffineBranch b;
    b.linear = Matrix::Zero(2, 2);
    b.linear(0, 0) = 1.0 / n_cols;
    b.linear(1, 1) = 1.0 / m_rows;
    b.offset = Vector(2);
    b.offset << static_cast<double>(c) / n_cols, static_cast<double>(r) / m_rows;
    branches.push_back(b);
  }
  auto model = ModelSpec::sft_affine({}, std::move(branches));
  validate_model(model);
  return model;
}

}  // namespace bowenlab
