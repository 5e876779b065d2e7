#include "bowenlab/map_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bowenlab/error.hpp"

namespace bowenlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCellTol = 1e-12;

double smallest_singular_value(const Matrix& m) {
  const Vector sv = closed_form_singular_values(m);
  return sv[sv.size() - 1];
}

double largest_singular_value(const Matrix& m) { return closed_form_singular_values(m)[0]; }

bool is_diagonal(const Matrix& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (i != j && m(i, j) != 0.0) return false;
    }
  }
  return true;
}

// Singular values of products of these diagonal matrices are the products of
// sorted |entries| iff one ordering sorts every matrix.
bool common_diagonal_order(const std::vector<Matrix>& ms) {
  for (const auto& m : ms) {
    if (!is_diagonal(m)) return false;
  }
  const auto d = ms.front().rows();
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      bool greater = false, less = false;
      for (const auto& m : ms) {
        const double a = std::abs(m(i, i)), b = std::abs(m(j, j));
        greater = greater || a > b;
        less = less || a < b;
      }
      if (greater && less) return false;
    }
  }
  return true;
}

double pd_map(double eps, double x) { return 2.0 * x + eps * std::sin(kTwoPi * x); }
double pd_derivative(double eps, double x) { return 2.0 + kTwoPi * eps * std::cos(kTwoPi * x); }

// Solves 2x + eps sin(2 pi x) = y + a on [a/2, (a+1)/2]; the left side is increasing.
double pd_inverse(double eps, int a, double y) {
  const double target = y + a;
  double lo = 0.5 * a, hi = 0.5 * (a + 1);
  double x = 0.5 * target;
  for (int it = 0; it < 100; ++it) {
    const double g = pd_map(eps, x) - target;
    if (g == 0.0) return x;
    if (g > 0.0) hi = x; else lo = x;
    double next = x - g / pd_derivative(eps, x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-17) return next;
    x = next;
  }
  return x;
}

std::string format_matrix(const Matrix& m) {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < m.rows(); ++i) {
    if (i) os << ',';
    os << '[';
    for (int j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << m(i, j);
    }
    os << ']';
  }
  os << ']';
  return os.str();
}

}  // namespace

ModelSpec ModelSpec::linear_toral(const Matrix& a) {
  const auto d = a.rows();
  require(d >= 1 && d <= kMaxDim && a.cols() == d, ErrorKind::Input, "linear toral matrix must be square of order 1..3");
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      require(a(i, j) == std::round(a(i, j)), ErrorKind::Input, "linear toral matrix must have integer entries");
    }
  }
  const long det = std::lround(std::abs(a.determinant()));
  require(det >= 2, ErrorKind::ModelRejected, "linear toral matrix needs |det| >= 2");
  require(det <= 65535, ErrorKind::Input, "linear toral determinant too large for the coding");
  ModelSpec m;
  m.kind_ = ModelKind::LinearToral;
  m.dim_ = static_cast<int>(d);
  m.payload_ = std::make_shared<const ModelPayload>(LinearToralPayload{a});
  m.base_ = std::make_shared<const Sft>(Sft::full_shift(static_cast<int>(det)));
  m.symbol_jacobians_.assign(static_cast<std::size_t>(det), a);
  if (is_diagonal(a) && a.diagonal().minCoeff() > 0.0) {
    m.geometry_ = true;
    m.digits_.reserve(static_cast<std::size_t>(det));
    for (long s = 0; s < det; ++s) {
      Vector c(d);
      long rest = s;
      for (auto i = d - 1; i >= 0; --i) {
        const auto base = std::lround(a(i, i));
        c[i] = static_cast<double>(rest % base);
        rest /= base;
      }
      m.digits_.push_back(c);
    }
  }
  m.finish();
  return m;
}

ModelSpec ModelSpec::sft_affine(std::vector<std::vector<int>> transitions, std::vector<AffineBranch> branches) {
  const std::size_t k = branches.size();
  require(k >= 1, ErrorKind::Input, "affine model needs at least one branch");
  if (transitions.empty()) transitions.assign(k, std::vector<int>(k, 1));
  require(transitions.size() == k, ErrorKind::Input, "transition matrix size must equal the branch count");
  const auto d = branches.front().linear.rows();
  require(d >= 1 && d <= kMaxDim, ErrorKind::Input, "affine branches must have dimension 1..3");
  ModelSpec m;
  m.kind_ = ModelKind::SftAffine;
  m.dim_ = static_cast<int>(d);
  for (const auto& b : branches) {
    require(b.linear.rows() == d && b.linear.cols() == d && b.offset.size() == d, ErrorKind::Input,
            "branch dimensions disagree");
    require(std::abs(b.linear.determinant()) > 0.0, ErrorKind::ModelRejected, "branch linear part is singular");
    m.symbol_jacobians_.push_back(b.linear.inverse());
  }
  m.base_ = std::make_shared<const Sft>(Sft::from_matrix(transitions));
  m.payload_ = std::make_shared<const ModelPayload>(SftAffinePayload{std::move(transitions), std::move(branches)});
  m.geometry_ = true;
  m.finish();
  return m;
}

ModelSpec ModelSpec::perturbed_doubling(double epsilon) {
  require(std::isfinite(epsilon), ErrorKind::Input, "epsilon must be finite");
  ModelSpec m;
  m.kind_ = ModelKind::PerturbedDoubling;
  m.dim_ = 1;
  m.payload_ = std::make_shared<const ModelPayload>(PerturbedDoublingPayload{epsilon});
  m.base_ = std::make_shared<const Sft>(Sft::full_shift(2));
  m.geometry_ = true;
  m.additive_ = true;
  m.expansion_ = 2.0 - kTwoPi * std::abs(epsilon);
  m.contraction_ = m.expansion_ > 0.0 ? 1.0 / m.expansion_ : 1.0;
  return m;
}

void ModelSpec::finish() {
  additive_ = dim_ == 1 || common_diagonal_order(symbol_jacobians_);
  expansion_ = std::numeric_limits<double>::infinity();
  for (const auto& j : symbol_jacobians_) expansion_ = std::min(expansion_, smallest_singular_value(j));
  contraction_ = expansion_ > 0.0 ? 1.0 / expansion_ : 1.0;
}

std::string ModelSpec::name() const {
  switch (kind_) {
    case ModelKind::LinearToral:
      return "linear_toral";
    case ModelKind::SftAffine:
      return "sft_affine";
    case ModelKind::PerturbedDoubling:
      return "perturbed_doubling";
  }
  return "unknown";
}

bool ModelSpec::full_branch() const {
  if (kind_ != ModelKind::SftAffine) return true;
  const auto& p = std::get<SftAffinePayload>(*payload_);
  for (const auto& row : p.transitions) {
    for (int v : row) {
      if (v != 1) return false;
    }
  }
  double volume = 0.0;
  for (const auto& b : p.branches) volume += std::abs(b.linear.determinant());
  return std::abs(volume - 1.0) <= 1e-9;
}

std::vector<double> ModelSpec::lebesgue_weights() const {
  require(kind_ != ModelKind::PerturbedDoubling, ErrorKind::Input,
          "Lebesgue is not a Bernoulli measure for the perturbed doubling map");
  require(full_branch(), ErrorKind::Input, "Lebesgue is only available for full-branch models");
  const auto k = static_cast<std::size_t>(alphabet());
  if (kind_ == ModelKind::LinearToral) return std::vector<double>(k, 1.0 / static_cast<double>(k));
  std::vector<double> w;
  for (const auto& b : std::get<SftAffinePayload>(*payload_).branches) w.push_back(std::abs(b.linear.determinant()));
  return w;
}

const Matrix& ModelSpec::symbol_jacobian(int a) const {
  require(locally_constant(), ErrorKind::Domain, "model Jacobian is not constant on cylinders");
  require(a >= 0 && a < alphabet(), ErrorKind::Input, "symbol out of range");
  return symbol_jacobians_[static_cast<std::size_t>(a)];
}

Vector ModelSpec::inverse_branch(int a, const Vector& x) const {
  require(geometry_, ErrorKind::Domain, "model has no explicit inverse branches");
  require(a >= 0 && a < alphabet(), ErrorKind::Input, "symbol out of range");
  switch (kind_) {
    case ModelKind::LinearToral: {
      const auto& A = std::get<LinearToralPayload>(*payload_).matrix;
      return (x + digits_[static_cast<std::size_t>(a)]).cwiseQuotient(A.diagonal());
    }
    case ModelKind::SftAffine: {
      const auto& b = std::get<SftAffinePayload>(*payload_).branches[static_cast<std::size_t>(a)];
      return b.linear * x + b.offset;
    }
    case ModelKind::PerturbedDoubling: {
      Vector out(1);
      out[0] = pd_inverse(std::get<PerturbedDoublingPayload>(*payload_).epsilon, a, x[0]);
      return out;
    }
  }
  return x;
}

Box ModelSpec::branch_image(int a, const Box& box) const {
  require(geometry_, ErrorKind::Domain, "model has no explicit inverse branches");
  switch (kind_) {
    case ModelKind::LinearToral:
    case ModelKind::PerturbedDoubling:
      // Both branch families are increasing in every coordinate.
      return Box{inverse_branch(a, box.lo), inverse_branch(a, box.hi)};
    case ModelKind::SftAffine: {
      const auto& b = std::get<SftAffinePayload>(*payload_).branches[static_cast<std::size_t>(a)];
      return affine_image(b.linear, b.offset, box);
    }
  }
  return box;
}

Box ModelSpec::cell(int a) const { return branch_image(a, Box::unit(dim_)); }

int cell_of(const ModelSpec& model, const Vector& x) {
  require(x.size() == model.dimension(), ErrorKind::Input, "point dimension does not match the model");
  switch (model.kind()) {
    case ModelKind::PerturbedDoubling:
      return x[0] <= 0.5 ? 0 : 1;
    case ModelKind::LinearToral:
      if (!model.has_geometry()) return 0;
      [[fallthrough]];
    case ModelKind::SftAffine:
      for (int a = 0; a < model.alphabet(); ++a) {
        if (model.cell(a).contains(x, kCellTol)) return a;
      }
      return -1;
  }
  return -1;
}

Vector evaluate(const ModelSpec& model, const Vector& x) {
  require(x.size() == model.dimension(), ErrorKind::Input, "point dimension does not match the model");
  Vector y;
  switch (model.kind()) {
    case ModelKind::LinearToral:
      y = std::get<LinearToralPayload>(model.payload()).matrix * x;
      break;
    case ModelKind::SftAffine: {
      const int a = cell_of(model, x);
      require(a >= 0, ErrorKind::Domain, "point lies outside every cell");
      const auto& b = std::get<SftAffinePayload>(model.payload()).branches[static_cast<std::size_t>(a)];
      y = model.symbol_jacobian(a) * (x - b.offset);
      break;
    }
    case ModelKind::PerturbedDoubling:
      y = Vector::Constant(1, pd_map(std::get<PerturbedDoublingPayload>(model.payload()).epsilon, x[0]));
      break;
  }
  for (int i = 0; i < y.size(); ++i) {
    y[i] -= std::floor(y[i]);
    if (y[i] >= 1.0) y[i] = 0.0;
  }
  return y;
}

Matrix jacobian(const ModelSpec& model, const Vector& x) {
  require(x.size() == model.dimension(), ErrorKind::Input, "point dimension does not match the model");
  switch (model.kind()) {
    case ModelKind::LinearToral:
      return std::get<LinearToralPayload>(model.payload()).matrix;
    case ModelKind::SftAffine: {
      const int a = cell_of(model, x);
      require(a >= 0, ErrorKind::Domain, "point lies outside every cell");
      return model.symbol_jacobian(a);
    }
    case ModelKind::PerturbedDoubling:
      return Matrix::Constant(1, 1, pd_derivative(std::get<PerturbedDoublingPayload>(model.payload()).epsilon, x[0]));
  }
  return Matrix();
}

ExpansionReport validate_expanding(const ModelSpec& model, int sample_count) {
  require(sample_count >= 1, ErrorKind::Input, "sample count must be positive");
  ExpansionReport r;
  r.min_singular_value = std::numeric_limits<double>::infinity();
  auto consider = [&](const Vector& x, const Matrix& j) {
    const double v = smallest_singular_value(j);
    ++r.samples;
    if (v < r.min_singular_value) {
      r.min_singular_value = v;
      r.witness = x;
    }
  };
  if (model.locally_constant()) {
    for (int a = 0; a < model.alphabet(); ++a) {
      const Vector x = model.has_geometry() ? Vector(0.5 * (model.cell(a).lo + model.cell(a).hi))
                                            : Vector(Vector::Zero(model.dimension()));
      consider(x, model.symbol_jacobian(a));
    }
  } else {
    for (int i = 0; i < sample_count; ++i) {
      const Vector x = Vector::Constant(1, static_cast<double>(i) / sample_count);
      consider(x, jacobian(model, x));
    }
  }
  r.expansion_constant = r.min_singular_value;
  if (!(r.min_singular_value > 1.0)) {
    std::ostringstream os;
    os << "model is not expanding: smallest singular value " << r.min_singular_value << " at x = (";
    for (int i = 0; i < r.witness.size(); ++i) os << (i ? "," : "") << r.witness[i];
    os << ")";
    fail(ErrorKind::ModelRejected, os.str());
  }
  return r;
}

void validate_model(const ModelSpec& model) {
  const auto report = validate_expanding(model, 4096);
  require(report.min_singular_value > 1.0 + 1e-9, ErrorKind::ModelRejected, "expansion margin below 1e-9");
  if (model.kind() == ModelKind::PerturbedDoubling) {
    require(model.expansion() > 1.0 + 1e-6, ErrorKind::ModelRejected,
            "perturbation too large: 2 - 2 pi |epsilon| must exceed 1 + 1e-6");
  }
  if (model.kind() == ModelKind::SftAffine) {
    const auto& p = std::get<SftAffinePayload>(model.payload());
    const int d = model.dimension();
    const Box unit = Box::unit(d);
    for (int a = 0; a < model.alphabet(); ++a) {
      require(largest_singular_value(p.branches[static_cast<std::size_t>(a)].linear) < 1.0, ErrorKind::ModelRejected,
              "branch " + std::to_string(a) + " is not a contraction");
      const Box c = model.cell(a);
      require(unit.contains(c.lo, kCellTol) && unit.contains(c.hi, kCellTol), ErrorKind::ModelRejected,
              "cell " + std::to_string(a) + " leaves the unit cube");
      for (int b = 0; b < model.alphabet(); ++b) {
        if (!p.transitions[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) continue;
        // Markov property on corners: g_a maps the permitted cell b into cell a.
        const Box image = model.branch_image(a, model.cell(b));
        require(c.contains(image.lo, kCellTol) && c.contains(image.hi, kCellTol), ErrorKind::ModelRejected,
                "Markov property fails for transition " + std::to_string(a) + "->" + std::to_string(b));
      }
      for (int b = a + 1; b < model.alphabet(); ++b) {
        const Box o = model.cell(b);
        double overlap = 1.0;
        for (int i = 0; i < d; ++i) overlap *= std::max(0.0, std::min(c.hi[i], o.hi[i]) - std::max(c.lo[i], o.lo[i]));
        require(overlap <= kCellTol, ErrorKind::ModelRejected,
                "cells " + std::to_string(a) + " and " + std::to_string(b) + " overlap");
      }
    }
    require(!prune(model.base_sft()).empty(), ErrorKind::ModelRejected, "transition matrix defines an empty subshift");
  }
}

std::string model_to_json(const ModelSpec& model) {
  std::ostringstream os;
  os.precision(17);
  switch (model.kind()) {
    case ModelKind::LinearToral:
      os << "{\"kind\":\"linear_toral\",\"matrix\":" << format_matrix(std::get<LinearToralPayload>(model.payload()).matrix)
         << "}";
      break;
    case ModelKind::SftAffine: {
      const auto& p = std::get<SftAffinePayload>(model.payload());
      os << "{\"kind\":\"sft_affine\",\"alphabet\":" << p.branches.size() << ",\"transitions\":[";
      for (std::size_t i = 0; i < p.transitions.size(); ++i) {
        os << (i ? "," : "") << '[';
        for (std::size_t j = 0; j < p.transitions[i].size(); ++j) os << (j ? "," : "") << p.transitions[i][j];
        os << ']';
      }
      os << "],\"branches\":[";
      for (std::size_t i = 0; i < p.branches.size(); ++i) {
        os << (i ? "," : "") << "{\"linear\":" << format_matrix(p.branches[i].linear) << ",\"offset\":[";
        for (int j = 0; j < p.branches[i].offset.size(); ++j) os << (j ? "," : "") << p.branches[i].offset[j];
        os << "]}";
      }
      os << "]}";
      break;
    }
    case ModelKind::PerturbedDoubling:
      os << "{\"kind\":\"perturbed_doubling\",\"epsilon\":" << std::get<PerturbedDoublingPayload>(model.payload()).epsilon
         << "}";
      break;
  }
  return os.str();
}

}  // namespace bowenlab
