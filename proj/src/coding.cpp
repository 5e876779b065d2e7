#include "bowenlab/coding.hpp"

#include <algorithm>
#include <cmath>

#include "bowenlab/error.hpp"

namespace bowenlab {

Repeller::Repeller(ModelSpec model) : Repeller(model, prune(model.base_sft())) {}

Repeller::Repeller(ModelSpec model, Sft sft) : model_(std::move(model)), sft_(std::move(sft)) {
  require(sft_.root_alphabet() == model_.alphabet(), ErrorKind::Input,
          "subshift labels are not words over the model's alphabet");
  const double c = model_.contraction();
  if (c > 0.0 && c < 1.0) {
    tail_steps_ = std::clamp(static_cast<int>(std::ceil(std::log(1e-17) / std::log(c))), 8, 4000);
  }
}

Vector Repeller::tail_point(std::size_t state) const {
  require(!sft_.empty(), ErrorKind::EmptySubshift, "empty subshift has no points");
  std::vector<std::size_t> path;
  path.reserve(static_cast<std::size_t>(tail_steps_) + 1);
  std::size_t s = state;
  path.push_back(s);
  for (int i = 0; i < tail_steps_; ++i) {
    const auto succ = sft_.successors(s);
    require(!succ.empty(), ErrorKind::Domain, "state has no successor; prune the subshift first");
    s = static_cast<std::size_t>(succ.front());
    path.push_back(s);
  }
  Vector z = Vector::Constant(dimension(), 0.5);
  for (auto it = path.rbegin(); it != path.rend(); ++it) z = model_.inverse_branch(base_symbol(*it), z);
  return z;
}

Vector Repeller::representative(std::span<const std::int32_t> path) const {
  require(!path.empty(), ErrorKind::Input, "cylinder needs at least one symbol");
  Vector z = tail_point(static_cast<std::size_t>(path.back()));
  for (auto i = static_cast<std::ptrdiff_t>(path.size()) - 2; i >= 0; --i) {
    z = model_.inverse_branch(base_symbol(static_cast<std::size_t>(path[static_cast<std::size_t>(i)])), z);
  }
  return z;
}

std::vector<Vector> Repeller::representative_orbit(std::span<const std::int32_t> path) const {
  require(!path.empty(), ErrorKind::Input, "cylinder needs at least one symbol");
  std::vector<Vector> pts(path.size());
  pts.back() = tail_point(static_cast<std::size_t>(path.back()));
  for (auto i = static_cast<std::ptrdiff_t>(path.size()) - 2; i >= 0; --i) {
    const auto ui = static_cast<std::size_t>(i);
    pts[ui] = model_.inverse_branch(base_symbol(static_cast<std::size_t>(path[ui])), pts[ui + 1]);
  }
  return pts;
}

const std::vector<Box>& Repeller::hulls() const {
  std::call_once(hull_cache_->once, [this] {
    const std::size_t n = sft_.size();
    auto h = std::make_unique<std::vector<Box>>(n);
    for (std::size_t a = 0; a < n; ++a) (*h)[a] = model_.cell(base_symbol(a));
    // Outer boxes shrink monotonically to the hull of the coded set.
    std::vector<Box> next(n);
    for (int it = 0; it < tail_steps_ + 8; ++it) {
      double change = 0.0;
      for (std::size_t a = 0; a < n; ++a) {
        const auto succ = sft_.successors(a);
        Box u = (*h)[static_cast<std::size_t>(succ.front())];
        for (auto b : succ.subspan(1)) u = Box::hull(u, (*h)[static_cast<std::size_t>(b)]);
        Box img = model_.branch_image(base_symbol(a), u);
        img.lo = img.lo.cwiseMax((*h)[a].lo);
        img.hi = img.hi.cwiseMin((*h)[a].hi);
        change = std::max({change, ((*h)[a].lo - img.lo).cwiseAbs().maxCoeff(),
                           ((*h)[a].hi - img.hi).cwiseAbs().maxCoeff()});
        next[a] = img;
      }
      h->swap(next);
      if (change <= 1e-16) break;
    }
    hull_cache_->boxes = std::move(*h);
  });
  return hull_cache_->boxes;
}

Box Repeller::path_hull(std::span<const std::int32_t> path) const {
  require(!path.empty(), ErrorKind::Input, "cylinder needs at least one symbol");
  Box b = hulls()[static_cast<std::size_t>(path.back())];
  for (auto i = static_cast<std::ptrdiff_t>(path.size()) - 2; i >= 0; --i) {
    b = model_.branch_image(base_symbol(static_cast<std::size_t>(path[static_cast<std::size_t>(i)])), b);
  }
  return b;
}

Vector Repeller::state_log_singular_values(std::size_t state) const {
  const Vector sv = closed_form_singular_values(model_.symbol_jacobian(base_symbol(state)));
  return log_elementwise(sv);
}

std::vector<Vector> symbol_log_singular_values(const ModelSpec& model) {
  std::vector<Vector> out;
  for (int a = 0; a < model.alphabet(); ++a) {
    out.push_back(log_elementwise(closed_form_singular_values(model.symbol_jacobian(a))));
  }
  return out;
}

}  // namespace bowenlab
