#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "bowenlab/map_models.hpp"
#include "bowenlab/symbolic.hpp"

namespace bowenlab {

// A model together with an SFT whose labels are words over the model's base
// alphabet: the full repeller, or a sub-repeller such as an avoid set.
class Repeller {
 public:
  explicit Repeller(ModelSpec model);
  Repeller(ModelSpec model, Sft sft);

  const ModelSpec& model() const { return model_; }
  const Sft& sft() const { return sft_; }
  int dimension() const { return model_.dimension(); }
  int base_symbol(std::size_t state) const { return sft_.first_symbol(state); }

  // Number of inverse-branch steps after which the tail is below 1e-17.
  int tail_steps() const { return tail_steps_; }
  // Point coded by the path that keeps taking the smallest successor.
  Vector tail_point(std::size_t state) const;
  // Canonical representative of a cylinder given as a path of states.
  Vector representative(std::span<const std::int32_t> path) const;
  // f^i(representative) for i < path length, computed symbolically.
  std::vector<Vector> representative_orbit(std::span<const std::int32_t> path) const;

  // Bounding box of the points coded by infinite paths from each state.
  const std::vector<Box>& hulls() const;
  Box path_hull(std::span<const std::int32_t> path) const;

  // Sorted (descending) log singular values of the symbol Jacobian of a state.
  Vector state_log_singular_values(std::size_t state) const;

 private:
  ModelSpec model_;
  Sft sft_;
  int tail_steps_ = 64;
  struct HullCache {
    std::once_flag once;
    std::vector<Box> boxes;
  };
  std::shared_ptr<HullCache> hull_cache_ = std::make_shared<HullCache>();
};

// Sorted log singular values of the base symbol Jacobians.
std::vector<Vector> symbol_log_singular_values(const ModelSpec& model);

}  // namespace bowenlab
