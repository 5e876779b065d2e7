#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "bowenlab/linalg.hpp"
#include "bowenlab/symbolic.hpp"

namespace bowenlab {

enum class ModelKind { LinearToral, SftAffine, PerturbedDoubling };

struct LinearToralPayload {
  Matrix matrix;  // integer entries
};

struct AffineBranch {
  Matrix linear;  // contraction, all singular values < 1
  Vector offset;
};

struct SftAffinePayload {
  std::vector<std::vector<int>> transitions;
  std::vector<AffineBranch> branches;  // inverse branch g_i(x) = linear * x + offset
};

struct PerturbedDoublingPayload {
  double epsilon = 0.0;
};

using ModelPayload = std::variant<LinearToralPayload, SftAffinePayload, PerturbedDoublingPayload>;

// A concrete expanding Markov map together with its symbolic coding: the base
// SFT, one inverse branch per base symbol and, where available, cell geometry.
class ModelSpec {
 public:
  static ModelSpec linear_toral(const Matrix& a);
  static ModelSpec sft_affine(std::vector<std::vector<int>> transitions, std::vector<AffineBranch> branches);
  static ModelSpec perturbed_doubling(double epsilon);

  ModelKind kind() const { return kind_; }
  int dimension() const { return dim_; }
  const ModelPayload& payload() const { return *payload_; }
  std::string name() const;

  const Sft& base_sft() const { return *base_; }
  int alphabet() const { return static_cast<int>(base_->size()); }
  // Circle/torus identification of the domain boundary.
  bool on_torus() const { return kind_ != ModelKind::SftAffine; }
  // Jacobian constant on each base cylinder.
  bool locally_constant() const { return kind_ != ModelKind::PerturbedDoubling; }
  // Sorted singular values multiply along every orbit (d = 1, or all symbol
  // Jacobians diagonal with one common ordering of |entries|).
  bool additive() const { return additive_; }
  // Box cells and inverse branches are available.
  bool has_geometry() const { return geometry_; }
  // Full-branch model whose branches tile the domain; Lebesgue is then a
  // Bernoulli measure on the base shift with weights |det g_i'|.
  bool full_branch() const;
  std::vector<double> lebesgue_weights() const;

  // Derivative of f on the base cylinder of symbol a (locally constant only).
  const Matrix& symbol_jacobian(int a) const;
  // Inverse branch g_a; x in [0,1]^d.
  Vector inverse_branch(int a, const Vector& x) const;
  // Image of a box under g_a (tight for the shipped models).
  Box branch_image(int a, const Box& box) const;
  Box cell(int a) const;
  // Upper bound on the Lipschitz constant of every inverse branch (< 1).
  double contraction() const { return contraction_; }
  // Lower bound on the derivative over the domain (expansion constant).
  double expansion() const { return expansion_; }

 private:
  ModelKind kind_{};
  int dim_ = 0;
  std::shared_ptr<const ModelPayload> payload_;
  std::shared_ptr<const Sft> base_;
  std::vector<Matrix> symbol_jacobians_;
  std::vector<Vector> digits_;  // LinearToral diagonal: translation per symbol
  bool additive_ = false;
  bool geometry_ = false;
  double contraction_ = 1.0;
  double expansion_ = 1.0;

  void finish();
};

// f(x), coordinates reduced mod 1 into [0,1).
Vector evaluate(const ModelSpec& model, const Vector& x);
// D_x f; SftAffine uses the lowest-index cell containing x.
Matrix jacobian(const ModelSpec& model, const Vector& x);
// Lowest-index base cell containing x, or -1.
int cell_of(const ModelSpec& model, const Vector& x);

struct ExpansionReport {
  double min_singular_value = 0.0;
  double expansion_constant = 0.0;
  Vector witness;
  int samples = 0;
};
// Infimum over samples of the smallest singular value of D_x f; throws a
// model-rejected error naming the witness when it is not above 1.
ExpansionReport validate_expanding(const ModelSpec& model, int sample_count);
// Structural checks plus expansion margin; the loader calls this.
void validate_model(const ModelSpec& model);

ModelSpec model_from_json(const std::string& text);
ModelSpec load_model(const std::string& path);
std::string model_to_json(const ModelSpec& model);

}  // namespace bowenlab
