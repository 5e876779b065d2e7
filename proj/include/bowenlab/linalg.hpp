#pragma once

#include <Eigen/Dense>

namespace bowenlab {

inline constexpr int kMaxDim = 3;

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

// Axis-aligned box [lo, hi] in R^d.
struct Box {
  Vector lo;
  Vector hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vector& x, double tol = 0.0) const;
  double max_width() const;
  static Box unit(int d);
  static Box hull(const Box& a, const Box& b);
};

// Largest eigenvalue of a symmetric matrix of order <= 3, closed form.
double largest_symmetric_eigenvalue(const Matrix& s);

// Singular values in descending order for d <= 3, closed form.
// The largest value comes from the Gram matrix, the product of the two
// largest from the second compound, and the full product from |det|.
Vector closed_form_singular_values(const Matrix& j);

// Elementwise std::log (Eigen's vectorized log may differ in the last bit).
Vector log_elementwise(const Vector& v);

// Image of a box under x -> a x + b (tight for diagonal a).
Box affine_image(const Matrix& a, const Vector& b, const Box& box);

}  // namespace bowenlab
