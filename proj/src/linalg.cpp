#include "bowenlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bowenlab/error.hpp"

namespace bowenlab {

bool Box::contains(const Vector& x, double tol) const {
  for (int i = 0; i < dim(); ++i) {
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  }
  return true;
}

double Box::max_width() const { return (hi - lo).maxCoeff(); }

Box Box::unit(int d) { return Box{Vector::Zero(d), Vector::Ones(d)}; }

Box Box::hull(const Box& a, const Box& b) { return Box{a.lo.cwiseMin(b.lo), a.hi.cwiseMax(b.hi)}; }

double largest_symmetric_eigenvalue(const Matrix& s) {
  const auto n = s.rows();
  if (n == 1) return s(0, 0);
  if (n == 2) {
    const double mean = 0.5 * (s(0, 0) + s(1, 1));
    const double half = 0.5 * (s(0, 0) - s(1, 1));
    return mean + std::hypot(half, s(0, 1));
  }
  const double off = s(0, 1) * s(0, 1) + s(0, 2) * s(0, 2) + s(1, 2) * s(1, 2);
  const double q = s.trace() / 3.0;
  if (off == 0.0) return s.diagonal().maxCoeff();
  const double p2 = (s(0, 0) - q) * (s(0, 0) - q) + (s(1, 1) - q) * (s(1, 1) - q) +
                    (s(2, 2) - q) * (s(2, 2) - q) + 2.0 * off;
  const double p = std::sqrt(p2 / 6.0);
  Matrix b = (s - q * Matrix::Identity(3, 3)) / p;
  const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
  const double angle = std::acos(r) / 3.0;
  return q + 2.0 * p * std::cos(angle);
}

namespace {

Matrix second_compound(const Matrix& j) {
  static constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  Matrix c(3, 3);
  for (int r = 0; r < 3; ++r) {
    for (int k = 0; k < 3; ++k) {
      const int i0 = pairs[r][0], i1 = pairs[r][1];
      const int j0 = pairs[k][0], j1 = pairs[k][1];
      c(r, k) = j(i0, j0) * j(i1, j1) - j(i0, j1) * j(i1, j0);
    }
  }
  return c;
}

double largest_singular_value(const Matrix& j) {
  const Matrix gram = j.transpose() * j;
  return std::sqrt(std::max(0.0, largest_symmetric_eigenvalue(gram)));
}

}  // namespace

Vector closed_form_singular_values(const Matrix& j) {
  const auto d = j.rows();
  require(d == j.cols() && d >= 1 && d <= kMaxDim, ErrorKind::Input,
          "singular values need a square matrix of order 1..3");
  const double scale = j.cwiseAbs().maxCoeff();
  require(scale > 0.0 && std::isfinite(scale), ErrorKind::Domain, "singular or non-finite matrix");
  if (j.isDiagonal(0.0)) {
    Vector out = j.diagonal().cwiseAbs();
    require(out.minCoeff() > 0.0, ErrorKind::Domain, "singular matrix has no positive singular values");
    std::sort(out.data(), out.data() + d, std::greater<>());
    return out;
  }
  const Matrix a = j / scale;
  const double det = std::abs(a.determinant());
  require(det > 0.0, ErrorKind::Domain, "singular matrix has no positive singular values");
  Vector out(d);
  if (d == 1) {
    out[0] = std::abs(a(0, 0));
  } else if (d == 2) {
    out[0] = largest_singular_value(a);
    out[1] = det / out[0];
  } else {
    out[0] = largest_singular_value(a);
    const double top_two = largest_singular_value(second_compound(a));
    out[1] = top_two / out[0];
    out[2] = det / top_two;
  }
  std::sort(out.data(), out.data() + d, std::greater<>());
  return out * scale;
}

Vector log_elementwise(const Vector& v) {
  return v.unaryExpr([](double x) { return std::log(x); });
}

Box affine_image(const Matrix& a, const Vector& b, const Box& box) {
  const int d = box.dim();
  Box out{b, b};
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      const double u = a(i, k) * box.lo[k];
      const double v = a(i, k) * box.hi[k];
      out.lo[i] += std::min(u, v);
      out.hi[i] += std::max(u, v);
    }
  }
  return out;
}

}  // namespace bowenlab
