#pragma once

#include <utility>
#include <vector>

#include "bowenlab/pressure.hpp"

namespace bowenlab {

struct BowenRoot {
  double root = 0.0;
  Family family = Family::SubAdditivePhi;
  double s_lo = 0.0;  // P(s_lo) > 0
  double s_hi = 0.0;  // P(s_hi) <= 0
  double tolerance = 0.0;
  int iterations = 0;
  double pressure_at_root = 0.0;
  int depth = 0;
  bool degenerate = false;  // zero entropy: root reported as 0
};

// Bisection on [0, d] for P(s) = 0. depth <= 0 picks the pressure's default.
BowenRoot bowen_root(const SpectralPressure& p, Family family, double tol = 1e-10, int depth = 0);
BowenRoot bowen_root(const Repeller& rep, Family family, double tol = 1e-10, int depth = 0);

struct CaratheodoryEstimate {
  double alpha = 0.0;
  double r = 0.0;
  int n = 0;
  double cell_gap = 0.0;
  bool symbolic_metric = false;  // cells touch: distances measured as 2^-k
  int symbolic_level = 0;        // k with 2^-(k+1) < r <= 2^-k
  bool degenerate = false;
  bool block_operator = false;   // N-blocks enumerated explicitly
  // (1/N) log Z_N(alpha) over the N-cylinders of Z, and its zero.
  std::vector<double> alpha_grid;
  std::vector<double> log_partition;
  double partition_alpha = 0.0;
};

// Smallest max-norm distance between the hulls of distinct first symbols of Z
// (wrapped on the torus). Zero when cells touch or there is no geometry.
double cell_gap(const Repeller& z);

// Jump-up value of the Bowen-ball outer measure on Z at Bowen length N: the
// zero of (1/N) log rho(K_N(alpha)), where K_N joins weighted N-cylinders.
CaratheodoryEstimate caratheodory_dim(const Repeller& z, double r, int n);

struct BoxDimEstimate {
  double dimension = 0.0;
  std::vector<double> log_inv_delta;
  std::vector<double> log_count;
  double residual = 0.0;
  bool digit_grid = false;
};

BoxDimEstimate box_dimension(const Repeller& z, int max_depth);

// Bedford-McMullen dimension; digits are (column, row) pairs on an
// n_cols x m_rows grid with n_cols < m_rows.
double mcmullen_dim(int m_rows, int n_cols, const std::vector<std::pair<int, int>>& digits);
// Carpet with inverse branches diag(1/n_cols, 1/m_rows) x + (c/n_cols, r/m_rows).
ModelSpec make_carpet(int m_rows, int n_cols, const std::vector<std::pair<int, int>>& digits);

}  // namespace bowenlab
