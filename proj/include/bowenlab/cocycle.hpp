#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bowenlab/coding.hpp"
#include "bowenlab/linalg.hpp"
#include "bowenlab/map_models.hpp"
#include "bowenlab/symbolic.hpp"

namespace bowenlab {

enum class Family {
  SubAdditivePhi,    // Phi = {-phi^s}, smallest singular values first
  SuperAdditivePsi,  // Psi = {-psi^s}, largest singular values first
};

const char* family_name(Family f);

struct SingularValueVector {
  Vector values;  // descending
  int steps = 1;
};

SingularValueVector singular_values(const Matrix& j, int steps = 1);

// phi^s / psi^s from log singular values sorted in descending order.
double phi_from_logs(const Vector& log_sv, double s);
double psi_from_logs(const Vector& log_sv, double s);
double potential_from_logs(Family f, const Vector& log_sv, double s);

double phi_s(const SingularValueVector& sv, double s);
double psi_s(const SingularValueVector& sv, double s);

// D_x f^n = D_{f^{n-1}x} f ... D_x f.
Matrix cocycle_product(const ModelSpec& model, const Vector& x, int n);
double phi_s(const ModelSpec& model, const Vector& x, int n, double s);
double psi_s(const ModelSpec& model, const Vector& x, int n, double s);

// Log singular values of D f^n on a cylinder (n = path length), evaluated
// symbolically for locally constant models and at the canonical
// representative's orbit otherwise.
Vector cylinder_log_singular_values(const Repeller& rep, std::span<const std::int32_t> path);
double phi_s(const Repeller& rep, std::span<const std::int32_t> path, double s);
double psi_s(const Repeller& rep, std::span<const std::int32_t> path, double s);

struct LyapunovSpectrum {
  std::vector<double> exponents;   // descending, nats per iterate
  std::vector<double> std_error;   // zero when exact
  std::string measure;
  int depth = 0;
  bool monte_carlo = false;
};

inline constexpr int kMonteCarloSamples = 100000;

// (1/n) E_mu[log alpha_i(x, f^n)] for a Markov measure on rep.sft().
LyapunovSpectrum lyapunov_spectrum(const Repeller& rep, const MarkovMeasure& mu, int depth,
                                   std::uint64_t seed = 0, int samples = kMonteCarloSamples);
// Lebesgue (the absolutely continuous invariant measure for the shipped models).
LyapunovSpectrum lyapunov_lebesgue(const ModelSpec& model, int depth, std::uint64_t seed = 0,
                                   int samples = kMonteCarloSamples);
// Second estimator for one-dimensional maps: invariant density from Ulam's
// method on `bins` intervals, then the integral of log |f'|.
double lyapunov_ulam(const ModelSpec& model, int bins);

struct SubadditivityReport {
  double worst_phi_margin = 0.0;  // phi(m+n) - phi(n) - phi(m) o f^n, minimum
  double worst_psi_margin = 0.0;  // psi(n) + psi(m) o f^n - psi(m+n), minimum
  int trials = 0;
  bool passed = true;
  std::string witness;
};
SubadditivityReport check_subadditivity(const ModelSpec& model, double s, int trials, std::uint64_t seed = 0);

}  // namespace bowenlab
