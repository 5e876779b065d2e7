#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bowenlab/dimension.hpp"

namespace bowenlab {

// Which depth-n cylinders around the target are forbidden.
enum class AvoidConvention {
  Closure,   // every cylinder whose closure contains y
  CoreOnly,  // only the first such cylinder in lexicographic order
};

enum class TheoremSelect { A, B, Both };

// Depth-n paths of lambda.sft() whose cylinder closure contains y.
std::vector<Word> cylinders_hitting(const Repeller& lambda, const Vector& y, int n,
                                    AvoidConvention convention = AvoidConvention::Closure);
// Sub-SFT of lambda.sft() without the cylinders hitting y.
Sft build_avoid_sft(const Repeller& lambda, const Vector& y, int n,
                    AvoidConvention convention = AvoidConvention::Closure);

struct AvoidRow {
  int depth = 0;
  std::size_t n_states = 0;
  double h_top = 0.0;
  std::vector<double> lyapunov;  // Parry measure of the dominant component
  std::vector<double> lyapunov_se;
  double s_star = 0.0;
  double alpha0 = 0.0;
  double eps_a = 0.0;  // NaN when Theorem A is not evaluated
  double eps_b = 0.0;  // NaN when Theorem B is not evaluated
  double bound_a = 0.0;
  double bound_b = 0.0;
  bool hypothesis_a = false;
  bool hypothesis_b = false;
  bool degenerate = false;
  double seconds = 0.0;

  double eps_n() const;
};

struct AvoidReference {
  double h_top = 0.0;
  std::vector<double> lebesgue;  // reference exponents for Theorem A
  std::vector<double> lebesgue_se;
  double alpha0 = 0.0;           // Phi-root of lambda
  double h_star = 0.0;           // entropy of the Phi-equilibrium measure
  std::vector<double> lyap_star;  // its exponents
  std::vector<double> lyap_star_se;
  bool theorem_a = false;
  bool theorem_b = false;
};

struct AvoidSeries {
  AvoidReference reference;
  std::vector<AvoidRow> rows;
  std::vector<std::string> violations;  // empty when every check passed
};

// Whether Theorem A's reference measure is available for this repeller.
bool theorem_a_applicable(const Repeller& lambda);

AvoidSeries avoid_series(const Repeller& lambda, const Vector& y, int lo, int hi, TheoremSelect theorem,
                         AvoidConvention convention = AvoidConvention::Closure, std::uint64_t seed = 0);
AvoidSeries theorem_a_series(const Repeller& lambda, const Vector& y, int lo, int hi,
                             AvoidConvention convention = AvoidConvention::Closure, std::uint64_t seed = 0);
AvoidSeries theorem_b_series(const Repeller& lambda, const Vector& y, int lo, int hi,
                             AvoidConvention convention = AvoidConvention::Closure, std::uint64_t seed = 0);

// Throws a theorem-check error naming the first violation.
void require_checks(const AvoidSeries& series);

// Lower bounds A and B for an avoid row; exponents descending.
double theorem_a_bound(int d, double eps, double lambda_min);
double theorem_b_bound(double alpha0, double eps, const std::vector<double>& exponents);
bool theorem_a_hypothesis(int d, double eps, double lambda_min);
bool theorem_b_hypothesis(double alpha0, double eps, const std::vector<double>& exponents);

// Follows `orbits` random paths of Lambda_n for `steps` steps and reports the
// number of visits to the forbidden cylinders (zero by construction).
std::size_t count_forbidden_visits(const Repeller& sub, const std::vector<Word>& forbidden_root_words, int orbits,
                                   int steps, std::uint64_t seed = 0);

}  // namespace bowenlab
