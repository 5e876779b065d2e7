#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "bowenlab/cocycle.hpp"
#include "bowenlab/coding.hpp"

namespace bowenlab {

enum class PressureMethod { SeparatedSet, SpectralDepthM };

struct PressureEstimate {
  double value = 0.0;  // nats
  PressureMethod method = PressureMethod::SpectralDepthM;
  Family family = Family::SubAdditivePhi;
  double s = 0.0;
  int depth = 0;
  double epsilon = 0.0;  // separated sets only
  std::optional<std::pair<double, double>> bracket;
};

struct SeparatedSet {
  std::vector<Word> paths;                 // kept depth-n cylinders
  std::vector<std::vector<Vector>> orbits;  // first n iterates of each representative
  int n = 0;
  double epsilon = 0.0;
};

// d_n distance between two stored orbits (max norm, wrapped on the torus).
double bowen_distance(const ModelSpec& model, const std::vector<Vector>& a, const std::vector<Vector>& b);

// Greedy maximal (n, eps)-separated set over depth-n cylinder representatives
// in lexicographic order.
SeparatedSet build_separated_set(const Repeller& rep, int n, double eps);
PressureEstimate pressure_separated(const Repeller& rep, Family family, double s, int n, double eps);

// Min and max of log |f'| over the cylinder spelled by a root word (d = 1).
std::pair<double, double> log_derivative_range(const ModelSpec& model, std::span<const std::uint16_t> word);

// Depth-m transfer-matrix pressure with per-depth caches. Thread-safe.
//  - additive data: weights on states, identical for every m;
//  - a linear toral map with a non-diagonal matrix: constant cocycle A^m;
//  - other locally constant data: m-blocks joined end to end;
//  - perturbed doubling: overlapping m-block recoding with the sup (Phi) or
//    inf (Psi) of the potential over each block, which brackets the limit.
class SpectralPressure {
 public:
  enum class Mode { Additive, ConstantCocycle, Blocks, Overlapping };

  explicit SpectralPressure(Repeller rep, bool force_blocks = false);

  const Repeller& repeller() const { return rep_; }
  Mode mode() const { return mode_; }
  double entropy() const;
  // (1/m) log rho(W_m(s)).
  double value(Family family, double s, int m) const;
  // Depth used when the caller does not ask for one.
  int default_depth() const;
  double variational_gap(Family family, double s, int m, const MarkovMeasure& mu) const;

 private:
  struct Blocks {
    std::vector<Word> paths;          // m-paths of states
    std::vector<Vector> log_sv;       // cocycle logs per block
    std::vector<std::size_t> first;   // first state of each block
    std::vector<std::size_t> last;    // last state
    // blocks sorted by first state, so blocks starting at a are [begin[a], begin[a+1])
    std::vector<std::size_t> begin;
  };
  struct Recoding {
    Sft sft;                           // labels of length >= m
    std::vector<double> log_min;       // min log f' over each state's cylinder
    std::vector<double> log_max;
  };

  Repeller rep_;
  Mode mode_;
  std::vector<Vector> state_logs_;
  mutable std::mutex mutex_;
  mutable std::optional<double> entropy_;
  mutable std::map<int, std::shared_ptr<const Blocks>> blocks_;
  mutable std::map<int, std::shared_ptr<const Recoding>> recodings_;
  mutable std::map<int, Vector> power_logs_;

  std::shared_ptr<const Blocks> blocks(int m) const;
  std::shared_ptr<const Recoding> recoding(int m) const;
  Vector power_logs(int m) const;
};

PressureEstimate pressure_spectral(const SpectralPressure& p, Family family, double s, int m);
PressureEstimate pressure_spectral(const Repeller& rep, Family family, double s, int m);
// Runs m = 1..m_max and checks the monotone bracket; the value is the last one.
PressureEstimate pressure_limit(const SpectralPressure& p, Family family, double s, int m_max);
PressureEstimate pressure_limit(const Repeller& rep, Family family, double s, int m_max);

// P - (h_mu + F_*(mu)) at depth m, with F_* evaluated exactly on m-blocks.
double variational_gap(const Repeller& rep, Family family, double s, const MarkovMeasure& mu, int m = 1);

}  // namespace bowenlab
