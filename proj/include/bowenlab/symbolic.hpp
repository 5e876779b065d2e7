#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bowenlab/kernels.hpp"

namespace bowenlab {

using Word = std::vector<std::int32_t>;

// Subshift of finite type stored as a sparse 0/1 graph. Each state carries a
// label: a word over the root alphabet (length 1 for a plain SFT, longer for
// higher-block recodings). States are kept in lexicographic label order.
class Sft {
 public:
  Sft() = default;
  Sft(kernels::Csr graph, int root_alphabet, int label_length, std::vector<std::uint16_t> labels);

  static Sft full_shift(int k);
  static Sft from_matrix(const std::vector<std::vector<int>>& t);

  std::size_t size() const { return graph_.rows(); }
  bool empty() const { return size() == 0; }
  std::size_t edge_count() const { return graph_.nnz(); }
  const kernels::Csr& graph() const { return graph_; }
  std::span<const std::int32_t> successors(std::size_t a) const;
  bool allowed(std::size_t a, std::size_t b) const;

  int root_alphabet() const { return root_alphabet_; }
  int label_length() const { return label_length_; }
  std::span<const std::uint16_t> label(std::size_t a) const;
  int first_symbol(std::size_t a) const { return labels_[a * static_cast<std::size_t>(label_length_)]; }

  // Root word spelled by a path of states (first label, then last letters).
  std::vector<int> root_word(std::span<const std::int32_t> path) const;
  std::vector<std::vector<int>> dense() const;

 private:
  kernels::Csr graph_;
  int root_alphabet_ = 0;
  int label_length_ = 1;
  std::vector<std::uint16_t> labels_;
};

// Keeps states flagged in `keep`, preserving order and labels.
Sft restrict_states(const Sft& s, const std::vector<char>& keep);
// Removes states without an outgoing or an incoming transition, repeatedly.
Sft prune(const Sft& s);
// Higher-block SFT on admissible (n-1)-blocks of `base` with every n-word that
// contains a word of `words` removed, then pruned.
Sft forbid_words(const Sft& base, const std::vector<Word>& words, int n);
// Recoding on admissible blocks of the given length (no words forbidden).
Sft higher_block(const Sft& base, int block_length);

// Words are written as dot-separated indices, several words comma-separated.
std::vector<Word> parse_words(const std::string& text);
std::string format_word(const Word& w);

std::vector<int> strongly_connected_components(const Sft& s, int* count = nullptr);
bool is_irreducible(const Sft& s);
// Irreducible component with the largest spectral radius.
Sft dominant_component(const Sft& s);

struct PerronResult {
  double rho = 0.0;
  std::vector<double> vector;  // nonnegative, max entry 1
  long iterations = 0;
};

// apply(x, y, shift) must compute y = A x + shift * x for a nonnegative A.
using ShiftedOperator = std::function<void(const double*, double*, double)>;
PerronResult perron(std::size_t n, const ShiftedOperator& apply);

double spectral_radius(const std::vector<std::vector<double>>& t);
// rho(diag(w) T); empty weights mean the plain transition matrix.
double spectral_radius(const Sft& s, std::span<const double> state_weights = {});
double topological_entropy(const Sft& s);

struct MarkovMeasure {
  kernels::Csr graph;               // same pattern as the SFT
  std::vector<double> transition;   // aligned with graph.targets
  std::vector<double> stationary;

  std::size_t states() const { return graph.rows(); }
};

void check_compatible(const Sft& s, const MarkovMeasure& m);
MarkovMeasure parry_measure(const Sft& s);
// Equilibrium Markov measure for the weighted matrix diag(w) T.
MarkovMeasure equilibrium_measure(const Sft& s, std::span<const double> state_weights);
MarkovMeasure random_markov_measure(const Sft& s, std::uint64_t seed);
// Bernoulli measure with symbol probabilities p on a full shift.
MarkovMeasure bernoulli_measure(const Sft& s, const std::vector<double>& p);
std::vector<double> stationary_distribution(const kernels::Csr& graph, std::span<const double> transition);
double markov_entropy(const MarkovMeasure& m);

struct WordCount {
  std::optional<std::uint64_t> exact;  // empty on overflow
  double log_count = 0.0;               // -inf when there are no words
};
WordCount enumerate_words(const Sft& s, int length);

// Visits admissible words of the given length in lexicographic order.
// The visitor returns false to stop early.
void for_each_word(const Sft& s, int length, const std::function<bool(const Word&)>& visit);

}  // namespace bowenlab
