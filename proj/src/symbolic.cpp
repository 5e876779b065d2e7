#include "bowenlab/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "bowenlab/error.hpp"

namespace bowenlab {

namespace {

constexpr std::size_t kMaxStates = std::size_t{1} << 24;

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto c : w) {
      h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

Sft::Sft(kernels::Csr graph, int root_alphabet, int label_length, std::vector<std::uint16_t> labels)
    : graph_(std::move(graph)),
      root_alphabet_(root_alphabet),
      label_length_(label_length),
      labels_(std::move(labels)) {
  require(label_length_ >= 1, ErrorKind::Input, "label length must be positive");
  require(labels_.size() == size() * static_cast<std::size_t>(label_length_), ErrorKind::Input,
          "label table does not match the state count");
}

Sft Sft::full_shift(int k) {
  require(k >= 1 && k <= 65535, ErrorKind::Input, "full shift alphabet must be in 1..65535");
  std::vector<std::vector<int>> t(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(k), 1));
  return from_matrix(t);
}

Sft Sft::from_matrix(const std::vector<std::vector<int>>& t) {
  const std::size_t k = t.size();
  require(k >= 1 && k <= 65535, ErrorKind::Input, "transition matrix must have 1..65535 rows");
  kernels::Csr g;
  g.offsets.reserve(k + 1);
  for (const auto& row : t) {
    require(row.size() == k, ErrorKind::Input, "transition matrix must be square");
    for (std::size_t j = 0; j < k; ++j) {
      require(row[j] == 0 || row[j] == 1, ErrorKind::Input, "transition matrix entries must be 0 or 1");
      if (row[j]) g.targets.push_back(static_cast<std::int32_t>(j));
    }
    g.offsets.push_back(static_cast<std::int64_t>(g.targets.size()));
  }
  std::vector<std::uint16_t> labels(k);
  for (std::size_t a = 0; a < k; ++a) labels[a] = static_cast<std::uint16_t>(a);
  return Sft(std::move(g), static_cast<int>(k), 1, std::move(labels));
}

std::span<const std::int32_t> Sft::successors(std::size_t a) const {
  const auto lo = static_cast<std::size_t>(graph_.offsets[a]);
  const auto hi = static_cast<std::size_t>(graph_.offsets[a + 1]);
  return {graph_.targets.data() + lo, hi - lo};
}

bool Sft::allowed(std::size_t a, std::size_t b) const {
  const auto succ = successors(a);
  return std::binary_search(succ.begin(), succ.end(), static_cast<std::int32_t>(b));
}

std::span<const std::uint16_t> Sft::label(std::size_t a) const {
  const auto len = static_cast<std::size_t>(label_length_);
  return {labels_.data() + a * len, len};
}

std::vector<int> Sft::root_word(std::span<const std::int32_t> path) const {
  std::vector<int> w;
  if (path.empty()) return w;
  for (auto c : label(static_cast<std::size_t>(path[0]))) w.push_back(c);
  for (std::size_t i = 1; i < path.size(); ++i) {
    w.push_back(label(static_cast<std::size_t>(path[i])).back());
  }
  return w;
}

std::vector<std::vector<int>> Sft::dense() const {
  std::vector<std::vector<int>> t(size(), std::vector<int>(size(), 0));
  for (std::size_t a = 0; a < size(); ++a) {
    for (auto b : successors(a)) t[a][static_cast<std::size_t>(b)] = 1;
  }
  return t;
}

Sft restrict_states(const Sft& s, const std::vector<char>& keep) {
  const std::size_t n = s.size();
  std::vector<std::int32_t> index(n, -1);
  std::int32_t next = 0;
  for (std::size_t a = 0; a < n; ++a) {
    if (keep[a]) index[a] = next++;
  }
  kernels::Csr g;
  g.offsets.reserve(static_cast<std::size_t>(next) + 1);
  std::vector<std::uint16_t> labels;
  labels.reserve(static_cast<std::size_t>(next) * static_cast<std::size_t>(s.label_length()));
  for (std::size_t a = 0; a < n; ++a) {
    if (index[a] < 0) continue;
    for (auto b : s.successors(a)) {
      if (index[static_cast<std::size_t>(b)] >= 0) g.targets.push_back(index[static_cast<std::size_t>(b)]);
    }
    g.offsets.push_back(static_cast<std::int64_t>(g.targets.size()));
    const auto l = s.label(a);
    labels.insert(labels.end(), l.begin(), l.end());
  }
  return Sft(std::move(g), s.root_alphabet(), s.label_length(), std::move(labels));
}

Sft prune(const Sft& s) {
  const std::size_t n = s.size();
  std::vector<std::int64_t> out_deg(n), in_deg(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    out_deg[a] = static_cast<std::int64_t>(s.successors(a).size());
    for (auto b : s.successors(a)) ++in_deg[static_cast<std::size_t>(b)];
  }
  const auto pred = kernels::transpose(s.graph());
  std::vector<char> alive(n, 1);
  std::vector<std::size_t> queue;
  for (std::size_t a = 0; a < n; ++a) {
    if (out_deg[a] == 0 || in_deg[a] == 0) {
      alive[a] = 0;
      queue.push_back(a);
    }
  }
  while (!queue.empty()) {
    const std::size_t a = queue.back();
    queue.pop_back();
    for (auto b : s.successors(a)) {
      const auto ub = static_cast<std::size_t>(b);
      if (alive[ub] && --in_deg[ub] == 0) {
        alive[ub] = 0;
        queue.push_back(ub);
      }
    }
    for (auto k = pred.offsets[a]; k < pred.offsets[a + 1]; ++k) {
      const auto ub = static_cast<std::size_t>(pred.targets[static_cast<std::size_t>(k)]);
      if (alive[ub] && --out_deg[ub] == 0) {
        alive[ub] = 0;
        queue.push_back(ub);
      }
    }
  }
  return restrict_states(s, alive);
}

Sft forbid_words(const Sft& base, const std::vector<Word>& words, int n) {
  require(n >= 2, ErrorKind::Input, "forbidding depth must be at least 2");
  const auto k = static_cast<std::int64_t>(base.size());
  const int block_len = n - 1;
  std::vector<std::unordered_set<Word, WordHash>> forbidden(static_cast<std::size_t>(n) + 1);
  for (const auto& w : words) {
    require(!w.empty() && static_cast<int>(w.size()) <= n, ErrorKind::Input,
            "forbidden word length must be in 1..n");
    for (auto c : w) {
      require(c >= 0 && c < k, ErrorKind::Input, "forbidden word uses a letter outside the alphabet");
    }
    forbidden[w.size()].insert(w);
  }
  std::vector<int> lengths;
  for (int l = 1; l <= n; ++l) {
    if (!forbidden[static_cast<std::size_t>(l)].empty()) lengths.push_back(l);
  }

  // A word ending at position `end` (exclusive) of `buf` is forbidden?
  Word probe;
  auto ends_forbidden = [&](const std::vector<std::int32_t>& buf, int end, int max_len) {
    for (int l : lengths) {
      if (l > max_len || l > end) continue;
      probe.assign(buf.begin() + (end - l), buf.begin() + end);
      if (forbidden[static_cast<std::size_t>(l)].count(probe)) return true;
    }
    return false;
  };

  // Admissible (n-1)-blocks avoiding every forbidden word, in lexicographic order.
  std::vector<std::int32_t> blocks;
  std::vector<std::int32_t> path(static_cast<std::size_t>(block_len));
  std::vector<std::size_t> cursor(static_cast<std::size_t>(block_len));
  std::size_t block_count = 0;
  for (std::int64_t start = 0; start < k; ++start) {
    path[0] = static_cast<std::int32_t>(start);
    if (ends_forbidden(path, 1, block_len)) continue;
    int depth = 1;
    cursor[0] = 0;
    if (block_len == 1) {
      blocks.push_back(path[0]);
      ++block_count;
      continue;
    }
    cursor[1] = 0;
    while (depth >= 1) {
      const auto succ = base.successors(static_cast<std::size_t>(path[static_cast<std::size_t>(depth - 1)]));
      auto& c = cursor[static_cast<std::size_t>(depth)];
      if (c >= succ.size()) {
        --depth;
        continue;
      }
      path[static_cast<std::size_t>(depth)] = succ[c++];
      if (ends_forbidden(path, depth + 1, block_len)) continue;
      if (depth + 1 == block_len) {
        blocks.insert(blocks.end(), path.begin(), path.end());
        require(++block_count <= kMaxStates, ErrorKind::Budget,
                "higher-block alphabet exceeds 2^24 states; use a smaller depth");
      } else {
        ++depth;
        cursor[static_cast<std::size_t>(depth)] = 0;
      }
    }
  }

  // Block lookup by base-k code.
  double code_bits = static_cast<double>(block_len) * std::log2(static_cast<double>(std::max<std::int64_t>(k, 2)));
  require(code_bits < 62.0, ErrorKind::Budget, "block codes overflow 64 bits; use a smaller depth");
  auto encode = [&](const std::int32_t* b, int len) {
    std::uint64_t code = 0;
    for (int i = 0; i < len; ++i) code = code * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(b[i]);
    return code;
  };
  const bool dense_index = code_bits <= 22.0;
  std::vector<std::int32_t> dense_lookup;
  std::unordered_map<std::uint64_t, std::int32_t> sparse_lookup;
  if (dense_index) {
    dense_lookup.assign(static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(k), block_len))) + 1, -1);
  } else {
    sparse_lookup.reserve(block_count * 2);
  }
  for (std::size_t i = 0; i < block_count; ++i) {
    const auto code = encode(blocks.data() + i * static_cast<std::size_t>(block_len), block_len);
    if (dense_index) {
      dense_lookup[code] = static_cast<std::int32_t>(i);
    } else {
      sparse_lookup.emplace(code, static_cast<std::int32_t>(i));
    }
  }
  auto lookup = [&](std::uint64_t code) -> std::int32_t {
    if (dense_index) return dense_lookup[code];
    const auto it = sparse_lookup.find(code);
    return it == sparse_lookup.end() ? -1 : it->second;
  };

  const auto top = static_cast<std::uint64_t>(std::llround(std::pow(static_cast<double>(k), block_len - 1)));
  kernels::Csr g;
  g.offsets.reserve(block_count + 1);
  std::vector<std::int32_t> word(static_cast<std::size_t>(n));
  const bool check_full = !forbidden[static_cast<std::size_t>(n)].empty();
  for (std::size_t i = 0; i < block_count; ++i) {
    const std::int32_t* u = blocks.data() + i * static_cast<std::size_t>(block_len);
    const auto code_u = encode(u, block_len);
    const auto shifted = (code_u % top) * static_cast<std::uint64_t>(k);
    for (auto c : base.successors(static_cast<std::size_t>(u[block_len - 1]))) {
      const auto v = lookup(shifted + static_cast<std::uint64_t>(c));
      if (v < 0) continue;
      if (check_full) {
        std::copy(u, u + block_len, word.begin());
        word[static_cast<std::size_t>(block_len)] = c;
        if (forbidden[static_cast<std::size_t>(n)].count(word)) continue;
      }
      g.targets.push_back(v);
    }
    g.offsets.push_back(static_cast<std::int64_t>(g.targets.size()));
  }

  const int label_len = base.label_length() + block_len - 1;
  std::vector<std::uint16_t> labels;
  labels.reserve(block_count * static_cast<std::size_t>(label_len));
  for (std::size_t i = 0; i < block_count; ++i) {
    const std::int32_t* u = blocks.data() + i * static_cast<std::size_t>(block_len);
    const auto first = base.label(static_cast<std::size_t>(u[0]));
    labels.insert(labels.end(), first.begin(), first.end());
    for (int j = 1; j < block_len; ++j) labels.push_back(base.label(static_cast<std::size_t>(u[j])).back());
  }
  Sft raw(std::move(g), base.root_alphabet(), label_len, std::move(labels));
  Sft pruned = prune(raw);
  require(!pruned.empty(), ErrorKind::EmptySubshift, "forbidding these words leaves an empty subshift");
  return pruned;
}

Sft higher_block(const Sft& base, int block_length) {
  require(block_length >= 1, ErrorKind::Input, "block length must be positive");
  if (block_length == 1) return prune(base);
  return forbid_words(base, {}, block_length + 1);
}

std::vector<Word> parse_words(const std::string& text) {
  std::vector<Word> out;
  std::stringstream words(text);
  std::string item;
  while (std::getline(words, item, ',')) {
    if (item.empty()) continue;
    Word w;
    std::stringstream letters(item);
    std::string letter;
    while (std::getline(letters, letter, '.')) {
      require(!letter.empty() && letter.find_first_not_of("0123456789") == std::string::npos, ErrorKind::Input,
              "malformed word: " + item);
      w.push_back(std::stoi(letter));
    }
    out.push_back(std::move(w));
  }
  return out;
}

std::string format_word(const Word& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(w[i]);
  }
  return s;
}

std::vector<int> strongly_connected_components(const Sft& s, int* count) {
  // Iterative Tarjan.
  const std::size_t n = s.size();
  std::vector<int> comp(n, -1), index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // (state, next successor slot)
  int next_index = 0, next_comp = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, slot] = call.back();
      const auto succ = s.successors(v);
      if (slot < succ.size()) {
        const auto w = static_cast<std::size_t>(succ[slot++]);
        if (index[w] < 0) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::size_t done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = next_comp;
        } while (w != done);
        ++next_comp;
      }
    }
  }
  if (count) *count = next_comp;
  return comp;
}

bool is_irreducible(const Sft& s) {
  if (s.empty()) return false;
  int count = 0;
  strongly_connected_components(s, &count);
  if (count != 1) return false;
  return s.edge_count() > 0;
}

Sft dominant_component(const Sft& s) {
  require(!s.empty(), ErrorKind::EmptySubshift, "empty subshift has no components");
  int count = 0;
  const auto comp = strongly_connected_components(s, &count);
  if (count == 1) {
    require(s.edge_count() > 0, ErrorKind::EmptySubshift, "subshift has no transitions");
    return s;
  }
  double best = -1.0;
  Sft best_sft;
  std::vector<char> keep(s.size());
  for (int c = 0; c < count; ++c) {
    for (std::size_t a = 0; a < s.size(); ++a) keep[a] = comp[a] == c;
    Sft part = restrict_states(s, keep);
    if (part.edge_count() == 0) continue;
    const double rho = spectral_radius(part);
    if (rho > best * (1.0 + 1e-12)) {
      best = rho;
      best_sft = std::move(part);
    }
  }
  require(best > 0.0, ErrorKind::EmptySubshift, "subshift has no recurrent component");
  return best_sft;
}

PerronResult perron(std::size_t n, const ShiftedOperator& apply) {
  require(n > 0, ErrorKind::Domain, "spectral radius of an empty matrix");
  PerronResult out;
  std::vector<double> x(n, 1.0), y(n);

  // Rough growth rate from unshifted steps; it only sets the shift.
  double log_growth = 0.0;
  constexpr int kWarm = 16;
  for (int k = 0; k < kWarm; ++k) {
    apply(x.data(), y.data(), 0.0);
    const double m = *std::max_element(y.begin(), y.end());
    if (!(m > 0.0)) {
      out.rho = 0.0;
      out.vector.assign(n, 0.0);
      return out;
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / m;
    log_growth += std::log(m);
  }
  const double shift = 0.25 * std::exp(log_growth / kWarm);

  std::fill(x.begin(), x.end(), 1.0);
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  double prev_hi = hi;
  int stagnant = 0;
  bool bounded = false;
  constexpr long kMaxIter = 1000000;
  for (long it = 1; it <= kMaxIter; ++it) {
    apply(x.data(), y.data(), shift);
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] > 0.0) {
        const double r = y[i] / x[i];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      m = std::max(m, y[i]);
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / m;
    out.iterations = it;
    if (hi - lo <= 1e-13 * hi) {
      bounded = true;
      break;
    }
    stagnant = hi >= prev_hi * (1.0 - 1e-15) ? stagnant + 1 : 0;
    prev_hi = std::min(prev_hi, hi);
    if (stagnant >= 50) break;
  }
  out.rho = (bounded ? 0.5 * (lo + hi) : hi) - shift;
  if (out.rho < 0.0) out.rho = 0.0;
  out.vector = std::move(x);
  return out;
}

double spectral_radius(const std::vector<std::vector<double>>& t) {
  const std::size_t n = t.size();
  require(n > 0, ErrorKind::Domain, "spectral radius of an empty matrix");
  bool nonzero = false;
  for (const auto& row : t) {
    require(row.size() == n, ErrorKind::Input, "matrix must be square");
    for (double v : row) {
      require(v >= 0.0 && std::isfinite(v), ErrorKind::Domain, "matrix must be nonnegative and finite");
      nonzero = nonzero || v > 0.0;
    }
  }
  require(nonzero, ErrorKind::Domain, "all-zero matrix has no Perron root");
  return perron(n, [&](const double* x, double* y, double shift) {
           for (std::size_t i = 0; i < n; ++i) {
             double acc = shift * x[i];
             for (std::size_t j = 0; j < n; ++j) acc += t[i][j] * x[j];
             y[i] = acc;
           }
         }).rho;
}

double spectral_radius(const Sft& s, std::span<const double> state_weights) {
  require(!s.empty(), ErrorKind::EmptySubshift, "spectral radius of an empty subshift");
  require(state_weights.empty() || state_weights.size() == s.size(), ErrorKind::Input,
          "one weight per state expected");
  const double* w = state_weights.empty() ? nullptr : state_weights.data();
  return perron(s.size(), [&](const double* x, double* y, double shift) {
           kernels::weighted_matvec(s.graph(), w, nullptr, x, y, shift);
         }).rho;
}

double topological_entropy(const Sft& s) {
  require(!s.empty(), ErrorKind::EmptySubshift, "entropy of an empty subshift");
  const double rho = spectral_radius(s);
  require(rho > 0.0, ErrorKind::EmptySubshift, "subshift has no infinite paths");
  return std::log(rho);
}

void check_compatible(const Sft& s, const MarkovMeasure& m) {
  require(m.graph.offsets == s.graph().offsets && m.graph.targets == s.graph().targets, ErrorKind::Input,
          "measure is not defined on this subshift");
}

MarkovMeasure equilibrium_measure(const Sft& s, std::span<const double> state_weights) {
  require(is_irreducible(s), ErrorKind::Precondition,
          "equilibrium measure needs an irreducible subshift; restrict to a component first");
  const std::size_t n = s.size();
  std::vector<double> w(state_weights.begin(), state_weights.end());
  if (w.empty()) w.assign(n, 1.0);
  require(w.size() == n, ErrorKind::Input, "one weight per state expected");
  const auto right = perron(n, [&](const double* x, double* y, double shift) {
    kernels::weighted_matvec(s.graph(), w.data(), nullptr, x, y, shift);
  });
  const auto pred = kernels::transpose(s.graph());
  const auto left = perron(n, [&](const double* x, double* y, double shift) {
    kernels::weighted_matvec(pred, nullptr, w.data(), x, y, shift);
  });
  MarkovMeasure m;
  m.graph = s.graph();
  m.transition.resize(s.edge_count());
  const auto& r = right.vector;
  for (std::size_t a = 0; a < n; ++a) {
    double row = 0.0;
    for (auto k = m.graph.offsets[a]; k < m.graph.offsets[a + 1]; ++k) {
      row += r[static_cast<std::size_t>(m.graph.targets[static_cast<std::size_t>(k)])];
    }
    for (auto k = m.graph.offsets[a]; k < m.graph.offsets[a + 1]; ++k) {
      m.transition[static_cast<std::size_t>(k)] = r[static_cast<std::size_t>(m.graph.targets[static_cast<std::size_t>(k)])] / row;
    }
  }
  m.stationary.resize(n);
  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a) total += (m.stationary[a] = left.vector[a] * r[a]);
  for (auto& p : m.stationary) p /= total;
  return m;
}

MarkovMeasure parry_measure(const Sft& s) { return equilibrium_measure(s, {}); }

std::vector<double> stationary_distribution(const kernels::Csr& graph, std::span<const double> transition) {
  const std::size_t n = graph.rows();
  const auto pred = kernels::transpose(graph);
  // Edge weights of the transposed pattern, in transposed order.
  std::vector<double> pt(graph.nnz());
  {
    std::vector<std::int64_t> cursor(pred.offsets.begin(), pred.offsets.end() - 1);
    for (std::size_t a = 0; a < n; ++a) {
      for (auto k = graph.offsets[a]; k < graph.offsets[a + 1]; ++k) {
        const auto b = static_cast<std::size_t>(graph.targets[static_cast<std::size_t>(k)]);
        pt[static_cast<std::size_t>(cursor[b]++)] = transition[static_cast<std::size_t>(k)];
      }
    }
  }
  const auto res = perron(n, [&](const double* x, double* y, double shift) {
    for (std::size_t b = 0; b < n; ++b) {
      double acc = shift * x[b];
      for (auto k = pred.offsets[b]; k < pred.offsets[b + 1]; ++k) {
        acc += pt[static_cast<std::size_t>(k)] * x[pred.targets[static_cast<std::size_t>(k)]];
      }
      y[b] = acc;
    }
  });
  std::vector<double> pi = res.vector;
  double total = 0.0;
  for (double v : pi) total += v;
  for (auto& v : pi) v /= total;
  return pi;
}

MarkovMeasure random_markov_measure(const Sft& s, std::uint64_t seed) {
  require(is_irreducible(s), ErrorKind::Precondition, "random Markov measure needs an irreducible subshift");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  MarkovMeasure m;
  m.graph = s.graph();
  m.transition.resize(s.edge_count());
  for (std::size_t a = 0; a < s.size(); ++a) {
    double row = 0.0;
    for (auto k = m.graph.offsets[a]; k < m.graph.offsets[a + 1]; ++k) {
      row += (m.transition[static_cast<std::size_t>(k)] = weight(rng));
    }
    for (auto k = m.graph.offsets[a]; k < m.graph.offsets[a + 1]; ++k) m.transition[static_cast<std::size_t>(k)] /= row;
  }
  m.stationary = stationary_distribution(m.graph, m.transition);
  return m;
}

MarkovMeasure bernoulli_measure(const Sft& s, const std::vector<double>& p) {
  require(p.size() == s.size(), ErrorKind::Input, "one probability per symbol expected");
  double total = 0.0;
  for (double v : p) {
    require(v > 0.0, ErrorKind::Input, "Bernoulli probabilities must be positive");
    total += v;
  }
  require(std::abs(total - 1.0) <= 1e-9, ErrorKind::Input, "Bernoulli probabilities must sum to 1");
  for (std::size_t a = 0; a < s.size(); ++a) {
    require(s.successors(a).size() == s.size(), ErrorKind::Input, "Bernoulli measure needs a full shift");
  }
  MarkovMeasure m;
  m.graph = s.graph();
  m.transition.resize(s.edge_count());
  for (std::size_t k = 0; k < m.transition.size(); ++k) {
    m.transition[k] = p[static_cast<std::size_t>(m.graph.targets[k])] / total;
  }
  m.stationary = p;
  for (auto& v : m.stationary) v /= total;
  return m;
}

double markov_entropy(const MarkovMeasure& m) {
  double h = 0.0;
  for (std::size_t a = 0; a < m.states(); ++a) {
    double row = 0.0;
    for (auto k = m.graph.offsets[a]; k < m.graph.offsets[a + 1]; ++k) {
      const double p = m.transition[static_cast<std::size_t>(k)];
      if (p > 0.0) row -= p * std::log(p);
    }
    h += m.stationary[a] * row;
  }
  return h;
}

WordCount enumerate_words(const Sft& s, int length) {
  require(length >= 1, ErrorKind::Input, "word length must be positive");
  WordCount out;
  const std::size_t n = s.size();
  if (n == 0) {
    out.exact = 0;
    out.log_count = -std::numeric_limits<double>::infinity();
    return out;
  }
  std::vector<std::uint64_t> exact(n, 1), next_exact(n);
  std::vector<double> scaled(n, 1.0), next_scaled(n);
  bool overflow = false;
  double log_scale = 0.0;
  for (int step = 1; step < length; ++step) {
    double m = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      std::uint64_t acc = 0;
      double sacc = 0.0;
      for (auto b : s.successors(a)) {
        const auto ub = static_cast<std::size_t>(b);
        if (!overflow && __builtin_add_overflow(acc, exact[ub], &acc)) overflow = true;
        sacc += scaled[ub];
      }
      next_exact[a] = acc;
      next_scaled[a] = sacc;
      m = std::max(m, sacc);
    }
    if (m == 0.0) {
      out.exact = 0;
      out.log_count = -std::numeric_limits<double>::infinity();
      return out;
    }
    for (std::size_t a = 0; a < n; ++a) next_scaled[a] /= m;
    log_scale += std::log(m);
    exact.swap(next_exact);
    scaled.swap(next_scaled);
  }
  std::uint64_t total = 0;
  double stotal = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    if (!overflow && __builtin_add_overflow(total, exact[a], &total)) overflow = true;
    stotal += scaled[a];
  }
  if (!overflow) out.exact = total;
  out.log_count = std::log(stotal) + log_scale;
  return out;
}

void for_each_word(const Sft& s, int length, const std::function<bool(const Word&)>& visit) {
  require(length >= 1, ErrorKind::Input, "word length must be positive");
  Word w(static_cast<std::size_t>(length));
  std::vector<std::size_t> cursor(static_cast<std::size_t>(length));
  for (std::size_t start = 0; start < s.size(); ++start) {
    w[0] = static_cast<std::int32_t>(start);
    if (length == 1) {
      if (!visit(w)) return;
      continue;
    }
    int depth = 1;
    cursor[1] = 0;
    while (depth >= 1) {
      const auto succ = s.successors(static_cast<std::size_t>(w[static_cast<std::size_t>(depth - 1)]));
      auto& c = cursor[static_cast<std::size_t>(depth)];
      if (c >= succ.size()) {
        --depth;
        continue;
      }
      w[static_cast<std::size_t>(depth)] = succ[c++];
      if (depth + 1 == length) {
        if (!visit(w)) return;
      } else {
        ++depth;
        cursor[static_cast<std::size_t>(depth)] = 0;
      }
    }
  }
}

}  // namespace bowenlab
