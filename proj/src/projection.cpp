#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lge/kmeans.hpp"
#include "lge/solver.hpp"

namespace lge {

namespace {

inline double sq(double x) { return x * x; }

// Cost of forcing both values to one shared binary value.
inline double tie_cost(double a, double b) { return std::min(sq(a) + sq(b), sq(1.0 - a) + sq(1.0 - b)); }
inline std::uint8_t tie_value(double a, double b) { return a + b > 1.0 ? 1 : 0; }
// Cost of rounding one value on its own.
inline double free_cost(double a) { return std::min(sq(a), sq(1.0 - a)); }
inline double round_bit(double a) { return a > 0.5 ? 1.0 : 0.0; }

}  // namespace

void SolverConfig::validate() const {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (clusters_per_word < 1) throw std::invalid_argument("clusters per word must be >= 1");
  if (bit_flip_penalty < 0.0) throw std::invalid_argument("bit flip penalty must be >= 0");
}

Projector::Projector(const TreeLayout& layout, const AlgebraConfig& algebra,
                     const SolverConfig& config)
    : layout_(&layout), algebra_(algebra), config_(config) {
  algebra_.validate();
  config_.validate();
  if (layout.code_length() != algebra.code_length()) {
    throw std::invalid_argument("layout and algebra disagree on code length");
  }
  const int n = algebra.bits_per_byte;
  const auto& patterns = enumerate_decompositions(n);
  table_.n = n;
  table_.count = static_cast<int>(patterns.size());
  table_.copy_side.assign(patterns.size() * n, 0);
  table_.copy_pos.assign(patterns.size() * n, 0);
  table_.fixed.assign(patterns.size() * 2 * n, -1);
  for (std::size_t q = 0; q < patterns.size(); ++q) {
    for (int side = 0; side < 2; ++side) {
      const auto& slots = side == 0 ? patterns[q].left : patterns[q].right;
      for (int i = 0; i < n; ++i) {
        const int s = slots[i];
        if (s >= 0) {
          table_.copy_side[q * n + s] = static_cast<std::int8_t>(side);
          table_.copy_pos[q * n + s] = static_cast<std::int8_t>(i);
        } else {
          table_.fixed[q * 2 * n + side * n + i] =
              s == DecompositionPattern::kFixedOne ? 1 : 0;
        }
      }
    }
  }
  seed_.resize(layout.words().size());
  for (const auto& [word, code] : config_.seed_lexicon) {
    const int id = layout.word_id(word);
    if (id < 0) continue;
    if (!code.matches(algebra_)) {
      throw std::invalid_argument("seed code for '" + word + "' does not match the algebra");
    }
    seed_[id].assign(code.bits().begin(), code.bits().end());
  }
}

double Projector::byte_cost(const double* child, const double* left, const double* right,
                            int pattern, int released) const {
  const int n = table_.n;
  double cost = 0.0;
  for (int i = 0; i < n; ++i) {
    const int side = table_.copy_side[pattern * n + i];
    const int pos = table_.copy_pos[pattern * n + i];
    const double parent = side == 0 ? left[pos] : right[pos];
    if (side * n + pos == released) {
      cost += free_cost(child[i]) + free_cost(parent);
    } else {
      cost += tie_cost(child[i], parent);
    }
  }
  const std::int8_t* fixed = table_.fixed.data() + pattern * 2 * n;
  for (int s = 0; s < 2 * n; ++s) {
    if (fixed[s] < 0) continue;
    const double x = s < n ? left[s] : right[s - n];
    cost += s == released ? free_cost(x) : sq(x - fixed[s]);
  }
  return cost;
}

double Projector::best_byte(const double* child, const double* left, const double* right,
                            ByteChoice* choice) const {
  double best = std::numeric_limits<double>::infinity();
  for (int q = 0; q < table_.count; ++q) {
    const double c = byte_cost(child, left, right, q, -1);
    if (c < best) {
      best = c;
      *choice = ByteChoice{q, -1};
    }
  }
  return best;
}

double Projector::best_byte_released(const double* child, const double* left,
                                     const double* right, ByteChoice* choice) const {
  const int n = table_.n;
  double best = std::numeric_limits<double>::infinity();
  for (int q = 0; q < table_.count; ++q) {
    // Released cost = constrained cost minus the best single-slot saving.
    double base = 0.0;
    double saving = -1.0;
    int slot = -1;
    for (int i = 0; i < n; ++i) {
      const int side = table_.copy_side[q * n + i];
      const int pos = table_.copy_pos[q * n + i];
      const double parent = side == 0 ? left[pos] : right[pos];
      const double tied = tie_cost(child[i], parent);
      base += tied;
      const double s = tied - free_cost(child[i]) - free_cost(parent);
      if (s > saving) {
        saving = s;
        slot = side * n + pos;
      }
    }
    const std::int8_t* fixed = table_.fixed.data() + q * 2 * n;
    for (int s = 0; s < 2 * n; ++s) {
      if (fixed[s] < 0) continue;
      const double x = s < n ? left[s] : right[s - n];
      const double pinned = sq(x - fixed[s]);
      base += pinned;
      const double gain = pinned - free_cost(x);
      if (gain > saving) {
        saving = gain;
        slot = s;
      }
    }
    const double c = base - saving;
    if (c < best) {
      best = c;
      *choice = ByteChoice{q, slot};
    }
  }
  return best;
}

double Projector::branch_cost(const double* child, const double* left, const double* right,
                              std::vector<ByteChoice>* choices) const {
  const int n = table_.n;
  const int bytes = algebra_.num_bytes;
  choices->resize(bytes);
  double total = 0.0;
  for (int b = 0; b < bytes; ++b) {
    total += best_byte(child + b * n, left + b * n, right + b * n, &(*choices)[b]);
  }
  if (!config_.relax_bit_flip) return total;
  double best_gain = 0.0;
  int best_b = -1;
  ByteChoice released;
  for (int b = 0; b < bytes; ++b) {
    ByteChoice c;
    const double exact = byte_cost(child + b * n, left + b * n, right + b * n, (*choices)[b].pattern, -1);
    const double rel = best_byte_released(child + b * n, left + b * n, right + b * n, &c);
    const double gain = exact - rel;
    if (gain > best_gain) {
      best_gain = gain;
      best_b = b;
      released = c;
    }
  }
  if (best_b >= 0 && best_gain > config_.bit_flip_penalty) {
    (*choices)[best_b] = released;
    total += config_.bit_flip_penalty - best_gain;
  }
  return total;
}

void Projector::write_branch(const double* child, const double* left, const double* right,
                             const std::vector<ByteChoice>& choices, double* out_child,
                             double* out_left, double* out_right) const {
  const int n = table_.n;
  for (int b = 0; b < algebra_.num_bytes; ++b) {
    const int q = choices[b].pattern;
    const int released = choices[b].released;
    const double* c = child + b * n;
    const double* l = left + b * n;
    const double* r = right + b * n;
    double* oc = out_child + b * n;
    double* ol = out_left + b * n;
    double* orr = out_right + b * n;
    for (int i = 0; i < n; ++i) {
      const int side = table_.copy_side[q * n + i];
      const int pos = table_.copy_pos[q * n + i];
      const double parent = side == 0 ? l[pos] : r[pos];
      double* out_parent = side == 0 ? ol + pos : orr + pos;
      if (side * n + pos == released) {
        oc[i] = round_bit(c[i]);
        *out_parent = round_bit(parent);
      } else {
        oc[i] = *out_parent = tie_value(c[i], parent);
      }
    }
    const std::int8_t* fixed = table_.fixed.data() + q * 2 * n;
    for (int s = 0; s < 2 * n; ++s) {
      if (fixed[s] < 0) continue;
      double* out = s < n ? ol + s : orr + (s - n);
      const double x = s < n ? l[s] : r[s - n];
      *out = s == released ? round_bit(x) : static_cast<double>(fixed[s]);
    }
  }
}

namespace {

// Solves one layer pair. lower(j) for j < nodes, upper(i) for i <= nodes.
template <typename Lower, typename Upper, typename Branch>
double solve_layer_pair(int nodes, int dim, Lower lower, Upper upper, Branch branch,
                        int* best_position, std::vector<double>& scratch) {
  // scratch: [0, nodes] prefix of left-aligned pair costs, then suffix of
  // right-aligned pair costs.
  scratch.assign(2 * (nodes + 1), 0.0);
  double* prefix = scratch.data();
  double* suffix = scratch.data() + nodes + 1;
  for (int j = 0; j < nodes; ++j) {
    const double* lo = lower(j);
    const double* up = upper(j);
    double c = 0.0;
    for (int k = 0; k < dim; ++k) c += tie_cost(lo[k], up[k]);
    prefix[j + 1] = prefix[j] + c;
  }
  for (int j = nodes - 1; j >= 0; --j) {
    const double* lo = lower(j);
    const double* up = upper(j + 1);
    double c = 0.0;
    for (int k = 0; k < dim; ++k) c += tie_cost(lo[k], up[k]);
    suffix[j] = suffix[j + 1] + c;
  }
  // suffix[j] now includes node j; the cost right of p is suffix[p + 1].
  double best = std::numeric_limits<double>::infinity();
  int best_p = 0;
  for (int p = 0; p < nodes; ++p) {
    const double frame = prefix[p] + suffix[p + 1];
    if (frame >= best) continue;
    const double c = frame + branch(p);
    if (c < best) {
      best = c;
      best_p = p;
    }
  }
  *best_position = best_p;
  return best;
}

}  // namespace

double Projector::layer_pair_cost(std::span<const double> lower, std::span<const double> upper,
                                  int nodes, int* position) const {
  const int dim = algebra_.code_length();
  if (lower.size() != static_cast<std::size_t>(nodes * dim) ||
      upper.size() != static_cast<std::size_t>((nodes + 1) * dim)) {
    throw std::invalid_argument("layer pair has the wrong size");
  }
  std::vector<ByteChoice> choices;
  std::vector<double> scratch;
  int p = 0;
  const double cost = solve_layer_pair(
      nodes, dim, [&](int j) { return lower.data() + j * dim; },
      [&](int i) { return upper.data() + i * dim; },
      [&](int q) {
        return branch_cost(lower.data() + q * dim, upper.data() + q * dim,
                           upper.data() + (q + 1) * dim, &choices);
      },
      &p, scratch);
  if (position) *position = p;
  return cost;
}

double Projector::project_layers(int tree, std::span<const double> in,
                                 std::span<double> out) const {
  const TreeLayout& lay = *layout_;
  const int dim = algebra_.code_length();
  const int length = lay.tree_length(tree);
  std::vector<ByteChoice> choices;
  std::vector<double> scratch;
  double distance = 0.0;
  for (int l = 1; l < length; ++l) {
    auto lower = [&](int j) { return in.data() + lay.offset(tree, l, j, Replica::kUp); };
    auto upper = [&](int i) { return in.data() + lay.offset(tree, l + 1, i, Replica::kDown); };
    int p = 0;
    distance += solve_layer_pair(
        l, dim, lower, upper,
        [&](int q) { return branch_cost(lower(q), upper(q), upper(q + 1), &choices); }, &p,
        scratch);
    auto tie = [&](int j, int i) {
      const double* lo = lower(j);
      const double* up = upper(i);
      double* olo = out.data() + lay.offset(tree, l, j, Replica::kUp);
      double* oup = out.data() + lay.offset(tree, l + 1, i, Replica::kDown);
      for (int k = 0; k < dim; ++k) olo[k] = oup[k] = tie_value(lo[k], up[k]);
    };
    for (int j = 0; j < p; ++j) tie(j, j);
    for (int j = p + 1; j < l; ++j) tie(j, j + 1);
    branch_cost(lower(p), upper(p), upper(p + 1), &choices);
    write_branch(lower(p), upper(p), upper(p + 1), choices,
                 out.data() + lay.offset(tree, l, p, Replica::kUp),
                 out.data() + lay.offset(tree, l + 1, p, Replica::kDown),
                 out.data() + lay.offset(tree, l + 1, p + 1, Replica::kDown));
  }
  return distance;
}

double Projector::project_word(int word, std::span<const double> in,
                               std::span<double> out) const {
  const TreeLayout& lay = *layout_;
  const int dim = algebra_.code_length();
  const auto& occ = lay.occurrences(word);
  std::vector<double> points(occ.size() * dim);
  for (std::size_t o = 0; o < occ.size(); ++o) {
    const int t = occ[o].tree;
    const double* src = in.data() + lay.offset(t, lay.tree_length(t), occ[o].position, Replica::kUp);
    std::copy_n(src, dim, points.begin() + o * dim);
  }
  const int k = seed_[word].empty() ? config_.clusters_per_word : 1;
  std::vector<double> centers;
  const auto assign = kmeans(points, occ.size(), dim, k, config_.kmeans_iterations, centers);
  double distance = 0.0;
  for (std::size_t o = 0; o < occ.size(); ++o) {
    const int t = occ[o].tree;
    double* dst = out.data() + lay.offset(t, lay.tree_length(t), occ[o].position, Replica::kUp);
    const double* center = centers.data() + static_cast<std::size_t>(assign[o]) * dim;
    for (int i = 0; i < dim; ++i) {
      distance += sq(center[i] - points[o * dim + i]);
      dst[i] = center[i];
    }
  }
  return distance;
}

double Projector::project_a(std::span<const double> in, std::span<double> out,
                            Execution exec) const {
  const TreeLayout& lay = *layout_;
  if (in.size() != lay.dimension() || out.size() != lay.dimension()) {
    throw std::invalid_argument("vector does not match the layout");
  }
  const int trees = lay.num_trees();
  const int words = static_cast<int>(lay.words().size());
  std::vector<double> tree_dist(trees, 0.0), word_dist(words, 0.0);
  if (exec == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (int t = 0; t < trees; ++t) tree_dist[t] = project_layers(t, in, out);
#pragma omp parallel for schedule(dynamic, 16)
    for (int w = 0; w < words; ++w) word_dist[w] = project_word(w, in, out);
  } else {
    for (int t = 0; t < trees; ++t) tree_dist[t] = project_layers(t, in, out);
    for (int w = 0; w < words; ++w) word_dist[w] = project_word(w, in, out);
  }
  double total = 0.0;
  for (double d : tree_dist) total += d;
  for (double d : word_dist) total += d;
  return total;
}

void Projector::project_tree_b(int tree, std::span<const double> in,
                               std::span<double> out) const {
  const TreeLayout& lay = *layout_;
  const int dim = algebra_.code_length();
  const int n = algebra_.bits_per_byte;
  const int bytes = algebra_.num_bytes;
  const int center = algebra_.central_bit();
  const int length = lay.tree_length(tree);
  std::fill_n(out.data() + lay.offset(tree, 1, 0, Replica::kUp), dim, 0.0);
  for (int l = 2; l <= length; ++l) {
    for (int j = 0; j < l; ++j) {
      const double* up = in.data() + lay.offset(tree, l, j, Replica::kUp);
      const double* down = in.data() + lay.offset(tree, l, j, Replica::kDown);
      double* oup = out.data() + lay.offset(tree, l, j, Replica::kUp);
      double* odown = out.data() + lay.offset(tree, l, j, Replica::kDown);
      if (l == length) {
        const auto& seed = seed_[lay.leaf_word(tree, j)];
        if (!seed.empty()) {
          std::copy(seed.begin(), seed.end(), oup);
          std::copy(seed.begin(), seed.end(), odown);
          continue;
        }
      }
      for (int k = 0; k < dim; ++k) oup[k] = 0.5 * (up[k] + down[k]);
      if (!config_.relax_multi_base && j != l - 1) {
        double s = 0.0;
        for (int b = 0; b < bytes; ++b) s += oup[b * n + center];
        const double shift = (1.0 - s) / bytes;
        for (int b = 0; b < bytes; ++b) oup[b * n + center] += shift;
      }
      std::copy_n(oup, dim, odown);
    }
  }
}

void Projector::project_b(std::span<const double> in, std::span<double> out,
                          Execution exec) const {
  const TreeLayout& lay = *layout_;
  if (in.size() != lay.dimension() || out.size() != lay.dimension()) {
    throw std::invalid_argument("vector does not match the layout");
  }
  const int trees = lay.num_trees();
  if (exec == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (int t = 0; t < trees; ++t) project_tree_b(t, in, out);
  } else {
    for (int t = 0; t < trees; ++t) project_tree_b(t, in, out);
  }
}

}  // namespace lge
