#include <algorithm>
#include <numeric>

#include "lge/kmeans.hpp"
#include "lge/solution.hpp"

namespace lge {

int Solution::parsed_count() const {
  return static_cast<int>(std::ranges::count_if(trees, [](const TreeRecord& t) { return t.parsed; }));
}

int Solution::flip_count() const {
  int n = 0;
  for (const auto& t : trees) {
    for (const auto& b : t.branches) n += b.flipped() ? 1 : 0;
  }
  return n;
}

namespace {

// Finds a single parent-bit flip that makes the event valid.
bool find_flip(const CategoryCode& child, const CategoryCode& left, const CategoryCode& right,
               int* side, int* bit) {
  for (int s = 0; s < 2; ++s) {
    CategoryCode probe = s == 0 ? left : right;
    for (int i = 0; i < probe.size(); ++i) {
      probe.set_bit(i, probe.bit(i) ^ 1);
      const auto c = s == 0 ? try_combine(probe, right) : try_combine(left, probe);
      probe.set_bit(i, probe.bit(i) ^ 1);
      if (c && *c == child) {
        *side = s;
        *bit = i;
        return true;
      }
    }
  }
  return false;
}

}  // namespace

bool validate_tree(const std::vector<std::vector<CategoryCode>>& layers,
                   const std::vector<std::vector<CategoryCode>>& allowed_leaves, bool allow_flip,
                   TreeRecord& record) {
  record.branches.clear();
  record.failure.clear();
  auto fail = [&](std::string why) {
    if (record.failure.empty()) record.failure = std::move(why);
  };
  const int length = static_cast<int>(layers.size());
  if (!is_identity(layers[0][0])) fail("root is not the identity");
  for (int l = 1; l < length; ++l) {
    const auto& lower = layers[l - 1];
    const auto& upper = layers[l];
    // mismatch_left[p]: nodes j < p with lower[j] != upper[j]; likewise on the right.
    std::vector<int> mismatch_left(l + 1, 0), mismatch_right(l + 1, 0);
    for (int j = 0; j < l; ++j) mismatch_left[j + 1] = mismatch_left[j] + (lower[j] != upper[j]);
    for (int j = l - 1; j >= 0; --j) {
      mismatch_right[j] = mismatch_right[j + 1] + (lower[j] != upper[j + 1]);
    }
    int chosen = -1;
    int flip_side = -1, flip_bit = -1;
    for (int pass = 0; pass < (allow_flip ? 2 : 1) && chosen < 0; ++pass) {
      for (int p = 0; p < l; ++p) {
        const int frame = mismatch_left[p] + mismatch_right[p + 1];
        const auto c = try_combine(upper[p], upper[p + 1]);
        const bool exact = c && *c == lower[p];
        if (frame == 0 && pass == 0 && exact) {
          chosen = p;
          break;
        }
        if (frame == 0 && pass == 1) {
          int s, b;
          if (find_flip(lower[p], upper[p], upper[p + 1], &s, &b)) {
            chosen = p;
            flip_side = s;
            flip_bit = b;
            break;
          }
        }
      }
    }
    int p = chosen;
    if (p < 0) {
      // Record the closest candidate for reporting.
      int best_score = 1 << 30;
      for (int q = 0; q < l; ++q) {
        const auto c = try_combine(upper[q], upper[q + 1]);
        const int score = mismatch_left[q] + mismatch_right[q + 1] + (c && *c == lower[q] ? 0 : 1);
        if (score < best_score) {
          best_score = score;
          p = q;
        }
      }
      fail("no valid branching event between layers " + std::to_string(l) + " and " +
           std::to_string(l + 1));
    }
    record.branches.push_back(
        BranchRecord{l, p, lower[p], upper[p], upper[p + 1], flip_side, flip_bit});
  }
  record.leaves = layers.back();
  for (int i = 0; i < static_cast<int>(record.leaves.size()); ++i) {
    const auto& allowed = allowed_leaves[i];
    if (std::ranges::find(allowed, record.leaves[i]) == allowed.end()) {
      fail("leaf " + std::to_string(i) + " does not carry a lexicon code");
    }
  }
  record.parsed = record.failure.empty();
  return record.parsed;
}

Solution extract_solution(std::span<const double> snapshot, const Corpus& corpus,
                          const Projector& projector) {
  const TreeLayout& layout = projector.layout();
  const SolverConfig& config = projector.config();
  const int dim = layout.code_length();
  const int bytes = layout.num_bytes();
  const int n = layout.bits_per_byte();
  if (snapshot.size() != layout.dimension()) {
    throw std::invalid_argument("snapshot does not match the layout");
  }

  std::vector<double> pa(snapshot.size()), w(snapshot.size());
  projector.project_a(snapshot, pa);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 2.0 * pa[i] - snapshot[i];
  std::vector<double> concurred(snapshot.size());
  projector.project_b(w, concurred);

  auto code_at = [&](std::size_t offset) {
    std::vector<std::uint8_t> bits(dim);
    for (int i = 0; i < dim; ++i) bits[i] = concurred[offset + i] > 0.5 ? 1 : 0;
    return CategoryCode(bytes, n, std::move(bits));
  };

  Solution sol;
  sol.algebra = projector.algebra();
  sol.config = config;
  sol.rng_seed = config.rng_seed;

  // Lexicon: cluster the rounded leaf codes of each word and take the
  // per-bit majority of each cluster.
  const auto& words = layout.words();
  std::vector<std::vector<CategoryCode>> word_codes(words.size());
  for (std::size_t w_id = 0; w_id < words.size(); ++w_id) {
    auto seed = config.seed_lexicon.find(words[w_id]);
    if (seed != config.seed_lexicon.end()) {
      word_codes[w_id] = {seed->second};
      continue;
    }
    const auto& occ = layout.occurrences(static_cast<int>(w_id));
    std::vector<double> points;
    points.reserve(occ.size() * dim);
    for (const auto& o : occ) {
      const auto code = code_at(layout.offset(o.tree, layout.tree_length(o.tree), o.position, Replica::kUp));
      for (auto b : code.bits()) points.push_back(b);
    }
    std::vector<double> centers;
    kmeans(points, occ.size(), dim, config.clusters_per_word, config.kmeans_iterations, centers);
    std::vector<CategoryCode> codes;
    for (std::size_t c = 0; c * dim < centers.size(); ++c) {
      std::vector<std::uint8_t> bits(dim);
      for (int i = 0; i < dim; ++i) bits[i] = centers[c * dim + i] > 0.5 ? 1 : 0;
      CategoryCode code(bytes, n, std::move(bits));
      if (std::ranges::find(codes, code) == codes.end()) codes.push_back(std::move(code));
    }
    word_codes[w_id] = std::move(codes);
  }
  for (std::size_t w_id = 0; w_id < words.size(); ++w_id) sol.lexicon[words[w_id]] = word_codes[w_id];

  for (int t = 0; t < layout.num_trees(); ++t) {
    const int length = layout.tree_length(t);
    std::vector<std::vector<CategoryCode>> layers(length);
    for (int l = 1; l <= length; ++l) {
      for (int j = 0; j < l; ++j) layers[l - 1].push_back(code_at(layout.offset(t, l, j, Replica::kUp)));
    }
    std::vector<std::vector<CategoryCode>> allowed(length);
    for (int i = 0; i < length; ++i) allowed[i] = word_codes[layout.leaf_word(t, i)];
    TreeRecord rec;
    rec.tokens = corpus.sentences[t].tokens;
    rec.source_index = corpus.sentences[t].source_index;
    validate_tree(layers, allowed, config.relax_bit_flip, rec);
    sol.trees.push_back(std::move(rec));
  }
  return sol;
}

std::vector<FailureEntry> failure_report(const std::vector<Solution>& solutions) {
  if (solutions.empty()) throw std::invalid_argument("failure report needs at least one solution");
  const auto& ref = solutions.front().trees;
  std::vector<FailureEntry> entries(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    entries[i].tokens = ref[i].tokens;
    entries[i].source_index = ref[i].source_index;
  }
  for (const auto& sol : solutions) {
    if (sol.trees.size() != ref.size()) {
      throw MismatchedCorporaError("solutions were trained on different corpora");
    }
    for (std::size_t i = 0; i < ref.size(); ++i) {
      if (sol.trees[i].tokens != ref[i].tokens) {
        throw MismatchedCorporaError("solutions were trained on different corpora");
      }
      if (!sol.trees[i].parsed) ++entries[i].failures;
    }
  }
  std::erase_if(entries, [](const FailureEntry& e) { return e.failures == 0; });
  std::stable_sort(entries.begin(), entries.end(), [](const FailureEntry& a, const FailureEntry& b) {
    if (a.failures != b.failures) return a.failures > b.failures;
    return a.source_index < b.source_index;
  });
  return entries;
}

}  // namespace lge
