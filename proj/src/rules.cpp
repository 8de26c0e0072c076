#include "lge/rules.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <sstream>

namespace lge {

namespace {

RuleKey key_at(const std::vector<CategoryCode>& seq, std::size_t i) {
  RuleKey k;
  k.code = seq[i];
  if (i > 0) k.left = seq[i - 1];
  if (i + 1 < seq.size()) k.right = seq[i + 1];
  return k;
}

void add_branch(std::vector<BranchOption>& options, const BranchRecord& b) {
  for (auto& o : options) {
    if (o.left == b.left && o.right == b.right) {
      ++o.count;
      return;
    }
  }
  options.push_back(BranchOption{b.left, b.right, 1, b.flipped()});
}

void add_leaf(std::vector<LeafOption>& options, const std::string& word) {
  for (auto& o : options) {
    if (o.word == word) {
      ++o.count;
      return;
    }
  }
  options.push_back(LeafOption{word, 1});
}

// Walks a parsed tree from the identity, calling on_branch(key, record)
// before each event and on_leaf(key, word) for every leaf.
template <typename OnBranch, typename OnLeaf>
void walk_tree(const TreeRecord& tree, const AlgebraConfig& algebra, OnBranch on_branch,
               OnLeaf on_leaf) {
  std::vector<CategoryCode> seq{CategoryCode::identity(algebra)};
  for (const auto& b : tree.branches) {
    const std::size_t p = static_cast<std::size_t>(b.position);
    on_branch(key_at(seq, p), b);
    seq[p] = b.left;
    seq.insert(seq.begin() + p + 1, b.right);
  }
  for (std::size_t i = 0; i < seq.size(); ++i) on_leaf(key_at(seq, i), tree.tokens[i]);
}

template <typename Options>
long total_count(const Options& options) {
  long n = 0;
  for (const auto& o : options) n += o.count;
  return n;
}

// Index drawn with probability proportional to weights; -1 if all zero.
int draw(const std::vector<double>& weights, std::mt19937_64& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (total <= 0.0) return -1;
  double r = uniform01(rng) * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    if (r < weights[i]) return static_cast<int>(i);
    r -= weights[i];
  }
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return static_cast<int>(i);
  }
  return -1;
}

bool one_flip_valid(const CategoryCode& child, const CategoryCode& left, const CategoryCode& right) {
  for (int s = 0; s < 2; ++s) {
    CategoryCode probe = s == 0 ? left : right;
    for (int i = 0; i < probe.size(); ++i) {
      probe.set_bit(i, probe.bit(i) ^ 1);
      const auto c = s == 0 ? try_combine(probe, right) : try_combine(left, probe);
      probe.set_bit(i, probe.bit(i) ^ 1);
      if (c && *c == child) return true;
    }
  }
  return false;
}

}  // namespace

const std::vector<BranchOption>* RuleSet::branches(const RuleKey& key, RuleMode mode) const {
  if (mode == RuleMode::kFree) {
    auto it = free_branch_rules.find(key.code);
    return it == free_branch_rules.end() ? nullptr : &it->second;
  }
  auto it = branch_rules.find(key);
  return it == branch_rules.end() ? nullptr : &it->second;
}

const std::vector<LeafOption>* RuleSet::leaves(const RuleKey& key, RuleMode mode) const {
  if (mode == RuleMode::kFree) {
    auto it = free_leaf_rules.find(key.code);
    return it == free_leaf_rules.end() ? nullptr : &it->second;
  }
  auto it = leaf_rules.find(key);
  return it == leaf_rules.end() ? nullptr : &it->second;
}

long RuleSet::leaf_total(const RuleKey& key, RuleMode mode) const {
  const auto* opts = leaves(key, mode);
  return opts ? total_count(*opts) : 0;
}

RuleSet extract_rules(const Solution& solution) {
  RuleSet rules;
  rules.algebra = solution.algebra;
  bool any = false;
  for (const auto& tree : solution.trees) {
    if (!tree.parsed) continue;
    any = true;
    walk_tree(
        tree, solution.algebra,
        [&](const RuleKey& key, const BranchRecord& b) {
          add_branch(rules.branch_rules[key], b);
          add_branch(rules.free_branch_rules[key.code], b);
        },
        [&](const RuleKey& key, const std::string& word) {
          add_leaf(rules.leaf_rules[key], word);
          add_leaf(rules.free_leaf_rules[key.code], word);
        });
  }
  if (!any) throw NoParsedTreesError("solution has no parsed trees");
  return rules;
}

namespace {

struct Node {
  CategoryCode code;
  bool frozen = false;
};

std::optional<Generated> try_generate(const RuleSet& rules, const GenConfig& gen,
                                      std::mt19937_64& rng) {
  Generated out;
  std::vector<Node> nodes{Node{CategoryCode::identity(rules.algebra), false}};
  auto codes = [&]() {
    std::vector<CategoryCode> c;
    c.reserve(nodes.size());
    for (const auto& n : nodes) c.push_back(n.code);
    return c;
  };
  auto weight = [&](long count) {
    if (count <= 0) return 0.0;
    return gen.weighting == Weighting::kCounts ? static_cast<double>(count) : 1.0;
  };

  // Phase 1: structure.
  while (true) {
    std::vector<int> open;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!nodes[i].frozen) open.push_back(static_cast<int>(i));
    }
    if (open.empty()) break;
    const int i = open[uniform_index(rng, open.size())];
    if (static_cast<int>(nodes.size()) >= gen.max_tokens) {
      nodes[i].frozen = true;
      continue;
    }
    const RuleKey key = key_at(codes(), i);
    RuleMode mode = gen.mode;
    const std::vector<BranchOption>* branch = rules.branches(key, mode);
    long stop = rules.leaf_total(key, mode);
    bool fallback = false;
    if ((!branch || branch->empty()) && stop == 0 && mode == RuleMode::kContext) {
      // Unseen context: use the code's context-free options.
      mode = RuleMode::kFree;
      fallback = true;
      branch = rules.branches(key, mode);
      stop = rules.leaf_total(key, mode);
    }
    std::vector<double> weights;
    if (branch) {
      for (const auto& o : *branch) weights.push_back(weight(o.count));
    }
    weights.push_back(weight(stop));
    const int pick = draw(weights, rng);
    if (pick < 0) return std::nullopt;
    if (pick == static_cast<int>(weights.size()) - 1) {
      nodes[i].frozen = true;
      continue;
    }
    const BranchOption& o = (*branch)[pick];
    DerivationStep step;
    step.kind = DerivationStep::Kind::kBranch;
    step.position = i;
    step.key = key;
    step.left = o.left;
    step.right = o.right;
    step.flipped = o.flipped;
    step.fallback = fallback;
    out.trace.push_back(std::move(step));
    nodes[i] = Node{o.left, false};
    nodes.insert(nodes.begin() + i + 1, Node{o.right, false});
  }

  // Phase 2: words, against the final neighbors.
  out.codes = codes();
  for (std::size_t i = 0; i < out.codes.size(); ++i) {
    const RuleKey key = key_at(out.codes, i);
    const std::vector<LeafOption>* opts = rules.leaves(key, gen.mode);
    bool fallback = false;
    if (!opts || opts->empty()) {
      opts = rules.leaves(key, RuleMode::kFree);
      fallback = true;
    }
    if (!opts || opts->empty()) return std::nullopt;
    std::vector<double> weights;
    for (const auto& o : *opts) weights.push_back(weight(o.count));
    const int pick = draw(weights, rng);
    if (pick < 0) return std::nullopt;
    DerivationStep step;
    step.kind = DerivationStep::Kind::kLeaf;
    step.position = static_cast<int>(i);
    step.key = key;
    step.word = (*opts)[pick].word;
    step.fallback = fallback && gen.mode == RuleMode::kContext;
    out.sentence.tokens.push_back(step.word);
    out.trace.push_back(std::move(step));
  }
  return out;
}

}  // namespace

Generated generate_sentence(const RuleSet& rules, const GenConfig& gen) {
  return generate_sentences(rules, gen, 1).front();
}

std::vector<Generated> generate_sentences(const RuleSet& rules, const GenConfig& gen, int count) {
  if (gen.max_tokens < 2) throw std::invalid_argument("max_tokens must be >= 2");
  if (rules.branch_rules.empty() && rules.free_branch_rules.empty()) {
    throw GenerationFailedError("rule set has no branch rules");
  }
  std::mt19937_64 rng(gen.rng_seed);
  std::vector<Generated> out;
  for (int s = 0; s < count; ++s) {
    std::optional<Generated> g;
    for (int attempt = 0; attempt <= gen.max_retries && !g; ++attempt) g = try_generate(rules, gen, rng);
    if (!g) {
      throw GenerationFailedError("no sentence after " + std::to_string(gen.max_retries) +
                                  " retries");
    }
    g->sentence.source_index = s;
    out.push_back(std::move(*g));
  }
  return out;
}

std::string replay_derivation(const Generated& g, const AlgebraConfig& algebra) {
  std::vector<CategoryCode> seq{CategoryCode::identity(algebra)};
  for (const auto& step : g.trace) {
    if (step.kind != DerivationStep::Kind::kBranch) continue;
    const std::size_t p = static_cast<std::size_t>(step.position);
    if (p >= seq.size() || seq[p] != step.key.code) return "trace does not follow the sequence";
    const auto child = try_combine(step.left, step.right);
    const bool exact = child && *child == seq[p];
    if (!exact && !(step.flipped && one_flip_valid(seq[p], step.left, step.right))) {
      return "branch " + step.left.to_string() + " . " + step.right.to_string() +
             " does not produce " + seq[p].to_string();
    }
    seq[p] = step.left;
    seq.insert(seq.begin() + p + 1, step.right);
  }
  if (seq != g.codes) return "final codes differ from the replayed sequence";
  if (seq.size() != g.sentence.tokens.size()) return "token count differs from leaf count";
  return {};
}

std::string format_derivation(const Generated& g, const AlgebraConfig& algebra) {
  struct TreeNode {
    CategoryCode code;
    int left = -1, right = -1;
    std::string word;
    bool flipped = false;
  };
  std::vector<TreeNode> tree{TreeNode{CategoryCode::identity(algebra), -1, -1, {}, false}};
  std::vector<int> seq{0};
  for (const auto& step : g.trace) {
    if (step.kind == DerivationStep::Kind::kBranch) {
      const int parent = seq[step.position];
      tree.push_back(TreeNode{step.left, -1, -1, {}, false});
      tree.push_back(TreeNode{step.right, -1, -1, {}, false});
      tree[parent].left = static_cast<int>(tree.size()) - 2;
      tree[parent].right = static_cast<int>(tree.size()) - 1;
      tree[parent].flipped = step.flipped;
      seq[step.position] = tree[parent].left;
      seq.insert(seq.begin() + step.position + 1, tree[parent].right);
    } else {
      tree[seq[step.position]].word = step.word;
    }
  }
  std::ostringstream out;
  std::function<void(int, int)> print = [&](int id, int depth) {
    const TreeNode& n = tree[id];
    out << std::string(2 * depth, ' ') << n.code.to_string() << "  [" << decode_expression(n.code, algebra) << "]";
    if (!n.word.empty()) out << "  " << n.word;
    if (n.flipped) out << "  (bit flip)";
    out << '\n';
    if (n.left >= 0) {
      print(n.left, depth + 1);
      print(n.right, depth + 1);
    }
  };
  print(0, 0);
  return out.str();
}

PerplexityReport perplexity(const RuleSet& rules, const Solution& solution, RuleMode mode) {
  double log_b = 0.0, log_l = 0.0;
  long nb = 0, nl = 0;
  bool any = false;
  for (const auto& tree : solution.trees) {
    if (!tree.parsed) continue;
    any = true;
    walk_tree(
        tree, solution.algebra,
        [&](const RuleKey& key, const BranchRecord& b) {
          const auto* opts = rules.branches(key, mode);
          if (!opts) throw std::invalid_argument("rules do not cover the solution");
          long hit = 0;
          for (const auto& o : *opts) {
            if (o.left == b.left && o.right == b.right) hit = o.count;
          }
          if (hit == 0) throw std::invalid_argument("rules do not cover the solution");
          log_b += std::log(static_cast<double>(hit) / static_cast<double>(total_count(*opts)));
          ++nb;
        },
        [&](const RuleKey& key, const std::string& word) {
          const auto* opts = rules.leaves(key, mode);
          if (!opts) throw std::invalid_argument("rules do not cover the solution");
          long hit = 0;
          for (const auto& o : *opts) {
            if (o.word == word) hit = o.count;
          }
          if (hit == 0) throw std::invalid_argument("rules do not cover the solution");
          log_l += std::log(static_cast<double>(hit) / static_cast<double>(total_count(*opts)));
          ++nl;
        });
  }
  if (!any) throw NoParsedTreesError("solution has no parsed trees");
  PerplexityReport r;
  r.num_branches = nb;
  r.num_leaves = nl;
  r.branch = nb > 0 ? std::exp(-log_b / static_cast<double>(nb)) : 1.0;
  r.leaf = nl > 0 ? std::exp(-log_l / static_cast<double>(nl)) : 1.0;
  r.total = std::sqrt(r.branch * r.leaf);
  return r;
}

double reproduction_rate(const std::vector<Sentence>& generated, const Corpus& training) {
  if (generated.empty()) throw std::invalid_argument("no generated sentences");
  std::set<std::vector<std::string>> seen;
  for (const auto& s : training.sentences) seen.insert(s.tokens);
  long hits = 0;
  for (const auto& s : generated) hits += seen.contains(s.tokens) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(generated.size());
}

}  // namespace lge
