#pragma once

// Production rules read off parsed trees, sentence generation from them, and
// the perplexity of the learned trees under the rules.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lge/algebra.hpp"
#include "lge/corpus.hpp"
#include "lge/solution.hpp"

namespace lge {

class NoParsedTreesError : public std::runtime_error {
 public:
  explicit NoParsedTreesError(const std::string& what) : std::runtime_error(what) {}
};

class GenerationFailedError : public std::runtime_error {
 public:
  explicit GenerationFailedError(const std::string& what) : std::runtime_error(what) {}
};

// A code with its neighbors in the current sequence; nullopt marks a
// sentence boundary.
struct RuleKey {
  CategoryCode code;
  std::optional<CategoryCode> left;
  std::optional<CategoryCode> right;

  auto operator<=>(const RuleKey&) const = default;
  bool operator==(const RuleKey&) const = default;
};

struct BranchOption {
  CategoryCode left;
  CategoryCode right;
  long count = 0;
  // The event only holds after a one-bit flip.
  bool flipped = false;
};

struct LeafOption {
  std::string word;
  long count = 0;
};

enum class RuleMode { kContext, kFree };
enum class Weighting { kCounts, kUniform };

struct RuleSet {
  AlgebraConfig algebra;
  std::map<RuleKey, std::vector<BranchOption>> branch_rules;
  std::map<RuleKey, std::vector<LeafOption>> leaf_rules;
  std::map<CategoryCode, std::vector<BranchOption>> free_branch_rules;
  std::map<CategoryCode, std::vector<LeafOption>> free_leaf_rules;

  const std::vector<BranchOption>* branches(const RuleKey& key, RuleMode mode) const;
  const std::vector<LeafOption>* leaves(const RuleKey& key, RuleMode mode) const;
  long leaf_total(const RuleKey& key, RuleMode mode) const;
};

// Only parsed trees contribute. Throws NoParsedTreesError.
RuleSet extract_rules(const Solution& solution);

struct GenConfig {
  RuleMode mode = RuleMode::kContext;
  Weighting weighting = Weighting::kCounts;
  int max_tokens = 30;
  int max_retries = 10;
  std::uint64_t rng_seed = 0;
};

struct DerivationStep {
  enum class Kind { kBranch, kLeaf };
  Kind kind = Kind::kBranch;
  // Index of the expanded node in the sequence at the time of the step
  // (branches), or the token position (leaves).
  int position = 0;
  RuleKey key;
  CategoryCode left;   // branches
  CategoryCode right;  // branches
  bool flipped = false;
  std::string word;    // leaves
  bool fallback = false;  // leaf chosen from context-free rules
};

struct Generated {
  Sentence sentence;
  std::vector<CategoryCode> codes;  // final code of every token
  std::vector<DerivationStep> trace;
};

// Draws one sentence with its own rng stream. Throws GenerationFailedError.
Generated generate_sentence(const RuleSet& rules, const GenConfig& gen);

// `count` sentences from one rng stream seeded by gen.rng_seed.
std::vector<Generated> generate_sentences(const RuleSet& rules, const GenConfig& gen, int count);

// Replays a derivation from the identity. Returns an empty string when every
// branch satisfies the algebra (or is a flagged one-bit flip), else a reason.
std::string replay_derivation(const Generated& g, const AlgebraConfig& algebra);

// Indented text tree of the derivation.
std::string format_derivation(const Generated& g, const AlgebraConfig& algebra);

PerplexityReport perplexity(const RuleSet& rules, const Solution& solution,
                            RuleMode mode = RuleMode::kContext);

double reproduction_rate(const std::vector<Sentence>& generated, const Corpus& training);

}  // namespace lge
