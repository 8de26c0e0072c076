#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lge/algebra.hpp"
#include "lge/corpus.hpp"
#include "lge/solver.hpp"

namespace lge {

// One branching event: node `position` (0-based) of layer `layer` (1-based,
// root = 1) splits into nodes position, position+1 of the next layer.
struct BranchRecord {
  int layer = 0;
  int position = 0;
  CategoryCode child;
  CategoryCode left;
  CategoryCode right;
  // Set when the event is valid only after flipping one parent bit.
  int flip_side = -1;  // 0 left, 1 right
  int flip_bit = -1;

  bool flipped() const { return flip_side >= 0; }
  bool operator==(const BranchRecord&) const = default;
};

struct TreeRecord {
  std::vector<std::string> tokens;
  int source_index = 0;
  bool parsed = false;
  std::vector<BranchRecord> branches;  // root first
  std::vector<CategoryCode> leaves;
  std::string failure;  // empty when parsed

  bool operator==(const TreeRecord&) const = default;
};

struct PerplexityReport {
  double branch = 1.0;
  double leaf = 1.0;
  double total = 1.0;
  long num_branches = 0;
  long num_leaves = 0;

  bool operator==(const PerplexityReport&) const = default;
};

struct Solution {
  AlgebraConfig algebra;
  SolverConfig config;
  int restart = 0;
  std::uint64_t rng_seed = 0;
  std::map<std::string, std::vector<CategoryCode>> lexicon;
  std::vector<TreeRecord> trees;
  int iterations = 0;
  int min_change_iteration = -1;
  double min_change = 0.0;
  bool converged = false;
  std::optional<PerplexityReport> perplexity;
  std::string error_trace_csv;

  int parsed_count() const;
  int flip_count() const;
  bool operator==(const Solution&) const = default;
};

// Rounds P_B(2 P_A(v) - v) at the snapshot, builds the lexicon and checks
// every tree exactly.
Solution extract_solution(std::span<const double> snapshot, const Corpus& corpus,
                          const Projector& projector);

// Exact check of one tree given its per-layer node codes (layer l at index
// l-1). Fills branches and failure; returns parsed.
bool validate_tree(const std::vector<std::vector<CategoryCode>>& layers,
                   const std::vector<std::vector<CategoryCode>>& allowed_leaves, bool allow_flip,
                   TreeRecord& record);

class MismatchedCorporaError : public std::runtime_error {
 public:
  explicit MismatchedCorporaError(const std::string& what) : std::runtime_error(what) {}
};

struct FailureEntry {
  std::vector<std::string> tokens;
  int source_index = 0;
  int failures = 0;
};

// Sentences that failed in at least one solution, most frequent first (ties
// by source index).
std::vector<FailureEntry> failure_report(const std::vector<Solution>& solutions);

}  // namespace lge
