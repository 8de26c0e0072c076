#pragma once

// The toy declarative grammar used as a controlled test bed: a sentence
// generator and an exact recognizer that explains rejections.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lge/corpus.hpp"

namespace lge {

// Rules are written with number variables: a symbol suffixed "_x" takes the
// number (s or p) chosen for its alternative, so "Subj_x VP_x" means the
// subject and verb phrase agree. A left-hand side ending in "_x" stands for
// both the singular and plural rule. Symbols without rules are terminals.
struct SyntheticGrammar {
  std::string start = "1";
  std::map<std::string, std::vector<std::vector<std::string>>> rules;

  static SyntheticGrammar standard();
  // Parses "LHS -> a b | c d" lines; blank lines and '#' comments skipped.
  static SyntheticGrammar parse(const std::string& text);

  // Grammar with every "_x" template instantiated as "_s" and "_p".
  SyntheticGrammar expanded() const;
  bool is_nonterminal(const std::string& symbol) const;
  std::vector<std::string> terminals() const;

  // Throws std::invalid_argument when a reachable nonterminal cannot
  // terminate.
  void validate() const;
};

class DepthExceededError : public std::runtime_error {
 public:
  explicit DepthExceededError(const std::string& what) : std::runtime_error(what) {}
};

struct SynthOptions {
  // Maximum nesting of one nonterminal inside itself.
  int max_depth = 4;
  int max_retries = 50;
};

std::vector<Sentence> synth_generate(const SyntheticGrammar& grammar, int count,
                                     std::uint64_t rng_seed, const SynthOptions& options = {});

enum class Violation {
  kNone,
  kUnknownWord,
  kMissingTerminal,
  kSubjectVerbNumber,
  kDeterminerNounNumber,
  kObjectPronounAsSubject,
  kSubjectPronounAsObject,
  kStructure,
};

const char* violation_name(Violation v);

struct Recognition {
  bool accepted = false;
  // First violated requirement; kNone when accepted.
  Violation reason = Violation::kNone;
  // Every requirement whose relaxation is needed for acceptance.
  std::vector<Violation> violations;
  std::string detail;
};

// Exact membership test against the standard grammar's language, with a
// diagnosis of what a rejected sentence gets wrong.
class SyntheticRecognizer {
 public:
  SyntheticRecognizer();
  Recognition recognize(const Sentence& sentence) const;
  Recognition recognize(const std::vector<std::string>& tokens) const;

  // Membership only, for an arbitrary (already expanded) grammar.
  static bool accepts(const SyntheticGrammar& expanded, const std::vector<std::string>& tokens);

 private:
  SyntheticGrammar gold_;
  std::vector<std::pair<Violation, std::string>> relaxations_;  // (kind, extra rules)
  std::vector<std::string> vocabulary_;
  SyntheticGrammar with_relaxations(const std::vector<std::size_t>& which) const;
};

Recognition synth_recognize(const SyntheticGrammar& grammar, const Sentence& sentence);

}  // namespace lge
