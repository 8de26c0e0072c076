#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace lge {

class EmptyCorpusError : public std::runtime_error {
 public:
  explicit EmptyCorpusError(const std::string& what) : std::runtime_error(what) {}
};

struct Sentence {
  std::vector<std::string> tokens;
  int source_index = 0;
  double score = 0.0;

  std::string text() const;
  bool operator==(const Sentence& o) const {
    return tokens == o.tokens && source_index == o.source_index;
  }
};

struct Corpus {
  std::vector<Sentence> sentences;
  // Token -> occurrences over the sentences the counts were taken from
  // (the filtered set for prepare_corpus, all sentences otherwise).
  std::map<std::string, long> word_counts;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }

  // Sentences kept verbatim, in order; counts recomputed.
  static Corpus from_sentences(std::vector<Sentence> sentences);
  static Corpus from_lines(const std::vector<std::string>& lines);
};

struct PrepareOptions {
  int min_words = 4;
  std::set<std::string> drop_tokens{","};
  std::string redaction_marker = "@";
  std::set<std::string> terminals{".", "!", "?"};
  // 0 keeps every surviving sentence.
  std::size_t take = 0;
};

std::vector<std::string> tokenize(const std::string& line);

double median(std::vector<long> values);

// Filters, scores by median word frequency and sorts (descending, stable
// on source order). Throws EmptyCorpusError when nothing survives.
Corpus prepare_corpus(const std::vector<std::string>& lines, const PrepareOptions& options = {});

std::vector<std::string> read_lines(const std::string& path);
void write_sentences(const std::string& path, const std::vector<Sentence>& sentences);
Corpus read_corpus(const std::string& path);

// Replaces each non-final token with a uniformly drawn vocabulary word with
// probability `rate`. The vocabulary is every non-terminal token of the input.
std::vector<Sentence> add_substitution_noise(std::vector<Sentence> sentences, double rate,
                                             std::uint64_t seed);

// Portable draws so corpora and runs are reproducible across standard
// libraries.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) { return rng() % n; }
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace lge
