#include "lge/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace lge {

std::string Sentence::text() const {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

namespace {

std::map<std::string, long> count_words(const std::vector<Sentence>& sentences) {
  std::map<std::string, long> counts;
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) ++counts[t];
  }
  return counts;
}

}  // namespace

Corpus Corpus::from_sentences(std::vector<Sentence> sentences) {
  Corpus c;
  c.word_counts = count_words(sentences);
  c.sentences = std::move(sentences);
  return c;
}

Corpus Corpus::from_lines(const std::vector<std::string>& lines) {
  std::vector<Sentence> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto tokens = tokenize(lines[i]);
    if (tokens.empty()) continue;
    out.push_back(Sentence{std::move(tokens), static_cast<int>(i), 0.0});
  }
  return from_sentences(std::move(out));
}

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  std::string t;
  while (in >> t) tokens.push_back(std::move(t));
  return tokens;
}

double median(std::vector<long> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return static_cast<double>(values[n / 2]);
  return 0.5 * (static_cast<double>(values[n / 2 - 1]) + static_cast<double>(values[n / 2]));
}

Corpus prepare_corpus(const std::vector<std::string>& lines, const PrepareOptions& options) {
  std::vector<Sentence> kept;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (!options.redaction_marker.empty() &&
        line.find(options.redaction_marker) != std::string::npos) {
      continue;
    }
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (!options.terminals.contains(tokens.back())) continue;
    const bool dropped = std::ranges::any_of(
        tokens, [&](const std::string& t) { return options.drop_tokens.contains(t); });
    if (dropped) continue;
    const int words = static_cast<int>(tokens.size()) - 1;
    if (words < options.min_words) continue;
    kept.push_back(Sentence{std::move(tokens), static_cast<int>(i), 0.0});
  }
  if (kept.empty()) throw EmptyCorpusError("no sentences left after filtering");

  Corpus corpus;
  corpus.word_counts = count_words(kept);
  for (auto& s : kept) {
    std::vector<long> counts;
    for (std::size_t j = 0; j + 1 < s.tokens.size(); ++j) {
      counts.push_back(corpus.word_counts.at(s.tokens[j]));
    }
    s.score = median(std::move(counts));
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const Sentence& a, const Sentence& b) { return a.score > b.score; });
  if (options.take > 0 && kept.size() > options.take) kept.resize(options.take);
  corpus.sentences = std::move(kept);
  return corpus;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

void write_sentences(const std::string& path, const std::vector<Sentence>& sentences) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& s : sentences) out << s.text() << '\n';
}

Corpus read_corpus(const std::string& path) {
  Corpus c = Corpus::from_lines(read_lines(path));
  if (c.empty()) throw EmptyCorpusError(path + " contains no sentences");
  return c;
}

std::vector<Sentence> add_substitution_noise(std::vector<Sentence> sentences, double rate,
                                             std::uint64_t seed) {
  std::set<std::string> vocab_set;
  for (const auto& s : sentences) {
    for (std::size_t j = 0; j + 1 < s.tokens.size(); ++j) vocab_set.insert(s.tokens[j]);
  }
  const std::vector<std::string> vocab(vocab_set.begin(), vocab_set.end());
  if (vocab.empty()) return sentences;
  std::mt19937_64 rng(seed);
  for (auto& s : sentences) {
    for (std::size_t j = 0; j + 1 < s.tokens.size(); ++j) {
      if (uniform01(rng) < rate) s.tokens[j] = vocab[uniform_index(rng, vocab.size())];
    }
  }
  return sentences;
}

}  // namespace lge
