#include "lge/layout.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace lge {

TreeLayout::TreeLayout(const Corpus& corpus, const AlgebraConfig& algebra)
    : num_bytes_(algebra.num_bytes),
      bits_per_byte_(algebra.bits_per_byte),
      code_length_(algebra.code_length()) {
  algebra.validate();
  if (corpus.empty()) throw EmptyCorpusError("cannot lay out an empty corpus");
  std::map<std::string, int> ids;
  for (const auto& s : corpus.sentences) {
    for (const auto& t : s.tokens) ids.emplace(t, 0);
  }
  for (auto& [w, id] : ids) {
    id = static_cast<int>(words_.size());
    words_.push_back(w);
  }
  occurrences_.resize(words_.size());
  for (std::size_t t = 0; t < corpus.sentences.size(); ++t) {
    const auto& tokens = corpus.sentences[t].tokens;
    if (tokens.size() < 2) {
      throw std::invalid_argument("sentence " + std::to_string(t) + " has fewer than 2 tokens");
    }
    tree_length_.push_back(static_cast<int>(tokens.size()));
    tree_value_offset_.push_back(num_values_);
    num_values_ += replicas_in_tree(static_cast<int>(tokens.size()));
    std::vector<int> leaves;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const int id = ids.at(tokens[i]);
      leaves.push_back(id);
      occurrences_[id].push_back(LeafRef{static_cast<int>(t), static_cast<int>(i)});
    }
    leaf_word_.push_back(std::move(leaves));
  }
}

int TreeLayout::word_id(const std::string& word) const {
  auto it = std::ranges::lower_bound(words_, word);
  if (it == words_.end() || *it != word) return -1;
  return static_cast<int>(it - words_.begin());
}

}  // namespace lge
