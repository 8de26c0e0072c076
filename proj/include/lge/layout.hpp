#pragma once

// Placement of every replica of every node of every parse tree inside the
// flat search vector.
//
// A sentence of T tokens has layers 1..T; layer l holds l nodes and layer T
// holds the leaves. Layer 1 (the root) has a single replica; every other
// node has an "up" replica, constrained with the layer above it (or the word
// constraint, for leaves), and a "down" replica, constrained with the layer
// below. Trees are stored in corpus order, layers root first, nodes left to
// right, up before down.

#include <cstddef>
#include <string>
#include <vector>

#include "lge/algebra.hpp"
#include "lge/corpus.hpp"

namespace lge {

enum class Replica { kUp = 0, kDown = 1 };

struct LeafRef {
  int tree;
  int position;
};

class TreeLayout {
 public:
  TreeLayout(const Corpus& corpus, const AlgebraConfig& algebra);

  int num_trees() const { return static_cast<int>(tree_length_.size()); }
  int tree_length(int tree) const { return tree_length_[tree]; }
  int code_length() const { return code_length_; }
  int num_bytes() const { return num_bytes_; }
  int bits_per_byte() const { return bits_per_byte_; }

  // Number of category values (replicas) in one tree of T tokens.
  static std::size_t replicas_in_tree(int tokens) {
    const std::size_t t = static_cast<std::size_t>(tokens);
    return t * t + t - 1;
  }

  std::size_t num_values() const { return num_values_; }
  std::size_t dimension() const { return num_values_ * code_length_; }

  // Index of a category value; layer is 1-based, node 0-based. The root's
  // only replica is addressed as kUp.
  std::size_t value_index(int tree, int layer, int node, Replica replica) const {
    if (layer == 1) return tree_value_offset_[tree];
    const std::size_t l = static_cast<std::size_t>(layer);
    return tree_value_offset_[tree] + (l * l - l - 1) + 2 * static_cast<std::size_t>(node) +
           static_cast<std::size_t>(replica);
  }
  // Offset of the first coordinate of that value in the search vector.
  std::size_t offset(int tree, int layer, int node, Replica replica) const {
    return value_index(tree, layer, node, replica) * code_length_;
  }
  std::size_t tree_offset(int tree) const { return tree_value_offset_[tree] * code_length_; }
  std::size_t tree_dimension(int tree) const {
    return replicas_in_tree(tree_length_[tree]) * code_length_;
  }

  const std::vector<std::string>& words() const { return words_; }
  int word_id(const std::string& word) const;  // -1 when absent
  int leaf_word(int tree, int position) const { return leaf_word_[tree][position]; }
  const std::vector<LeafRef>& occurrences(int word) const { return occurrences_[word]; }

 private:
  int num_bytes_;
  int bits_per_byte_;
  int code_length_;
  std::vector<int> tree_length_;
  std::vector<std::size_t> tree_value_offset_;
  std::size_t num_values_ = 0;
  std::vector<std::string> words_;
  std::vector<std::vector<int>> leaf_word_;
  std::vector<std::vector<LeafRef>> occurrences_;
};

}  // namespace lge
