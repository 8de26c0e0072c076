#pragma once

// Small hand-built instances shared by the unit and acceptance tests.

#include <random>
#include <vector>

#include "lge/algebra.hpp"
#include "lge/corpus.hpp"
#include "lge/layout.hpp"

namespace fixture {

// "Det N IV ." with the codes of the textbook encoding.
inline const char* kDet = "000 010 001";
inline const char* kNoun = "000 000 010";
inline const char* kIntransitive = "010 100 000";
inline const char* kPunct = "100 000 000";

inline lge::Corpus hand_corpus() {
  return lge::Corpus::from_sentences({lge::Sentence{{"det", "noun", "iv", "."}, 0, 0.0}});
}

// Layer codes of the hand tree, root first.
inline std::vector<std::vector<lge::CategoryCode>> hand_layers() {
  using lge::CategoryCode;
  const auto S = CategoryCode::parse("010 000 000");
  const auto NP = CategoryCode::parse("000 010 000");
  const auto det = CategoryCode::parse(kDet), noun = CategoryCode::parse(kNoun);
  const auto iv = CategoryCode::parse(kIntransitive), punct = CategoryCode::parse(kPunct);
  return {{CategoryCode(3, 3)}, {S, punct}, {NP, iv, punct}, {det, noun, iv, punct}};
}

// Writes every replica of every node of `tree` from `layers`.
inline void write_tree(const lge::TreeLayout& layout, int tree,
                       const std::vector<std::vector<lge::CategoryCode>>& layers,
                       std::vector<double>& v) {
  for (int l = 1; l <= static_cast<int>(layers.size()); ++l) {
    for (int j = 0; j < l; ++j) {
      for (auto r : {lge::Replica::kUp, lge::Replica::kDown}) {
        if (l == 1 && r == lge::Replica::kDown) continue;
        const std::size_t off = layout.offset(tree, l, j, r);
        const auto& code = layers[l - 1][j];
        for (int i = 0; i < code.size(); ++i) v[off + i] = code.bit(i);
      }
    }
  }
}

inline std::vector<double> random_values(std::size_t n, std::uint64_t seed, double lo = -0.5,
                                         double hi = 1.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace fixture
