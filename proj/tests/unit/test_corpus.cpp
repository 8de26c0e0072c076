#include <algorithm>
#include <set>

#include "doctest.h"
#include "lge/corpus.hpp"
#include "lge/synthetic.hpp"

using namespace lge;

namespace {

const std::vector<std::string> kToy{
    "a bird sings loud .",
    "the dog runs home .",
    "Yes , sir , the dog runs .",
    "the dog sleeps .",
    "the cat runs home today .",
    "redacted @ @ @ words here .",
    "the dog runs home",
    "the dog runs away !",
};

}  // namespace

TEST_CASE("tokenize splits on whitespace and keeps case") {
  CHECK(tokenize("  I know\tthe feeling . ") ==
        std::vector<std::string>{"I", "know", "the", "feeling", "."});
  CHECK(tokenize("").empty());
}

TEST_CASE("median") {
  CHECK(median({3}) == 3.0);
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({1, 2, 3, 3}) == 2.5);
  CHECK_THROWS(median({}));
}

TEST_CASE("prepare_corpus filters, scores and orders the toy corpus") {
  const Corpus c = prepare_corpus(kToy);
  REQUIRE(c.size() == 4);
  // Counts over the survivors, by hand: the 3, dog 2, runs 3, home 2, . 3.
  CHECK(c.word_counts.at("the") == 3);
  CHECK(c.word_counts.at("dog") == 2);
  CHECK(c.word_counts.at("home") == 2);
  CHECK(c.word_counts.at(".") == 3);
  CHECK_FALSE(c.word_counts.contains("sleeps"));
  // Medians: line 1 {3,2,3,2} -> 2.5, line 7 {3,2,3,1} -> 2.5,
  // line 4 {3,1,3,2,1} -> 2, line 0 {1,1,1,1} -> 1.
  std::vector<int> order;
  std::vector<double> scores;
  for (const auto& s : c.sentences) {
    order.push_back(s.source_index);
    scores.push_back(s.score);
  }
  CHECK(order == std::vector<int>{1, 7, 4, 0});
  CHECK(scores == std::vector<double>{2.5, 2.5, 2.0, 1.0});
}

TEST_CASE("prepare_corpus options") {
  PrepareOptions o;
  o.take = 2;
  CHECK(prepare_corpus(kToy, o).size() == 2);
  o.take = 0;
  o.min_words = 3;
  const Corpus c = prepare_corpus(kToy, o);
  CHECK(std::ranges::any_of(c.sentences, [](const Sentence& s) { return s.text() == "the dog sleeps ."; }));
  o.redaction_marker = "#";
  CHECK(prepare_corpus(kToy, o).size() == 6);
  CHECK_THROWS_AS(prepare_corpus({"Yes , sir .", "no"}), EmptyCorpusError);
  CHECK(prepare_corpus({"I know the feeling ."}).sentences.front().tokens ==
        std::vector<std::string>{"I", "know", "the", "feeling", "."});
}

TEST_CASE("prepare_corpus invariants on generated text") {
  auto sentences = synth_generate(SyntheticGrammar::standard(), 300, 5);
  std::vector<std::string> lines;
  for (const auto& s : sentences) lines.push_back(s.text());
  lines.push_back("one , two three four .");
  const Corpus c = prepare_corpus(lines);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& s = c.sentences[i];
    CHECK(std::ranges::find(s.tokens, ",") == s.tokens.end());
    CHECK(s.tokens.size() - 1 >= 4);
    CHECK(s.text() == lines[s.source_index]);
    if (i > 0) CHECK(c.sentences[i - 1].score >= s.score);
  }
}

TEST_CASE("noise substitution") {
  const auto clean = synth_generate(SyntheticGrammar::standard(), 200, 3);
  const auto noisy = add_substitution_noise(clean, 0.05, 9);
  REQUIRE(noisy.size() == clean.size());
  long changed = 0, total = 0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    REQUIRE(noisy[i].tokens.size() == clean[i].tokens.size());
    CHECK(noisy[i].tokens.back() == clean[i].tokens.back());
    for (std::size_t j = 0; j + 1 < clean[i].tokens.size(); ++j) {
      ++total;
      changed += noisy[i].tokens[j] != clean[i].tokens[j];
    }
  }
  CHECK(changed > 0);
  CHECK(changed < total / 10);
  CHECK(add_substitution_noise(clean, 0.05, 9) == noisy);
  CHECK(add_substitution_noise(clean, 0.0, 9) == clean);
}

TEST_CASE("grammar text parses and validates") {
  const auto g = SyntheticGrammar::standard();
  CHECK_NOTHROW(g.validate());
  const auto t = g.terminals();
  for (const char* w : {"she", "they", "her", "a", "all", "happy", "sad", "until", "beside", "."}) {
    CHECK(std::ranges::find(t, std::string(w)) != t.end());
  }
  CHECK(std::ranges::find(t, std::string("them")) == t.end());
  CHECK_THROWS(SyntheticGrammar::parse("1 -> A .\nA -> A x").validate());
}

TEST_CASE("generation is deterministic and recognizable") {
  const auto g = SyntheticGrammar::standard();
  const auto a = synth_generate(g, 500, 11);
  CHECK(a == synth_generate(g, 500, 11));
  CHECK(a != synth_generate(g, 500, 12));
  SyntheticRecognizer rec;
  bool saw_he_speaks = false;
  for (const auto& s : a) {
    const auto r = rec.recognize(s);
    CHECK_MESSAGE(r.accepted, s.text());
    saw_he_speaks |= s.text() == "he speaks .";
  }
  const auto more = synth_generate(g, 5000, 1);
  for (const auto& s : more) saw_he_speaks |= s.text() == "he speaks .";
  CHECK(saw_he_speaks);
}

TEST_CASE("depth cap") {
  SynthOptions o;
  o.max_depth = 1;
  o.max_retries = 0;
  const auto g = SyntheticGrammar::parse("1 -> A .\nA -> x A | x");
  CHECK_NOTHROW(synth_generate(g, 1, 0, o));
  const auto deep = SyntheticGrammar::parse("1 -> A .\nA -> x A");
  CHECK_THROWS_AS(synth_generate(deep, 1, 0, o), std::exception);
}

TEST_CASE("recognizer on example sentences") {
  SyntheticRecognizer rec;
  for (const char* s : {"they jump until a human sits .", "all bears near a bear sit .", "he speaks .",
                        "all dogs near some happy bears avoid a bear .",
                        "he jumps while all bears seldom speak .", "all humans seldom run .",
                        "they always see some sad dogs while it speaks .",
                        "some happy bears jump but the bear sits .",
                        "a bear always speaks until he follows all humans .", "they hear they ."}) {
    CHECK_MESSAGE(rec.recognize(tokenize(s)).accepted, s);
  }
  auto reason = [&](const char* s) { return rec.recognize(tokenize(s)).reason; };
  CHECK(reason("they always runs .") == Violation::kSubjectVerbNumber);
  CHECK(reason("a humans jump .") == Violation::kDeterminerNounNumber);
  CHECK(reason("her runs .") == Violation::kObjectPronounAsSubject);
  CHECK(reason("he sees she .") == Violation::kSubjectPronounAsObject);
  CHECK(reason("he flies .") == Violation::kUnknownWord);
  CHECK(reason("he runs") == Violation::kMissingTerminal);
  CHECK(reason("runs he .") == Violation::kStructure);
  const auto both = rec.recognize(tokenize("him sees she ."));
  CHECK_FALSE(both.accepted);
  CHECK(std::ranges::find(both.violations, Violation::kObjectPronounAsSubject) != both.violations.end());
  CHECK(std::ranges::find(both.violations, Violation::kSubjectPronounAsObject) != both.violations.end());
}
