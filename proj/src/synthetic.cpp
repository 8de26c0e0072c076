#include "lge/synthetic.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace lge {

namespace {

// Det, Adj word lists and the VP/NP readings are reconstructions; the
// object pronoun list follows the published rule table verbatim.
constexpr const char* kStandardGrammar = R"(
1 -> S . | S Conj S .
S -> Subj_x VP_x | Subj_x Adv VP_x
Subj_s -> she | he | it | Det_s N_s | Det_s Adj N_s
Subj_p -> they | Det_p N_p | Det_p Adj N_p
VP_x -> IV_x | TV_x Obj
Obj -> her | him | it | they | Det_x N_x | Det_x Adj N_x
N_s -> human | dog | bear | N_s Prep NP
N_p -> humans | dogs | bears | N_p Prep NP
NP -> Det_x N_x | Det_x Adj N_x
IV_s -> runs | jumps | sits | speaks
IV_p -> run | jump | sit | speak
TV_s -> sees | hears | follows | avoids
TV_p -> see | hear | follow | avoid
Conj -> and | but | until | while
Adv -> always | often | seldom | never
Prep -> by | with | near | beside
Det_s -> a | the
Det_p -> all | some | the
Adj -> happy | hungry | sad
)";

struct Relaxation {
  Violation kind;
  const char* overrides;
};

const Relaxation kRelaxations[] = {
    {Violation::kSubjectVerbNumber,
     "S -> Subj_s VP_s | Subj_s VP_p | Subj_p VP_s | Subj_p VP_p | Subj_s Adv VP_s | "
     "Subj_s Adv VP_p | Subj_p Adv VP_s | Subj_p Adv VP_p"},
    {Violation::kDeterminerNounNumber,
     "Det_s -> a | the | all | some\nDet_p -> a | the | all | some"},
    {Violation::kObjectPronounAsSubject,
     "Subj_s -> she | he | it | her | him | Det_s N_s | Det_s Adj N_s\n"
     "Subj_p -> they | her | him | Det_p N_p | Det_p Adj N_p"},
    {Violation::kSubjectPronounAsObject,
     "Obj -> her | him | it | they | she | he | Det_x N_x | Det_x Adj N_x"},
};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string bind(const std::string& symbol, char number) {
  if (ends_with(symbol, "_x")) return symbol.substr(0, symbol.size() - 1) + number;
  return symbol;
}

bool has_variable(const std::vector<std::string>& alt) {
  return std::ranges::any_of(alt, [](const std::string& s) { return ends_with(s, "_x"); });
}

// Resolves a concrete nonterminal to its alternatives and the number bound
// by its left-hand side ('\0' when none).
const std::vector<std::vector<std::string>>* lookup(const SyntheticGrammar& g,
                                                    const std::string& symbol, char* bound) {
  *bound = '\0';
  if (auto it = g.rules.find(symbol); it != g.rules.end()) return &it->second;
  if (ends_with(symbol, "_s") || ends_with(symbol, "_p")) {
    const std::string templ = symbol.substr(0, symbol.size() - 1) + "x";
    if (auto it = g.rules.find(templ); it != g.rules.end()) {
      *bound = symbol.back();
      return &it->second;
    }
  }
  return nullptr;
}

// Compiled context-free grammar for Earley recognition.
struct Cfg {
  std::vector<std::string> names;
  std::unordered_map<std::string, int> ids;
  std::vector<int> lhs;
  std::vector<std::vector<int>> rhs;
  std::vector<std::vector<int>> rules_for;  // nonterminal id -> rule ids
  int start = 0;

  int id(const std::string& s) {
    auto [it, inserted] = ids.emplace(s, static_cast<int>(names.size()));
    if (inserted) {
      names.push_back(s);
      rules_for.emplace_back();
    }
    return it->second;
  }
};

Cfg compile(const SyntheticGrammar& expanded) {
  Cfg cfg;
  cfg.start = cfg.id(expanded.start);
  for (const auto& [name, alts] : expanded.rules) {
    const int l = cfg.id(name);
    for (const auto& alt : alts) {
      std::vector<int> r;
      for (const auto& s : alt) r.push_back(cfg.id(s));
      cfg.rules_for[l].push_back(static_cast<int>(cfg.lhs.size()));
      cfg.lhs.push_back(l);
      cfg.rhs.push_back(std::move(r));
    }
  }
  return cfg;
}

bool earley_accepts(const Cfg& cfg, const std::vector<std::string>& tokens) {
  struct Item {
    int rule, dot, origin;
    bool operator<(const Item& o) const {
      return std::tie(rule, dot, origin) < std::tie(o.rule, o.dot, o.origin);
    }
  };
  const std::size_t n = tokens.size();
  std::vector<std::vector<Item>> chart(n + 1);
  std::vector<std::set<Item>> seen(n + 1);
  auto add = [&](std::size_t pos, Item it) {
    if (seen[pos].insert(it).second) chart[pos].push_back(it);
  };
  for (int r : cfg.rules_for[cfg.start]) add(0, {r, 0, 0});
  for (std::size_t pos = 0; pos <= n; ++pos) {
    for (std::size_t i = 0; i < chart[pos].size(); ++i) {
      const Item it = chart[pos][i];
      const auto& rhs = cfg.rhs[it.rule];
      if (it.dot < static_cast<int>(rhs.size())) {
        const int next = rhs[it.dot];
        if (!cfg.rules_for[next].empty()) {
          for (int r : cfg.rules_for[next]) add(pos, {r, 0, static_cast<int>(pos)});
          // No empty rules, so no completion is pending at pos.
        } else if (pos < n && cfg.names[next] == tokens[pos]) {
          add(pos + 1, {it.rule, it.dot + 1, it.origin});
        }
      } else {
        const int done = cfg.lhs[it.rule];
        for (std::size_t j = 0; j < chart[it.origin].size(); ++j) {
          const Item parent = chart[it.origin][j];
          const auto& prhs = cfg.rhs[parent.rule];
          if (parent.dot < static_cast<int>(prhs.size()) && prhs[parent.dot] == done) {
            add(pos, {parent.rule, parent.dot + 1, parent.origin});
          }
        }
      }
    }
  }
  for (const Item& it : chart[n]) {
    if (it.origin == 0 && cfg.lhs[it.rule] == cfg.start &&
        it.dot == static_cast<int>(cfg.rhs[it.rule].size())) {
      return true;
    }
  }
  return false;
}

void expand_symbol(const SyntheticGrammar& g, const std::string& symbol, std::mt19937_64& rng,
                   const SynthOptions& options, std::map<std::string, int>& depth,
                   std::vector<std::string>& out) {
  char bound = '\0';
  const auto* alts = lookup(g, symbol, &bound);
  if (!alts) {
    out.push_back(symbol);
    return;
  }
  if (++depth[symbol] > options.max_depth) throw DepthExceededError(symbol);
  const auto& alt = (*alts)[uniform_index(rng, alts->size())];
  char number = bound;
  if (number == '\0' && has_variable(alt)) number = uniform_index(rng, 2) == 0 ? 's' : 'p';
  for (const auto& s : alt) expand_symbol(g, bind(s, number), rng, options, depth, out);
  --depth[symbol];
}

}  // namespace

SyntheticGrammar SyntheticGrammar::parse(const std::string& text) {
  SyntheticGrammar g;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    auto tokens = tokenize(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    if (tokens.size() < 3 || tokens[1] != "->") {
      throw std::invalid_argument("bad grammar line: " + line);
    }
    std::vector<std::vector<std::string>> alts(1);
    for (std::size_t i = 2; i < tokens.size(); ++i) {
      if (tokens[i] == "|") {
        alts.emplace_back();
      } else {
        alts.back().push_back(tokens[i]);
      }
    }
    if (std::ranges::any_of(alts, [](const auto& a) { return a.empty(); })) {
      throw std::invalid_argument("empty alternative in: " + line);
    }
    if (first) g.start = tokens[0];
    first = false;
    g.rules[tokens[0]] = std::move(alts);
  }
  return g;
}

SyntheticGrammar SyntheticGrammar::standard() {
  static const SyntheticGrammar g = parse(kStandardGrammar);
  return g;
}

bool SyntheticGrammar::is_nonterminal(const std::string& symbol) const {
  char bound;
  return lookup(*this, symbol, &bound) != nullptr;
}

SyntheticGrammar SyntheticGrammar::expanded() const {
  SyntheticGrammar out;
  out.start = start;
  for (const auto& [name, alts] : rules) {
    if (ends_with(name, "_x")) {
      for (char number : {'s', 'p'}) {
        auto& dst = out.rules[bind(name, number)];
        for (const auto& alt : alts) {
          std::vector<std::string> a;
          for (const auto& s : alt) a.push_back(bind(s, number));
          dst.push_back(std::move(a));
        }
      }
    } else {
      auto& dst = out.rules[name];
      for (const auto& alt : alts) {
        if (!has_variable(alt)) {
          dst.push_back(alt);
          continue;
        }
        for (char number : {'s', 'p'}) {
          std::vector<std::string> a;
          for (const auto& s : alt) a.push_back(bind(s, number));
          dst.push_back(std::move(a));
        }
      }
    }
  }
  return out;
}

std::vector<std::string> SyntheticGrammar::terminals() const {
  std::set<std::string> out;
  const SyntheticGrammar e = expanded();
  for (const auto& [name, alts] : e.rules) {
    for (const auto& alt : alts) {
      for (const auto& s : alt) {
        if (!e.rules.contains(s)) out.insert(s);
      }
    }
  }
  return {out.begin(), out.end()};
}

void SyntheticGrammar::validate() const {
  const SyntheticGrammar e = expanded();
  // Fixed point of "can derive a terminal string".
  std::set<std::string> terminating;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [name, alts] : e.rules) {
      if (terminating.contains(name)) continue;
      for (const auto& alt : alts) {
        const bool ok = std::ranges::all_of(alt, [&](const std::string& s) {
          return !e.rules.contains(s) || terminating.contains(s);
        });
        if (ok) {
          terminating.insert(name);
          changed = true;
          break;
        }
      }
    }
  }
  std::set<std::string> reachable{start};
  std::vector<std::string> stack{start};
  while (!stack.empty()) {
    const std::string s = stack.back();
    stack.pop_back();
    auto it = e.rules.find(s);
    if (it == e.rules.end()) continue;
    if (!terminating.contains(s)) {
      throw std::invalid_argument("nonterminal '" + s + "' cannot terminate");
    }
    for (const auto& alt : it->second) {
      for (const auto& c : alt) {
        if (reachable.insert(c).second) stack.push_back(c);
      }
    }
  }
}

std::vector<Sentence> synth_generate(const SyntheticGrammar& grammar, int count,
                                     std::uint64_t rng_seed, const SynthOptions& options) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  std::mt19937_64 rng(rng_seed);
  std::vector<Sentence> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    for (int attempt = 0;; ++attempt) {
      std::vector<std::string> tokens;
      std::map<std::string, int> depth;
      try {
        expand_symbol(grammar, grammar.start, rng, options, depth, tokens);
      } catch (const DepthExceededError& e) {
        if (attempt + 1 >= options.max_retries) {
          throw DepthExceededError("recursion depth exceeded at '" + std::string(e.what()) +
                                   "' after " + std::to_string(options.max_retries) + " retries");
        }
        continue;
      }
      out.push_back(Sentence{std::move(tokens), i, 0.0});
      break;
    }
  }
  return out;
}

const char* violation_name(Violation v) {
  switch (v) {
    case Violation::kNone: return "none";
    case Violation::kUnknownWord: return "unknown word";
    case Violation::kMissingTerminal: return "missing final punctuation";
    case Violation::kSubjectVerbNumber: return "subject-verb number disagreement";
    case Violation::kDeterminerNounNumber: return "determiner-noun number disagreement";
    case Violation::kObjectPronounAsSubject: return "object pronoun in subject position";
    case Violation::kSubjectPronounAsObject: return "subject pronoun in object position";
    case Violation::kStructure: return "no derivation";
  }
  return "?";
}

SyntheticRecognizer::SyntheticRecognizer()
    : gold_(SyntheticGrammar::standard()), vocabulary_(gold_.terminals()) {
  for (const auto& r : kRelaxations) relaxations_.emplace_back(r.kind, r.overrides);
}

SyntheticGrammar SyntheticRecognizer::with_relaxations(const std::vector<std::size_t>& which) const {
  SyntheticGrammar g = gold_;
  for (std::size_t i : which) {
    const SyntheticGrammar over = SyntheticGrammar::parse(relaxations_[i].second);
    for (const auto& [name, alts] : over.rules) g.rules[name] = alts;
  }
  return g.expanded();
}

bool SyntheticRecognizer::accepts(const SyntheticGrammar& expanded,
                                  const std::vector<std::string>& tokens) {
  return earley_accepts(compile(expanded), tokens);
}

Recognition SyntheticRecognizer::recognize(const Sentence& sentence) const {
  return recognize(sentence.tokens);
}

Recognition SyntheticRecognizer::recognize(const std::vector<std::string>& tokens) const {
  Recognition r;
  auto reject = [&](Violation v, std::string detail) {
    r.accepted = false;
    r.reason = v;
    if (r.violations.empty()) r.violations.push_back(v);
    r.detail = std::move(detail);
    return r;
  };
  for (const auto& t : tokens) {
    if (!std::ranges::binary_search(vocabulary_, t)) return reject(Violation::kUnknownWord, t);
  }
  if (tokens.empty() || tokens.back() != ".") return reject(Violation::kMissingTerminal, "");

  if (accepts(gold_.expanded(), tokens)) {
    r.accepted = true;
    return r;
  }
  std::vector<std::size_t> all(relaxations_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  if (!accepts(with_relaxations(all), tokens)) return reject(Violation::kStructure, "");

  // A relaxation is needed when dropping it from the full set loses the parse.
  for (std::size_t i = 0; i < all.size(); ++i) {
    std::vector<std::size_t> others;
    for (std::size_t j : all) {
      if (j != i) others.push_back(j);
    }
    if (!accepts(with_relaxations(others), tokens)) r.violations.push_back(relaxations_[i].first);
  }
  if (r.violations.empty()) {
    // Several relaxations work on their own; report the first that does.
    for (std::size_t i : all) {
      if (accepts(with_relaxations({i}), tokens)) {
        r.violations.push_back(relaxations_[i].first);
        break;
      }
    }
  }
  return reject(r.violations.front(), "");
}

Recognition synth_recognize(const SyntheticGrammar& grammar, const Sentence& sentence) {
  static const SyntheticRecognizer standard;
  if (grammar.rules == SyntheticGrammar::standard().rules) return standard.recognize(sentence);
  Recognition r;
  r.accepted = SyntheticRecognizer::accepts(grammar.expanded(), sentence.tokens);
  r.reason = r.accepted ? Violation::kNone : Violation::kStructure;
  if (!r.accepted) r.violations.push_back(Violation::kStructure);
  return r;
}

}  // namespace lge
