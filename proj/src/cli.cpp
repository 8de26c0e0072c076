#include "lge/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <set>

#include "CLI11.hpp"
#include "lge/rules.hpp"
#include "lge/solution_io.hpp"
#include "lge/synthetic.hpp"
#include "lge/train.hpp"

namespace lge {

namespace {

namespace fs = std::filesystem;

Corpus training_corpus(const Solution& solution) {
  std::vector<Sentence> sentences;
  for (const auto& t : solution.trees) sentences.push_back(Sentence{t.tokens, t.source_index, 0.0});
  return Corpus::from_sentences(std::move(sentences));
}

RuleMode parse_mode(const std::string& mode) {
  return mode == "free" ? RuleMode::kFree : RuleMode::kContext;
}

std::string restart_path(const std::string& out, int restart, const std::string& suffix) {
  fs::path p(out);
  const std::string stem = (p.parent_path() / p.stem()).string();
  return stem + ".restart" + std::to_string(restart) + suffix;
}

// Words grouped by code, largest groups first, ties by code.
std::vector<std::pair<CategoryCode, std::vector<std::string>>> code_groups(const Solution& s) {
  std::map<CategoryCode, std::vector<std::string>> by_code;
  for (const auto& [w, codes] : s.lexicon) {
    for (const auto& c : codes) by_code[c].push_back(w);
  }
  std::vector<std::pair<CategoryCode, std::vector<std::string>>> groups(by_code.begin(), by_code.end());
  std::stable_sort(groups.begin(), groups.end(),
                   [](const auto& a, const auto& b) { return a.second.size() > b.second.size(); });
  return groups;
}

void print_perplexity(std::ostream& out, const PerplexityReport& p) {
  out << std::setprecision(10) << "branch\t" << p.branch << "\nleaf\t" << p.leaf << "\ntotal\t"
      << p.total << "\nnum_branches\t" << p.num_branches << "\nnum_leaves\t" << p.num_leaves << '\n';
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Logical grammar embedding: category inference, parsing and generation"};
  app.require_subcommand(1);

  int count = 100;
  std::uint64_t seed = 0;
  std::string out_path, in_path;
  auto* synth = app.add_subcommand("synth", "Sample sentences from the synthetic grammar");
  synth->add_option("--count", count)->check(CLI::PositiveNumber);
  synth->add_option("--seed", seed);
  synth->add_option("--out", out_path)->required();

  std::size_t take = 0;
  PrepareOptions prep_opts;
  auto* prep = app.add_subcommand("prep", "Filter and order a raw corpus");
  prep->add_option("--in", in_path)->required();
  prep->add_option("--take", take)->required();
  prep->add_option("--out", out_path)->required();
  prep->add_option("--min-words", prep_opts.min_words);
  prep->add_option("--redaction", prep_opts.redaction_marker);

  std::string corpus_path, seed_lexicon_path;
  AlgebraConfig algebra;
  SolverConfig solver;
  auto* train = app.add_subcommand("train", "Search for parse trees and a lexicon");
  train->add_option("--corpus", corpus_path)->required();
  train->add_option("--bytes", algebra.num_bytes);
  train->add_option("--bits", algebra.bits_per_byte);
  train->add_option("--beta", solver.beta);
  train->add_option("--iters", solver.max_iters);
  train->add_option("--restarts", solver.restarts);
  train->add_option("--seed", solver.rng_seed);
  train->add_option("--clusters", solver.clusters_per_word);
  train->add_flag("--multi-base", solver.relax_multi_base);
  auto* bit_flip = train->add_flag("--bit-flip", solver.relax_bit_flip);
  train->add_option("--flip-penalty", solver.bit_flip_penalty)->needs(bit_flip);
  train->add_option("--seed-lexicon", seed_lexicon_path);
  train->add_option("--out", out_path)->required();

  std::string solution_path, mode = "context", weighting = "counts";
  bool show_trace = false;
  auto* generate = app.add_subcommand("generate", "Generate sentences from a solution's rules");
  generate->add_option("--solution", solution_path)->required();
  generate->add_option("--count", count)->check(CLI::PositiveNumber);
  generate->add_option("--mode", mode)->check(CLI::IsMember({"context", "free"}));
  generate->add_option("--weighting", weighting)->check(CLI::IsMember({"counts", "uniform"}));
  generate->add_option("--seed", seed);
  generate->add_flag("--trace", show_trace);

  auto* perp = app.add_subcommand("perplexity", "Branch, leaf and total perplexity");
  perp->add_option("--solution", solution_path)->required();
  perp->add_option("--mode", mode)->check(CLI::IsMember({"context", "free"}));

  bool by_code = false;
  auto* lexicon = app.add_subcommand("lexicon", "Learned word categories");
  lexicon->add_option("--solution", solution_path)->required();
  lexicon->add_flag("--by-code", by_code);

  std::vector<std::string> solution_paths;
  auto* failures = app.add_subcommand("failures", "Sentences that fail to parse most often");
  failures->add_option("--solutions", solution_paths)->required();

  std::string word;
  auto* trace = app.add_subcommand("trace", "Training sentences and codes for one word");
  trace->add_option("--word", word)->required();
  trace->add_option("--corpus", corpus_path)->required();
  trace->add_option("--solution", solution_path)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*synth) {
      const auto sentences = synth_generate(SyntheticGrammar::standard(), count, seed);
      write_sentences(out_path, sentences);
      err << "wrote " << sentences.size() << " sentences to " << out_path << '\n';
    } else if (*prep) {
      prep_opts.take = take;
      const Corpus c = prepare_corpus(read_lines(in_path), prep_opts);
      write_sentences(out_path, c.sentences);
      err << "kept " << c.size() << " sentences\n";
    } else if (*train) {
      algebra = AlgebraConfig::with_default_names(algebra.num_bytes, algebra.bits_per_byte);
      algebra.validate();
      if (!seed_lexicon_path.empty()) solver.seed_lexicon = load_seed_lexicon(seed_lexicon_path, algebra);
      solver.validate();
      const Corpus corpus = read_corpus(corpus_path);
      auto runs = train_restarts(corpus, algebra, solver);
      std::vector<Solution> solutions;
      for (auto& run : runs) {
        const std::string csv = restart_path(out_path, run.solution.restart, ".errors.csv");
        run.trace.write_csv(csv);
        run.solution.error_trace_csv = csv;
        save_solution(restart_path(out_path, run.solution.restart, ".json"), run.solution);
        const Solution& s = run.solution;
        err << "restart " << s.restart << ": iterations " << s.iterations << ", parsed "
            << s.parsed_count() << "/" << s.trees.size() << (s.converged ? ", converged" : "");
        if (s.perplexity) err << ", perplexity " << s.perplexity->total;
        err << '\n';
        solutions.push_back(s);
      }
      const std::size_t best = best_restart(solutions);
      save_solution(out_path, solutions[best]);
      err << "best restart " << solutions[best].restart << " written to " << out_path << '\n';
    } else if (*generate) {
      const Solution s = load_solution(solution_path);
      const RuleSet rules = extract_rules(s);
      GenConfig gen;
      gen.mode = parse_mode(mode);
      gen.weighting = weighting == "uniform" ? Weighting::kUniform : Weighting::kCounts;
      gen.rng_seed = seed;
      const auto generated = generate_sentences(rules, gen, count);
      std::vector<Sentence> sentences;
      for (const auto& g : generated) {
        out << g.sentence.text() << '\n';
        if (show_trace) out << format_derivation(g, s.algebra) << '\n';
        sentences.push_back(g.sentence);
      }
      const double rate = reproduction_rate(sentences, training_corpus(s));
      err << "reproduction rate " << std::fixed << std::setprecision(4) << rate << " ("
          << static_cast<long>(std::lround(rate * static_cast<double>(sentences.size()))) << "/"
          << sentences.size() << " generated sentences appear in the training data)\n";
    } else if (*perp) {
      const Solution s = load_solution(solution_path);
      print_perplexity(out, perplexity(extract_rules(s), s, parse_mode(mode)));
    } else if (*lexicon) {
      const Solution s = load_solution(solution_path);
      for (const auto& [code, words] : code_groups(s)) {
        if (by_code) {
          out << code.to_string() << '\t' << decode_expression(code, s.algebra) << '\t';
          for (std::size_t i = 0; i < words.size(); ++i) out << (i ? " | " : "") << words[i];
          out << '\n';
        } else {
          for (const auto& w : words) {
            out << w << '\t' << code.to_string() << '\t' << decode_expression(code, s.algebra) << '\n';
          }
        }
      }
    } else if (*failures) {
      std::vector<Solution> solutions;
      for (const auto& p : solution_paths) solutions.push_back(load_solution(p));
      for (const auto& e : failure_report(solutions)) {
        Sentence sentence{e.tokens, e.source_index, 0.0};
        out << e.failures << '/' << solutions.size() << '\t' << e.source_index << '\t'
            << sentence.text() << '\n';
      }
    } else if (*trace) {
      const Solution s = load_solution(solution_path);
      const Corpus corpus = read_corpus(corpus_path);
      auto it = s.lexicon.find(word);
      if (it == s.lexicon.end()) {
        out << word << "\tnot in the lexicon\n";
      } else {
        for (const auto& c : it->second) {
          out << word << '\t' << c.to_string() << '\t' << decode_expression(c, s.algebra) << '\n';
        }
      }
      std::map<std::vector<std::string>, const TreeRecord*> trees;
      for (const auto& t : s.trees) trees.emplace(t.tokens, &t);
      for (const auto& sentence : corpus.sentences) {
        const auto& tok = sentence.tokens;
        if (std::ranges::find(tok, word) == tok.end()) continue;
        out << sentence.source_index << '\t' << sentence.text();
        auto t = trees.find(tok);
        if (t != trees.end()) {
          out << '\t' << (t->second->parsed ? "parsed" : "unparsed");
          for (std::size_t i = 0; i < tok.size(); ++i) {
            if (tok[i] == word && i < t->second->leaves.size()) out << '\t' << t->second->leaves[i].to_string();
          }
        }
        out << '\n';
      }
    }
  } catch (const EmptyCorpusError& e) {
    err << "error: empty corpus: " << e.what() << '\n';
    return 3;
  } catch (const NoParsedTreesError& e) {
    err << "error: no parsed trees: " << e.what() << '\n';
    return 4;
  } catch (const GenerationFailedError& e) {
    err << "error: generation failed: " << e.what() << '\n';
    return 5;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace lge
