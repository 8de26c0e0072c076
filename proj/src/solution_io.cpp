#include "lge/solution_io.hpp"

#include <fstream>
#include <sstream>

namespace lge {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "lge-solution";
constexpr int kVersion = 1;

json algebra_json(const AlgebraConfig& a) {
  return {{"num_bytes", a.num_bytes},
          {"bits_per_byte", a.bits_per_byte},
          {"base_type_names", a.base_type_names}};
}

AlgebraConfig algebra_from(const json& j) {
  AlgebraConfig a;
  a.num_bytes = j.at("num_bytes").get<int>();
  a.bits_per_byte = j.at("bits_per_byte").get<int>();
  a.base_type_names = j.at("base_type_names").get<std::vector<std::string>>();
  a.validate();
  return a;
}

json solver_json(const SolverConfig& c) {
  json seeds = json::object();
  for (const auto& [w, code] : c.seed_lexicon) seeds[w] = code.to_string();
  return {{"beta", c.beta},
          {"max_iters", c.max_iters},
          {"restarts", c.restarts},
          {"rng_seed", c.rng_seed},
          {"clusters_per_word", c.clusters_per_word},
          {"relax_multi_base", c.relax_multi_base},
          {"relax_bit_flip", c.relax_bit_flip},
          {"bit_flip_penalty", c.bit_flip_penalty},
          {"stop_tolerance", c.stop_tolerance},
          {"kmeans_iterations", c.kmeans_iterations},
          {"seed_lexicon", seeds}};
}

SolverConfig solver_from(const json& j, const AlgebraConfig& a) {
  SolverConfig c;
  c.beta = j.at("beta").get<double>();
  c.max_iters = j.at("max_iters").get<int>();
  c.restarts = j.at("restarts").get<int>();
  c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  c.clusters_per_word = j.at("clusters_per_word").get<int>();
  c.relax_multi_base = j.at("relax_multi_base").get<bool>();
  c.relax_bit_flip = j.at("relax_bit_flip").get<bool>();
  c.bit_flip_penalty = j.at("bit_flip_penalty").get<double>();
  c.stop_tolerance = j.at("stop_tolerance").get<double>();
  c.kmeans_iterations = j.at("kmeans_iterations").get<int>();
  for (const auto& [w, code] : j.at("seed_lexicon").items()) {
    c.seed_lexicon[w] = CategoryCode::parse(code.get<std::string>(), a);
  }
  return c;
}

}  // namespace

json to_json(const Solution& s) {
  json lexicon = json::object();
  for (const auto& [w, codes] : s.lexicon) {
    json list = json::array();
    for (const auto& c : codes) list.push_back(c.to_string());
    lexicon[w] = list;
  }
  json sentences = json::array();
  json flips = json::array();
  for (std::size_t i = 0; i < s.trees.size(); ++i) {
    const auto& t = s.trees[i];
    json tree = json::array();
    for (const auto& b : t.branches) {
      json rec = {{"layer", b.layer},
                  {"branch_position", b.position},
                  {"child", b.child.to_string()},
                  {"left", b.left.to_string()},
                  {"right", b.right.to_string()}};
      if (b.flipped()) {
        rec["flip"] = {{"side", b.flip_side == 0 ? "left" : "right"}, {"bit", b.flip_bit}};
        flips.push_back({{"sentence", i},
                         {"layer", b.layer},
                         {"side", b.flip_side == 0 ? "left" : "right"},
                         {"bit", b.flip_bit}});
      }
      tree.push_back(std::move(rec));
    }
    json leaves = json::array();
    for (const auto& c : t.leaves) leaves.push_back(c.to_string());
    sentences.push_back({{"tokens", t.tokens},
                         {"source_index", t.source_index},
                         {"parsed", t.parsed},
                         {"failure", t.failure},
                         {"tree", tree},
                         {"leaves", leaves}});
  }
  json perplexity = nullptr;
  if (s.perplexity) {
    perplexity = {{"branch", s.perplexity->branch},
                  {"leaf", s.perplexity->leaf},
                  {"total", s.perplexity->total},
                  {"num_branches", s.perplexity->num_branches},
                  {"num_leaves", s.perplexity->num_leaves}};
  }
  return {{"format", kFormat},
          {"version", kVersion},
          {"algebra", algebra_json(s.algebra)},
          {"solver", solver_json(s.config)},
          {"restart", s.restart},
          {"rng_seed", s.rng_seed},
          {"iterations", s.iterations},
          {"min_change_iteration", s.min_change_iteration},
          {"min_change", s.min_change},
          {"converged", s.converged},
          {"parsed_count", s.parsed_count()},
          {"lexicon", lexicon},
          {"sentences", sentences},
          {"bit_flips", flips},
          {"perplexity", perplexity},
          {"error_trace_csv", s.error_trace_csv}};
}

Solution solution_from_json(const json& doc) {
  if (doc.value("format", "") != kFormat) throw std::runtime_error("not a solution file");
  if (doc.at("version").get<int>() != kVersion) throw std::runtime_error("unsupported solution version");
  Solution s;
  s.algebra = algebra_from(doc.at("algebra"));
  s.config = solver_from(doc.at("solver"), s.algebra);
  s.restart = doc.at("restart").get<int>();
  s.rng_seed = doc.at("rng_seed").get<std::uint64_t>();
  s.iterations = doc.at("iterations").get<int>();
  s.min_change_iteration = doc.at("min_change_iteration").get<int>();
  s.min_change = doc.at("min_change").get<double>();
  s.converged = doc.at("converged").get<bool>();
  for (const auto& [w, list] : doc.at("lexicon").items()) {
    auto& codes = s.lexicon[w];
    for (const auto& c : list) codes.push_back(CategoryCode::parse(c.get<std::string>(), s.algebra));
  }
  for (const auto& js : doc.at("sentences")) {
    TreeRecord t;
    t.tokens = js.at("tokens").get<std::vector<std::string>>();
    t.source_index = js.at("source_index").get<int>();
    t.parsed = js.at("parsed").get<bool>();
    t.failure = js.at("failure").get<std::string>();
    for (const auto& jb : js.at("tree")) {
      BranchRecord b;
      b.layer = jb.at("layer").get<int>();
      b.position = jb.at("branch_position").get<int>();
      b.child = CategoryCode::parse(jb.at("child").get<std::string>(), s.algebra);
      b.left = CategoryCode::parse(jb.at("left").get<std::string>(), s.algebra);
      b.right = CategoryCode::parse(jb.at("right").get<std::string>(), s.algebra);
      if (jb.contains("flip")) {
        b.flip_side = jb["flip"].at("side").get<std::string>() == "left" ? 0 : 1;
        b.flip_bit = jb["flip"].at("bit").get<int>();
      }
      t.branches.push_back(std::move(b));
    }
    for (const auto& c : js.at("leaves")) t.leaves.push_back(CategoryCode::parse(c.get<std::string>(), s.algebra));
    s.trees.push_back(std::move(t));
  }
  if (!doc.at("perplexity").is_null()) {
    const auto& p = doc.at("perplexity");
    s.perplexity = PerplexityReport{p.at("branch").get<double>(), p.at("leaf").get<double>(),
                                    p.at("total").get<double>(), p.at("num_branches").get<long>(),
                                    p.at("num_leaves").get<long>()};
  }
  s.error_trace_csv = doc.at("error_trace_csv").get<std::string>();
  return s;
}

void save_solution(const std::string& path, const Solution& solution) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json(solution).dump(1) << '\n';
}

Solution load_solution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return solution_from_json(doc);
}

std::map<std::string, CategoryCode> load_seed_lexicon(const std::string& path,
                                                      const AlgebraConfig& algebra) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::map<std::string, CategoryCode> seeds;
  if (in.peek() == '{') {
    const Solution s = load_solution(path);
    if (!(s.algebra.num_bytes == algebra.num_bytes && s.algebra.bits_per_byte == algebra.bits_per_byte)) {
      throw std::runtime_error("seed solution uses a different code layout");
    }
    for (const auto& [w, codes] : s.lexicon) {
      if (!codes.empty()) seeds.emplace(w, codes.front());
    }
    return seeds;
  }
  std::string line;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    if (line.empty() || line[0] == '#') continue;
    if (tab == std::string::npos) throw std::runtime_error("seed line without a tab: " + line);
    const auto end = line.find('\t', tab + 1);
    seeds.emplace(line.substr(0, tab), CategoryCode::parse(line.substr(tab + 1, end - tab - 1), algebra));
  }
  return seeds;
}

}  // namespace lge
