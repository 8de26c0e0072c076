#include <cmath>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "lge/kmeans.hpp"
#include "lge/solution.hpp"
#include "lge/solver.hpp"
#include "lge/synthetic.hpp"
#include "oracles.hpp"

using namespace lge;

namespace {

const AlgebraConfig kAlg;

Corpus small_corpus() {
  return Corpus::from_sentences({Sentence{{"she", "runs", "."}, 0, 0.0},
                                 Sentence{{"the", "dog", "runs", "."}, 1, 0.0},
                                 Sentence{{"she", "sees", "the", "dog", "."}, 2, 0.0}});
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("layout sizes and offsets") {
  const Corpus c = small_corpus();
  const TreeLayout lay(c, kAlg);
  CHECK(TreeLayout::replicas_in_tree(3) == 11);
  CHECK(lay.num_values() == 11 + 19 + 29);
  CHECK(lay.dimension() == lay.num_values() * 9);
  std::set<std::size_t> seen;
  for (int t = 0; t < lay.num_trees(); ++t) {
    for (int l = 1; l <= lay.tree_length(t); ++l) {
      for (int j = 0; j < l; ++j) {
        seen.insert(lay.value_index(t, l, j, Replica::kUp));
        if (l > 1) seen.insert(lay.value_index(t, l, j, Replica::kDown));
      }
    }
  }
  CHECK(seen.size() == lay.num_values());
  CHECK(*seen.rbegin() == lay.num_values() - 1);
  CHECK(lay.words() == std::vector<std::string>{".", "dog", "runs", "sees", "she", "the"});
  CHECK(lay.occurrences(lay.word_id("she")).size() == 2);
  CHECK(lay.word_id("cat") == -1);
  CHECK_THROWS(TreeLayout(Corpus::from_sentences({Sentence{{"."}, 0, 0.0}}), kAlg));
}

TEST_CASE("layer projection matches exhaustive enumeration") {
  const Corpus c = small_corpus();
  const TreeLayout lay(c, kAlg);
  const Projector proj(lay, kAlg, SolverConfig{});
  for (int nodes : {1, 2}) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto lower = fixture::random_values(nodes * 9, 1000 * nodes + trial);
      const auto upper = fixture::random_values((nodes + 1) * 9, 5000 * nodes + trial);
      int p_lib = -1, p_ref = -1;
      const double lib = proj.layer_pair_cost(lower, upper, nodes, &p_lib);
      const double ref = oracle::brute_layer_cost(lower, upper, nodes, 3, &p_ref);
      CHECK(lib == doctest::Approx(ref).epsilon(1e-12));
      CHECK(std::abs(lib - ref) < 1e-9);
      CHECK(p_lib == p_ref);
    }
  }
}

TEST_CASE("project_a distance on a two-token tree is the layer cost") {
  const Corpus c = Corpus::from_sentences({Sentence{{"go", "!"}, 0, 0.0}});
  const TreeLayout lay(c, kAlg);
  const Projector proj(lay, kAlg, SolverConfig{});
  const auto v = fixture::random_values(lay.dimension(), 3);
  std::vector<double> out(v.size());
  const double d = proj.project_a(v, out);
  const std::vector<double> lower(v.begin(), v.begin() + 9);
  std::vector<double> upper(18);
  for (int j = 0; j < 2; ++j) {
    const std::size_t off = lay.offset(0, 2, j, Replica::kDown);
    std::copy_n(v.begin() + off, 9, upper.begin() + 9 * j);
  }
  CHECK(std::abs(d - oracle::brute_layer_cost(lower, upper, 1, 3)) < 1e-9);
  double direct = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) direct += oracle::sq(out[i] - v[i]);
  CHECK(std::abs(direct - d) < 1e-9);
}

TEST_CASE("project_a lands in A") {
  const Corpus c = small_corpus();
  const TreeLayout lay(c, kAlg);
  const Projector proj(lay, kAlg, SolverConfig{});
  const auto v = fixture::random_values(lay.dimension(), 17);
  std::vector<double> a(v.size());
  proj.project_a(v, a);
  auto code_at = [&](std::size_t off) {
    std::vector<std::uint8_t> bits(9);
    for (int i = 0; i < 9; ++i) {
      REQUIRE((a[off + i] == 0.0 || a[off + i] == 1.0));
      bits[i] = static_cast<std::uint8_t>(a[off + i]);
    }
    return CategoryCode(3, 3, bits);
  };
  for (int t = 0; t < lay.num_trees(); ++t) {
    for (int l = 1; l < lay.tree_length(t); ++l) {
      bool found = false;
      for (int p = 0; p < l && !found; ++p) {
        bool ok = true;
        for (int j = 0; j < l && ok; ++j) {
          const auto low = code_at(lay.offset(t, l, j, Replica::kUp));
          if (j == p) {
            const auto child = try_combine(code_at(lay.offset(t, l + 1, p, Replica::kDown)),
                                           code_at(lay.offset(t, l + 1, p + 1, Replica::kDown)));
            ok = child && *child == low;
          } else {
            ok = low == code_at(lay.offset(t, l + 1, j < p ? j : j + 1, Replica::kDown));
          }
        }
        found = ok;
      }
      CHECK(found);
    }
  }
  // Leaves of one word agree.
  for (int w = 0; w < static_cast<int>(lay.words().size()); ++w) {
    const auto& occ = lay.occurrences(w);
    for (const auto& o : occ) {
      const std::size_t a0 = lay.offset(occ[0].tree, lay.tree_length(occ[0].tree), occ[0].position, Replica::kUp);
      const std::size_t a1 = lay.offset(o.tree, lay.tree_length(o.tree), o.position, Replica::kUp);
      for (int i = 0; i < 9; ++i) CHECK(a[a0 + i] == a[a1 + i]);
    }
  }
}

TEST_CASE("projections are idempotent and execution-independent") {
  const auto sentences = synth_generate(SyntheticGrammar::standard(), 20, 4);
  const Corpus c = Corpus::from_sentences(sentences);
  const TreeLayout lay(c, kAlg);
  for (int k : {1, 2}) {
    SolverConfig cfg;
    cfg.clusters_per_word = k;
    cfg.relax_bit_flip = k == 2;
    const Projector proj(lay, kAlg, cfg);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto v = fixture::random_values(lay.dimension(), seed);
      std::vector<double> a(v.size()), aa(v.size()), b(v.size()), bb(v.size()), s(v.size());
      const double d_par = proj.project_a(v, a, Execution::kParallel);
      const double d_ser = proj.project_a(v, s, Execution::kSerial);
      CHECK(a == s);
      CHECK(d_par == d_ser);
      CHECK(proj.project_a(a, aa) < 1e-18);
      CHECK(max_abs_diff(a, aa) < 1e-9);
      proj.project_b(v, b, Execution::kParallel);
      proj.project_b(v, s, Execution::kSerial);
      CHECK(b == s);
      proj.project_b(b, bb);
      CHECK(max_abs_diff(b, bb) < 1e-9);
    }
  }
}

TEST_CASE("word projection averages leaves") {
  const Corpus c = Corpus::from_sentences(
      {Sentence{{"x", "."}, 0, 0.0}, Sentence{{"x", "!"}, 1, 0.0}});
  const TreeLayout lay(c, kAlg);
  const Projector proj(lay, kAlg, SolverConfig{});
  std::vector<double> v(lay.dimension(), 0.0), out(lay.dimension());
  v[lay.offset(0, 2, 0, Replica::kUp)] = 0.2;
  v[lay.offset(1, 2, 0, Replica::kUp)] = 0.8;
  proj.project_word(lay.word_id("x"), v, out);
  CHECK(out[lay.offset(0, 2, 0, Replica::kUp)] == doctest::Approx(0.5));
  CHECK(out[lay.offset(1, 2, 0, Replica::kUp)] == doctest::Approx(0.5));
}

TEST_CASE("concur projection") {
  const Corpus c = Corpus::from_sentences({Sentence{{"a", "b", "."}, 0, 0.0}});
  const TreeLayout lay(c, kAlg);
  const Projector proj(lay, kAlg, SolverConfig{});
  std::vector<double> v(lay.dimension(), 0.1), out(lay.dimension());
  for (int i = 0; i < 9; ++i) v[lay.offset(0, 1, 0, Replica::kUp) + i] = 0.7;
  const std::size_t up = lay.offset(0, 3, 0, Replica::kUp), down = lay.offset(0, 3, 0, Replica::kDown);
  v[up + 0] = 0.2;
  v[down + 0] = 0.6;
  proj.project_b(v, out);
  for (int i = 0; i < 9; ++i) CHECK(out[lay.offset(0, 1, 0, Replica::kUp) + i] == 0.0);
  CHECK(out[up + 0] == doctest::Approx(0.4));
  CHECK(out[down + 0] == doctest::Approx(0.4));
  // Central bits 0.1 each: shifted by 0.7 / 3.
  for (int b = 0; b < 3; ++b) CHECK(out[up + 3 * b + 1] == doctest::Approx(0.1 + 0.7 / 3));
  // Rightmost nodes keep their averages.
  const std::size_t last = lay.offset(0, 3, 2, Replica::kUp);
  for (int b = 0; b < 3; ++b) CHECK(out[last + 3 * b + 1] == doctest::Approx(0.1));
  SolverConfig multi;
  multi.relax_multi_base = true;
  Projector(lay, kAlg, multi).project_b(v, out);
  CHECK(out[up + 1] == doctest::Approx(0.1));
}

TEST_CASE("seeded leaves take the seed code") {
  const Corpus c = Corpus::from_sentences({Sentence{{"a", "b", "."}, 0, 0.0}});
  const TreeLayout lay(c, kAlg);
  SolverConfig cfg;
  cfg.seed_lexicon["b"] = CategoryCode::parse("110 000 000");
  const Projector proj(lay, kAlg, cfg);
  const auto v = fixture::random_values(lay.dimension(), 8);
  std::vector<double> out(v.size());
  proj.project_b(v, out);
  for (auto r : {Replica::kUp, Replica::kDown}) {
    const std::size_t off = lay.offset(0, 3, 1, r);
    CHECK(out[off] == 1.0);
    CHECK(out[off + 1] == 1.0);
    for (int i = 2; i < 9; ++i) CHECK(out[off + i] == 0.0);
  }
}

TEST_CASE("hand tree is a fixed point and extracts as parsed") {
  const Corpus c = fixture::hand_corpus();
  const TreeLayout lay(c, kAlg);
  const Projector proj(lay, kAlg, SolverConfig{});
  std::vector<double> v(lay.dimension());
  fixture::write_tree(lay, 0, fixture::hand_layers(), v);
  std::vector<double> delta(v.size());
  auto w = v;
  rrr_step(proj, w, delta);
  for (double d : delta) CHECK(std::abs(d) < 1e-12);
  const auto sol = extract_solution(v, c, proj);
  REQUIRE(sol.trees.size() == 1);
  CHECK(sol.trees[0].parsed);
  CHECK(sol.lexicon.at("det") == std::vector{CategoryCode::parse(fixture::kDet)});
  CHECK(sol.lexicon.at(".") == std::vector{CategoryCode::parse(fixture::kPunct)});
  CHECK(sol.trees[0].branches.size() == 3);
  CHECK(sol.trees[0].branches[0].child == CategoryCode(3, 3));
  CHECK(sol.trees[0].branches[2].position == 0);
  SolverConfig few;
  few.max_iters = 50;
  const auto run = rrr_run(Projector(lay, kAlg, few), v);
  CHECK(run.converged);
  CHECK(run.trace.iterations() == 1);
}

TEST_CASE("broken layer only affects its own sentence") {
  Corpus c = Corpus::from_sentences({Sentence{{"det", "noun", "iv", "."}, 0, 0.0},
                                     Sentence{{"det", "noun", "iv", "."}, 1, 0.0}});
  const TreeLayout lay(c, kAlg);
  const Projector proj(lay, kAlg, SolverConfig{});
  std::vector<double> v(lay.dimension());
  auto layers = fixture::hand_layers();
  fixture::write_tree(lay, 0, layers, v);
  layers[1][0] = CategoryCode::parse("001 000 000");
  fixture::write_tree(lay, 1, layers, v);
  const auto sol = extract_solution(v, c, proj);
  CHECK(sol.trees[0].parsed);
  CHECK_FALSE(sol.trees[1].parsed);
  CHECK_FALSE(sol.trees[1].failure.empty());
  CHECK(sol.parsed_count() == 1);
}

TEST_CASE("one-bit flips are tolerated only when enabled") {
  auto layers = fixture::hand_layers();
  layers[2][1].set_bit(4, 1);  // IV gains a stray NP bit
  layers[3][2] = layers[2][1];
  const std::vector<std::vector<CategoryCode>> allowed{
      {layers[3][0]}, {layers[3][1]}, {layers[3][2]}, {layers[3][3]}};
  TreeRecord strict, relaxed;
  CHECK_FALSE(validate_tree(layers, allowed, false, strict));
  CHECK(validate_tree(layers, allowed, true, relaxed));
  int flips = 0;
  for (const auto& b : relaxed.branches) flips += b.flipped();
  CHECK(flips == 1);
  CHECK(relaxed.branches[1].flipped());
}

TEST_CASE("error trace holds per-bit rms of each step") {
  const Corpus c = small_corpus();
  const TreeLayout lay(c, kAlg);
  SolverConfig cfg;
  cfg.max_iters = 2;
  const Projector proj(lay, kAlg, cfg);
  const auto v0 = init_state(lay, 5);
  const auto run = rrr_run(proj, v0);
  REQUIRE(run.trace.iterations() == 2);
  std::vector<double> v = v0, delta(v.size());
  for (int it = 0; it < 2; ++it) {
    std::vector<double> pa(v.size()), refl(v.size()), pb(v.size());
    proj.project_a(v, pa);
    for (std::size_t i = 0; i < v.size(); ++i) refl[i] = 2 * pa[i] - v[i];
    proj.project_b(refl, pb);
    double all = 0.0;
    for (int b = 0; b < 9; ++b) {
      double s = 0.0;
      for (std::size_t i = b; i < v.size(); i += 9) s += oracle::sq(0.5 * (pb[i] - pa[i]));
      all += s;
      CHECK(run.trace.bit(it, b) == doctest::Approx(std::sqrt(s / lay.num_values())).epsilon(1e-12));
    }
    CHECK(run.trace.total[it] == doctest::Approx(std::sqrt(all / v.size())).epsilon(1e-12));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += 0.5 * (pb[i] - pa[i]);
  }
  CHECK(max_abs_diff(v, run.final_v) < 1e-15);
  CHECK(run.trace.min_index == (run.trace.total[1] < run.trace.total[0] ? 1 : 0));
}

TEST_CASE("beta one settles in one step when the projections agree") {
  const Corpus c = fixture::hand_corpus();
  const TreeLayout lay(c, kAlg);
  SolverConfig cfg;
  cfg.beta = 1.0;
  const Projector proj(lay, kAlg, cfg);
  std::vector<double> v(lay.dimension());
  fixture::write_tree(lay, 0, fixture::hand_layers(), v);
  // Opposite offsets on the two replicas of one node: P_A removes them and
  // the reflection averages them away.
  v[lay.offset(0, 3, 0, Replica::kUp)] += 0.1;
  v[lay.offset(0, 3, 0, Replica::kDown)] -= 0.1;
  auto w = v;
  std::vector<double> delta(v.size());
  rrr_step(proj, w, delta);
  for (double d : delta) CHECK(std::abs(d) < 1e-12);
}

TEST_CASE("runs are deterministic") {
  const auto sentences = synth_generate(SyntheticGrammar::standard(), 8, 2);
  const Corpus c = Corpus::from_sentences(sentences);
  const TreeLayout lay(c, kAlg);
  SolverConfig cfg;
  cfg.max_iters = 200;
  const Projector proj(lay, kAlg, cfg);
  const auto a = rrr_run(proj, init_state(lay, 3), Execution::kParallel);
  const auto b = rrr_run(proj, init_state(lay, 3), Execution::kSerial);
  CHECK(a.final_v == b.final_v);
  CHECK(a.trace.total == b.trace.total);
  CHECK(extract_solution(a.snapshot, c, proj) == extract_solution(b.snapshot, c, proj));
  CHECK(init_state(lay, 3) != init_state(lay, 4));
}

TEST_CASE("kmeans") {
  const std::vector<double> pts{0.0, 0.0, 0.1, 0.0, 5.0, 5.0, 5.2, 5.0};
  std::vector<double> centers;
  const auto a = kmeans(pts, 4, 2, 2, 10, centers);
  CHECK(a == std::vector<int>{0, 0, 1, 1});
  CHECK(centers[0] == doctest::Approx(0.05));
  CHECK(centers[2] == doctest::Approx(5.1));
  const auto one = kmeans(pts, 4, 2, 1, 10, centers);
  CHECK(one == std::vector<int>{0, 0, 0, 0});
  CHECK(centers[0] == doctest::Approx(2.575));
  CHECK(kmeans(pts, 4, 2, 9, 10, centers).size() == 4);
  CHECK(centers.size() == 8);
}

TEST_CASE("failure report") {
  Solution a, b;
  for (int i = 0; i < 3; ++i) {
    TreeRecord t;
    t.tokens = {"w" + std::to_string(i), "."};
    t.source_index = 10 - i;
    t.parsed = true;
    a.trees.push_back(t);
  }
  b = a;
  CHECK(failure_report({a, b}).empty());
  a.trees[0].parsed = false;
  a.trees[2].parsed = false;
  b.trees[2].parsed = false;
  const auto r = failure_report({a, b});
  REQUIRE(r.size() == 2);
  CHECK(r[0].source_index == 8);
  CHECK(r[0].failures == 2);
  CHECK(r[1].source_index == 10);
  b.trees.pop_back();
  CHECK_THROWS_AS(failure_report({a, b}), MismatchedCorporaError);
  CHECK_THROWS(failure_report({}));
}
