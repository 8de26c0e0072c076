#pragma once

// Divide-and-concur search for parse trees.
//
// Constraint set A: every adjacent layer pair is related by one valid
// branching event, and all leaf replicas of a word (per cluster) agree.
// Constraint set B: the root is the identity, the two replicas of a node
// agree, and the central bits of each node sum to one. The search iterates
//
//     v <- v + beta * (P_B(2 P_A(v) - v) - P_A(v))
//
// which is the relaxed-reflect-reflect update written out.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lge/algebra.hpp"
#include "lge/corpus.hpp"
#include "lge/layout.hpp"

namespace lge {

struct SolverConfig {
  double beta = 0.5;
  int max_iters = 10000;
  int restarts = 10;
  std::uint64_t rng_seed = 0;
  int clusters_per_word = 1;
  bool relax_multi_base = false;
  bool relax_bit_flip = false;
  double bit_flip_penalty = 0.0;
  std::map<std::string, CategoryCode> seed_lexicon;
  // Total rms change below which the run is treated as an exact solution.
  double stop_tolerance = 1e-12;
  int kmeans_iterations = 10;

  // Throws std::invalid_argument.
  void validate() const;
  bool operator==(const SolverConfig&) const = default;
};

enum class Execution { kSerial, kParallel };

// Projections onto A and B for a fixed corpus layout. Both projections are
// pure functions of their input; the parallel and serial paths produce
// bit-identical results.
class Projector {
 public:
  Projector(const TreeLayout& layout, const AlgebraConfig& algebra, const SolverConfig& config);

  // Writes P_A(in) to out and returns the squared distance |P_A(in) - in|^2.
  double project_a(std::span<const double> in, std::span<double> out,
                   Execution exec = Execution::kParallel) const;
  void project_b(std::span<const double> in, std::span<double> out,
                 Execution exec = Execution::kParallel) const;

  // Layer-pair part of P_A for one tree; returns its squared distance.
  double project_layers(int tree, std::span<const double> in, std::span<double> out) const;
  // Word part of P_A for one word; returns its squared distance.
  double project_word(int word, std::span<const double> in, std::span<double> out) const;
  void project_tree_b(int tree, std::span<const double> in, std::span<double> out) const;

  const TreeLayout& layout() const { return *layout_; }
  const AlgebraConfig& algebra() const { return algebra_; }
  const SolverConfig& config() const { return config_; }

  // Minimal squared distance of one layer pair to a valid branching event;
  // `lower` holds the l up-replicas, `upper` the l+1 down-replicas. Exposed
  // for testing against exhaustive enumeration.
  double layer_pair_cost(std::span<const double> lower, std::span<const double> upper, int nodes,
                         int* position = nullptr) const;

 private:
  struct PatternTable {
    // For pattern q and child bit i: parent side (0 left, 1 right) and
    // position holding the copy.
    std::vector<std::int8_t> copy_side, copy_pos;
    // For pattern q and parent slot s in [0, 2n): fixed value or -1 when the
    // slot is a copy.
    std::vector<std::int8_t> fixed;
    int n = 0;
    int count = 0;
  };

  struct ByteChoice {
    int pattern = 0;
    int released = -1;  // parent slot in [0, 2n) released by a bit flip
  };

  double byte_cost(const double* child, const double* left, const double* right, int pattern,
                   int released) const;
  double best_byte(const double* child, const double* left, const double* right,
                   ByteChoice* choice) const;
  double best_byte_released(const double* child, const double* left, const double* right,
                            ByteChoice* choice) const;
  double branch_cost(const double* child, const double* left, const double* right,
                     std::vector<ByteChoice>* choices) const;
  void write_branch(const double* child, const double* left, const double* right,
                    const std::vector<ByteChoice>& choices, double* out_child, double* out_left,
                    double* out_right) const;

  const TreeLayout* layout_;
  AlgebraConfig algebra_;
  SolverConfig config_;
  PatternTable table_;
  // word id -> seed code (empty when unseeded)
  std::vector<std::vector<double>> seed_;
};

// Allocates the search vector and fills it i.i.d. uniform [0, 1].
std::vector<double> init_state(const TreeLayout& layout, std::uint64_t rng_seed);

struct ErrorTrace {
  int code_length = 0;
  // Row i: per-bit rms change at iteration i (code_length values).
  std::vector<double> per_bit;
  std::vector<double> total;
  int min_index = -1;

  int iterations() const { return static_cast<int>(total.size()); }
  double bit(int iter, int b) const { return per_bit[static_cast<std::size_t>(iter) * code_length + b]; }
  void write_csv(const std::string& path) const;
};

struct RrrResult {
  std::vector<double> final_v;
  std::vector<double> snapshot;  // v at the iteration of least change
  ErrorTrace trace;
  bool converged = false;
};

// One RRR step; returns the step (new v minus old v) in `delta`.
void rrr_step(const Projector& projector, std::span<double> v, std::span<double> delta,
              Execution exec = Execution::kParallel);

RrrResult rrr_run(const Projector& projector, std::vector<double> v0,
                  Execution exec = Execution::kParallel);

}  // namespace lge
