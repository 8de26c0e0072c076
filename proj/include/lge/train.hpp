#pragma once

// Independent restarts of the solver over one corpus and selection of the
// best one.

#include <vector>

#include "lge/algebra.hpp"
#include "lge/corpus.hpp"
#include "lge/rules.hpp"
#include "lge/solution.hpp"
#include "lge/solver.hpp"

namespace lge {

struct RestartRun {
  Solution solution;
  ErrorTrace trace;
};

// Restart r runs with seed config.rng_seed + r. Restarts execute
// concurrently when `parallel`; results do not depend on it.
std::vector<RestartRun> train_restarts(const Corpus& corpus, const AlgebraConfig& algebra,
                                       const SolverConfig& config, bool parallel = true);

// One restart with an explicit seed.
RestartRun train_once(const Corpus& corpus, const AlgebraConfig& algebra,
                      const SolverConfig& config, int restart,
                      Execution exec = Execution::kSerial);

// Lowest total perplexity, then most parsed trees, then lowest restart
// index. Solutions without parsed trees rank last.
std::size_t best_restart(const std::vector<Solution>& solutions);

// Fills solution.perplexity (context mode) when any tree parsed.
void attach_perplexity(Solution& solution);

}  // namespace lge
