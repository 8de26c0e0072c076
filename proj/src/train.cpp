#include "lge/train.hpp"

#include <limits>
#include <sstream>

namespace lge {

void attach_perplexity(Solution& solution) {
  solution.perplexity.reset();
  if (solution.parsed_count() == 0) return;
  solution.perplexity = perplexity(extract_rules(solution), solution, RuleMode::kContext);
}

RestartRun train_once(const Corpus& corpus, const AlgebraConfig& algebra,
                      const SolverConfig& config, int restart, Execution exec) {
  SolverConfig cfg = config;
  cfg.rng_seed = config.rng_seed + static_cast<std::uint64_t>(restart);
  const TreeLayout layout(corpus, algebra);
  const Projector projector(layout, algebra, cfg);
  RrrResult res = rrr_run(projector, init_state(layout, cfg.rng_seed), exec);
  RestartRun run;
  run.solution = extract_solution(res.snapshot, corpus, projector);
  run.solution.config = config;
  run.solution.restart = restart;
  run.solution.rng_seed = cfg.rng_seed;
  run.solution.iterations = res.trace.iterations();
  run.solution.min_change_iteration = res.trace.min_index;
  run.solution.min_change = res.trace.min_index >= 0 ? res.trace.total[res.trace.min_index] : 0.0;
  run.solution.converged = res.converged;
  attach_perplexity(run.solution);
  run.trace = std::move(res.trace);
  return run;
}

std::vector<RestartRun> train_restarts(const Corpus& corpus, const AlgebraConfig& algebra,
                                       const SolverConfig& config, bool parallel) {
  config.validate();
  std::vector<RestartRun> runs(static_cast<std::size_t>(config.restarts));
  if (config.restarts == 1) {
    runs[0] = train_once(corpus, algebra, config, 0, parallel ? Execution::kParallel : Execution::kSerial);
    return runs;
  }
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int r = 0; r < config.restarts; ++r) runs[r] = train_once(corpus, algebra, config, r);
  return runs;
}

std::size_t best_restart(const std::vector<Solution>& solutions) {
  if (solutions.empty()) throw std::invalid_argument("no solutions to choose from");
  auto score = [](const Solution& s) {
    return s.perplexity ? s.perplexity->total : std::numeric_limits<double>::infinity();
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < solutions.size(); ++i) {
    const double a = score(solutions[i]), b = score(solutions[best]);
    if (a < b || (a == b && solutions[i].parsed_count() > solutions[best].parsed_count())) best = i;
  }
  return best;
}

}  // namespace lge
