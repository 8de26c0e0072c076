#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include "lge/solver.hpp"

namespace lge {

std::vector<double> init_state(const TreeLayout& layout, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  std::vector<double> v(layout.dimension());
  for (auto& x : v) x = uniform01(rng);
  return v;
}

void ErrorTrace::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "iter,total";
  for (int b = 1; b <= code_length; ++b) out << ",bit_" << b;
  out << '\n';
  out.precision(9);
  for (int i = 0; i < iterations(); ++i) {
    out << i + 1 << ',' << total[i];
    for (int b = 0; b < code_length; ++b) out << ',' << bit(i, b);
    out << '\n';
  }
}

namespace {

struct Workspace {
  std::vector<double> pa, reflected, pb;
  explicit Workspace(std::size_t n) : pa(n), reflected(n), pb(n) {}
};

void step_into(const Projector& projector, std::span<const double> v, std::span<double> delta,
               Workspace& ws, Execution exec) {
  const double beta = projector.config().beta;
  projector.project_a(v, ws.pa, exec);
  for (std::size_t i = 0; i < v.size(); ++i) ws.reflected[i] = 2.0 * ws.pa[i] - v[i];
  projector.project_b(ws.reflected, ws.pb, exec);
  for (std::size_t i = 0; i < v.size(); ++i) delta[i] = beta * (ws.pb[i] - ws.pa[i]);
}

}  // namespace

void rrr_step(const Projector& projector, std::span<double> v, std::span<double> delta,
              Execution exec) {
  Workspace ws(v.size());
  step_into(projector, v, delta, ws, exec);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += delta[i];
}

RrrResult rrr_run(const Projector& projector, std::vector<double> v0, Execution exec) {
  const TreeLayout& layout = projector.layout();
  if (v0.size() != layout.dimension()) throw std::invalid_argument("v0 does not match the layout");
  const SolverConfig& config = projector.config();
  const int dim = layout.code_length();
  const double values = static_cast<double>(layout.num_values());

  RrrResult result;
  result.trace.code_length = dim;
  result.trace.per_bit.reserve(static_cast<std::size_t>(config.max_iters) * dim);
  result.trace.total.reserve(config.max_iters);
  std::vector<double> v = std::move(v0);
  std::vector<double> delta(v.size());
  std::vector<double> bit_sums(dim);
  Workspace ws(v.size());
  double min_change = std::numeric_limits<double>::infinity();

  for (int it = 0; it < config.max_iters; ++it) {
    step_into(projector, v, delta, ws, exec);
    std::fill(bit_sums.begin(), bit_sums.end(), 0.0);
    for (std::size_t i = 0; i < delta.size(); i += dim) {
      for (int b = 0; b < dim; ++b) bit_sums[b] += delta[i + b] * delta[i + b];
    }
    double all = 0.0;
    for (int b = 0; b < dim; ++b) {
      all += bit_sums[b];
      result.trace.per_bit.push_back(std::sqrt(bit_sums[b] / values));
    }
    const double total = std::sqrt(all / (values * dim));
    result.trace.total.push_back(total);
    if (total < min_change) {
      min_change = total;
      result.trace.min_index = it;
      result.snapshot = v;
    }
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += delta[i];
    if (total < config.stop_tolerance) {
      result.converged = true;
      break;
    }
  }
  result.final_v = std::move(v);
  return result;
}

}  // namespace lge
