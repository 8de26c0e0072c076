#include "lge/kmeans.hpp"

#include <algorithm>
#include <limits>

namespace lge {

namespace {

double sq_dist(const double* a, const double* b, std::size_t dim) {
  double d = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double x = a[i] - b[i];
    d += x * x;
  }
  return d;
}

}  // namespace

std::vector<int> kmeans(std::span<const double> points, std::size_t count, std::size_t dim,
                        int k, int iterations, std::vector<double>& centers) {
  std::vector<int> assign(count, 0);
  if (count == 0) {
    centers.clear();
    return assign;
  }
  const std::size_t clusters = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 1)), count);
  const double* data = points.data();
  centers.assign(clusters * dim, 0.0);
  std::copy_n(data, dim, centers.begin());

  // Farthest-point seeding.
  std::vector<double> nearest(count, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < clusters; ++c) {
    const double* prev = centers.data() + (c - 1) * dim;
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t p = 0; p < count; ++p) {
      nearest[p] = std::min(nearest[p], sq_dist(data + p * dim, prev, dim));
      if (nearest[p] > best_d) {
        best_d = nearest[p];
        best = p;
      }
    }
    std::copy_n(data + best * dim, dim, centers.begin() + c * dim);
  }
  if (clusters == 1) {
    std::fill(centers.begin(), centers.end(), 0.0);
    for (std::size_t p = 0; p < count; ++p) {
      for (std::size_t i = 0; i < dim; ++i) centers[i] += data[p * dim + i];
    }
    for (auto& c : centers) c /= static_cast<double>(count);
    return assign;
  }

  std::vector<double> sums(clusters * dim);
  std::vector<std::size_t> sizes(clusters);
  for (int it = 0; it < std::max(iterations, 1); ++it) {
    for (std::size_t p = 0; p < count; ++p) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < clusters; ++c) {
        const double d = sq_dist(data + p * dim, centers.data() + c * dim, dim);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      assign[p] = best;
    }
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t p = 0; p < count; ++p) {
      ++sizes[assign[p]];
      for (std::size_t i = 0; i < dim; ++i) sums[assign[p] * dim + i] += data[p * dim + i];
    }
    for (std::size_t c = 0; c < clusters; ++c) {
      if (sizes[c] == 0) continue;  // empty cluster keeps its center
      for (std::size_t i = 0; i < dim; ++i) {
        centers[c * dim + i] = sums[c * dim + i] / static_cast<double>(sizes[c]);
      }
    }
  }
  return assign;
}

}  // namespace lge
