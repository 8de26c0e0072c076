#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lge {

// Deterministic Lloyd k-means over `count` points of dimension `dim` stored
// contiguously. Centers start from farthest-point seeding beginning at
// point 0; ties resolve to the lowest index. Returns the cluster of every
// point; `centers` receives the means of the final partition. Uses
// min(k, count) clusters.
std::vector<int> kmeans(std::span<const double> points, std::size_t count, std::size_t dim,
                        int k, int iterations, std::vector<double>& centers);

}  // namespace lge
