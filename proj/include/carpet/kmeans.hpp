#pragma once

#include <cstdint>

#include "carpet/exec.hpp"
#include "carpet/matrix.hpp"

namespace carpet {

/// Proper k-partition: labels in [0,k), every cluster nonempty.
/// `volumes` are the per-cluster sums of the point weights.
struct Partition {
    std::vector<int> labels;
    std::size_t k = 0;
    Vec volumes;
};

Partition make_partition(std::vector<int> labels, std::size_t k, const Vec& weights);

struct KMeansResult {
    Partition partition;
    Matrix centers; // k x d weighted centroids
    double variance = 0.0;
    int iterations = 0;
    std::uint64_t seed = 0;
};

/// Weighted k-variance: sum_i sum_{j in V_i} w_j ||r_j - c_i||^2 with c_i the
/// weighted centroid of cluster i.
double weighted_k_variance(const Matrix& points, const Vec& weights, const Partition& p);

/// Lloyd iterations from weighted k-means++ seeding; best of `restarts`
/// independent starts, deterministic given `seed`. Restarts run concurrently
/// under Exec::Parallel and are merged by minimum objective with lowest-restart
/// tie-break, so both execution modes return identical results.
KMeansResult weighted_kmeans(const Matrix& points, const Vec& weights, std::size_t k,
                             std::uint64_t seed, int restarts = 16,
                             Exec exec = Exec::Parallel);

/// Global minimum of the weighted k-variance over all proper k-partitions by
/// enumeration (n <= 14).
std::pair<Partition, double> brute_force_min_variance(const Matrix& points, const Vec& weights,
                                                      std::size_t k);

} // namespace carpet
