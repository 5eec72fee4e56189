#include "carpet/kmeans.hpp"

#include <cmath>
#include <limits>

#include "carpet/errors.hpp"
#include "carpet/rng.hpp"

namespace carpet {

Partition make_partition(std::vector<int> labels, std::size_t k, const Vec& weights) {
    if (labels.size() != weights.size())
        throw PreconditionError("label count must match weight count");
    Partition p;
    p.labels = std::move(labels);
    p.k = k;
    p.volumes.assign(k, 0.0);
    for (std::size_t i = 0; i < p.labels.size(); ++i) {
        const int c = p.labels[i];
        if (c < 0 || static_cast<std::size_t>(c) >= k)
            throw PreconditionError("cluster label out of range");
        p.volumes[c] += weights[i];
    }
    std::vector<int> count(k, 0);
    for (int c : p.labels) ++count[c];
    for (std::size_t c = 0; c < k; ++c)
        if (count[c] == 0)
            throw PreconditionError("partition has an empty cluster");
    return p;
}

namespace {

Matrix weighted_centroids(const Matrix& points, const Vec& weights, const Partition& p) {
    const std::size_t d = points.cols();
    Matrix centers(p.k, d, 0.0);
    Vec vol(p.k, 0.0);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        const int c = p.labels[i];
        vol[c] += weights[i];
        for (std::size_t j = 0; j < d; ++j) centers(c, j) += weights[i] * points(i, j);
    }
    for (std::size_t c = 0; c < p.k; ++c) {
        if (vol[c] <= 0.0) throw PreconditionError("cluster with zero volume");
        for (std::size_t j = 0; j < d; ++j) centers(c, j) /= vol[c];
    }
    return centers;
}

double dist2_row(const Matrix& a, std::size_t i, const Matrix& b, std::size_t c) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        const double diff = a(i, j) - b(c, j);
        s += diff * diff;
    }
    return s;
}

} // namespace

double weighted_k_variance(const Matrix& points, const Vec& weights, const Partition& p) {
    if (p.labels.size() != points.rows())
        throw PreconditionError("partition size must match point count");
    Matrix centers = weighted_centroids(points, weights, p);
    double s = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i)
        s += weights[i] * dist2_row(points, i, centers, p.labels[i]);
    return s;
}

namespace {

struct LloydRun {
    std::vector<int> labels;
    Matrix centers;
    double objective = std::numeric_limits<double>::infinity();
    int iterations = 0;
};

LloydRun lloyd_once(const Matrix& points, const Vec& weights, std::size_t k, std::uint64_t seed) {
    const std::size_t n = points.rows(), d = points.cols();
    Rng rng(seed);

    // weighted k-means++ seeding
    Matrix centers(k, d);
    {
        std::size_t first = rng.weighted_index(weights);
        for (std::size_t j = 0; j < d; ++j) centers(0, j) = points(first, j);
        Vec nearest(n);
        for (std::size_t i = 0; i < n; ++i) nearest[i] = dist2_row(points, i, centers, 0);
        for (std::size_t c = 1; c < k; ++c) {
            Vec prob(n);
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                prob[i] = weights[i] * nearest[i];
                total += prob[i];
            }
            const std::size_t pick = total > 0.0 ? rng.weighted_index(prob)
                                                 : rng.weighted_index(weights);
            for (std::size_t j = 0; j < d; ++j) centers(c, j) = points(pick, j);
            for (std::size_t i = 0; i < n; ++i)
                nearest[i] = std::min(nearest[i], dist2_row(points, i, centers, c));
        }
    }

    std::vector<int> labels(n, -1);
    double prev_objective = std::numeric_limits<double>::infinity();
    int iter = 0;
    for (; iter < 500; ++iter) {
        // assignment; ties toward the lowest center index
        bool changed = false;
        Vec point_cost(n);
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = dist2_row(points, i, centers, 0);
            for (std::size_t c = 1; c < k; ++c) {
                const double dd = dist2_row(points, i, centers, c);
                if (dd < best_d) {
                    best_d = dd;
                    best = static_cast<int>(c);
                }
            }
            point_cost[i] = best_d;
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }

        // empty-cluster repair: reseed at the point with the largest weighted
        // distance to its current center
        std::vector<int> count(k, 0);
        for (int c : labels) ++count[c];
        for (std::size_t c = 0; c < k; ++c) {
            if (count[c] > 0) continue;
            std::size_t far = 0;
            double far_cost = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double wcost = weights[i] * point_cost[i];
                if (count[labels[i]] > 1 && wcost > far_cost) {
                    far_cost = wcost;
                    far = i;
                }
            }
            --count[labels[far]];
            labels[far] = static_cast<int>(c);
            count[c] = 1;
            point_cost[far] = 0.0;
            for (std::size_t j = 0; j < d; ++j) centers(c, j) = points(far, j);
            changed = true;
        }

        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) objective += weights[i] * point_cost[i];

        // update step
        Vec vol(k, 0.0);
        Matrix next(k, d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            vol[labels[i]] += weights[i];
            for (std::size_t j = 0; j < d; ++j) next(labels[i], j) += weights[i] * points(i, j);
        }
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t j = 0; j < d; ++j) next(c, j) /= vol[c];
        centers = std::move(next);

        if (!changed) break;
        if (objective > prev_objective + 1e-12 * std::max(1.0, prev_objective))
            throw NumericalError("Lloyd objective increased");
        if (prev_objective - objective < 1e-12 * std::max(1.0, prev_objective) &&
            std::isfinite(prev_objective))
            break;
        prev_objective = objective;
    }

    LloydRun run;
    run.labels = std::move(labels);
    run.centers = std::move(centers);
    run.iterations = iter + 1;
    return run;
}

} // namespace

KMeansResult weighted_kmeans(const Matrix& points, const Vec& weights, std::size_t k,
                             std::uint64_t seed, int restarts, Exec exec) {
    const std::size_t n = points.rows();
    if (k < 1 || k > n) throw PreconditionError("cluster count must lie in [1, n]");
    if (weights.size() != n) throw PreconditionError("weight count must match point count");
    for (double w : weights)
        if (w <= 0.0) throw PreconditionError("weights must be strictly positive");
    if (restarts < 1) throw PreconditionError("restarts must be >= 1");

    std::vector<LloydRun> runs(restarts);
    std::vector<double> objectives(restarts);
    std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
    for (int r = 0; r < restarts; ++r) {
        try {
            runs[r] = lloyd_once(points, weights, k,
                                 derive_seed(seed, static_cast<std::uint64_t>(r)));
            Partition p = make_partition(runs[r].labels, k, weights);
            objectives[r] = weighted_k_variance(points, weights, p);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
            objectives[r] = std::numeric_limits<double>::infinity();
        }
    }
    if (failure) std::rethrow_exception(failure);

    // deterministic merge: minimum objective, lowest restart index on ties
    int best = 0;
    for (int r = 1; r < restarts; ++r)
        if (objectives[r] < objectives[best]) best = r;

    KMeansResult out;
    out.partition = make_partition(runs[best].labels, k, weights);
    out.centers = weighted_centroids(points, weights, out.partition);
    out.variance = objectives[best];
    out.iterations = runs[best].iterations;
    out.seed = seed;
    return out;
}

namespace {

// Enumerates restricted-growth strings over exactly k classes.
template <typename Fn>
void enumerate_partitions(std::size_t n, std::size_t k, std::vector<int>& labels,
                          std::size_t used, Fn&& fn) {
    const std::size_t i = labels.size();
    if (i == n) {
        if (used == k) fn(labels);
        return;
    }
    // prune: remaining slots must be able to introduce the missing classes
    if (used + (n - i) < k) return;
    const std::size_t limit = std::min(used + 1, k);
    for (std::size_t c = 0; c < limit; ++c) {
        labels.push_back(static_cast<int>(c));
        enumerate_partitions(n, k, labels, c == used ? used + 1 : used, fn);
        labels.pop_back();
    }
}

} // namespace

std::pair<Partition, double> brute_force_min_variance(const Matrix& points, const Vec& weights,
                                                      std::size_t k) {
    const std::size_t n = points.rows();
    if (n > 14) throw PreconditionError("brute-force variance limited to n <= 14");
    if (k < 1 || k > n) throw PreconditionError("cluster count must lie in [1, n]");

    std::vector<int> best_labels;
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> labels;
    labels.reserve(n);
    enumerate_partitions(n, k, labels, 0, [&](const std::vector<int>& lab) {
        Partition p = make_partition(lab, k, weights);
        const double v = weighted_k_variance(points, weights, p);
        if (v < best) {
            best = v;
            best_labels = lab;
        }
    });
    return {make_partition(best_labels, k, weights), best};
}

} // namespace carpet
