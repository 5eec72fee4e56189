#include "carpet/cut.hpp"

#include <cmath>
#include <limits>

#include "carpet/eigen.hpp"
#include "carpet/errors.hpp"

namespace carpet {

NormalizedCutForms normalized_cut_forms(const WeightedGraph& g, const Partition& p) {
    const std::size_t n = g.size(), k = p.k;
    if (p.labels.size() != n) throw PreconditionError("partition size must match vertex count");
    for (double v : p.volumes)
        if (v <= 0.0) throw PreconditionError("cluster with zero volume");

    Matrix block(k, k, 0.0); // block(a,b) = w(V_a, V_b)
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            block(p.labels[i], p.labels[j]) += g.weight(i, j);

    NormalizedCutForms f;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b)
            f.pairwise += (1.0 / p.volumes[a] + 1.0 / p.volumes[b]) * block(a, b);
    for (std::size_t a = 0; a < k; ++a) {
        double cross = 0.0;
        for (std::size_t b = 0; b < k; ++b)
            if (b != a) cross += block(a, b);
        f.complement += cross / p.volumes[a];
    }
    f.k_minus = static_cast<double>(k);
    for (std::size_t a = 0; a < k; ++a) f.k_minus -= block(a, a) / p.volumes[a];
    return f;
}

double normalized_cut(const WeightedGraph& g, const Partition& p) {
    NormalizedCutForms f = normalized_cut_forms(g, p);
    const double tol = 1e-10 * std::max(1.0, std::fabs(f.complement));
    if (std::fabs(f.pairwise - f.complement) > tol || std::fabs(f.k_minus - f.complement) > tol)
        throw NumericalError("normalized cut forms disagree");
    return f.complement;
}

namespace {

template <typename Fn>
void enumerate_partitions(std::size_t n, std::size_t k, std::vector<int>& labels,
                          std::size_t used, Fn&& fn) {
    const std::size_t i = labels.size();
    if (i == n) {
        if (used == k) fn(labels);
        return;
    }
    if (used + (n - i) < k) return;
    const std::size_t limit = std::min(used + 1, k);
    for (std::size_t c = 0; c < limit; ++c) {
        labels.push_back(static_cast<int>(c));
        enumerate_partitions(n, k, labels, c == used ? used + 1 : used, fn);
        labels.pop_back();
    }
}

} // namespace

std::pair<Partition, double> brute_force_normalized_cut(const WeightedGraph& g, std::size_t k) {
    const std::size_t n = g.size();
    if (n > 12) throw PreconditionError("exact normalized cut limited to n <= 12");
    if (k < 1 || k > n) throw PreconditionError("cluster count must lie in [1, n]");

    std::vector<int> best_labels;
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> labels;
    labels.reserve(n);
    enumerate_partitions(n, k, labels, 0, [&](const std::vector<int>& lab) {
        Partition p = make_partition(lab, k, g.degrees());
        const double v = normalized_cut(g, p);
        if (v < best) {
            best = v;
            best_labels = lab;
        }
    });
    return {make_partition(best_labels, k, g.degrees()), best};
}

CutBoundReport check_cut_lower_bound(const WeightedGraph& g, std::size_t k) {
    if (!g.connected()) throw PreconditionError("cut bound requires a connected graph");
    if (g.size() > 12) throw PreconditionError("exact cut bound limited to n <= 12");
    if (k < 1 || k > g.size()) throw PreconditionError("cluster count must lie in [1, n]");

    EigenSystem es = eigh(normalized_laplacian(g));
    CutBoundReport r;
    for (std::size_t i = 1; i < k; ++i) r.eigenvalue_sum += es.values[i];
    r.min_cut = brute_force_normalized_cut(g, k).second;
    r.holds = r.eigenvalue_sum <= r.min_cut + 1e-9;
    return r;
}

} // namespace carpet
