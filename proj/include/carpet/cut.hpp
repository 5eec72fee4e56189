#pragma once

#include "carpet/graph.hpp"
#include "carpet/kmeans.hpp"

namespace carpet {

/// The three equivalent forms of the k-way normalized cut of one partition.
struct NormalizedCutForms {
    double pairwise = 0.0;    // sum_{a<b} (1/Vol(V_a) + 1/Vol(V_b)) w(V_a, V_b)
    double complement = 0.0;  // sum_a w(V_a, complement) / Vol(V_a)
    double k_minus = 0.0;     // k - sum_a w(V_a, V_a) / Vol(V_a)
};

NormalizedCutForms normalized_cut_forms(const WeightedGraph& g, const Partition& p);

/// Complement-sum form; throws NumericalError if the three forms disagree
/// beyond 1e-10.
double normalized_cut(const WeightedGraph& g, const Partition& p);

/// Exhaustive minimum of the normalized cut over all proper k-partitions (n <= 12).
std::pair<Partition, double> brute_force_normalized_cut(const WeightedGraph& g, std::size_t k);

struct CutBoundReport {
    double eigenvalue_sum = 0.0; // sum of the k-1 smallest positive eigenvalues
    double min_cut = 0.0;        // exact f_k
    bool holds = false;          // eigenvalue_sum <= min_cut + 1e-9
};

/// Checks sum_{i=1}^{k-1} lambda_i <= f_k(G) with f_k by exact enumeration.
CutBoundReport check_cut_lower_bound(const WeightedGraph& g, std::size_t k);

} // namespace carpet
