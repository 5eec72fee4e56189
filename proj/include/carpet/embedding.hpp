#pragma once

#include <utility>

#include "carpet/eigen.hpp"
#include "carpet/graph.hpp"
#include "carpet/table.hpp"

namespace carpet {

/// Rows of `points` are d-dimensional representatives r_i; `weights` is a positive
/// vector summing to 1 (degrees or margins). The columns are weighted-centered
/// (sum_i w_i r_i = 0) and weighted-orthonormal (sum_i w_i r_i r_i^T = I_d).
struct Embedding {
    Matrix points;
    Vec weights;
    Vec source_eigenvalues; // eigenvalues (or singular values) behind the columns
};

/// Optimal d-dimensional vertex representatives: columns D^{-1/2} u_1 ... D^{-1/2} u_d
/// of the normalized Laplacian eigenvectors, the trivial u_0 dropped.
/// Requires a connected graph normalized to total weight 1, and 1 <= d <= n-1.
Embedding vertex_representatives(const WeightedGraph& g, std::size_t d);

/// Also returns the full normalized-Laplacian spectrum alongside the embedding.
std::pair<Embedding, EigenSystem> vertex_representatives_full(const WeightedGraph& g,
                                                              std::size_t d);

/// Row and column representatives from singular vectors 1..k of the normalized
/// table (trivial pair dropped), weighted by the respective margins.
/// Requires a non-degenerate normalized table and 1 <= k <= rank-1.
std::pair<Embedding, Embedding> correspondence_representatives(const ContingencyTable& t,
                                                               std::size_t k);

/// Energy sum_{i<j} w_ij ||r_i - r_j||^2 of representatives given as rows of x.
double energy(const WeightedGraph& g, const Matrix& x);

/// Same quantity via the algebraic route tr(X^T L X); tests assert the two agree.
double energy_trace(const WeightedGraph& g, const Matrix& x);

} // namespace carpet
