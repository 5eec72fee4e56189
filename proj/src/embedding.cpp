#include "carpet/embedding.hpp"

#include <cmath>

#include "carpet/errors.hpp"

namespace carpet {

std::pair<Embedding, EigenSystem> vertex_representatives_full(const WeightedGraph& g,
                                                              std::size_t d) {
    if (!g.connected()) throw PreconditionError("vertex representatives require a connected graph");
    if (!g.normalized())
        throw PreconditionError("vertex representatives require total weight 1");
    const std::size_t n = g.size();
    if (d < 1 || d > n - 1)
        throw PreconditionError("embedding dimension must lie in [1, n-1]");

    EigenSystem es = eigh(normalized_laplacian(g));

    Embedding e;
    e.points = Matrix(n, d);
    e.weights = g.degrees();
    e.source_eigenvalues.assign(es.values.begin() + 1, es.values.begin() + 1 + d);
    for (std::size_t i = 0; i < n; ++i) {
        const double inv_sqrt = 1.0 / std::sqrt(g.degrees()[i]);
        for (std::size_t j = 0; j < d; ++j) e.points(i, j) = es.vectors(i, j + 1) * inv_sqrt;
    }
    return {std::move(e), std::move(es)};
}

Embedding vertex_representatives(const WeightedGraph& g, std::size_t d) {
    return vertex_representatives_full(g, d).first;
}

std::pair<Embedding, Embedding> correspondence_representatives(const ContingencyTable& t,
                                                               std::size_t k) {
    if (!t.non_degenerate())
        throw PreconditionError("correspondence representatives require a non-degenerate table");
    if (!t.normalized())
        throw PreconditionError("correspondence representatives require total weight 1");
    SvdSystem sv = svd(normalized_table(t));
    const std::size_t rank = sv.singulars.size();
    if (k < 1 || k + 1 > rank)
        throw PreconditionError("requested dimension exceeds table rank minus one");

    const std::size_t m = t.row_count(), n = t.col_count();
    Embedding rows, cols;
    rows.points = Matrix(m, k);
    cols.points = Matrix(n, k);
    rows.weights = t.row_sums();
    cols.weights = t.col_sums();
    rows.source_eigenvalues.assign(sv.singulars.begin() + 1, sv.singulars.begin() + 1 + k);
    cols.source_eigenvalues = rows.source_eigenvalues;
    for (std::size_t i = 0; i < m; ++i) {
        const double inv_sqrt = 1.0 / std::sqrt(t.row_sums()[i]);
        for (std::size_t j = 0; j < k; ++j) rows.points(i, j) = sv.left(i, j + 1) * inv_sqrt;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double inv_sqrt = 1.0 / std::sqrt(t.col_sums()[i]);
        for (std::size_t j = 0; j < k; ++j) cols.points(i, j) = sv.right(i, j + 1) * inv_sqrt;
    }
    return {std::move(rows), std::move(cols)};
}

double energy(const WeightedGraph& g, const Matrix& x) {
    if (x.rows() != g.size()) throw PreconditionError("representative count must match vertex count");
    const std::size_t n = g.size(), d = x.cols();
    double q = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double w = g.weight(i, j);
            if (w == 0.0) continue;
            double dist2 = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = x(i, c) - x(j, c);
                dist2 += diff * diff;
            }
            q += w * dist2;
        }
    return q;
}

double energy_trace(const WeightedGraph& g, const Matrix& x) {
    if (x.rows() != g.size()) throw PreconditionError("representative count must match vertex count");
    const std::size_t n = g.size(), d = x.cols();
    SymmetricMatrix l = laplacian(g);
    double tr = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            double li = 0.0;
            for (std::size_t j = 0; j < n; ++j) li += l(i, j) * x(j, c);
            tr += x(i, c) * li;
        }
    }
    return tr;
}

} // namespace carpet
