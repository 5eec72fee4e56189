#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carpet/exec.hpp"
#include "carpet/graph.hpp"
#include "carpet/table.hpp"

namespace carpet {

/// Proper k-partitions of the rows and of the columns (index sets, disjoint,
/// covering, nonempty).
struct BiPartition {
    std::vector<std::vector<std::size_t>> row_clusters;
    std::vector<std::vector<std::size_t>> col_clusters;
};

BiPartition make_bipartition(const std::vector<int>& row_labels, std::size_t row_k,
                             const std::vector<int>& col_labels, std::size_t col_k);

struct DiscrepancyWitness {
    std::size_t block_row = 0, block_col = 0;
    std::vector<std::size_t> rows, cols; // the subsets X, Y attaining the maximum
};

struct DiscrepancyReport {
    double md = 0.0;
    DiscrepancyWitness witness;
    Matrix densities;     // k x k relative densities rho(R_a, C_b)
    Matrix block_max;     // per-block maximum deviation (the md of each block)
    double sk = 0.0;      // k-th nontrivial singular value of the normalized table
    double bound_rhs = 0.0;   // 9 md (k+2 - 9k ln md), defined for 0 < md < 1
    bool bound_defined = false;
    bool bound_holds = false; // sk <= bound_rhs + 1e-9, when defined
    std::string note;         // records resolved conventions (directed pairing)
};

/// Exact multiway discrepancy at a fixed bi-partition: the maximum over blocks
/// and nonempty subsets X of R_a, Y of C_b of
/// |c(X,Y) - rho(R_a,C_b) Vol(X) Vol(Y)| / sqrt(Vol(X) Vol(Y)).
/// Every block must satisfy |R_a| <= 20 and |C_b| <= 20; the 2^|R_a| 2^|C_b|
/// enumeration runs blocks (and X-ranges within a block) concurrently with a
/// deterministic max reduction (lexicographic witness tie-break).
DiscrepancyReport md_exact(const ContingencyTable& t, const BiPartition& p,
                           Exec exec = Exec::Parallel);

/// Monte-Carlo subset search; a certified lower bound on md_exact since md is a
/// maximum. Draws `samples` subset pairs per block; deterministic given `seed`.
DiscrepancyReport md_sampled(const ContingencyTable& t, const BiPartition& p,
                             std::size_t samples, std::uint64_t seed);

/// Directed multiway discrepancy: rows of the table are the in side (row sums =
/// in-degrees), columns the out side. Subsets are drawn from the blocks of the
/// given in/out clusterings and paired with the density of the same (a,b) block.
DiscrepancyReport md_directed(const ContingencyTable& t,
                              const std::vector<std::vector<std::size_t>>& in_clusters,
                              const std::vector<std::vector<std::size_t>>& out_clusters,
                              Exec exec = Exec::Parallel);

/// Maximum deviation over subsets of one row-block x column-block pair, with the
/// same guards as md_exact. Used for per-block diagnostics.
double md_block(const ContingencyTable& t, const std::vector<std::size_t>& rows,
                const std::vector<std::size_t>& cols, Exec exec = Exec::Parallel);

struct ChiSquare {
    double from_singulars = 0.0; // N sum_{i>=1} s_i^2
    double direct = 0.0;         // N sum_ij (c_ij - r_i c_j)^2 / (r_i c_j), normalized entries
};

/// Both routes to the chi^2 statistic of Eq-style independence testing; callers
/// (and tests) check they agree. N is the sample size behind the counts.
ChiSquare chi_square(const ContingencyTable& t, double n_samples);

/// w(X,Y) - Vol(X) Vol(Y) on a graph normalized to total weight 1; equals the
/// sum of the corresponding modularity-matrix entries.
double modularity_deviation(const WeightedGraph& g, const std::vector<std::size_t>& x,
                            const std::vector<std::size_t>& y);

} // namespace carpet
