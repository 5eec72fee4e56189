#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "carpet/matrix.hpp"

namespace carpet {

/// Nonnegative m x n matrix with strictly positive row and column margins.
/// Also models directed graphs: rows are destinations (in side), columns are
/// origins (out side), with a zero diagonal forced at load time by the caller.
class ContingencyTable {
public:
    explicit ContingencyTable(Matrix entries);

    std::size_t row_count() const { return entries_.rows(); }
    std::size_t col_count() const { return entries_.cols(); }
    const Matrix& entries() const { return entries_; }
    double entry(std::size_t i, std::size_t j) const { return entries_(i, j); }
    const Vec& row_sums() const { return row_sums_; }
    const Vec& col_sums() const { return col_sums_; }
    double total() const { return total_; }
    bool normalized() const;

    // True iff C C^T (m <= n) or C^T C (m > n) is irreducible.
    bool non_degenerate() const;

private:
    Matrix entries_;
    Vec row_sums_, col_sums_;
    double total_ = 0.0;
};

struct LabeledTable {
    ContingencyTable table;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
};

/// CSV (RFC-4180 subset, UTF-8, '.' decimal): first row = column labels, first
/// column = row labels. Cell values must be nonnegative reals; labels unique.
LabeledTable parse_csv_table(std::string_view text);

/// Scales entries so they sum to 1.
ContingencyTable normalize_total(const ContingencyTable& t);

/// Returns a copy with the min(m,n) diagonal cells set to zero (directed-graph
/// convention). Margins are recomputed and must stay positive.
ContingencyTable zero_diagonal(const ContingencyTable& t);

/// C_D = D_row^{-1/2} C D_col^{-1/2}; singular values lie in [0,1], invariant
/// under scaling of C.
Matrix normalized_table(const ContingencyTable& t);

} // namespace carpet
