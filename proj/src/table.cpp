#include "carpet/table.hpp"

#include <cmath>
#include <numeric>
#include <set>

#include "carpet/errors.hpp"

namespace carpet {

ContingencyTable::ContingencyTable(Matrix entries) : entries_(std::move(entries)) {
    const std::size_t m = entries_.rows(), n = entries_.cols();
    if (m == 0 || n == 0) throw PreconditionError("table must be non-empty");
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (entries_(i, j) < 0.0 || !std::isfinite(entries_(i, j)))
                throw PreconditionError("table entries must be finite and nonnegative");
    row_sums_.assign(m, 0.0);
    col_sums_.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            row_sums_[i] += entries_(i, j);
            col_sums_[j] += entries_(i, j);
        }
    for (std::size_t i = 0; i < m; ++i)
        if (row_sums_[i] <= 0.0)
            throw PreconditionError("row " + std::to_string(i) + " has zero margin");
    for (std::size_t j = 0; j < n; ++j)
        if (col_sums_[j] <= 0.0)
            throw PreconditionError("column " + std::to_string(j) + " has zero margin");
    for (double s : row_sums_) total_ += s;
}

bool ContingencyTable::normalized() const { return std::fabs(total_ - 1.0) <= 1e-9; }

bool ContingencyTable::non_degenerate() const {
    // The Gram matrix on the smaller side is irreducible iff the bipartite
    // support graph connects that side through shared rows/columns.
    const bool rows_side = row_count() <= col_count();
    const std::size_t side = rows_side ? row_count() : col_count();
    const std::size_t other = rows_side ? col_count() : row_count();
    std::vector<std::size_t> parent(side);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t o = 0; o < other; ++o) {
        std::size_t first = side;
        for (std::size_t s = 0; s < side; ++s) {
            const double v = rows_side ? entries_(s, o) : entries_(o, s);
            if (v > 0.0) {
                if (first == side)
                    first = s;
                else
                    parent[find(s)] = find(first);
            }
        }
    }
    const std::size_t root = find(0);
    for (std::size_t s = 1; s < side; ++s)
        if (find(s) != root) return false;
    return true;
}

namespace {

// One CSV record; handles quoted fields with doubled quotes.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t lineno) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) throw ParseError("unterminated quote on CSV line " + std::to_string(lineno));
    fields.push_back(cur);
    return fields;
}

double parse_cell(const std::string& s, std::size_t lineno) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ParseError("non-numeric cell '" + s + "' on CSV line " + std::to_string(lineno));
    }
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\r')) ++pos;
    if (pos != s.size())
        throw ParseError("non-numeric cell '" + s + "' on CSV line " + std::to_string(lineno));
    if (v < 0.0) throw ParseError("negative cell on CSV line " + std::to_string(lineno));
    return v;
}

} // namespace

LabeledTable parse_csv_table(std::string_view text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) {
        if (cur.back() == '\r') cur.pop_back();
        lines.push_back(cur);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.size() < 2) throw ParseError("CSV needs a header row and at least one data row");

    const auto header = split_csv_line(lines[0], 1);
    if (header.size() < 2) throw ParseError("CSV header needs at least one column label");
    std::vector<std::string> col_labels(header.begin() + 1, header.end());

    std::vector<std::string> row_labels;
    Matrix entries(lines.size() - 1, col_labels.size());
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto fields = split_csv_line(lines[r], r + 1);
        if (fields.size() != header.size())
            throw ParseError("ragged CSV row on line " + std::to_string(r + 1) + " (" +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(header.size()) + ")");
        row_labels.push_back(fields[0]);
        for (std::size_t j = 1; j < fields.size(); ++j)
            entries(r - 1, j - 1) = parse_cell(fields[j], r + 1);
    }

    std::set<std::string> seen(row_labels.begin(), row_labels.end());
    if (seen.size() != row_labels.size()) throw ParseError("duplicate row label");
    seen = std::set<std::string>(col_labels.begin(), col_labels.end());
    if (seen.size() != col_labels.size()) throw ParseError("duplicate column label");

    return LabeledTable{ContingencyTable(std::move(entries)), std::move(row_labels),
                        std::move(col_labels)};
}

ContingencyTable normalize_total(const ContingencyTable& t) {
    Matrix e = t.entries();
    const double total = t.total();
    for (double& v : e.data()) v /= total;
    return ContingencyTable(std::move(e));
}

ContingencyTable zero_diagonal(const ContingencyTable& t) {
    Matrix e = t.entries();
    const std::size_t d = std::min(t.row_count(), t.col_count());
    for (std::size_t i = 0; i < d; ++i) e(i, i) = 0.0;
    return ContingencyTable(std::move(e));
}

Matrix normalized_table(const ContingencyTable& t) {
    const std::size_t m = t.row_count(), n = t.col_count();
    Vec ri(m), cj(n);
    for (std::size_t i = 0; i < m; ++i) ri[i] = 1.0 / std::sqrt(t.row_sums()[i]);
    for (std::size_t j = 0; j < n; ++j) cj[j] = 1.0 / std::sqrt(t.col_sums()[j]);
    Matrix cd(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) cd(i, j) = ri[i] * t.entry(i, j) * cj[j];
    return cd;
}

} // namespace carpet
