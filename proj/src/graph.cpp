#include "carpet/graph.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "carpet/errors.hpp"

namespace carpet {

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

bool all_one_component(const Matrix& w) {
    const std::size_t n = w.rows();
    if (n == 0) return true;
    UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (w(i, j) > 0.0) uf.unite(i, j);
    const std::size_t root = uf.find(0);
    for (std::size_t i = 1; i < n; ++i)
        if (uf.find(i) != root) return false;
    return true;
}

} // namespace

WeightedGraph::WeightedGraph(Matrix weights) : weights_(std::move(weights)) {
    if (weights_.rows() != weights_.cols())
        throw PreconditionError("edge-weight matrix must be square");
    const std::size_t n = weights_.rows();
    if (n == 0) throw PreconditionError("graph must have at least one vertex");
    for (std::size_t i = 0; i < n; ++i) {
        if (weights_(i, i) != 0.0)
            throw PreconditionError("edge-weight matrix must have zero diagonal");
        for (std::size_t j = i + 1; j < n; ++j) {
            if (weights_(i, j) != weights_(j, i))
                throw PreconditionError("edge-weight matrix must be symmetric");
            if (weights_(i, j) < 0.0 || !std::isfinite(weights_(i, j)))
                throw PreconditionError("edge weights must be finite and nonnegative");
        }
    }
    degrees_.assign(n, 0.0);
    positive_degrees_ = true;
    for (std::size_t i = 0; i < n; ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < n; ++j) d += weights_(i, j);
        degrees_[i] = d;
        total_weight_ += d;
        if (d <= 0.0) positive_degrees_ = false;
    }
    connected_ = all_one_component(weights_);
}

bool WeightedGraph::normalized() const { return std::fabs(total_weight_ - 1.0) <= 1e-9; }

namespace {
constexpr int kG6Lo = 63;
constexpr int kG6Hi = 126;
} // namespace

WeightedGraph parse_graph6(std::string_view line) {
    if (line.empty()) throw ParseError("empty graph6 line");
    for (std::size_t i = 0; i < line.size(); ++i) {
        const unsigned char c = static_cast<unsigned char>(line[i]);
        if (c < kG6Lo || c > kG6Hi)
            throw ParseError("graph6 byte out of range [63,126]", static_cast<long>(i));
    }
    const unsigned char head = static_cast<unsigned char>(line[0]);
    if (head == 126)
        throw ParseError("graph6 multi-byte size header (n > 62) is not supported", 0);
    const std::size_t n = head - kG6Lo;
    const std::size_t nbits = n * (n - (n > 0 ? 1 : 0)) / 2;
    const std::size_t ngroups = (nbits + 5) / 6;
    if (line.size() < 1 + ngroups)
        throw ParseError("graph6 bit stream truncated", static_cast<long>(line.size()));
    if (line.size() > 1 + ngroups)
        throw ParseError("graph6 line longer than encoded size", static_cast<long>(1 + ngroups));

    Matrix w(n, n, 0.0);
    std::size_t bit = 0;
    for (std::size_t byte = 0; byte < ngroups; ++byte) {
        const int v = static_cast<unsigned char>(line[1 + byte]) - kG6Lo;
        for (int k = 5; k >= 0; --k, ++bit) {
            const bool set = (v >> k) & 1;
            if (bit >= nbits) {
                if (set) throw ParseError("nonzero graph6 padding bits", static_cast<long>(1 + byte));
                continue;
            }
            if (set) {
                // bit index -> (i, j) of the column-ordered upper triangle
                std::size_t j = 1, acc = 0;
                while (acc + j <= bit) acc += j++;
                const std::size_t i = bit - acc;
                w(i, j) = w(j, i) = 1.0;
            }
        }
    }
    return WeightedGraph(std::move(w));
}

std::string encode_graph6(const WeightedGraph& g) {
    const std::size_t n = g.size();
    if (n > 62) throw PreconditionError("graph6 encoding limited to n <= 62");
    std::string out(1, static_cast<char>(kG6Lo + n));
    const std::size_t nbits = n * (n - 1) / 2;
    int group = 0, filled = 0;
    std::size_t bit = 0;
    for (std::size_t j = 1; j < n; ++j) {
        for (std::size_t i = 0; i < j; ++i, ++bit) {
            group = (group << 1) | (g.weight(i, j) > 0.0 ? 1 : 0);
            if (++filled == 6) {
                out.push_back(static_cast<char>(kG6Lo + group));
                group = 0;
                filled = 0;
            }
        }
    }
    if (nbits % 6 != 0) {
        group <<= 6 - filled;
        out.push_back(static_cast<char>(kG6Lo + group));
    }
    return out;
}

WeightedGraph parse_edge_list(std::string_view text) {
    struct Entry {
        std::size_t i, j;
        double w;
    };
    std::vector<Entry> entries;
    std::size_t n = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        long long i, j;
        double w;
        if (!(ls >> i)) continue; // blank or comment-only line
        if (!(ls >> j >> w))
            throw ParseError("malformed edge line " + std::to_string(lineno) + ": '" + raw + "'");
        std::string extra;
        if (ls >> extra)
            throw ParseError("trailing tokens on edge line " + std::to_string(lineno));
        if (i < 0 || j < 0)
            throw ParseError("negative vertex index on line " + std::to_string(lineno));
        if (w < 0.0 || !std::isfinite(w))
            throw ParseError("negative weight on line " + std::to_string(lineno));
        if (i == j && w > 0.0)
            throw ParseError("self-loop with positive weight on line " + std::to_string(lineno));
        entries.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), w});
        n = std::max({n, static_cast<std::size_t>(i) + 1, static_cast<std::size_t>(j) + 1});
    }
    if (entries.empty()) throw ParseError("edge list contains no edges");
    Matrix m(n, n, 0.0);
    for (const auto& e : entries) {
        if (e.i == e.j) continue;
        m(e.i, e.j) += e.w;
        m(e.j, e.i) += e.w;
    }
    return WeightedGraph(std::move(m));
}

WeightedGraph normalize_total_weight(const WeightedGraph& g) {
    const double total = g.total_weight();
    if (total <= 0.0) throw PreconditionError("cannot normalize an all-zero weight matrix");
    Matrix w = g.weights();
    for (double& v : w.data()) v /= total;
    return WeightedGraph(std::move(w));
}

SymmetricMatrix laplacian(const WeightedGraph& g) {
    const std::size_t n = g.size();
    SymmetricMatrix l(n);
    for (std::size_t i = 0; i < n; ++i) {
        l.set(i, i, g.degrees()[i]);
        for (std::size_t j = i + 1; j < n; ++j) l.set(i, j, -g.weight(i, j));
    }
    return l;
}

SymmetricMatrix normalized_adjacency(const WeightedGraph& g) {
    if (!g.positive_degrees())
        throw PreconditionError("degree normalization requires strictly positive degrees");
    const std::size_t n = g.size();
    Vec inv_sqrt(n);
    for (std::size_t i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(g.degrees()[i]);
    SymmetricMatrix wd(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            wd.set(i, j, inv_sqrt[i] * g.weight(i, j) * inv_sqrt[j]);
    return wd;
}

SymmetricMatrix normalized_laplacian(const WeightedGraph& g) {
    SymmetricMatrix wd = normalized_adjacency(g);
    const std::size_t n = g.size();
    SymmetricMatrix l(n);
    for (std::size_t i = 0; i < n; ++i) {
        l.set(i, i, 1.0);
        for (std::size_t j = i + 1; j < n; ++j) l.set(i, j, -wd(i, j));
    }
    return l;
}

SymmetricMatrix normalized_modularity(const WeightedGraph& g) {
    if (!g.normalized())
        throw PreconditionError("normalized_modularity requires total weight 1");
    SymmetricMatrix wd = normalized_adjacency(g);
    const std::size_t n = g.size();
    Vec sqrt_d(n);
    for (std::size_t i = 0; i < n; ++i) sqrt_d[i] = std::sqrt(g.degrees()[i]);
    SymmetricMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m.set(i, j, wd(i, j) - sqrt_d[i] * sqrt_d[j]);
    return m;
}

} // namespace carpet
