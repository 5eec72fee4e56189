#pragma once

#include <string>
#include <string_view>

#include "carpet/matrix.hpp"

namespace carpet {

/// Symmetric nonnegative edge-weight matrix with zero diagonal plus derived degrees.
/// Vertices of zero degree are rejected at construction; multi-component graphs are
/// allowed in storage and rejected only by the spectral operations that need
/// connectivity.
class WeightedGraph {
public:
    // Takes a symmetric nonnegative matrix with zero diagonal.
    explicit WeightedGraph(Matrix weights);

    std::size_t size() const { return weights_.rows(); }
    const Matrix& weights() const { return weights_; }
    double weight(std::size_t i, std::size_t j) const { return weights_(i, j); }
    const Vec& degrees() const { return degrees_; }
    double total_weight() const { return total_weight_; }
    bool connected() const { return connected_; }
    bool positive_degrees() const { return positive_degrees_; }
    bool normalized() const;

private:
    Matrix weights_;
    Vec degrees_;
    double total_weight_ = 0.0;
    bool connected_ = false;
    bool positive_degrees_ = false;
};

/// Decodes one graph6 line (n <= 62, single-byte size header) into a unit-weight
/// simple graph. Adjacency bits are the upper triangle in column order
/// x(0,1), x(0,2), x(1,2), x(0,3), ... packed big-endian into 6-bit groups stored
/// as value+63; trailing pad bits must be zero.
WeightedGraph parse_graph6(std::string_view line);

/// Inverse of parse_graph6 for graphs with n <= 62; any positive weight encodes
/// as an edge bit.
std::string encode_graph6(const WeightedGraph& g);

/// Parses whitespace-separated "i j w" lines (0-based, '#' comments ignored).
/// Duplicate pairs are summed.
WeightedGraph parse_edge_list(std::string_view text);

/// Scales all weights by 1/(total degree) so the degrees sum to 1.
WeightedGraph normalize_total_weight(const WeightedGraph& g);

// L = D - W
SymmetricMatrix laplacian(const WeightedGraph& g);

// L_D = I - D^{-1/2} W D^{-1/2}; invariant under rescaling of the weights.
SymmetricMatrix normalized_laplacian(const WeightedGraph& g);

// W_D = D^{-1/2} W D^{-1/2}
SymmetricMatrix normalized_adjacency(const WeightedGraph& g);

// M_D = W_D - sqrt(d) sqrt(d)^T; requires total weight 1.
SymmetricMatrix normalized_modularity(const WeightedGraph& g);

} // namespace carpet
