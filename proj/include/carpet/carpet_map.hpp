#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "carpet/embedding.hpp"
#include "carpet/exec.hpp"
#include "carpet/graph.hpp"
#include "carpet/kmeans.hpp"

namespace carpet {

/// The first k-1 transformed eigenvectors x_1..x_{k-1} as a joint embedding,
/// with the per-column bounding box and the sign mask currently applied.
struct Carpet {
    Embedding embedding;
    Vec box_min, box_max;
    std::vector<int> orientation; // +1/-1 per column, relative to the source embedding
};

Carpet make_carpet(Embedding e);

/// Flips the chosen columns (mask of +1/-1). Negating column j and a_j negates
/// f_j and fixes the other coordinates of f, exactly.
Carpet orient(const Carpet& c, const std::vector<int>& mask);

/// Positive orientation of a column: the weight of its positive coordinates,
/// sum_{x_ji > 0} d_i x_ji^2, stays below 1/2.
bool positive_orientation(const Carpet& c, std::size_t column);

/// f_j(a) = sum_i d_i x_ji sum_l |x_li - a_l|; continuous and piecewise linear in
/// each a_l with breakpoints at the coordinates x_li.
Vec carpet_eval(const Carpet& c, const Vec& a);

struct YConstruction {
    Vec y;                                        // y_i = sum_j |x_ji - a_j| - b
    Vec b_parts;                                  // b_j = sum_i d_i |x_ji - a_j|
    double b = 0.0;                               // sum_j b_j
    std::vector<std::array<double, 2>> centers;   // (a_j - b_j, a_j + b_j) per coordinate
    double sigma_sq = 0.0;                        // sum_i d_i y_i^2
};

YConstruction build_y(const Carpet& c, const Vec& a);

struct CarpetResult {
    Vec a_star;
    Vec b_parts;
    double b = 0.0;
    std::vector<std::array<double, 2>> centers;
    Vec y;
    double sigma_sq = 0.0;
    double residual = 0.0; // max-norm of f at a_star
    std::vector<int> orientation;
};

struct RootOptions {
    double tol = 1e-8;
    std::size_t grid = 64;        // per-axis grid points, unioned with all breakpoints
    std::size_t candidates = 64;  // grid cells polished by the exact affine solve
    std::size_t random_starts = 1024; // used instead of the full grid when k-1 >= 4
    Exec exec = Exec::Parallel;
};

/// Searches all 2^(k-1) orientation masks; within each, scans the
/// breakpoint-aligned grid and solves the affine system exactly inside the
/// best-ranked cells (f is affine between breakpoints). Returns the
/// lowest-residual root; merge order is residual, then lexicographic mask.
/// Throws NoRootFound when no orientation/cell reaches `tol`.
CarpetResult carpet_root(const Carpet& c, const RootOptions& opt = {});

/// Like carpet_root but never throws; second member tells whether the residual
/// tolerance was met.
std::pair<CarpetResult, bool> carpet_root_best(const Carpet& c, const RootOptions& opt = {});

struct GapReport {
    std::size_t k = 0;
    Vec eigenvalues;      // lambda_1 .. lambda_k
    double bound = 0.0;   // (sum_{j<k} lambda_j) / lambda_k
    double achieved = 0.0;        // weighted 2^(k-1)-means variance on the embedding
    double center_induced = 0.0;  // variance of the partition induced by the carpet centers
    bool holds = false;           // achieved <= bound + 1e-8
    std::size_t clusters = 0;     // min(2^(k-1), n)
    bool clamped = false;         // true when 2^(k-1) > n forced the clamp
    bool root_found = false;
    bool chain_holds = false;     // achieved <= sigma_sq + 1e-8, when the root was found
    CarpetResult carpet;
    KMeansResult kmeans;
};

struct TheoremOptions {
    std::uint64_t seed = 1;
    int restarts = 16;
    RootOptions root;
};

/// Theorem report for S^2_{2^(k-1)}(X*_{k-1}) <= (sum_{j=1}^{k-1} lambda_j) / lambda_k.
/// Requires a connected normalized graph with lambda_{k-1} < lambda_k - 1e-10.
GapReport theorem_bound_report(const WeightedGraph& g, std::size_t k,
                               const TheoremOptions& opt = {});

struct CarpetImage {
    Matrix domain; // sampled a, one row per sample
    Matrix image;  // f(a), aligned rows
    struct Curve {
        std::size_t coord = 0;  // 0-based output coordinate j
        bool at_min = true;     // other coordinates fixed at column minima or maxima
        std::vector<std::array<double, 2>> samples; // (a_1, f_coord)
    };
    std::vector<Curve> boundary;
};

/// Samples f over the regular grid (density per axis unioned with all
/// breakpoints), plus the boundary curves f_j(a_1, M_{ -1}) and
/// f_j(a_1, Mtilde_{-1}). Supported for k-1 in {1,2,3}.
CarpetImage carpet_image(const Carpet& c, std::size_t grid_density, Exec exec = Exec::Parallel);

} // namespace carpet
