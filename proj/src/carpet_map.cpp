#include "carpet/carpet_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "carpet/errors.hpp"
#include "carpet/rng.hpp"

namespace carpet {

Carpet make_carpet(Embedding e) {
    const std::size_t n = e.points.rows(), d = e.points.cols();
    if (d == 0) throw PreconditionError("carpet needs at least one embedding column");
    Carpet c;
    c.box_min.assign(d, std::numeric_limits<double>::infinity());
    c.box_max.assign(d, -std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            c.box_min[j] = std::min(c.box_min[j], e.points(i, j));
            c.box_max[j] = std::max(c.box_max[j], e.points(i, j));
        }
    for (std::size_t j = 0; j < d; ++j)
        if (!(c.box_min[j] < 0.0 && c.box_max[j] > 0.0))
            throw PreconditionError("carpet column " + std::to_string(j) +
                                    " does not straddle zero");
    c.orientation.assign(d, 1);
    c.embedding = std::move(e);
    return c;
}

Carpet orient(const Carpet& c, const std::vector<int>& mask) {
    const std::size_t d = c.embedding.points.cols();
    if (mask.size() != d) throw PreconditionError("orientation mask length mismatch");
    Carpet out = c;
    for (std::size_t j = 0; j < d; ++j) {
        if (mask[j] == 1) continue;
        if (mask[j] != -1) throw PreconditionError("orientation mask entries must be +1 or -1");
        for (std::size_t i = 0; i < out.embedding.points.rows(); ++i)
            out.embedding.points(i, j) = -out.embedding.points(i, j);
        const double lo = out.box_min[j];
        out.box_min[j] = -out.box_max[j];
        out.box_max[j] = -lo;
        out.orientation[j] = -out.orientation[j];
    }
    return out;
}

bool positive_orientation(const Carpet& c, std::size_t column) {
    const auto& pts = c.embedding.points;
    const auto& w = c.embedding.weights;
    double mass = 0.0;
    for (std::size_t i = 0; i < pts.rows(); ++i) {
        const double x = pts(i, column);
        if (x > 0.0) mass += w[i] * x * x;
    }
    return mass < 0.5;
}

Vec carpet_eval(const Carpet& c, const Vec& a) {
    const auto& pts = c.embedding.points;
    const auto& w = c.embedding.weights;
    const std::size_t n = pts.rows(), d = pts.cols();
    if (a.size() != d) throw PreconditionError("evaluation point dimension mismatch");
    Vec f(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double inner = 0.0;
        for (std::size_t l = 0; l < d; ++l) inner += std::fabs(pts(i, l) - a[l]);
        const double wi = w[i] * inner;
        for (std::size_t j = 0; j < d; ++j) f[j] += wi * pts(i, j);
    }
    return f;
}

YConstruction build_y(const Carpet& c, const Vec& a) {
    const auto& pts = c.embedding.points;
    const auto& w = c.embedding.weights;
    const std::size_t n = pts.rows(), d = pts.cols();
    if (a.size() != d) throw PreconditionError("evaluation point dimension mismatch");
    YConstruction out;
    out.b_parts.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < n; ++i) out.b_parts[j] += w[i] * std::fabs(pts(i, j) - a[j]);
    out.b = 0.0;
    for (double bj : out.b_parts) out.b += bj;
    out.centers.resize(d);
    for (std::size_t j = 0; j < d; ++j)
        out.centers[j] = {a[j] - out.b_parts[j], a[j] + out.b_parts[j]};
    out.y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += std::fabs(pts(i, j) - a[j]);
        out.y[i] = s - out.b;
        out.sigma_sq += w[i] * out.y[i] * out.y[i];
    }
    return out;
}

namespace {

// Per-axis grid: all breakpoints (the column's coordinates) unioned with an
// evenly spaced grid over the box.
Vec axis_values(const Carpet& c, std::size_t l, std::size_t grid) {
    Vec v;
    const auto& pts = c.embedding.points;
    v.reserve(pts.rows() + grid);
    for (std::size_t i = 0; i < pts.rows(); ++i) v.push_back(pts(i, l));
    const double lo = c.box_min[l], hi = c.box_max[l];
    if (grid >= 2) {
        const double step = (hi - lo) / static_cast<double>(grid - 1);
        for (std::size_t t = 0; t + 1 < grid; ++t) v.push_back(lo + step * static_cast<double>(t));
        v.push_back(hi);
    }
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

Vec axis_breakpoints(const Carpet& c, std::size_t l) {
    Vec v;
    const auto& pts = c.embedding.points;
    v.reserve(pts.rows());
    for (std::size_t i = 0; i < pts.rows(); ++i) v.push_back(pts(i, l));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// T(j, vi) = sum_i d_i x_ji |x_li - value[vi]| for one axis l.
Matrix axis_table(const Carpet& c, std::size_t l, const Vec& values) {
    const auto& pts = c.embedding.points;
    const auto& w = c.embedding.weights;
    const std::size_t n = pts.rows(), d = pts.cols();
    Matrix t(d, values.size(), 0.0);
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
        const double a = values[vi];
        for (std::size_t i = 0; i < n; ++i) {
            const double wi = w[i] * std::fabs(pts(i, l) - a);
            for (std::size_t j = 0; j < d; ++j) t(j, vi) += wi * pts(i, j);
        }
    }
    return t;
}

// Solves M a = p by Gaussian elimination with partial pivoting; false if singular.
bool solve_linear(Matrix m, Vec p, Vec& out) {
    const std::size_t d = p.size();
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < d; ++r)
            if (std::fabs(m(r, col)) > std::fabs(m(piv, col))) piv = r;
        if (std::fabs(m(piv, col)) < 1e-300) return false;
        if (piv != col) {
            for (std::size_t j = 0; j < d; ++j) std::swap(m(col, j), m(piv, j));
            std::swap(p[col], p[piv]);
        }
        for (std::size_t r = col + 1; r < d; ++r) {
            const double factor = m(r, col) / m(col, col);
            for (std::size_t j = col; j < d; ++j) m(r, j) -= factor * m(col, j);
            p[r] -= factor * p[col];
        }
    }
    out.assign(d, 0.0);
    for (std::size_t col = d; col-- > 0;) {
        double s = p[col];
        for (std::size_t j = col + 1; j < d; ++j) s -= m(col, j) * out[j];
        out[col] = s / m(col, col);
    }
    return true;
}

struct CellSolveState {
    const Carpet* carpet = nullptr;
    std::vector<Vec> breakpoints; // per axis, sorted unique
};

// Exact affine solve inside one cell given by breakpoint interval indices.
// Within the cell every |x_li - a_l| has a fixed sign, so f(a) = p - M a.
bool solve_cell(const CellSolveState& st, const std::vector<std::size_t>& cell, Vec& root) {
    const Carpet& c = *st.carpet;
    const auto& pts = c.embedding.points;
    const auto& w = c.embedding.weights;
    const std::size_t n = pts.rows(), d = pts.cols();
    Matrix m(d, d, 0.0);
    Vec p(d, 0.0);
    for (std::size_t l = 0; l < d; ++l) {
        const double hi = st.breakpoints[l][cell[l] + 1];
        for (std::size_t i = 0; i < n; ++i) {
            const double sign = pts(i, l) >= hi ? 1.0 : -1.0;
            const double ws = w[i] * sign;
            for (std::size_t j = 0; j < d; ++j) {
                m(j, l) += ws * pts(i, j);
                p[j] += ws * pts(i, j) * pts(i, l);
            }
        }
    }
    if (!solve_linear(std::move(m), std::move(p), root)) return false;
    for (std::size_t l = 0; l < d; ++l) {
        const double lo = st.breakpoints[l][cell[l]], hi = st.breakpoints[l][cell[l] + 1];
        const double pad = 1e-12 * std::max(1.0, std::fabs(hi) + std::fabs(lo));
        if (root[l] < lo - pad || root[l] > hi + pad) return false;
    }
    return true;
}

struct ScanBest {
    double residual = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> index;
};

struct OrientationBest {
    double residual = std::numeric_limits<double>::infinity();
    Vec point;
};

// Finds the lowest-residual point for one oriented carpet via grid scan plus
// cell-exact polishing. Deterministic for a fixed carpet and options.
OrientationBest search_orientation(const Carpet& c, const RootOptions& opt) {
    const std::size_t d = c.embedding.points.cols();
    std::vector<Vec> axes(d), tables_values(d);
    std::vector<Matrix> tables(d);
    for (std::size_t l = 0; l < d; ++l) {
        axes[l] = axis_values(c, l, opt.grid);
        tables[l] = axis_table(c, l, axes[l]);
    }

    // scan the product grid, one slice per first-axis value
    const std::size_t slices = axes[0].size();
    std::vector<ScanBest> slice_best(slices);
#pragma omp parallel for schedule(static) if (opt.exec == Exec::Parallel)
    for (long s = 0; s < static_cast<long>(slices); ++s) {
        ScanBest best;
        std::vector<std::size_t> idx(d, 0);
        idx[0] = static_cast<std::size_t>(s);
        Vec f(d);
        while (true) {
            for (std::size_t j = 0; j < d; ++j) {
                double v = 0.0;
                for (std::size_t l = 0; l < d; ++l) v += tables[l](j, idx[l]);
                f[j] = v;
            }
            const double r = max_abs(f);
            if (r < best.residual) {
                best.residual = r;
                best.index = idx;
            }
            // lexicographic advance over axes 1..d-1
            std::size_t l = d;
            while (l-- > 1) {
                if (++idx[l] < axes[l].size()) break;
                idx[l] = 0;
            }
            if (l == 0 || d == 1) break;
        }
        slice_best[s] = std::move(best);
    }

    std::vector<std::size_t> order(slices);
    for (std::size_t s = 0; s < slices; ++s) order[s] = s;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (slice_best[a].residual != slice_best[b].residual)
            return slice_best[a].residual < slice_best[b].residual;
        return slice_best[a].index < slice_best[b].index;
    });

    CellSolveState st;
    st.carpet = &c;
    st.breakpoints.resize(d);
    for (std::size_t l = 0; l < d; ++l) st.breakpoints[l] = axis_breakpoints(c, l);

    OrientationBest best;
    auto consider = [&](const Vec& a) {
        const double r = max_abs(carpet_eval(c, a));
        if (r < best.residual) {
            best.residual = r;
            best.point = a;
        }
    };

    std::set<std::vector<std::size_t>> tried;
    const std::size_t limit = std::min(opt.candidates, order.size());
    for (std::size_t t = 0; t < limit; ++t) {
        const ScanBest& sb = slice_best[order[t]];
        if (sb.index.empty()) continue;
        Vec at(d);
        for (std::size_t l = 0; l < d; ++l) at[l] = axes[l][sb.index[l]];
        consider(at);

        // base cell of the grid point per axis, then all {-1,0} neighbours
        std::vector<std::size_t> base(d);
        for (std::size_t l = 0; l < d; ++l) {
            const auto& bp = st.breakpoints[l];
            std::size_t p = std::upper_bound(bp.begin(), bp.end(), at[l]) - bp.begin();
            base[l] = std::min(p == 0 ? 0 : p - 1, bp.size() >= 2 ? bp.size() - 2 : 0);
        }
        const std::size_t combos = static_cast<std::size_t>(1) << d;
        for (std::size_t mask = 0; mask < combos; ++mask) {
            std::vector<std::size_t> cell(d);
            bool ok = true;
            for (std::size_t l = 0; l < d; ++l) {
                long idx = static_cast<long>(base[l]) - ((mask >> l) & 1);
                if (idx < 0 || idx + 1 >= static_cast<long>(st.breakpoints[l].size())) {
                    ok = false;
                    break;
                }
                cell[l] = static_cast<std::size_t>(idx);
            }
            if (!ok || !tried.insert(cell).second) continue;
            Vec root;
            if (solve_cell(st, cell, root)) consider(root);
        }
    }
    return best;
}

// Random-start variant used when the full product grid is too large (k-1 >= 4).
OrientationBest search_orientation_random(const Carpet& c, const RootOptions& opt,
                                          std::size_t starts, std::uint64_t seed) {
    const std::size_t d = c.embedding.points.cols();
    CellSolveState st;
    st.carpet = &c;
    st.breakpoints.resize(d);
    for (std::size_t l = 0; l < d; ++l) st.breakpoints[l] = axis_breakpoints(c, l);

    OrientationBest best;
    auto consider = [&](const Vec& a) {
        const double r = max_abs(carpet_eval(c, a));
        if (r < best.residual) {
            best.residual = r;
            best.point = a;
        }
    };

    Rng rng(seed);
    std::set<std::vector<std::size_t>> tried;
    for (std::size_t s = 0; s < starts; ++s) {
        Vec a(d);
        for (std::size_t l = 0; l < d; ++l) a[l] = rng.uniform(c.box_min[l], c.box_max[l]);
        // cell-exact polishing: repeatedly solve the affine system of the
        // containing cell, walking to the clamped solution when it escapes
        for (int step = 0; step < 50; ++step) {
            std::vector<std::size_t> cell(d);
            for (std::size_t l = 0; l < d; ++l) {
                const auto& bp = st.breakpoints[l];
                std::size_t p = std::upper_bound(bp.begin(), bp.end(), a[l]) - bp.begin();
                cell[l] = std::min(p == 0 ? 0 : p - 1, bp.size() >= 2 ? bp.size() - 2 : 0);
            }
            Vec root;
            if (tried.insert(cell).second && solve_cell(st, cell, root)) {
                consider(root);
                break;
            }
            // move toward the cell-clamped affine solution
            Matrix m(d, d, 0.0);
            Vec p(d, 0.0);
            const auto& pts = c.embedding.points;
            const auto& w = c.embedding.weights;
            for (std::size_t l = 0; l < d; ++l) {
                const double hi = st.breakpoints[l][cell[l] + 1];
                for (std::size_t i = 0; i < pts.rows(); ++i) {
                    const double sign = pts(i, l) >= hi ? 1.0 : -1.0;
                    const double ws = w[i] * sign;
                    for (std::size_t j = 0; j < d; ++j) {
                        m(j, l) += ws * pts(i, j);
                        p[j] += ws * pts(i, j) * pts(i, l);
                    }
                }
            }
            Vec sol;
            if (!solve_linear(std::move(m), std::move(p), sol)) break;
            bool moved = false;
            for (std::size_t l = 0; l < d; ++l) {
                const double lo = st.breakpoints[l][cell[l]], hi = st.breakpoints[l][cell[l] + 1];
                double clamped = std::min(std::max(sol[l], lo), hi);
                if (clamped != a[l]) moved = true;
                a[l] = clamped;
            }
            consider(a);
            if (!moved) break;
        }
    }
    return best;
}

} // namespace

std::pair<CarpetResult, bool> carpet_root_best(const Carpet& c, const RootOptions& opt) {
    const std::size_t d = c.embedding.points.cols();
    const std::size_t masks = static_cast<std::size_t>(1) << d;

    double best_residual = std::numeric_limits<double>::infinity();
    Vec best_point;
    std::vector<int> best_mask;
    Carpet best_carpet = c;

    for (std::size_t bits = 0; bits < masks; ++bits) {
        std::vector<int> mask(d);
        for (std::size_t l = 0; l < d; ++l) mask[l] = (bits >> l) & 1 ? -1 : 1;
        Carpet oriented = orient(c, mask);
        OrientationBest ob;
        if (d <= 3)
            ob = search_orientation(oriented, opt);
        else
            ob = search_orientation_random(oriented, opt,
                                           std::max<std::size_t>(1, opt.random_starts / masks),
                                           derive_seed(0x9c2e17u, bits));
        if (ob.point.empty()) continue;
        // merge: lowest residual, then lexicographically first mask
        if (ob.residual < best_residual) {
            best_residual = ob.residual;
            best_point = ob.point;
            best_mask = mask;
            best_carpet = std::move(oriented);
        }
    }

    CarpetResult result;
    if (!best_point.empty()) {
        YConstruction y = build_y(best_carpet, best_point);
        result.a_star = best_point;
        result.b_parts = std::move(y.b_parts);
        result.b = y.b;
        result.centers = std::move(y.centers);
        result.y = std::move(y.y);
        result.sigma_sq = y.sigma_sq;
        result.residual = best_residual;
        result.orientation = best_mask;
    } else {
        result.residual = best_residual;
    }
    return {std::move(result), best_residual <= opt.tol};
}

CarpetResult carpet_root(const Carpet& c, const RootOptions& opt) {
    auto [result, found] = carpet_root_best(c, opt);
    if (!found) throw NoRootFound(result.residual);
    return result;
}

GapReport theorem_bound_report(const WeightedGraph& g, std::size_t k, const TheoremOptions& opt) {
    if (!g.connected()) throw PreconditionError("theorem bound requires a connected graph");
    if (!g.normalized()) throw PreconditionError("theorem bound requires total weight 1");
    const std::size_t n = g.size();
    if (k < 2 || k > n - 1) throw PreconditionError("k must lie in [2, n-1]");

    auto [embedding, es] = vertex_representatives_full(g, k - 1);
    if (es.values[k] - es.values[k - 1] <= 1e-10)
        throw PreconditionError("spectral gap too small: lambda_{k-1} ~ lambda_k");

    GapReport r;
    r.k = k;
    r.eigenvalues.assign(es.values.begin() + 1, es.values.begin() + 1 + k);
    double lambda_sum = 0.0;
    for (std::size_t j = 0; j + 1 < k; ++j) lambda_sum += r.eigenvalues[j];
    r.bound = lambda_sum / r.eigenvalues[k - 1];

    const std::size_t wanted = static_cast<std::size_t>(1) << (k - 1);
    r.clusters = std::min(wanted, n);
    r.clamped = r.clusters < wanted;

    r.kmeans = weighted_kmeans(embedding.points, embedding.weights, r.clusters, opt.seed,
                               opt.restarts, opt.root.exec);
    r.achieved = r.kmeans.variance;
    r.holds = r.achieved <= r.bound + 1e-8;

    Carpet carpet = make_carpet(embedding);
    auto [root, found] = carpet_root_best(carpet, opt.root);
    r.carpet = std::move(root);
    r.root_found = found;
    r.center_induced = std::numeric_limits<double>::quiet_NaN();
    r.chain_holds = false;
    if (found) {
        // partition induced by the per-coordinate centers (c_j1, c_j2); empty
        // sign patterns are dropped, which can only lower the cluster count
        Carpet oriented = orient(carpet, r.carpet.orientation);
        const auto& pts = oriented.embedding.points;
        std::vector<std::size_t> pattern(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j + 1 < k; ++j) {
                const double d1 = std::fabs(pts(i, j) - r.carpet.centers[j][0]);
                const double d2 = std::fabs(pts(i, j) - r.carpet.centers[j][1]);
                if (d2 < d1) pattern[i] |= static_cast<std::size_t>(1) << j;
            }
        std::vector<std::size_t> uniq = pattern;
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i)
            labels[i] = static_cast<int>(std::lower_bound(uniq.begin(), uniq.end(), pattern[i]) -
                                         uniq.begin());
        Partition induced = make_partition(labels, uniq.size(), embedding.weights);
        r.center_induced = weighted_k_variance(embedding.points, embedding.weights, induced);
        r.chain_holds = r.achieved <= r.carpet.sigma_sq + 1e-8;
    }
    return r;
}

CarpetImage carpet_image(const Carpet& c, std::size_t grid_density, Exec exec) {
    const std::size_t d = c.embedding.points.cols();
    if (d < 1 || d > 3)
        throw PreconditionError("carpet imaging supports k-1 in {1,2,3}");

    std::vector<Vec> axes(d);
    std::vector<Matrix> tables(d);
    std::size_t total = 1;
    for (std::size_t l = 0; l < d; ++l) {
        axes[l] = axis_values(c, l, grid_density);
        tables[l] = axis_table(c, l, axes[l]);
        total *= axes[l].size();
    }

    CarpetImage img;
    img.domain = Matrix(total, d);
    img.image = Matrix(total, d);

    std::vector<std::size_t> strides(d, 1);
    for (std::size_t l = d; l-- > 1;) strides[l - 1] = strides[l] * axes[l].size();

#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
    for (long row = 0; row < static_cast<long>(total); ++row) {
        std::size_t rest = static_cast<std::size_t>(row);
        for (std::size_t l = 0; l < d; ++l) {
            const std::size_t idx = rest / strides[l];
            rest %= strides[l];
            img.domain(row, l) = axes[l][idx];
            for (std::size_t j = 0; j < d; ++j) img.image(row, j) += tables[l](j, idx);
        }
    }

    // boundary curves along a_1 with the remaining coordinates at their minima
    // or maxima; only the coordinates j >= 2 have the +-1 offset structure
    for (std::size_t j = 1; j < d; ++j) {
        for (int side = 0; side < 2; ++side) {
            CarpetImage::Curve curve;
            curve.coord = j;
            curve.at_min = side == 0;
            Vec a(d);
            for (std::size_t l = 1; l < d; ++l) a[l] = curve.at_min ? c.box_min[l] : c.box_max[l];
            for (double a1 : axes[0]) {
                a[0] = a1;
                const Vec f = carpet_eval(c, a);
                curve.samples.push_back({a1, f[j]});
            }
            img.boundary.push_back(std::move(curve));
        }
    }
    return img;
}

} // namespace carpet
