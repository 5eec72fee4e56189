#include "carpet/discrepancy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <tuple>

#include "carpet/eigen.hpp"
#include "carpet/errors.hpp"
#include "carpet/rng.hpp"

namespace carpet {

BiPartition make_bipartition(const std::vector<int>& row_labels, std::size_t row_k,
                             const std::vector<int>& col_labels, std::size_t col_k) {
    if (row_k != col_k) throw PreconditionError("row and column sides need the same k");
    BiPartition p;
    p.row_clusters.resize(row_k);
    p.col_clusters.resize(col_k);
    for (std::size_t i = 0; i < row_labels.size(); ++i) {
        const int c = row_labels[i];
        if (c < 0 || static_cast<std::size_t>(c) >= row_k)
            throw PreconditionError("row label out of range");
        p.row_clusters[c].push_back(i);
    }
    for (std::size_t j = 0; j < col_labels.size(); ++j) {
        const int c = col_labels[j];
        if (c < 0 || static_cast<std::size_t>(c) >= col_k)
            throw PreconditionError("column label out of range");
        p.col_clusters[c].push_back(j);
    }
    for (const auto& cl : p.row_clusters)
        if (cl.empty()) throw PreconditionError("empty row cluster");
    for (const auto& cl : p.col_clusters)
        if (cl.empty()) throw PreconditionError("empty column cluster");
    return p;
}

namespace {

void validate_bipartition(const ContingencyTable& t, const BiPartition& p) {
    if (p.row_clusters.size() != p.col_clusters.size() || p.row_clusters.empty())
        throw PreconditionError("bi-partition needs k >= 1 clusters on both sides");
    std::vector<char> seen_row(t.row_count(), 0), seen_col(t.col_count(), 0);
    for (const auto& cl : p.row_clusters) {
        if (cl.empty()) throw PreconditionError("empty row cluster");
        for (std::size_t i : cl) {
            if (i >= t.row_count() || seen_row[i])
                throw PreconditionError("row clusters must partition the rows");
            seen_row[i] = 1;
        }
    }
    for (const auto& cl : p.col_clusters) {
        if (cl.empty()) throw PreconditionError("empty column cluster");
        for (std::size_t j : cl) {
            if (j >= t.col_count() || seen_col[j])
                throw PreconditionError("column clusters must partition the columns");
            seen_col[j] = 1;
        }
    }
    for (char c : seen_row)
        if (!c) throw PreconditionError("row clusters must cover every row");
    for (char c : seen_col)
        if (!c) throw PreconditionError("column clusters must cover every column");
}

struct BlockBest {
    double dev = -1.0;
    std::uint32_t xmask = 0, ymask = 0;
};

struct BlockData {
    std::vector<std::size_t> rows, cols;
    Matrix sub;   // block entries
    Vec vr, vc;   // margins of the full table restricted to the block
    double rho = 0.0;
};

BlockData block_data(const ContingencyTable& t, const std::vector<std::size_t>& rows,
                     const std::vector<std::size_t>& cols) {
    BlockData b;
    b.rows = rows;
    b.cols = cols;
    b.sub = Matrix(rows.size(), cols.size());
    b.vr.resize(rows.size());
    b.vc.resize(cols.size());
    double cut = 0.0, volr = 0.0, volc = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        b.vr[i] = t.row_sums()[rows[i]];
        volr += b.vr[i];
        for (std::size_t j = 0; j < cols.size(); ++j) {
            b.sub(i, j) = t.entry(rows[i], cols[j]);
            cut += b.sub(i, j);
        }
    }
    for (std::size_t j = 0; j < cols.size(); ++j) {
        b.vc[j] = t.col_sums()[cols[j]];
        volc += b.vc[j];
    }
    b.rho = cut / (volr * volc);
    return b;
}

double subset_deviation(const BlockData& b, std::uint32_t xmask, std::uint32_t ymask) {
    double cxy = 0.0, volx = 0.0, voly = 0.0;
    for (std::size_t i = 0; i < b.rows.size(); ++i) {
        if (!((xmask >> i) & 1)) continue;
        volx += b.vr[i];
        for (std::size_t j = 0; j < b.cols.size(); ++j)
            if ((ymask >> j) & 1) cxy += b.sub(i, j);
    }
    for (std::size_t j = 0; j < b.cols.size(); ++j)
        if ((ymask >> j) & 1) voly += b.vc[j];
    return std::fabs(cxy - b.rho * volx * voly) / std::sqrt(volx * voly);
}

// Enumerates X in Gray-code order over [x_begin, x_end) of the code index and all
// nonempty Y per X; running sums are refreshed periodically to keep the
// incremental float drift well below the reporting tolerances.
BlockBest enumerate_range(const BlockData& b, std::uint32_t x_begin, std::uint32_t x_end) {
    const std::size_t ra = b.rows.size(), cb = b.cols.size();
    const std::uint32_t ymax = static_cast<std::uint32_t>(1) << cb;
    BlockBest best;

    Vec colsum(cb, 0.0);
    double volx = 0.0;
    std::uint32_t xmask = x_begin ^ (x_begin >> 1);
    for (std::size_t i = 0; i < ra; ++i) {
        if (!((xmask >> i) & 1)) continue;
        volx += b.vr[i];
        for (std::size_t j = 0; j < cb; ++j) colsum[j] += b.sub(i, j);
    }

    auto consider = [&](double dev, std::uint32_t xm, std::uint32_t ym) {
        if (dev > best.dev ||
            (dev == best.dev && std::tie(xm, ym) < std::tie(best.xmask, best.ymask))) {
            best.dev = dev;
            best.xmask = xm;
            best.ymask = ym;
        }
    };

    for (std::uint32_t xc = x_begin; xc < x_end; ++xc) {
        if (xc != x_begin) {
            const std::uint32_t next = xc ^ (xc >> 1);
            const std::uint32_t flip = xmask ^ next;
            const std::size_t i = std::countr_zero(flip);
            const double s = (next & flip) ? 1.0 : -1.0;
            volx += s * b.vr[i];
            for (std::size_t j = 0; j < cb; ++j) colsum[j] += s * b.sub(i, j);
            xmask = next;
            if ((xc & 0x7ff) == 0) { // periodic exact refresh
                volx = 0.0;
                std::fill(colsum.begin(), colsum.end(), 0.0);
                for (std::size_t i2 = 0; i2 < ra; ++i2) {
                    if (!((xmask >> i2) & 1)) continue;
                    volx += b.vr[i2];
                    for (std::size_t j = 0; j < cb; ++j) colsum[j] += b.sub(i2, j);
                }
            }
        }
        if (xmask == 0) continue;

        double cxy = colsum[0], voly = b.vc[0];
        std::uint32_t ymask = 1;
        for (std::uint32_t yc = 1; yc < ymax; ++yc) {
            if (yc != 1) {
                const std::uint32_t next = yc ^ (yc >> 1);
                const std::uint32_t flip = ymask ^ next;
                const std::size_t j = std::countr_zero(flip);
                const double s = (next & flip) ? 1.0 : -1.0;
                cxy += s * colsum[j];
                voly += s * b.vc[j];
                ymask = next;
                if ((yc & 0x7ff) == 0) {
                    cxy = 0.0;
                    voly = 0.0;
                    for (std::size_t j2 = 0; j2 < cb; ++j2) {
                        if (!((ymask >> j2) & 1)) continue;
                        cxy += colsum[j2];
                        voly += b.vc[j2];
                    }
                }
            }
            if (ymask == 0) continue;
            const double dev = std::fabs(cxy - b.rho * volx * voly) / std::sqrt(volx * voly);
            consider(dev, xmask, ymask);
        }
    }
    return best;
}

struct Job {
    std::size_t block_row, block_col;
    std::uint32_t x_begin, x_end;
};

DiscrepancyReport assemble_report(const ContingencyTable& t, const BiPartition& p,
                                  double md, DiscrepancyWitness witness, Matrix block_max) {
    const std::size_t k = p.row_clusters.size();
    DiscrepancyReport r;
    r.md = md;
    r.witness = std::move(witness);
    r.block_max = std::move(block_max);
    r.densities = Matrix(k, k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            r.densities(a, b) = block_data(t, p.row_clusters[a], p.col_clusters[b]).rho;

    SvdSystem sv = svd(normalized_table(t));
    r.sk = k < sv.singulars.size() ? sv.singulars[k] : 0.0;
    if (md > 0.0 && md < 1.0) {
        const double kk = static_cast<double>(k);
        r.bound_rhs = 9.0 * md * (kk + 2.0 - 9.0 * kk * std::log(md));
        r.bound_defined = true;
        r.bound_holds = r.sk <= r.bound_rhs + 1e-9;
    }
    return r;
}

} // namespace

DiscrepancyReport md_exact(const ContingencyTable& t, const BiPartition& p, Exec exec) {
    validate_bipartition(t, p);
    const std::size_t k = p.row_clusters.size();
    for (std::size_t a = 0; a < k; ++a)
        if (p.row_clusters[a].size() > 20)
            throw PreconditionError("row block " + std::to_string(a) +
                                    " exceeds 20 indices; exact mode refused (see md_sampled)");
    for (std::size_t b = 0; b < k; ++b)
        if (p.col_clusters[b].size() > 20)
            throw PreconditionError("column block " + std::to_string(b) +
                                    " exceeds 20 indices; exact mode refused (see md_sampled)");

    std::vector<BlockData> blocks(k * k);
    std::vector<Job> jobs;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
            blocks[a * k + b] = block_data(t, p.row_clusters[a], p.col_clusters[b]);
            const std::uint32_t xmax =
                static_cast<std::uint32_t>(1) << p.row_clusters[a].size();
            // deterministic chunking, independent of the thread count
            const std::uint32_t chunk = 2048;
            for (std::uint32_t begin = 0; begin < xmax; begin += chunk)
                jobs.push_back({a, b, begin, std::min(begin + chunk, xmax)});
        }

    std::vector<BlockBest> results(jobs.size());
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
    for (long j = 0; j < static_cast<long>(jobs.size()); ++j) {
        const Job& job = jobs[j];
        results[j] = enumerate_range(blocks[job.block_row * p.row_clusters.size() + job.block_col],
                                     job.x_begin, job.x_end);
    }

    // deterministic reduction in job order: larger deviation wins, ties by
    // lexicographic (block_row, block_col, xmask, ymask)
    double best = -1.0;
    std::size_t best_job = 0;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (results[j].dev < 0.0) continue;
        const auto key = std::make_tuple(jobs[j].block_row, jobs[j].block_col, results[j].xmask,
                                         results[j].ymask);
        const auto best_key = std::make_tuple(jobs[best_job].block_row, jobs[best_job].block_col,
                                              results[best_job].xmask, results[best_job].ymask);
        if (results[j].dev > best || (results[j].dev == best && key < best_key)) {
            best = results[j].dev;
            best_job = j;
        }
    }

    const Job& bj = jobs[best_job];
    const BlockBest& bb = results[best_job];
    const BlockData& bd = blocks[bj.block_row * k + bj.block_col];
    DiscrepancyWitness w;
    w.block_row = bj.block_row;
    w.block_col = bj.block_col;
    for (std::size_t i = 0; i < bd.rows.size(); ++i)
        if ((bb.xmask >> i) & 1) w.rows.push_back(bd.rows[i]);
    for (std::size_t j = 0; j < bd.cols.size(); ++j)
        if ((bb.ymask >> j) & 1) w.cols.push_back(bd.cols[j]);

    // md reported as the deviation recomputed at the witness in canonical order,
    // so that re-evaluating the witness reproduces it exactly
    const double md = subset_deviation(bd, bb.xmask, bb.ymask);

    Matrix block_max(k, k, 0.0);
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        double& cell = block_max(jobs[j].block_row, jobs[j].block_col);
        cell = std::max(cell, results[j].dev);
    }
    return assemble_report(t, p, md, std::move(w), std::move(block_max));
}

double md_block(const ContingencyTable& t, const std::vector<std::size_t>& rows,
                const std::vector<std::size_t>& cols, Exec exec) {
    if (rows.size() > 20 || cols.size() > 20)
        throw PreconditionError("block exceeds 20 indices; exact mode refused");
    BlockData bd = block_data(t, rows, cols);
    const std::uint32_t xmax = static_cast<std::uint32_t>(1) << rows.size();
    std::vector<Job> jobs;
    for (std::uint32_t begin = 0; begin < xmax; begin += 2048)
        jobs.push_back({0, 0, begin, std::min(begin + 2048u, xmax)});
    std::vector<BlockBest> results(jobs.size());
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
    for (long j = 0; j < static_cast<long>(jobs.size()); ++j)
        results[j] = enumerate_range(bd, jobs[j].x_begin, jobs[j].x_end);
    double best = 0.0;
    for (const auto& r : results) best = std::max(best, r.dev);
    return best;
}

DiscrepancyReport md_sampled(const ContingencyTable& t, const BiPartition& p,
                             std::size_t samples, std::uint64_t seed) {
    validate_bipartition(t, p);
    if (samples < 1) throw PreconditionError("samples must be >= 1");
    const std::size_t k = p.row_clusters.size();

    Rng rng(seed);
    double best = -1.0;
    DiscrepancyWitness witness;
    Matrix block_max(k, k, 0.0);
    std::vector<char> in_x, in_y;
    auto draw_subset = [&rng](std::vector<char>& io, std::size_t size) {
        io.assign(size, 0);
        bool any = false;
        while (!any)
            for (std::size_t i = 0; i < size; ++i) {
                io[i] = static_cast<char>(rng.next() & 1);
                any = any || io[i];
            }
    };
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
            const BlockData bd = block_data(t, p.row_clusters[a], p.col_clusters[b]);
            const std::size_t ra = bd.rows.size(), cb = bd.cols.size();
            for (std::size_t s = 0; s < samples; ++s) {
                draw_subset(in_x, ra);
                draw_subset(in_y, cb);
                double cxy = 0.0, volx = 0.0, voly = 0.0;
                for (std::size_t i = 0; i < ra; ++i) {
                    if (!in_x[i]) continue;
                    volx += bd.vr[i];
                    for (std::size_t j = 0; j < cb; ++j)
                        if (in_y[j]) cxy += bd.sub(i, j);
                }
                for (std::size_t j = 0; j < cb; ++j)
                    if (in_y[j]) voly += bd.vc[j];
                const double dev = std::fabs(cxy - bd.rho * volx * voly) / std::sqrt(volx * voly);
                block_max(a, b) = std::max(block_max(a, b), dev);
                if (dev > best) {
                    best = dev;
                    witness.block_row = a;
                    witness.block_col = b;
                    witness.rows.clear();
                    witness.cols.clear();
                    for (std::size_t i = 0; i < ra; ++i)
                        if (in_x[i]) witness.rows.push_back(bd.rows[i]);
                    for (std::size_t j = 0; j < cb; ++j)
                        if (in_y[j]) witness.cols.push_back(bd.cols[j]);
                }
            }
        }
    return assemble_report(t, p, best, std::move(witness), std::move(block_max));
}

DiscrepancyReport md_directed(const ContingencyTable& t,
                              const std::vector<std::vector<std::size_t>>& in_clusters,
                              const std::vector<std::vector<std::size_t>>& out_clusters,
                              Exec exec) {
    if (t.row_count() != t.col_count())
        throw PreconditionError("directed discrepancy needs a square table");
    for (std::size_t i = 0; i < t.row_count(); ++i)
        if (t.entry(i, i) != 0.0)
            throw PreconditionError("directed discrepancy needs a zero diagonal");
    BiPartition p{in_clusters, out_clusters};
    DiscrepancyReport r = md_exact(t, p, exec);
    r.note = "directed: rows are the in side, columns the out side; subsets from block (a,b) "
             "are paired with the density rho of the same block";
    return r;
}

ChiSquare chi_square(const ContingencyTable& t, double n_samples) {
    const ContingencyTable norm = t.normalized() ? t : normalize_total(t);
    ChiSquare out;
    SvdSystem sv = svd(normalized_table(norm));
    for (std::size_t i = 1; i < sv.singulars.size(); ++i)
        out.from_singulars += sv.singulars[i] * sv.singulars[i];
    out.from_singulars *= n_samples;
    for (std::size_t i = 0; i < norm.row_count(); ++i)
        for (std::size_t j = 0; j < norm.col_count(); ++j) {
            const double expected = norm.row_sums()[i] * norm.col_sums()[j];
            const double diff = norm.entry(i, j) - expected;
            out.direct += diff * diff / expected;
        }
    out.direct *= n_samples;
    return out;
}

double modularity_deviation(const WeightedGraph& g, const std::vector<std::size_t>& x,
                            const std::vector<std::size_t>& y) {
    if (!g.normalized())
        throw PreconditionError("modularity deviation requires total weight 1");
    double w = 0.0, volx = 0.0, voly = 0.0;
    for (std::size_t i : x) {
        volx += g.degrees()[i];
        for (std::size_t j : y) w += g.weight(i, j);
    }
    for (std::size_t j : y) voly += g.degrees()[j];
    return w - volx * voly;
}

} // namespace carpet
