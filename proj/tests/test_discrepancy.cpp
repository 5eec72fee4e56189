#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "carpet/discrepancy.hpp"
#include "carpet/errors.hpp"
#include "testutil.hpp"

using namespace carpet;

namespace {

ContingencyTable rank_one_table() {
    const Vec r{0.1, 0.2, 0.3, 0.4}, c{0.25, 0.35, 0.4};
    Matrix e(4, 3);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 3; ++j) e(i, j) = r[i] * c[j];
    return ContingencyTable(std::move(e));
}

BiPartition trivial_partition(std::size_t m, std::size_t n) {
    return make_bipartition(std::vector<int>(m, 0), 1, std::vector<int>(n, 0), 1);
}

// Deviation recomputed at a witness in the same canonical order the library
// uses: block rows ascending, block columns ascending.
double recompute_witness(const ContingencyTable& t, const BiPartition& p,
                         const DiscrepancyWitness& w) {
    const auto& rows = p.row_clusters[w.block_row];
    const auto& cols = p.col_clusters[w.block_col];
    double cut = 0.0, volr = 0.0, volc = 0.0;
    for (std::size_t i : rows) {
        volr += t.row_sums()[i];
        for (std::size_t j : cols) cut += t.entry(i, j);
    }
    for (std::size_t j : cols) volc += t.col_sums()[j];
    const double rho = cut / (volr * volc);
    double cxy = 0.0, volx = 0.0, voly = 0.0;
    for (std::size_t i : rows) {
        const bool in_x = std::find(w.rows.begin(), w.rows.end(), i) != w.rows.end();
        if (!in_x) continue;
        volx += t.row_sums()[i];
        for (std::size_t j : cols)
            if (std::find(w.cols.begin(), w.cols.end(), j) != w.cols.end())
                cxy += t.entry(i, j);
    }
    for (std::size_t j : cols)
        if (std::find(w.cols.begin(), w.cols.end(), j) != w.cols.end()) voly += t.col_sums()[j];
    return std::fabs(cxy - rho * volx * voly) / std::sqrt(volx * voly);
}

} // namespace

TEST_SUITE_BEGIN("md exact");

TEST_CASE("rank-1 table has zero discrepancy") {
    ContingencyTable t = rank_one_table();
    DiscrepancyReport r = md_exact(t, trivial_partition(4, 3));
    CHECK(r.md <= 1e-12);
}

TEST_CASE("2x2 identity/2 at k=1: md = 1/2 by enumerating all 9 subset pairs") {
    Matrix e(2, 2, 0.0);
    e(0, 0) = e(1, 1) = 0.5;
    ContingencyTable t(std::move(e));
    DiscrepancyReport r = md_exact(t, trivial_partition(2, 2));
    CHECK(r.md == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("block-diagonal rank-1 blocks with the matching partition: md = 0") {
    Matrix e(4, 4, 0.0);
    const Vec r1{0.3, 0.7}, c1{0.4, 0.6}, r2{0.5, 0.5}, c2{0.2, 0.8};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            e(i, j) = r1[i] * c1[j];
            e(2 + i, 2 + j) = 2.0 * r2[i] * c2[j];
        }
    ContingencyTable t(std::move(e));
    BiPartition p = make_bipartition({0, 0, 1, 1}, 2, {0, 0, 1, 1}, 2);
    DiscrepancyReport r = md_exact(t, p);
    CHECK(r.md <= 1e-12);
}

TEST_CASE("witness reproduces md exactly") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        ContingencyTable t = testutil::random_table(300 + s, 5, 6);
        BiPartition p = make_bipartition({0, 1, 0, 1, 0}, 2, {0, 1, 0, 1, 0, 1}, 2);
        DiscrepancyReport r = md_exact(t, p);
        CHECK(recompute_witness(t, p, r.witness) == r.md);
    }
}

TEST_CASE("scale invariance") {
    ContingencyTable t = testutil::random_table(310, 6, 5);
    BiPartition p = make_bipartition({0, 0, 1, 1, 1, 0}, 2, {0, 1, 1, 0, 0}, 2);
    Matrix scaled = t.entries();
    for (double& v : scaled.data()) v *= 3.7;
    DiscrepancyReport a = md_exact(t, p);
    DiscrepancyReport b = md_exact(ContingencyTable(std::move(scaled)), p);
    CHECK(std::fabs(a.md - b.md) <= 1e-10);
    CHECK(a.witness.rows == b.witness.rows);
}

TEST_CASE("spectral bound s_k <= 9 md (k+2 - 9k ln md) on random instances") {
    for (std::uint64_t s = 0; s < 40; ++s) {
        const std::size_t m = 4 + s % 5, n = 3 + (s * 3) % 6;
        ContingencyTable t = testutil::random_table(320 + s, m, n);
        Rng rng(s);
        const std::size_t k = 1 + s % 2;
        std::vector<int> rl(m), cl(n);
        for (std::size_t i = 0; i < m; ++i) rl[i] = static_cast<int>(i < k ? i : rng.index(k));
        for (std::size_t j = 0; j < n; ++j) cl[j] = static_cast<int>(j < k ? j : rng.index(k));
        DiscrepancyReport r = md_exact(t, make_bipartition(rl, k, cl, k));
        if (r.bound_defined) CHECK(r.bound_holds);
    }
}

TEST_CASE("serial equals parallel bitwise") {
    ContingencyTable t = testutil::random_table(330, 8, 9);
    BiPartition p = make_bipartition({0, 1, 0, 1, 0, 1, 0, 1}, 2, {0, 1, 2, 0, 1, 2, 0, 1, 2}, 3);
    // a 2x3 bi-partition is rejected (k must match); use 3 row clusters
    p = make_bipartition({0, 1, 2, 0, 1, 2, 0, 1}, 3, {0, 1, 2, 0, 1, 2, 0, 1, 2}, 3);
    DiscrepancyReport a = md_exact(t, p, Exec::Serial);
    DiscrepancyReport b = md_exact(t, p, Exec::Parallel);
    CHECK(a.md == b.md);
    CHECK(a.witness.rows == b.witness.rows);
    CHECK(a.witness.cols == b.witness.cols);
    CHECK(a.block_max.data() == b.block_max.data());
}

TEST_CASE("oversized blocks are refused") {
    ContingencyTable t = testutil::random_table(340, 21, 4);
    CHECK_THROWS_AS(md_exact(t, trivial_partition(21, 4)), PreconditionError);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("md sampled");

TEST_CASE("sampled is a lower bound and covers small instances") {
    ContingencyTable t = testutil::random_table(350, 4, 4);
    BiPartition p = make_bipartition({0, 0, 1, 1}, 2, {0, 1, 0, 1}, 2);
    DiscrepancyReport exact = md_exact(t, p);
    DiscrepancyReport sampled = md_sampled(t, p, 2000, 99);
    CHECK(sampled.md <= exact.md + 1e-12);
    // 2000 draws over <= 9 subset pairs per block: every pair is seen
    CHECK(sampled.md == doctest::Approx(exact.md).epsilon(1e-14));
}

TEST_CASE("deterministic given the seed") {
    ContingencyTable t = testutil::random_table(351, 5, 5);
    BiPartition p = make_bipartition({0, 1, 0, 1, 0}, 2, {0, 0, 1, 1, 0}, 2);
    DiscrepancyReport a = md_sampled(t, p, 500, 7);
    DiscrepancyReport b = md_sampled(t, p, 500, 7);
    CHECK(a.md == b.md);
    CHECK(a.witness.rows == b.witness.rows);
}

TEST_CASE("rank-1 sampled discrepancy is zero") {
    ContingencyTable t = rank_one_table();
    CHECK(md_sampled(t, trivial_partition(4, 3), 200, 1).md <= 1e-12);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("md directed");

TEST_CASE("symmetric table with identical partitions equals the undirected value") {
    Rng rng(360);
    Matrix e(5, 5, 0.0);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = i + 1; j < 5; ++j) e(i, j) = e(j, i) = rng.uniform(0.1, 1.0);
    ContingencyTable t(std::move(e));
    std::vector<std::vector<std::size_t>> part{{0, 1, 2}, {3, 4}};
    DiscrepancyReport directed = md_directed(t, part, part);
    DiscrepancyReport undirected = md_exact(t, BiPartition{part, part});
    CHECK(directed.md == undirected.md);
    CHECK_FALSE(directed.note.empty());
}

TEST_CASE("rank-1 directed weights have zero discrepancy") {
    // w_ij = r_i c_j off the diagonal is not exactly rank 1 once the diagonal is
    // forced to zero, so build the rank-1 table first and keep the diagonal zero
    const Vec r{0.2, 0.3, 0.5};
    Matrix e(3, 3, 0.0);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (i != j) e(i, j) = r[i] * r[j];
    ContingencyTable t(std::move(e));
    std::vector<std::vector<std::size_t>> part{{0, 1, 2}};
    DiscrepancyReport rep = md_directed(t, part, part);
    // the zero diagonal perturbs exact rank-1-ness; the deviation stays small
    CHECK(rep.md <= 0.2);
}

TEST_CASE("directed 3-cycle with singleton partitions: md = 0 by enumeration") {
    Matrix e(3, 3, 0.0);
    e(1, 0) = 1.0; // edge 0 -> 1
    e(2, 1) = 1.0; // edge 1 -> 2
    e(0, 2) = 1.0; // edge 2 -> 0
    ContingencyTable t(std::move(e));
    std::vector<std::vector<std::size_t>> singletons{{0}, {1}, {2}};
    DiscrepancyReport rep = md_directed(t, singletons, singletons);
    // each block is a single cell, so the only subset pair reproduces the block
    // density exactly and every deviation vanishes
    CHECK(rep.md == 0.0);
}

TEST_CASE("square and zero-diagonal preconditions") {
    ContingencyTable rect = testutil::random_table(361, 3, 4);
    std::vector<std::vector<std::size_t>> part{{0, 1, 2}};
    CHECK_THROWS_AS(md_directed(rect, part, part), PreconditionError);
    ContingencyTable sq = testutil::random_table(362, 3, 3);
    CHECK_THROWS_AS(md_directed(sq, part, part), PreconditionError);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("chi square");

TEST_CASE("rank-1 table gives zero") {
    ChiSquare c = chi_square(rank_one_table(), 100.0);
    CHECK(std::fabs(c.from_singulars) <= 1e-9);
    CHECK(std::fabs(c.direct) <= 1e-18);
}

TEST_CASE("2x2 identity with N=2: both routes give 2") {
    Matrix e(2, 2, 0.0);
    e(0, 0) = e(1, 1) = 1.0;
    ContingencyTable t(std::move(e));
    ChiSquare c = chi_square(t, 2.0);
    CHECK(c.from_singulars == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(c.direct == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("the two routes agree on random tables") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const std::size_t m = 2 + s % 7, n = 2 + (s * 5) % 6;
        ContingencyTable t = testutil::random_table(400 + s, m, n);
        ChiSquare c = chi_square(t, 50.0);
        CHECK(std::fabs(c.from_singulars - c.direct) <= 1e-9 * std::max(1.0, c.direct));
    }
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("modularity deviation");

TEST_CASE("whole vertex set against itself gives zero") {
    WeightedGraph g = testutil::random_normalized_graph(500, 9);
    std::vector<std::size_t> all(9);
    for (std::size_t i = 0; i < 9; ++i) all[i] = i;
    CHECK(std::fabs(modularity_deviation(g, all, all)) <= 1e-12);
}

TEST_CASE("empty subset gives zero") {
    WeightedGraph g = testutil::random_normalized_graph(501, 5);
    CHECK(modularity_deviation(g, {}, {0, 1}) == 0.0);
}

TEST_CASE("K2 hand value") {
    WeightedGraph g = testutil::k2_normalized();
    CHECK(modularity_deviation(g, {0}, {1}) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("matches the modularity-matrix submatrix sum") {
    WeightedGraph g = testutil::random_normalized_graph(502, 8);
    const std::vector<std::size_t> x{0, 2, 5}, y{1, 2, 6, 7};
    double direct = 0.0;
    for (std::size_t i : x)
        for (std::size_t j : y) direct += g.weight(i, j) - g.degrees()[i] * g.degrees()[j];
    CHECK(std::fabs(modularity_deviation(g, x, y) - direct) <= 1e-12);
}

TEST_SUITE_END();
