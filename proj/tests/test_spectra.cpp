#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "carpet/eigen.hpp"
#include "carpet/embedding.hpp"
#include "carpet/errors.hpp"
#include "carpet/kmeans.hpp"
#include "testutil.hpp"

using namespace carpet;

namespace {

double residual_inf(const SymmetricMatrix& a, const EigenSystem& es) {
    double worst = 0.0;
    const std::size_t n = a.order();
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            double av = 0.0;
            for (std::size_t l = 0; l < n; ++l) av += a(i, l) * es.vectors(l, j);
            worst = std::max(worst, std::fabs(av - es.values[j] * es.vectors(i, j)));
        }
    }
    return worst;
}

double norm_inf(const SymmetricMatrix& a) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.order(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < a.order(); ++j) row += std::fabs(a(i, j));
        worst = std::max(worst, row);
    }
    return worst;
}

double ortho_defect(const Matrix& v) {
    double worst = 0.0;
    for (std::size_t i = 0; i < v.cols(); ++i)
        for (std::size_t j = 0; j < v.cols(); ++j) {
            double d = 0.0;
            for (std::size_t r = 0; r < v.rows(); ++r) d += v(r, i) * v(r, j);
            worst = std::max(worst, std::fabs(d - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

SymmetricMatrix random_symmetric(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    SymmetricMatrix a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) a.set(i, j, rng.uniform(-2.0, 2.0));
    return a;
}

} // namespace

TEST_SUITE_BEGIN("eigh");

TEST_CASE("identity and diagonal spectra") {
    SymmetricMatrix id(4);
    for (int i = 0; i < 4; ++i) id.set(i, i, 1.0);
    EigenSystem es = eigh(id);
    CHECK(es.values == Vec{1.0, 1.0, 1.0, 1.0});

    SymmetricMatrix d(3);
    d.set(0, 0, 3.0);
    d.set(1, 1, 1.0);
    d.set(2, 2, 2.0);
    CHECK(eigh(d).values == Vec{1.0, 2.0, 3.0});
}

TEST_CASE("K2 normalized Laplacian spectrum is {0, 2}") {
    EigenSystem es = eigh(normalized_laplacian(parse_graph6("A_")));
    CHECK(es.values[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(es.values[1] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("residual, orthonormality, canonical sign on random matrices") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        SymmetricMatrix a = random_symmetric(50 + s, 3 + s % 15);
        EigenSystem es = eigh(a);
        CHECK(residual_inf(a, es) <= 1e-9 * std::max(1.0, norm_inf(a)));
        CHECK(ortho_defect(es.vectors) <= 1e-10);
        for (std::size_t j = 0; j < a.order(); ++j) {
            for (std::size_t i = 0; i < a.order(); ++i) {
                if (std::fabs(es.vectors(i, j)) > 1e-12) {
                    CHECK(es.vectors(i, j) > 0.0);
                    break;
                }
            }
        }
        for (std::size_t j = 1; j < es.values.size(); ++j) CHECK(es.values[j - 1] <= es.values[j]);
    }
}

TEST_CASE("bitwise determinism") {
    SymmetricMatrix a = random_symmetric(99, 12);
    EigenSystem e1 = eigh(a), e2 = eigh(a);
    CHECK(e1.values == e2.values);
    CHECK(e1.vectors.data() == e2.vectors.data());
}

TEST_CASE("normalized Laplacian spectra lie in [0, 2] and kernel is sqrt(d)") {
    for (std::uint64_t s = 0; s < 40; ++s) {
        WeightedGraph g = testutil::random_normalized_graph(200 + s, 4 + s % 20);
        EigenSystem es = eigh(normalized_laplacian(g));
        for (double v : es.values) {
            CHECK(v >= -1e-10);
            CHECK(v <= 2.0 + 1e-10);
        }
        // cosine between the 0-eigenvector and sqrt(d)
        double dot = 0.0, nrm = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double sd = std::sqrt(g.degrees()[i]);
            dot += es.vectors(i, 0) * sd;
            nrm += sd * sd;
        }
        CHECK(std::fabs(dot) / std::sqrt(nrm) >= 1.0 - 1e-10);
    }
}

TEST_CASE("non-finite input is rejected") {
    SymmetricMatrix a(2);
    a.set(0, 1, std::numeric_limits<double>::quiet_NaN());
    CHECK_THROWS_AS(eigh(a), PreconditionError);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("svd");

TEST_CASE("diagonal singular values") {
    Matrix c(2, 2, 0.0);
    c(0, 0) = 2.0;
    c(1, 1) = 1.0;
    SvdSystem sv = svd(c);
    REQUIRE(sv.singulars.size() == 2);
    CHECK(sv.singulars[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sv.singulars[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rank-1 outer product") {
    const Vec a{1.0, 2.0, -1.0}, b{0.5, 1.5};
    Matrix c(3, 2);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) c(i, j) = a[i] * b[j];
    SvdSystem sv = svd(c);
    REQUIRE(sv.singulars.size() == 1);
    CHECK(sv.singulars[0] == doctest::Approx(norm2(a) * norm2(b)).epsilon(1e-12));
}

TEST_CASE("trivial pair of a non-degenerate normalized table") {
    ContingencyTable raw = testutil::random_table(42, 6, 8);
    ContingencyTable t = normalize_total(raw);
    SvdSystem sv = svd(normalized_table(t));
    CHECK(sv.singulars[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sv.singulars[1] < 1.0);
    double dot_l = 0.0, dot_r = 0.0;
    for (std::size_t i = 0; i < t.row_count(); ++i)
        dot_l += sv.left(i, 0) * std::sqrt(t.row_sums()[i]);
    for (std::size_t j = 0; j < t.col_count(); ++j)
        dot_r += sv.right(j, 0) * std::sqrt(t.col_sums()[j]);
    CHECK(std::fabs(dot_l) >= 1.0 - 1e-9);
    CHECK(std::fabs(dot_r) >= 1.0 - 1e-9);
}

TEST_CASE("reconstruction and factor residuals on random matrices") {
    for (std::uint64_t s = 0; s < 15; ++s) {
        const std::size_t m = 3 + s % 6, n = 2 + (s * 7) % 9;
        Rng rng(700 + s);
        Matrix c(m, n);
        for (double& v : c.data()) v = rng.uniform(-1.0, 1.0);
        SvdSystem sv = svd(c);
        for (std::size_t j = 1; j < sv.singulars.size(); ++j)
            CHECK(sv.singulars[j - 1] >= sv.singulars[j]);
        Matrix rec(m, n, 0.0);
        for (std::size_t t = 0; t < sv.singulars.size(); ++t)
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    rec(i, j) += sv.singulars[t] * sv.left(i, t) * sv.right(j, t);
        double worst = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                worst = std::max(worst, std::fabs(rec(i, j) - c(i, j)));
        CHECK(worst <= 1e-9);
        // ||C u_k - s_k v_k||_inf
        for (std::size_t t = 0; t < sv.singulars.size(); ++t)
            for (std::size_t i = 0; i < m; ++i) {
                double cu = 0.0;
                for (std::size_t j = 0; j < n; ++j) cu += c(i, j) * sv.right(j, t);
                CHECK(std::fabs(cu - sv.singulars[t] * sv.left(i, t)) <= 1e-9);
            }
        CHECK(ortho_defect(sv.left) <= 1e-10);
        CHECK(ortho_defect(sv.right) <= 1e-10);
    }
}

TEST_CASE("svd determinism") {
    Matrix c(5, 7);
    Rng rng(31);
    for (double& v : c.data()) v = rng.uniform(-1.0, 1.0);
    SvdSystem a = svd(c), b = svd(c);
    CHECK(a.singulars == b.singulars);
    CHECK(a.left.data() == b.left.data());
    CHECK(a.right.data() == b.right.data());
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("representatives");

TEST_CASE("P3 single-column constraints") {
    WeightedGraph g = normalize_total_weight(testutil::path_graph(3));
    Embedding e = vertex_representatives(g, 1);
    double mean = 0.0, second = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        mean += e.weights[i] * e.points(i, 0);
        second += e.weights[i] * e.points(i, 0) * e.points(i, 0);
    }
    CHECK(std::fabs(mean) <= 1e-9);
    CHECK(second == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("K2 representatives are +-1") {
    Embedding e = vertex_representatives(testutil::k2_normalized(), 1);
    CHECK(std::fabs(e.points(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(e.points(1, 0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("figure graph splits into three groups in two dimensions") {
    WeightedGraph g = normalize_total_weight(parse_graph6(testutil::kThreeClusters));
    Embedding e = vertex_representatives(g, 2);
    KMeansResult km = weighted_kmeans(e.points, e.weights, 3, 7);
    // total inertia of a 2-dim embedding is 2; three tight groups leave almost
    // nothing inside the clusters
    CHECK(km.variance <= 0.02);
    std::vector<int> counts(3, 0);
    for (int l : km.partition.labels) ++counts[l];
    for (int c : counts) CHECK(c >= 4);
}

TEST_CASE("coordinate relations on random graphs") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        WeightedGraph g = testutil::random_normalized_graph(900 + s, 8 + s);
        const std::size_t d = 2 + s % 3;
        Embedding e = vertex_representatives(g, d);
        for (std::size_t a = 0; a < d; ++a) {
            double mean = 0.0, second = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                mean += e.weights[i] * e.points(i, a);
                second += e.weights[i] * e.points(i, a) * e.points(i, a);
            }
            CHECK(std::fabs(mean) <= 1e-8);
            CHECK(std::fabs(second - 1.0) <= 1e-8);
            for (std::size_t b = a + 1; b < d; ++b) {
                double cross = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i)
                    cross += e.weights[i] * e.points(i, a) * e.points(i, b);
                CHECK(std::fabs(cross) <= 1e-8);
            }
        }
    }
}

TEST_CASE("preconditions: connectivity, normalization, dimension range") {
    WeightedGraph disconnected = testutil::two_cliques(3, 0.0);
    CHECK_THROWS_AS(vertex_representatives(normalize_total_weight(disconnected), 1),
                    PreconditionError);
    CHECK_THROWS_AS(vertex_representatives(testutil::path_graph(3), 1), PreconditionError);
    WeightedGraph g = testutil::k2_normalized();
    CHECK_THROWS_AS(vertex_representatives(g, 2), PreconditionError);
    CHECK_THROWS_AS(vertex_representatives(g, 0), PreconditionError);
}

TEST_CASE("correspondence representatives: rank-deficient input is refused") {
    Matrix e(3, 2);
    const Vec r{0.2, 0.3, 0.5}, c{0.4, 0.6};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) e(i, j) = r[i] * c[j];
    ContingencyTable t(std::move(e));
    CHECK_THROWS_AS(correspondence_representatives(normalize_total(t), 1), PreconditionError);
}

TEST_CASE("two-block structure gives stepwise row points") {
    // block-dominant table: strong rank-1 blocks plus a tiny background
    Matrix e(6, 6, 1e-6);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            e(i, j) += 1.0;
            e(3 + i, 3 + j) += 2.0;
        }
    ContingencyTable t = normalize_total(ContingencyTable(std::move(e)));
    auto [rows, cols] = correspondence_representatives(t, 1);
    for (int block = 0; block < 2; ++block)
        for (std::size_t i = 1; i < 3; ++i)
            CHECK(std::fabs(rows.points(3 * block + i, 0) - rows.points(3 * block, 0)) <= 1e-4);
    double mean = 0.0;
    for (std::size_t i = 0; i < 6; ++i) mean += rows.weights[i] * rows.points(i, 0);
    CHECK(std::fabs(mean) <= 1e-9);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("energy");

TEST_CASE("constant rows give zero energy") {
    WeightedGraph g = testutil::random_normalized_graph(1, 6);
    Matrix x(6, 2, 3.14);
    CHECK(energy(g, x) == 0.0);
}

TEST_CASE("optimal representatives achieve the eigenvalue sum") {
    WeightedGraph g = testutil::random_normalized_graph(2, 11);
    Embedding e = vertex_representatives(g, 3);
    double lambda_sum = 0.0;
    for (double v : e.source_eigenvalues) lambda_sum += v;
    CHECK(energy(g, e.points) == doctest::Approx(lambda_sum).epsilon(1e-8));
}

TEST_CASE("K2 hand value") {
    WeightedGraph g = testutil::k2_normalized();
    Matrix x(2, 1);
    x(0, 0) = 1.0;
    x(1, 0) = -1.0;
    CHECK(energy(g, x) == doctest::Approx(0.5 * 4.0).epsilon(1e-14));
}

TEST_CASE("pairwise form equals the trace form") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        WeightedGraph g = testutil::random_normalized_graph(400 + s, 5 + s);
        Matrix x = testutil::random_constrained_representatives(s, g.degrees(), 2);
        CHECK(std::fabs(energy(g, x) - energy_trace(g, x)) <= 1e-10);
    }
}

TEST_CASE("optimal representatives minimize the energy over constrained trials") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        WeightedGraph g = testutil::random_normalized_graph(3000 + s, 5 + s % 12);
        const std::size_t d = 1 + s % 3;
        if (d > g.size() - 1) continue;
        Embedding e = vertex_representatives(g, d);
        const double opt = energy(g, e.points);
        for (std::uint64_t t = 0; t < 20; ++t) {
            Matrix y = testutil::random_constrained_representatives(s * 100 + t, g.degrees(), d);
            CHECK(opt <= energy(g, y) + 1e-9);
        }
    }
}

TEST_SUITE_END();
