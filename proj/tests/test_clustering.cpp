#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "carpet/cut.hpp"
#include "carpet/eigen.hpp"
#include "carpet/embedding.hpp"
#include "carpet/errors.hpp"
#include "carpet/kmeans.hpp"
#include "testutil.hpp"

using namespace carpet;

TEST_SUITE_BEGIN("weighted k-variance");

TEST_CASE("identical points and singletons give zero") {
    Matrix pts(4, 2, 1.0);
    Vec w{0.25, 0.25, 0.25, 0.25};
    Partition one = make_partition({0, 0, 0, 0}, 1, w);
    CHECK(weighted_k_variance(pts, w, one) == doctest::Approx(0.0).epsilon(1e-15));
    Partition singles = make_partition({0, 1, 2, 3}, 4, w);
    CHECK(weighted_k_variance(pts, w, singles) == 0.0);
}

TEST_CASE("two points, one cluster: hand value 1/4") {
    Matrix pts(2, 1);
    pts(0, 0) = 0.0;
    pts(1, 0) = 1.0;
    Vec w{0.5, 0.5};
    Partition p = make_partition({0, 0}, 1, w);
    CHECK(weighted_k_variance(pts, w, p) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("partitions must be proper") {
    Vec w{0.5, 0.5};
    CHECK_THROWS_AS(make_partition({0, 0}, 2, w), PreconditionError);
    CHECK_THROWS_AS(make_partition({0, 2}, 2, w), PreconditionError);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("weighted k-means");

TEST_CASE("two well-separated pairs are recovered and match brute force") {
    Matrix pts(4, 1);
    pts(0, 0) = 0.0;
    pts(1, 0) = 0.1;
    pts(2, 0) = 5.0;
    pts(3, 0) = 5.1;
    Vec w{0.3, 0.2, 0.25, 0.25};
    KMeansResult km = weighted_kmeans(pts, w, 2, 1);
    CHECK(km.partition.labels[0] == km.partition.labels[1]);
    CHECK(km.partition.labels[2] == km.partition.labels[3]);
    CHECK(km.partition.labels[0] != km.partition.labels[2]);
    auto [bp, bv] = brute_force_min_variance(pts, w, 2);
    CHECK(km.variance == doctest::Approx(bv).epsilon(1e-12));
}

TEST_CASE("k=1 gives the total weighted inertia; k=n gives zero") {
    Matrix pts(3, 2);
    Rng rng(3);
    for (double& v : pts.data()) v = rng.uniform(-1.0, 1.0);
    Vec w{0.2, 0.3, 0.5};
    KMeansResult km1 = weighted_kmeans(pts, w, 1, 9);
    Partition all = make_partition({0, 0, 0}, 1, w);
    CHECK(km1.variance == doctest::Approx(weighted_k_variance(pts, w, all)).epsilon(1e-12));
    KMeansResult kmn = weighted_kmeans(pts, w, 3, 9);
    CHECK(kmn.variance == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("deterministic given the seed; serial equals parallel bitwise") {
    WeightedGraph g = testutil::random_normalized_graph(77, 24);
    Embedding e = vertex_representatives(g, 2);
    KMeansResult a = weighted_kmeans(e.points, e.weights, 4, 123, 16, Exec::Parallel);
    KMeansResult b = weighted_kmeans(e.points, e.weights, 4, 123, 16, Exec::Parallel);
    KMeansResult c = weighted_kmeans(e.points, e.weights, 4, 123, 16, Exec::Serial);
    CHECK(a.variance == b.variance);
    CHECK(a.partition.labels == b.partition.labels);
    CHECK(a.variance == c.variance);
    CHECK(a.partition.labels == c.partition.labels);
    CHECK(a.centers.data() == c.centers.data());
}

TEST_CASE("result invariants: centers are weighted means, variance matches") {
    WeightedGraph g = testutil::random_normalized_graph(78, 15);
    Embedding e = vertex_representatives(g, 2);
    KMeansResult km = weighted_kmeans(e.points, e.weights, 3, 5);
    CHECK(km.variance ==
          doctest::Approx(weighted_k_variance(e.points, e.weights, km.partition)).epsilon(1e-12));
    for (std::size_t c = 0; c < 3; ++c) {
        Vec mean(2, 0.0);
        double vol = 0.0;
        for (std::size_t i = 0; i < e.points.rows(); ++i) {
            if (km.partition.labels[i] != static_cast<int>(c)) continue;
            vol += e.weights[i];
            for (std::size_t j = 0; j < 2; ++j) mean[j] += e.weights[i] * e.points(i, j);
        }
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(std::fabs(mean[j] / vol - km.centers(c, j)) <= 1e-10);
    }
}

TEST_CASE("k > n is rejected") {
    Matrix pts(2, 1, 0.0);
    Vec w{0.5, 0.5};
    CHECK_THROWS_AS(weighted_kmeans(pts, w, 3, 1), PreconditionError);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("brute force oracle");

TEST_CASE("three collinear points 0, 1, 10") {
    Matrix pts(3, 1);
    pts(0, 0) = 0.0;
    pts(1, 0) = 1.0;
    pts(2, 0) = 10.0;
    Vec w{1.0 / 3, 1.0 / 3, 1.0 / 3};
    auto [p, v] = brute_force_min_variance(pts, w, 2);
    CHECK(p.labels[0] == p.labels[1]);
    CHECK(p.labels[0] != p.labels[2]);
}

TEST_CASE("k = n and identical points give zero") {
    Matrix pts(4, 1, 2.0);
    Vec w{0.25, 0.25, 0.25, 0.25};
    CHECK(brute_force_min_variance(pts, w, 4).second == 0.0);
    CHECK(brute_force_min_variance(pts, w, 2).second == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("size guard") {
    Matrix pts(15, 1, 0.0);
    Vec w(15, 1.0 / 15);
    CHECK_THROWS_AS(brute_force_min_variance(pts, w, 2), PreconditionError);
}

TEST_CASE("k-means never beats the enumeration optimum") {
    for (std::uint64_t s = 0; s < 30; ++s) {
        WeightedGraph g = testutil::random_normalized_graph(600 + s, 6 + s % 5);
        const std::size_t k = 2 + s % 2;
        Embedding e = vertex_representatives(g, k - 1);
        KMeansResult km = weighted_kmeans(e.points, e.weights, k, s);
        auto [bp, bv] = brute_force_min_variance(e.points, e.weights, k);
        CHECK(km.variance >= bv - 1e-9);
    }
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("normalized cut");

TEST_CASE("k=1 is zero") {
    WeightedGraph g = testutil::random_normalized_graph(8, 7);
    Partition p = make_partition(std::vector<int>(7, 0), 1, g.degrees());
    CHECK(normalized_cut(g, p) == 0.0);
}

TEST_CASE("K2 split into singletons: all three forms equal 2") {
    WeightedGraph g = testutil::k2_normalized();
    Partition p = make_partition({0, 1}, 2, g.degrees());
    NormalizedCutForms f = normalized_cut_forms(g, p);
    CHECK(f.pairwise == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.complement == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.k_minus == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(normalized_cut(g, p) == f.complement);
}

TEST_CASE("disjoint cliques split along components give zero") {
    WeightedGraph g = normalize_total_weight(testutil::two_cliques(3, 0.0));
    Partition p = make_partition({0, 0, 0, 1, 1, 1}, 2, g.degrees());
    CHECK(normalized_cut(g, p) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("the three forms agree on random instances") {
    for (std::uint64_t s = 0; s < 25; ++s) {
        WeightedGraph g = testutil::random_normalized_graph(700 + s, 6 + s % 6);
        Rng rng(s);
        const std::size_t k = 2 + s % 3;
        std::vector<int> labels(g.size());
        for (std::size_t i = 0; i < g.size(); ++i)
            labels[i] = static_cast<int>(i < k ? i : rng.index(k));
        Partition p = make_partition(labels, k, g.degrees());
        NormalizedCutForms f = normalized_cut_forms(g, p);
        CHECK(std::fabs(f.pairwise - f.complement) <= 1e-10);
        CHECK(std::fabs(f.k_minus - f.complement) <= 1e-10);
    }
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("cut lower bound");

TEST_CASE("k=1 holds trivially") {
    WeightedGraph g = testutil::random_normalized_graph(11, 6);
    CutBoundReport r = check_cut_lower_bound(g, 1);
    CHECK(r.eigenvalue_sum == 0.0);
    CHECK(r.min_cut == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r.holds);
}

TEST_CASE("P4 with k=2") {
    WeightedGraph g = normalize_total_weight(testutil::path_graph(4));
    CutBoundReport r = check_cut_lower_bound(g, 2);
    CHECK(r.holds);
    CHECK(r.eigenvalue_sum <= r.min_cut + 1e-9);
}

TEST_CASE("random graphs n <= 10, k in {2,3}") {
    for (std::uint64_t s = 0; s < 30; ++s) {
        WeightedGraph g = testutil::random_normalized_graph(800 + s, 6 + s % 5);
        const std::size_t k = 2 + s % 2;
        CHECK(check_cut_lower_bound(g, k).holds);
    }
}

TEST_CASE("size guard and connectivity") {
    WeightedGraph big = testutil::random_normalized_graph(5, 13);
    CHECK_THROWS_AS(check_cut_lower_bound(big, 2), PreconditionError);
    WeightedGraph disc = normalize_total_weight(testutil::two_cliques(3, 0.0));
    CHECK_THROWS_AS(check_cut_lower_bound(disc, 2), PreconditionError);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("variance bounds");

TEST_CASE("S_2^2(X_1*) <= lambda_1 / lambda_2") {
    for (std::uint64_t s = 0; s < 30; ++s) {
        WeightedGraph g = testutil::random_normalized_graph(900 + s, 6 + s % 20);
        EigenSystem es = eigh(normalized_laplacian(g));
        if (es.values[2] - es.values[1] <= 1e-9) continue;
        Embedding e = vertex_representatives(g, 1);
        KMeansResult km = weighted_kmeans(e.points, e.weights, 2, s);
        CHECK(km.variance <= es.values[1] / es.values[2] + 1e-9);
    }
}

TEST_CASE("S_k^2 over (k-1)-dimensional representatives is at most k-1") {
    for (std::uint64_t s = 0; s < 15; ++s) {
        WeightedGraph g = testutil::random_normalized_graph(950 + s, 8 + s % 10);
        const std::size_t k = 2 + s % 3;
        Embedding e = vertex_representatives(g, k - 1);
        KMeansResult km = weighted_kmeans(e.points, e.weights, k, s);
        CHECK(km.variance <= static_cast<double>(k - 1) + 1e-9);
    }
}

TEST_SUITE_END();
