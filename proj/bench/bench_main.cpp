// Timing comparison of the serial reference kernels against their OpenMP
// counterparts: k-means restarts, exact discrepancy enumeration, and the
// carpet root grid scan. Both paths must return identical results; the
// benchmark asserts that while it measures.

#include <cstdio>
#include <cstdlib>

#include "carpet/carpet_map.hpp"
#include "carpet/discrepancy.hpp"
#include "carpet/embedding.hpp"
#include "carpet/exec.hpp"
#include "carpet/graph.hpp"
#include "carpet/kmeans.hpp"
#include "carpet/rng.hpp"

using namespace carpet;

namespace {

WeightedGraph random_graph(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Matrix w(n, n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t j = rng.index(i);
        const double v = rng.uniform(0.2, 1.2);
        w(i, j) = w(j, i) = v;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.uniform() < 0.15) {
                const double v = rng.uniform(0.2, 1.2);
                w(i, j) = w(j, i) = std::max(w(i, j), v);
            }
    return normalize_total_weight(WeightedGraph(std::move(w)));
}

ContingencyTable random_table(std::size_t m, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Matrix e(m, n);
    for (double& v : e.data()) v = rng.uniform(0.05, 1.0);
    return ContingencyTable(std::move(e));
}

struct Timing {
    double serial = 0.0, parallel = 0.0;
};

void report(const char* name, const Timing& t) {
    std::printf("%-28s serial %8.3f s   parallel %8.3f s   speedup %5.2fx\n", name, t.serial,
                t.parallel, t.parallel > 0.0 ? t.serial / t.parallel : 0.0);
}

} // namespace

int main(int argc, char** argv) {
    const int scale = argc > 1 ? std::atoi(argv[1]) : 1;
    std::printf("threads available: %d (scale %d)\n", exec_threads(Exec::Parallel), scale);

    { // k-means restarts
        WeightedGraph g = random_graph(600, 7);
        Embedding e = vertex_representatives(g, 3);
        Timing t;
        KMeansResult serial, parallel;
        double t0 = wall_time();
        serial = weighted_kmeans(e.points, e.weights, 8, 1, 64 * scale, Exec::Serial);
        t.serial = wall_time() - t0;
        t0 = wall_time();
        parallel = weighted_kmeans(e.points, e.weights, 8, 1, 64 * scale, Exec::Parallel);
        t.parallel = wall_time() - t0;
        if (serial.variance != parallel.variance ||
            serial.partition.labels != parallel.partition.labels) {
            std::fprintf(stderr, "k-means serial/parallel mismatch\n");
            return 1;
        }
        report("weighted_kmeans (restarts)", t);
    }

    { // exact discrepancy enumeration
        ContingencyTable t_tab = random_table(2 * 13, 2 * 12, 11);
        std::vector<int> row_labels(t_tab.row_count()), col_labels(t_tab.col_count());
        for (std::size_t i = 0; i < row_labels.size(); ++i)
            row_labels[i] = static_cast<int>(i % 2);
        for (std::size_t j = 0; j < col_labels.size(); ++j)
            col_labels[j] = static_cast<int>(j % 2);
        BiPartition p = make_bipartition(row_labels, 2, col_labels, 2);
        Timing t;
        double t0 = wall_time();
        DiscrepancyReport serial = md_exact(t_tab, p, Exec::Serial);
        t.serial = wall_time() - t0;
        t0 = wall_time();
        DiscrepancyReport parallel = md_exact(t_tab, p, Exec::Parallel);
        t.parallel = wall_time() - t0;
        if (serial.md != parallel.md || serial.witness.rows != parallel.witness.rows ||
            serial.witness.cols != parallel.witness.cols) {
            std::fprintf(stderr, "md_exact serial/parallel mismatch\n");
            return 1;
        }
        report("md_exact (subset search)", t);
    }

    { // carpet root grid scan
        WeightedGraph g = random_graph(120, 23);
        Embedding e = vertex_representatives(g, 3);
        Carpet c = make_carpet(e);
        RootOptions opt;
        opt.grid = 24 * scale;
        Timing t;
        opt.exec = Exec::Serial;
        double t0 = wall_time();
        auto serial = carpet_root_best(c, opt);
        t.serial = wall_time() - t0;
        opt.exec = Exec::Parallel;
        t0 = wall_time();
        auto parallel = carpet_root_best(c, opt);
        t.parallel = wall_time() - t0;
        if (serial.first.residual != parallel.first.residual ||
            serial.first.a_star != parallel.first.a_star) {
            std::fprintf(stderr, "carpet_root serial/parallel mismatch\n");
            return 1;
        }
        report("carpet_root (grid scan)", t);
    }

    return 0;
}
