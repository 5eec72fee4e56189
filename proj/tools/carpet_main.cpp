// carpet: batch spectral clustering / correspondence analysis front end.
// Subcommands: spectrum, select-k, ca, carpet, cluster.

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "carpet/carpet_map.hpp"
#include "carpet/cut.hpp"
#include "carpet/discrepancy.hpp"
#include "carpet/embedding.hpp"
#include "carpet/errors.hpp"
#include "carpet/graph.hpp"
#include "carpet/kmeans.hpp"
#include "carpet/rng.hpp"
#include "carpet/svg.hpp"
#include "carpet/table.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace carpet;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open input file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string fmt5(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.5f", v);
    return buf;
}

std::string join5(const Vec& values, std::size_t top) {
    std::string out;
    const std::size_t count = top == 0 ? values.size() : std::min(top, values.size());
    for (std::size_t i = 0; i < count; ++i) {
        if (i) out += ", ";
        out += fmt5(values[i]);
    }
    return out;
}

// A graph file is either one graph6 line or an "i j w" edge list; the first
// non-comment line decides.
WeightedGraph load_graph(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string stripped = line;
        const auto hash = stripped.find('#');
        if (hash != std::string::npos) stripped.erase(hash);
        while (!stripped.empty() && (stripped.back() == '\r' || stripped.back() == ' '))
            stripped.pop_back();
        if (stripped.empty()) continue;
        if (stripped.find_first_of(" \t") != std::string::npos) return parse_edge_list(text);
        return parse_graph6(stripped);
    }
    throw ParseError("input contains no graph");
}

struct SelectK {
    std::size_t k = 0;
    json gap_table = json::array();
};

// k = 1 + argmax over positions j >= 1 of (s_j - s_{j+1}) / s_j among the first
// min(10, r-2) nontrivial gap positions; ties go to the lowest index.
// `spectrum` is nonincreasing with the trivial value first.
SelectK select_k_from_spectrum(const Vec& spectrum) {
    if (spectrum.size() < 4)
        throw PreconditionError("select-k needs at least 3 nontrivial values");
    const std::size_t nontrivial = spectrum.size() - 1;
    const std::size_t last_gap = std::min<std::size_t>(10, nontrivial - 1);
    SelectK out;
    double best = -1.0;
    std::size_t best_j = 1;
    for (std::size_t j = 1; j <= last_gap; ++j) {
        const double sj = spectrum[j], sj1 = spectrum[j + 1];
        if (sj <= 0.0) break;
        const double gap = (sj - sj1) / sj;
        out.gap_table.push_back(
            {{"position", j}, {"value", sj}, {"next", sj1}, {"relative_gap", gap}});
        if (gap > best) {
            best = gap;
            best_j = j;
        }
    }
    if (out.gap_table.empty()) throw PreconditionError("spectrum has no usable gap positions");
    out.k = best_j + 1;
    return out;
}

Vec graph_singular_spectrum(const WeightedGraph& g) {
    EigenSystem es = eigh(normalized_laplacian(g));
    Vec s(es.values.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::fabs(1.0 - es.values[i]);
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
}

Vec table_singular_spectrum(const ContingencyTable& t) {
    SvdSystem sv = svd(normalized_table(t));
    return sv.singulars;
}

json result_json(const std::string& command) {
    json r;
    r["schema"] = 1;
    r["tool"] = "carpet";
    r["version"] = kVersion;
    r["command"] = command;
    return r;
}

void emit(const json& report, const std::string& format, const std::string& out_dir,
          const std::string& text) {
    if (format == "json")
        std::cout << report.dump(2) << "\n";
    else
        std::cout << text;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file_atomic((fs::path(out_dir) / "report.json").string(), report.dump(2) + "\n");
    }
}

std::string plot_path(const std::string& out_dir, const std::string& name) {
    return (fs::path(out_dir) / name).string();
}

// Clusters renumbered for display: largest first, ties by first member.
// Returns rank[old_label] = 0-based display index.
std::vector<int> display_order(const Partition& p) {
    std::vector<std::size_t> size(p.k, 0), first(p.k, p.labels.size());
    for (std::size_t i = 0; i < p.labels.size(); ++i) {
        ++size[p.labels[i]];
        first[p.labels[i]] = std::min(first[p.labels[i]], i);
    }
    std::vector<int> order(p.k);
    for (std::size_t c = 0; c < p.k; ++c) order[c] = static_cast<int>(c);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (size[a] != size[b]) return size[a] > size[b];
        return first[a] < first[b];
    });
    std::vector<int> rank(p.k);
    for (std::size_t r = 0; r < p.k; ++r) rank[order[r]] = static_cast<int>(r);
    return rank;
}

json membership_json(const Partition& p, const std::vector<std::string>& labels,
                     const std::vector<int>& rank) {
    json clusters = json::array();
    for (std::size_t r = 0; r < p.k; ++r) {
        json members = json::array();
        for (std::size_t i = 0; i < p.labels.size(); ++i)
            if (rank[p.labels[i]] == static_cast<int>(r)) members.push_back(labels[i]);
        clusters.push_back({{"cluster", r + 1}, {"members", members}});
    }
    return clusters;
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

int cmd_spectrum(const std::string& input, const std::string& kind, std::size_t top,
                 const std::string& format, const std::string& out_dir) {
    json report = result_json("spectrum");
    report["input"] = {{"path", input}, {"kind", kind}};
    Vec values;
    std::string label;
    if (kind == "graph") {
        WeightedGraph g = load_graph(read_file(input));
        values = eigh(normalized_laplacian(g)).values;
        label = "normalized Laplacian eigenvalues (ascending)";
        report["input"]["vertices"] = g.size();
    } else {
        LabeledTable lt = parse_csv_table(read_file(input));
        values = table_singular_spectrum(lt.table);
        label = "singular values of the normalized table (nonincreasing, trivial first)";
        report["input"]["rows"] = lt.table.row_count();
        report["input"]["cols"] = lt.table.col_count();
    }
    report["label"] = label;
    report["values"] = values;
    report["formatted"] = join5(values, top);
    emit(report, format, out_dir, label + ":\n" + join5(values, top) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// select-k
// ---------------------------------------------------------------------------

int cmd_select_k(const std::string& input, const std::string& kind, std::size_t k_override,
                 const std::string& format, const std::string& out_dir) {
    json report = result_json("select-k");
    report["input"] = {{"path", input}, {"kind", kind}};
    Vec spectrum;
    if (kind == "graph") {
        spectrum = graph_singular_spectrum(load_graph(read_file(input)));
    } else if (kind == "table") {
        spectrum = table_singular_spectrum(parse_csv_table(read_file(input)).table);
    } else { // values: whitespace/comma separated, nonincreasing, trivial first
        std::string text = read_file(input);
        for (char& c : text)
            if (c == ',') c = ' ';
        std::istringstream in(text);
        double v;
        while (in >> v) spectrum.push_back(v);
    }
    SelectK sel = select_k_from_spectrum(spectrum);
    const std::size_t k = k_override > 0 ? k_override : sel.k;
    report["spectrum"] = spectrum;
    report["gap_table"] = sel.gap_table;
    report["selected_k"] = sel.k;
    report["k"] = k;
    std::string text = "selected k = " + std::to_string(sel.k) + " (" +
                       std::to_string(sel.k - 1) + " nontrivial vector pairs)\n";
    if (k_override > 0) text += "override in effect: k = " + std::to_string(k) + "\n";
    text += "gap table (position, value, next, relative gap):\n";
    for (const auto& row : sel.gap_table) {
        text += "  " + std::to_string(row["position"].get<std::size_t>()) + "  " +
                fmt5(row["value"].get<double>()) + "  " + fmt5(row["next"].get<double>()) + "  " +
                fmt5(row["relative_gap"].get<double>()) + "\n";
    }
    emit(report, format, out_dir, text);
    return 0;
}

// ---------------------------------------------------------------------------
// ca
// ---------------------------------------------------------------------------

// Per-block chi^2 / N of the block against its own rank-1 fit; rows or columns
// that vanish inside the block contribute nothing.
double block_chi2(const ContingencyTable& t, const std::vector<std::size_t>& rows,
                  const std::vector<std::size_t>& cols) {
    double total = 0.0;
    Vec rsum(rows.size(), 0.0), csum(cols.size(), 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const double v = t.entry(rows[i], cols[j]);
            rsum[i] += v;
            csum[j] += v;
            total += v;
        }
    if (total <= 0.0) return 0.0;
    double chi = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rsum[i] <= 0.0) continue;
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (csum[j] <= 0.0) continue;
            const double expected = rsum[i] * csum[j] / total;
            const double diff = t.entry(rows[i], cols[j]) - expected;
            chi += diff * diff / expected;
        }
    }
    return chi / total;
}

int cmd_ca(const std::string& input, std::size_t k_override, std::uint64_t seed,
           const std::string& format, const std::string& out_dir) {
    json report = result_json("ca");
    LabeledTable lt = parse_csv_table(read_file(input));
    const bool square_labeled =
        lt.table.row_count() == lt.table.col_count() && lt.row_labels == lt.col_labels;
    report["input"] = {{"path", input},
                       {"rows", lt.table.row_count()},
                       {"cols", lt.table.col_count()},
                       {"preprocessing",
                        {{"diagonal_zeroed", square_labeled},
                         {"normalized_total", true},
                         {"note", "rows are destinations (in side), columns origins (out side)"}}}};

    ContingencyTable work = square_labeled ? zero_diagonal(lt.table) : lt.table;
    work = normalize_total(work);
    if (!work.non_degenerate()) throw PreconditionError("table is degenerate");

    const Vec spectrum = table_singular_spectrum(work);
    SelectK sel = select_k_from_spectrum(spectrum);
    const std::size_t k = k_override > 0 ? k_override : sel.k;
    if (k < 2) throw PreconditionError("ca needs k >= 2");
    if (k + 1 > spectrum.size()) throw PreconditionError("k exceeds the table rank");
    report["singular_values"] = spectrum;
    report["gap_table"] = sel.gap_table;
    report["selected_k"] = sel.k;
    report["k"] = k;
    report["seed"] = seed;

    // both sides use the same derived seed so a transposed input swaps the
    // row/column outputs exactly
    auto [row_embed, col_embed] = correspondence_representatives(work, k - 1);
    KMeansResult row_km =
        weighted_kmeans(row_embed.points, row_embed.weights, k, derive_seed(seed, 0));
    KMeansResult col_km =
        weighted_kmeans(col_embed.points, col_embed.weights, k, derive_seed(seed, 0));
    const std::vector<int> row_rank = display_order(row_km.partition);
    const std::vector<int> col_rank = display_order(col_km.partition);
    report["row_clusters"] = membership_json(row_km.partition, lt.row_labels, row_rank);
    report["col_clusters"] = membership_json(col_km.partition, lt.col_labels, col_rank);
    report["row_variance"] = row_km.variance;
    report["col_variance"] = col_km.variance;

    // densities, per-block chi^2, and per-block exact discrepancy where block
    // sizes permit, all in display numbering
    std::vector<std::vector<std::size_t>> row_sets(k), col_sets(k);
    for (std::size_t i = 0; i < lt.row_labels.size(); ++i)
        row_sets[row_rank[row_km.partition.labels[i]]].push_back(i);
    for (std::size_t j = 0; j < lt.col_labels.size(); ++j)
        col_sets[col_rank[col_km.partition.labels[j]]].push_back(j);

    json densities = json::array(), chi_blocks = json::array(), md_blocks = json::array();
    double best_chi = std::numeric_limits<double>::infinity();
    std::size_t best_a = 0, best_b = 0;
    for (std::size_t a = 0; a < k; ++a) {
        json drow = json::array(), crow = json::array(), mrow = json::array();
        for (std::size_t b = 0; b < k; ++b) {
            double cut = 0.0, volr = 0.0, volc = 0.0;
            for (std::size_t i : row_sets[a])
                for (std::size_t j : col_sets[b]) cut += work.entry(i, j);
            for (std::size_t i : row_sets[a]) volr += work.row_sums()[i];
            for (std::size_t j : col_sets[b]) volc += work.col_sums()[j];
            drow.push_back(cut / (volr * volc));
            const double chi = block_chi2(work, row_sets[a], col_sets[b]);
            crow.push_back(chi);
            if (chi < best_chi) {
                best_chi = chi;
                best_a = a;
                best_b = b;
            }
            if (row_sets[a].size() <= 16 && col_sets[b].size() <= 16 &&
                row_sets[a].size() + col_sets[b].size() <= 24)
                mrow.push_back(md_block(work, row_sets[a], col_sets[b]));
            else
                mrow.push_back(nullptr);
        }
        densities.push_back(drow);
        chi_blocks.push_back(crow);
        md_blocks.push_back(mrow);
    }
    report["block_densities"] = densities;
    report["block_chi2_per_sample"] = chi_blocks;
    report["block_md_exact"] = md_blocks;
    report["most_independent_block"] = {{"row_cluster", best_a + 1},
                                        {"col_cluster", best_b + 1},
                                        {"chi2_per_sample", best_chi}};

    json plots = json::array();
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        // heatmap of the raw counts with rows/columns reordered by cluster
        std::vector<std::size_t> row_order, col_order;
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t i : row_sets[a]) row_order.push_back(i);
        for (std::size_t b = 0; b < k; ++b)
            for (std::size_t j : col_sets[b]) col_order.push_back(j);
        HeatmapPlot hm;
        hm.values = Matrix(row_order.size(), col_order.size());
        for (std::size_t i = 0; i < row_order.size(); ++i)
            for (std::size_t j = 0; j < col_order.size(); ++j)
                hm.values(i, j) = lt.table.entry(row_order[i], col_order[j]);
        for (std::size_t i : row_order) hm.row_labels.push_back(lt.row_labels[i]);
        for (std::size_t j : col_order) hm.col_labels.push_back(lt.col_labels[j]);
        write_file_atomic(plot_path(out_dir, "heatmap.svg"), render_heatmap(hm));
        plots.push_back("heatmap.svg");

        const std::size_t axes = std::min<std::size_t>(3, k - 1);
        for (std::size_t a = 0; a < axes; ++a)
            for (std::size_t b = a + 1; b < axes; ++b)
                for (int side = 0; side < 2; ++side) {
                    const Embedding& e = side == 0 ? row_embed : col_embed;
                    const KMeansResult& km = side == 0 ? row_km : col_km;
                    const std::vector<int>& rank = side == 0 ? row_rank : col_rank;
                    ScatterPlot spl;
                    for (std::size_t i = 0; i < e.points.rows(); ++i) {
                        spl.points.push_back({e.points(i, a), e.points(i, b)});
                        spl.clusters.push_back(rank[km.partition.labels[i]]);
                    }
                    const std::string name = std::string("ca_") +
                                             (side == 0 ? "rows_" : "cols_") +
                                             std::to_string(a + 1) + std::to_string(b + 1) + ".svg";
                    write_file_atomic(plot_path(out_dir, name), render_scatter(spl));
                    plots.push_back(name);
                }
    }
    report["plots"] = plots;

    std::string text = "ca: k = " + std::to_string(k) + " (selected " + std::to_string(sel.k) +
                       ")\nrow (destination/immigration) clusters:\n";
    for (const auto& c : report["row_clusters"]) {
        text += "  " + std::to_string(c["cluster"].get<int>()) + ": ";
        for (const auto& m : c["members"]) text += m.get<std::string>() + "; ";
        text += "\n";
    }
    text += "column (origin/emigration) clusters:\n";
    for (const auto& c : report["col_clusters"]) {
        text += "  " + std::to_string(c["cluster"].get<int>()) + ": ";
        for (const auto& m : c["members"]) text += m.get<std::string>() + "; ";
        text += "\n";
    }
    text += "most independent block: row cluster " + std::to_string(best_a + 1) +
            " x column cluster " + std::to_string(best_b + 1) + "\n";
    emit(report, format, out_dir, text);
    return 0;
}

// ---------------------------------------------------------------------------
// carpet
// ---------------------------------------------------------------------------

json carpet_result_json(const CarpetResult& c) {
    json j;
    j["a_star"] = c.a_star;
    j["residual"] = c.residual;
    j["orientation"] = c.orientation;
    j["b"] = c.b;
    j["b_parts"] = c.b_parts;
    json centers = json::array();
    for (const auto& pair : c.centers) centers.push_back({pair[0], pair[1]});
    j["centers"] = centers;
    j["sigma_sq"] = c.sigma_sq;
    j["y"] = c.y;
    return j;
}

int cmd_carpet(const std::string& input, std::size_t k, double tol, std::uint64_t seed,
               std::size_t grid, const std::string& format, const std::string& out_dir) {
    json report = result_json("carpet");
    WeightedGraph g = normalize_total_weight(load_graph(read_file(input)));
    report["input"] = {{"path", input}, {"kind", "graph"}, {"vertices", g.size()}};
    report["seed"] = seed;
    report["k"] = k;

    TheoremOptions opt;
    opt.seed = seed;
    opt.root.tol = tol;
    if (grid > 0) opt.root.grid = grid;
    GapReport gr = theorem_bound_report(g, k, opt);

    report["eigenvalues"] = gr.eigenvalues;
    report["bound"] = gr.bound;
    report["clusters"] = gr.clusters;
    report["clamped"] = gr.clamped;
    report["kmeans_variance"] = gr.achieved;
    report["center_induced_variance"] =
        std::isnan(gr.center_induced) ? json(nullptr) : json(gr.center_induced);
    report["holds"] = gr.holds;
    report["root_found"] = gr.root_found;
    report["chain_holds"] = gr.chain_holds;
    report["root"] = carpet_result_json(gr.carpet);
    report["kmeans"] = {{"variance", gr.kmeans.variance},
                        {"iterations", gr.kmeans.iterations},
                        {"seed", gr.kmeans.seed},
                        {"labels", gr.kmeans.partition.labels}};

    const std::size_t dim = k - 1;
    json plots = json::array();
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        Embedding embedding = vertex_representatives(g, dim);
        Carpet carpet = make_carpet(embedding);

        // embedding scatter with the root as a distinguished point (mapped back
        // to the unoriented coordinates)
        ScatterPlot spl;
        for (std::size_t i = 0; i < embedding.points.rows(); ++i) {
            const double x = embedding.points(i, 0);
            const double y = dim >= 2 ? embedding.points(i, 1) : 0.0;
            spl.points.push_back({x, y});
            spl.clusters.push_back(gr.kmeans.partition.labels[i]);
        }
        if (gr.root_found) {
            const double rx = gr.carpet.orientation[0] * gr.carpet.a_star[0];
            const double ry = dim >= 2 ? gr.carpet.orientation[1] * gr.carpet.a_star[1] : 0.0;
            spl.marks.push_back({rx, ry});
        }
        write_file_atomic(plot_path(out_dir, "embedding.svg"), render_scatter(spl));
        plots.push_back("embedding.svg");

        const std::size_t image_grid = grid > 0 ? grid : (dim == 3 ? 16 : 64);
        if (dim <= 2) {
            // one image per orientation mask (grid lines map to families of arcs)
            const char* names[] = {"carpet_image_pp.svg", "carpet_image_mp.svg",
                                   "carpet_image_pm.svg", "carpet_image_mm.svg"};
            const std::size_t masks = static_cast<std::size_t>(1) << dim;
            for (std::size_t bits = 0; bits < masks; ++bits) {
                std::vector<int> mask(dim);
                for (std::size_t l = 0; l < dim; ++l) mask[l] = (bits >> l) & 1 ? -1 : 1;
                CarpetImage img = carpet_image(orient(carpet, mask), image_grid);
                CurvePlot cpl;
                if (dim == 1) {
                    std::vector<std::array<double, 2>> curve;
                    for (std::size_t r = 0; r < img.domain.rows(); ++r)
                        curve.push_back({img.domain(r, 0), img.image(r, 0)});
                    cpl.curves.push_back(std::move(curve));
                } else {
                    std::size_t len1 = 0;
                    while (len1 < img.domain.rows() && img.domain(len1, 0) == img.domain(0, 0))
                        ++len1;
                    const std::size_t len0 = img.domain.rows() / std::max<std::size_t>(len1, 1);
                    for (std::size_t i0 = 0; i0 < len0; ++i0) {
                        std::vector<std::array<double, 2>> curve;
                        for (std::size_t i1 = 0; i1 < len1; ++i1) {
                            const std::size_t r = i0 * len1 + i1;
                            curve.push_back({img.image(r, 0), img.image(r, 1)});
                        }
                        cpl.curves.push_back(std::move(curve));
                        cpl.clusters.push_back(0);
                    }
                    for (std::size_t i1 = 0; i1 < len1; ++i1) {
                        std::vector<std::array<double, 2>> curve;
                        for (std::size_t i0 = 0; i0 < len0; ++i0)
                            curve.push_back(
                                {img.image(i0 * len1 + i1, 0), img.image(i0 * len1 + i1, 1)});
                        cpl.curves.push_back(std::move(curve));
                        cpl.clusters.push_back(1);
                    }
                }
                if (dim == 1 && bits > 1) continue;
                write_file_atomic(plot_path(out_dir, names[bits]), render_curves(cpl));
                plots.push_back(names[bits]);
                if (bits == 0 && dim == 2) {
                    write_file_atomic(plot_path(out_dir, "carpet_image.svg"), render_curves(cpl));
                    plots.push_back("carpet_image.svg");
                }
            }
        } else if (dim == 3) {
            CarpetImage img = carpet_image(carpet, image_grid);
            // two fixed orthographic viewpoints
            const double v1[2][3] = {{0.707106781186547, -0.707106781186547, 0.0},
                                     {0.408248290463863, 0.408248290463863, -0.816496580927726}};
            const double v2[2][3] = {{0.0, 0.707106781186547, -0.707106781186547},
                                     {-0.816496580927726, 0.408248290463863, 0.408248290463863}};
            for (int view = 0; view < 2; ++view) {
                const auto& basis = view == 0 ? v1 : v2;
                ScatterPlot pc;
                for (std::size_t r = 0; r < img.image.rows(); ++r) {
                    double px = 0.0, py = 0.0;
                    for (std::size_t c = 0; c < 3; ++c) {
                        px += basis[0][c] * img.image(r, c);
                        py += basis[1][c] * img.image(r, c);
                    }
                    pc.points.push_back({px, py});
                    pc.clusters.push_back(0);
                }
                pc.marks.push_back({0.0, 0.0}); // projected origin
                const std::string name = view == 0 ? "carpet3d_view1.svg" : "carpet3d_view2.svg";
                write_file_atomic(plot_path(out_dir, name), render_scatter(pc));
                plots.push_back(name);
            }
            // support margin of the origin against the sampled image cloud;
            // positive means no probed direction separates the origin
            double margin = std::numeric_limits<double>::infinity();
            const std::size_t dirs = 1000;
            for (std::size_t t = 0; t < dirs; ++t) {
                const double z = 1.0 - 2.0 * (static_cast<double>(t) + 0.5) / dirs;
                const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
                const double phi = 2.399963229728653 * static_cast<double>(t);
                const double dir[3] = {rxy * std::cos(phi), rxy * std::sin(phi), z};
                double support = -std::numeric_limits<double>::infinity();
                for (std::size_t r = 0; r < img.image.rows(); ++r) {
                    double dp = 0.0;
                    for (std::size_t c = 0; c < 3; ++c) dp += dir[c] * img.image(r, c);
                    support = std::max(support, dp);
                }
                margin = std::min(margin, support);
            }
            report["origin_support_margin"] = margin;
        }
    }
    report["plots"] = plots;

    std::string text = "carpet: k = " + std::to_string(k) + ", clusters = " +
                       std::to_string(gr.clusters) + "\n";
    text += "bound (lambda_1+...+lambda_" + std::to_string(k - 1) + ")/lambda_" +
            std::to_string(k) + " = " + fmt5(gr.bound) + "\n";
    text += "k-means variance = " + fmt5(gr.achieved) +
            (gr.holds ? "  (bound holds)\n" : "  (BOUND VIOLATED)\n");
    if (gr.root_found) {
        text += "root a* = (";
        for (std::size_t j = 0; j < gr.carpet.a_star.size(); ++j)
            text += (j ? ", " : std::string()) + fmt5(gr.carpet.a_star[j]);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e", gr.carpet.residual);
        text += "), residual = " + std::string(buf) +
                ", sigma^2(y) = " + fmt5(gr.carpet.sigma_sq) + "\n";
    } else {
        text += "no root met the tolerance (best residual " + fmt5(gr.carpet.residual) + ")\n";
    }
    emit(report, format, out_dir, text);
    return 0;
}

// ---------------------------------------------------------------------------
// cluster
// ---------------------------------------------------------------------------

int cmd_cluster(const std::string& input, std::size_t k, std::size_t clusters,
                std::uint64_t seed, const std::string& format, const std::string& out_dir) {
    json report = result_json("cluster");
    WeightedGraph g = normalize_total_weight(load_graph(read_file(input)));
    report["input"] = {{"path", input}, {"kind", "graph"}, {"vertices", g.size()}};
    if (clusters == 0) clusters = static_cast<std::size_t>(1) << (k - 1);
    clusters = std::min(clusters, g.size());
    report["k"] = k;
    report["clusters"] = clusters;
    report["seed"] = seed;

    Embedding e = vertex_representatives(g, k - 1);
    KMeansResult km = weighted_kmeans(e.points, e.weights, clusters, seed);
    report["variance"] = km.variance;
    report["labels"] = km.partition.labels;
    report["normalized_cut"] = normalized_cut(g, km.partition);

    if (g.size() <= 12) {
        CutBoundReport cb = check_cut_lower_bound(g, clusters);
        report["cut_bound"] = {{"eigenvalue_sum", cb.eigenvalue_sum},
                               {"exact_min_cut", cb.min_cut},
                               {"holds", cb.holds}};
    } else {
        report["cut_bound"] = nullptr; // exact f_k infeasible at this size
    }

    std::string text = "cluster: " + std::to_string(clusters) + " clusters from " +
                       std::to_string(k - 1) + "-dimensional representatives\n";
    text += "variance = " + fmt5(km.variance) +
            ", normalized cut = " + fmt5(report["normalized_cut"].get<double>()) + "\n";
    text += "labels:";
    for (int l : km.partition.labels) text += " " + std::to_string(l);
    text += "\n";
    emit(report, format, out_dir, text);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral clustering, correspondence analysis, and Fiedler-carpet toolkit"};
    app.require_subcommand(1);

    std::string input, kind = "graph", format = "text", out_dir;
    std::size_t k = 0, clusters = 0, top = 0, grid = 0;
    std::uint64_t seed = 1;
    double tol = 1e-8;

    auto* sp = app.add_subcommand("spectrum", "print the full spectrum of a graph or table");
    sp->add_option("input", input)->required();
    sp->add_option("--kind", kind)->check(CLI::IsMember({"graph", "table"}));
    sp->add_option("--top", top);
    sp->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));
    sp->add_option("--out", out_dir);

    auto* sk = app.add_subcommand("select-k", "pick k from the largest relative spectral gap");
    sk->add_option("input", input)->required();
    sk->add_option("--kind", kind)->check(CLI::IsMember({"graph", "table", "values"}));
    sk->add_option("--k", k, "override the selected k in the report");
    sk->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));
    sk->add_option("--out", out_dir);

    auto* ca = app.add_subcommand("ca", "correspondence analysis with clustering");
    ca->add_option("input", input)->required();
    ca->add_option("--k", k, "cluster count (default: gap selection)");
    ca->add_option("--seed", seed);
    ca->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));
    ca->add_option("--out", out_dir);

    auto* cp = app.add_subcommand("carpet", "Fiedler-carpet root, theorem report, and images");
    cp->add_option("input", input)->required();
    cp->add_option("--k", k)->default_val(3);
    cp->add_option("--tol", tol);
    cp->add_option("--seed", seed);
    cp->add_option("--grid", grid, "grid density per axis (0 = default)");
    cp->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));
    cp->add_option("--out", out_dir);

    auto* cl = app.add_subcommand("cluster", "weighted k-means on the eigenmap");
    cl->add_option("input", input)->required();
    cl->add_option("--k", k)->default_val(2);
    cl->add_option("--clusters", clusters, "cluster count (default 2^(k-1))");
    cl->add_option("--seed", seed);
    cl->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));
    cl->add_option("--out", out_dir);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sp->parsed()) return cmd_spectrum(input, kind, top, format, out_dir);
        if (sk->parsed()) return cmd_select_k(input, kind, k, format, out_dir);
        if (ca->parsed()) return cmd_ca(input, k, seed, format, out_dir);
        if (cp->parsed()) return cmd_carpet(input, k, tol, seed, grid, format, out_dir);
        if (cl->parsed()) return cmd_cluster(input, k, clusters, seed, format, out_dir);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition violated: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    }
    return 1;
}
