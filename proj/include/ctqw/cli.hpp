// cli.hpp
// Command-line frontend. `run` is the whole program minus process plumbing so
// it can be driven from tests:
//
//   exit 0  result on `out`
//   exit 2  validation error (bad arguments, malformed graph, invalid target)
//   exit 1  internal error

#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctqw/analysis.hpp"
#include "ctqw/graph.hpp"
#include "ctqw/graph_io.hpp"
#include "ctqw/solvers.hpp"
#include "ctqw/spectral.hpp"
#include "ctqw/walk.hpp"

namespace ctqw::cli {

using nlohmann::json;

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Default tolerance for mixing verdicts; CTQW_TOL overrides it.
inline double default_tolerance() {
    if (const char* env = std::getenv("CTQW_TOL")) {
        try {
            std::size_t used = 0;
            const double v = std::stod(env, &used);
            if (used == std::string(env).size() && v > 0.0) return v;
        } catch (const std::exception&) {
        }
        throw ValidationError(std::string("CTQW_TOL must be a positive number, got '") + env + "'");
    }
    return 1e-9;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(item);
    return out;
}

inline double parse_number(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw ValidationError("not a number: '" + s + "'");
        return v;
    } catch (const std::invalid_argument&) {
        throw ValidationError("not a number: '" + s + "'");
    } catch (const std::out_of_range&) {
        throw ValidationError("number out of range: '" + s + "'");
    }
}

inline std::size_t parse_index(const std::string& s) {
    const double v = parse_number(s);
    if (v < 0 || v != std::floor(v)) throw ValidationError("expected a non-negative integer, got '" + s + "'");
    return static_cast<std::size_t>(v);
}

inline std::vector<std::size_t> parse_sizes(const std::string& s) {
    std::vector<std::size_t> out;
    for (const auto& part : split(s, ',')) out.push_back(parse_index(part));
    return out;
}

// ---------------------------------------------------------------------------
// Graph sources.

struct GraphSource {
    std::string file;
    std::string family;
    std::size_t n = 0;
    std::string parts;
    std::string connections;
};

struct LoadedGraph {
    WeightedGraph graph;
    std::optional<Cells> cells;
    std::string family;
    json extra;  // the raw file, when loaded from disk
};

inline FamilySpec family_spec(const std::string& name, std::size_t n, const std::string& parts,
                              const std::string& connections) {
    FamilySpec spec;
    if (name == "k2") {
        spec.family = Family::complete;
        spec.n = 2;
        return spec;
    }
    if (name == "p3") {
        spec.family = Family::path;
        spec.n = 3;
        return spec;
    }
    spec.family = parse_family(name);
    spec.n = n;
    if (!parts.empty()) spec.parts = parse_sizes(parts);
    if (spec.family == Family::claw && spec.n == 0 && spec.parts.size() == 1) spec.n = spec.parts[0];
    if (spec.family == Family::complete_multipartite && spec.parts.empty()) {
        throw ValidationError("complete-multipartite family needs --parts");
    }
    if (!connections.empty()) {
        for (const auto& c : split(connections, ',')) spec.connections.push_back(static_cast<long>(parse_number(c)));
    }
    return spec;
}

inline LoadedGraph load(const GraphSource& src) {
    if (src.file.empty() == src.family.empty()) {
        throw ValidationError("give exactly one graph source: --graph FILE or --family NAME");
    }
    if (!src.file.empty()) {
        std::ifstream in(src.file);
        if (!in) throw ValidationError("cannot open graph file '" + src.file + "'");
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ValidationError("malformed graph file '" + src.file + "': " + e.what());
        }
        auto gf = graph_from_json(j);
        return {std::move(gf.graph), std::move(gf.cells), "file", std::move(j)};
    }
    const auto spec = family_spec(src.family, src.n, src.parts, src.connections);
    if (spec.family == Family::complete_multipartite) {
        auto pg = build_partitioned(spec);
        return {std::move(pg.graph), std::move(pg.cells), src.family, {}};
    }
    return {build_family(spec), std::nullopt, src.family, {}};
}

// "name", "name:n", "name:a,b,c", "circulant:n:s1,s2"
inline WeightedGraph graph_from_spec(const std::string& text, std::string* canonical_name = nullptr,
                                     std::size_t* param = nullptr) {
    const auto fields = split(text, ':');
    if (fields.empty()) throw ValidationError("empty graph spec");
    const std::string& name = fields[0];
    std::size_t n = 0;
    std::string parts;
    std::string connections;
    if (fields.size() >= 2) {
        if (name == "multipartite" || name == "complete-multipartite" || name == "bipartite") {
            parts = fields[1];
        } else {
            n = parse_index(fields[1]);
        }
    }
    if (fields.size() >= 3) connections = fields[2];
    const auto spec = family_spec(name, n, parts, connections);
    if (canonical_name) *canonical_name = name;
    if (param) *param = spec.n;
    return build_family(spec);
}

inline Vertex parse_start(const std::string& s, std::size_t n) {
    Vertex v = 0;
    if (s == "center" || s == "left") {
        v = 0;
    } else if (s == "middle") {
        v = 1;
    } else if (s == "right") {
        v = 2;
    } else {
        v = parse_index(s);
    }
    if (v >= n) throw ValidationError("start vertex " + s + " out of range for " + std::to_string(n) + " vertices");
    return v;
}

// ---------------------------------------------------------------------------
// Target distributions: "uniform", "point:v", "random", inline "a,b,c", or a
// file holding a JSON array or separated numbers.

inline Distribution parse_target(const std::string& spec, std::size_t n, std::uint64_t seed) {
    std::vector<double> p;
    if (spec == "uniform") return Distribution::uniform(n);
    if (spec.rfind("point:", 0) == 0) {
        const auto v = parse_index(spec.substr(6));
        if (v >= n) throw ValidationError("point mass vertex out of range");
        return Distribution::point(n, v);
    }
    if (spec == "random") {
        std::mt19937_64 rng(seed);
        std::exponential_distribution<double> expo(1.0);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            p.push_back(expo(rng));
            s += p.back();
        }
        for (double& x : p) x /= s;
        return Distribution(std::move(p));
    }
    std::string text = spec;
    if (std::filesystem::is_regular_file(spec)) {
        std::ifstream in(spec);
        std::stringstream buf;
        buf << in.rdbuf();
        text = buf.str();
        const auto first = text.find_first_not_of(" \t\r\n");
        if (first != std::string::npos && text[first] == '[') {
            try {
                for (const auto& x : json::parse(text)) p.push_back(x.get<double>());
            } catch (const json::exception& e) {
                throw ValidationError(std::string("malformed target file: ") + e.what());
            }
            text.clear();
        } else {
            for (char& c : text)
                if (c == '\n' || c == '\r' || c == '\t' || c == ' ') c = ',';
        }
    }
    for (const auto& item : split(text, ','))
        if (!item.empty()) p.push_back(parse_number(item));
    if (p.size() != n) {
        throw ValidationError("target has " + std::to_string(p.size()) + " entries, expected " + std::to_string(n));
    }
    double s = 0.0;
    for (double x : p) {
        if (!(x >= 0.0)) throw ValidationError("target entries must be non-negative");
        s += x;
    }
    if (std::abs(s - 1.0) > 1e-9) throw ValidationError("target entries must sum to 1 (got " + format_double(s) + ")");
    for (double& x : p) x /= s;
    return Distribution(std::move(p));
}

// ---------------------------------------------------------------------------
// JSON emitters.

inline json report_json(const MixingReport& r) {
    json j;
    j["kind"] = r.kind == MixingKind::instantaneous ? "instantaneous" : "average";
    j["target"] = r.target.probs();
    j["best_time"] = r.best_time ? json(*r.best_time) : json(nullptr);
    j["best_distance"] = std::isfinite(r.best_distance) ? json(r.best_distance) : json(nullptr);
    j["scan_window"] = {{"t_max", r.t_max}, {"step", r.step}};
    j["tolerance"] = r.tolerance;
    j["feasible"] = r.feasible;
    j["mixing_times"] = r.mixing_times;
    j["note"] = r.note;
    return j;
}

inline json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json& rows) {
    if (!rows.is_array() || rows.empty()) throw ValidationError("expected a non-empty matrix");
    // stored column-major: one inner array per cell vector
    const auto cols = static_cast<Eigen::Index>(rows.size());
    const auto len = static_cast<Eigen::Index>(rows[0].size());
    Eigen::MatrixXd m(len, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(c)].size()) != len) throw ValidationError("ragged cell vectors");
        for (Eigen::Index i = 0; i < len; ++i) m(i, c) = rows[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)].get<double>();
    }
    return m;
}

inline json cells_json(const Eigen::MatrixXd& cells) {
    json out = json::array();
    for (Eigen::Index c = 0; c < cells.cols(); ++c) {
        json col = json::array();
        for (Eigen::Index i = 0; i < cells.rows(); ++i) col.push_back(cells(i, c));
        out.push_back(std::move(col));
    }
    return out;
}

// "0|1|2,3,4" or with coefficients "0|1|2:0.5,3:0.5"
inline Eigen::MatrixXd parse_cells(const std::string& text, std::size_t n) {
    std::vector<Eigen::VectorXd> cols;
    for (const auto& cell : split(text, '|')) {
        std::vector<Vertex> vs;
        std::vector<double> cs;
        for (const auto& item : split(cell, ',')) {
            const auto kv = split(item, ':');
            const auto v = parse_index(kv.at(0));
            if (v >= n) throw ValidationError("cell vertex out of range");
            vs.push_back(v);
            cs.push_back(kv.size() > 1 ? parse_number(kv[1]) : 1.0);
        }
        cols.push_back(cell_vector(n, vs, cs));
    }
    return detail::stack(std::move(cols));
}

// ---------------------------------------------------------------------------

inline void add_graph_options(CLI::App* cmd, GraphSource& src) {
    cmd->add_option("--graph", src.file, "graph JSON file");
    cmd->add_option("--family", src.family,
                    "k2|p3|path|cycle|complete|claw|bipartite|multipartite|hypercube|circulant");
    cmd->add_option("--n", src.n, "vertex count (leaves for claw, dimension for hypercube)");
    cmd->add_option("--parts", src.parts, "comma-separated part sizes");
    cmd->add_option("--connections", src.connections, "circulant connection set, comma-separated");
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"ctqw: continuous-time quantum walks on weighted graphs"};
    app.require_subcommand(1);

    GraphSource src;
    std::string start_text = "0";
    double t = 0.0;
    double t_max = default_scan_t_max;
    double step = default_scan_step;
    double group_tol = default_grouping_tolerance;
    std::optional<double> tol_opt;
    unsigned threads = 0;
    std::uint64_t seed = 0;
    std::string target_text;
    std::string format = "csv";
    bool raw = false;
    std::optional<double> horizon;
    std::size_t steps = 1000000;
    std::optional<double> c_const;
    std::string g_spec;
    std::string h_spec;
    std::size_t g_start = 0;
    std::size_t h_start = 0;
    std::string cells_text;

    auto add_common = [&](CLI::App* cmd) {
        add_graph_options(cmd, src);
        cmd->add_option("--start", start_text, "start vertex (index, or center|left|middle|right)");
        cmd->add_option("--group-tol", group_tol, "relative eigenvalue grouping tolerance")->check(CLI::PositiveNumber);
        cmd->add_option("--tol", tol_opt, "mixing tolerance (default 1e-9 or $CTQW_TOL)");
        cmd->add_option("--threads", threads, "scan threads (0 = all cores)");
        cmd->add_option("--seed", seed, "seed for random targets");
    };

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues, multiplicities, tau, mu");
    add_common(spectrum);
    auto* evolve_cmd = app.add_subcommand("evolve", "amplitudes and distribution at time t");
    add_common(evolve_cmd);
    evolve_cmd->add_option("--t", t, "time")->required();
    auto* traj = app.add_subcommand("trajectory", "distributions on a time grid");
    add_common(traj);
    traj->add_option("--t-max", t_max)->required();
    traj->add_option("--step", step)->required();
    traj->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
    auto* average = app.add_subcommand("average", "time-averaged distribution");
    add_common(average);
    average->add_option("--horizon", horizon, "also report the trapezoidal average over [0, T]");
    average->add_option("--steps", steps, "trapezoid intervals for --horizon");
    auto* solve = app.add_subcommand("solve", "weights and time hitting a target distribution");
    add_common(solve);
    solve->add_option("--target", target_text, "uniform | point:v | random | a,b,c | FILE")->required();
    solve->add_flag("--raw", raw, "do not rescale weights to a maximum of 1");
    auto* check = app.add_subcommand("check-uniform", "scan for uniform mixing");
    add_common(check);
    check->add_option("--t-max", t_max);
    check->add_option("--step", step);
    auto* product = app.add_subcommand("product-check", "uniform mixing of a Cartesian product");
    product->set_help_flag("--help", "print this help message and exit");  // frees -h for --h
    product->add_option("--g", g_spec, "first factor, e.g. hypercube:2")->required();
    product->add_option("--h", h_spec, "second factor, e.g. complete:4")->required();
    product->add_option("--g-start", g_start);
    product->add_option("--h-start", h_start);
    product->add_option("--t-max", t_max);
    product->add_option("--step", step);
    product->add_option("--tol", tol_opt);
    product->add_option("--threads", threads);
    auto* bound = app.add_subcommand("bound", "average start-vertex lower bound 1/tau");
    add_common(bound);
    bound->add_option("--c", c_const, "almost-uniform constant c in c/n");
    bound->add_option("--target", target_text, "also test a target for average reachability");
    auto* collapse_cmd = app.add_subcommand("collapse", "reduced Hamiltonian on cell vectors");
    add_common(collapse_cmd);
    collapse_cmd->add_option("--cells", cells_text, "cells, e.g. 1|0|2,3,4 or 1|0|2:0.6,3:0.8");

    std::vector<const char*> argv{"ctqw"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        const double tol = tol_opt ? *tol_opt : default_tolerance();
        if (!(tol > 0.0)) throw ValidationError("--tol must be positive");
        json j;

        if (*spectrum) {
            const auto g = load(src);
            const auto d = decompose(g.graph, group_tol);
            j["n"] = g.graph.size();
            j["eigenvalues"] = std::vector<double>(d.eigenvalues.data(), d.eigenvalues.data() + d.eigenvalues.size());
            j["distinct_eigenvalues"] = json::array();
            j["multiplicities"] = json::array();
            for (std::size_t k = 0; k < d.groups.size(); ++k) {
                j["distinct_eigenvalues"].push_back(d.group_value(k));
                j["multiplicities"].push_back(d.groups[k].size());
            }
            j["tau"] = spectral_type(d);
            j["mu"] = max_multiplicity(d);
            j["spectral_radius"] = d.spectral_radius;
            j["grouping_tolerance"] = d.grouping_tolerance;
        } else if (*evolve_cmd) {
            const auto g = load(src);
            const Vertex s = parse_start(start_text, g.graph.size());
            const auto state = evolve(decompose(g.graph, group_tol), s, t);
            j["start"] = s;
            j["t"] = t;
            j["amplitudes"] = json::array();
            for (Eigen::Index k = 0; k < state.amplitudes.size(); ++k) {
                j["amplitudes"].push_back({state.amplitudes(k).real(), state.amplitudes(k).imag()});
            }
            j["distribution"] = instantaneous_distribution(state).probs();
            j["norm"] = state.norm();
        } else if (*traj) {
            const auto g = load(src);
            const Vertex s = parse_start(start_text, g.graph.size());
            const auto rows = trajectory(g.graph, s, t_max, step);
            if (format == "csv") {
                write_trajectory_csv(out, rows);
                return 0;
            }
            j["start"] = s;
            j["rows"] = json::array();
            for (const auto& r : rows) j["rows"].push_back({{"t", r.t}, {"distribution", r.distribution.probs()}});
        } else if (*average) {
            const auto g = load(src);
            const Vertex s = parse_start(start_text, g.graph.size());
            const auto d = decompose(g.graph, group_tol);
            j["start"] = s;
            j["distribution"] = average_distribution(d, s).probs();
            j["tau"] = spectral_type(d);
            j["grouping_tolerance"] = d.grouping_tolerance;
            if (horizon) {
                j["numerical"] = {{"horizon", *horizon},
                                  {"steps", steps},
                                  {"distribution", numerical_time_average(g.graph, s, *horizon, steps).probs()}};
            }
        } else if (*solve) {
            if (src.family.empty()) throw ValidationError("solve needs --family p3|claw|bipartite|multipartite");
            MixingSolution sol{WeightedGraph(1), 0, 0.0, 0.0, {}};
            std::vector<std::size_t> parts = src.parts.empty() ? std::vector<std::size_t>{} : parse_sizes(src.parts);
            std::optional<Cells> cells;
            Distribution target;
            if (src.family == "p3") {
                target = parse_target(target_text, 3, seed);
                const Vertex s = parse_start(start_text, 3);
                if (s > 1) throw ValidationError("p3 start must be left (0) or middle (1)");
                sol = solve_p3(target, s == 0 ? P3Start::left : P3Start::middle);
            } else if (src.family == "claw") {
                const std::size_t leaves = src.n ? src.n : (parts.size() == 1 ? parts[0] : 0);
                if (leaves == 0) throw ValidationError("claw needs --parts LEAVES or --n LEAVES");
                target = parse_target(target_text, leaves + 1, seed);
                sol = solve_claw(target, parse_start(start_text, leaves + 1));
            } else if (src.family == "bipartite" || src.family == "multipartite" ||
                       src.family == "complete-multipartite") {
                if (parts.size() < 2) throw ValidationError("--parts needs at least two sizes");
                if (src.family == "bipartite" && parts.size() != 2) throw ValidationError("bipartite needs exactly two parts");
                std::size_t n = 0;
                for (auto p : parts) n += p;
                target = parse_target(target_text, n, seed);
                const Vertex s = parse_start(start_text, n);
                sol = parts.size() == 2 ? solve_bipartite(parts[0], parts[1], target, s)
                                        : solve_multipartite(parts, target, s);
                cells = complete_multipartite(parts).cells;
            } else {
                throw ValidationError("solve supports p3|claw|bipartite|multipartite, got '" + src.family + "'");
            }
            if (!raw) sol = normalized(sol, target);
            j = graph_to_json(sol.graph, cells);
            j["family"] = src.family;
            j["parts"] = parts;
            j["start"] = sol.start;
            j["t"] = sol.t;
            j["residual"] = sol.residual;
            j["target"] = target.probs();
            if (sol.cells.size() > 0) j["collapse_cells"] = cells_json(sol.cells);
        } else if (*check) {
            const auto g = load(src);
            const Vertex s = parse_start(start_text, g.graph.size());
            j = report_json(uniform_mixing_scan(g.graph, s, {t_max, step, tol, default_refine_width, threads}));
        } else if (*product) {
            auto factor = [&](const std::string& spec, std::size_t start) {
                std::string name;
                std::size_t param = 0;
                WeightedGraph g = graph_from_spec(spec, &name, &param);
                check_start(g.size(), start);
                MixingTimeSet times;
                std::string source = "closed form";
                if (name == "k2") {
                    times = complete_graph_uniform_condition(2).times;
                } else if (name == "complete" && param >= 2 && param <= 4) {
                    times = complete_graph_uniform_condition(param).times;
                } else if (name == "hypercube" && param >= 1) {
                    times = hypercube_mixing_times(param);
                } else if ((name == "claw" || name == "star") && start == 0) {
                    times = claw_mixing_times(param);
                } else {
                    times = uniform_mixing_scan(g, start, {t_max, step, tol, default_refine_width, threads}).time_set();
                    source = "scan";
                }
                return std::pair{ProductFactor{std::move(g), start, std::move(times)}, source};
            };
            auto [gf, g_src] = factor(g_spec, g_start);
            auto [hf, h_src] = factor(h_spec, h_start);
            j = report_json(product_uniform_mixing(gf, hf, t_max, tol));
            j["factors"] = {{{"spec", g_spec}, {"start", g_start}, {"times_from", g_src}},
                            {{"spec", h_spec}, {"start", h_start}, {"times_from", h_src}}};
            j["product_start"] = g_start * hf.graph.size() + h_start;
        } else if (*bound) {
            const auto g = load(src);
            const auto b = average_mixing_bound(g.graph, c_const, group_tol);
            j["tau"] = b.tau;
            j["lower_bound"] = b.lower_bound;
            j["start_probabilities"] = b.start_probabilities;
            j["min_start_probability"] = b.min_start_probability;
            j["max_start_probability"] = b.max_start_probability;
            j["bound_holds"] = b.bound_holds;
            j["almost_uniform_constant"] = b.almost_uniform_constant ? json(*b.almost_uniform_constant) : json(nullptr);
            j["almost_uniform_excluded"] = b.almost_uniform_excluded;
            if (!target_text.empty()) {
                const Vertex s = parse_start(start_text, g.graph.size());
                const auto v = average_universal_verdict(g.graph, parse_target(target_text, g.graph.size(), seed), s,
                                                         tol, group_tol);
                j["verdict"] = {{"start", s}, {"excluded", v.excluded}, {"witness", v.witness}};
            }
        } else if (*collapse_cmd) {
            const auto g = load(src);
            Eigen::MatrixXd cells;
            if (!cells_text.empty()) {
                cells = parse_cells(cells_text, g.graph.size());
            } else if (g.extra.contains("collapse_cells")) {
                cells = matrix_from_json(g.extra["collapse_cells"]);
            } else {
                throw ValidationError("collapse needs --cells or a solve output carrying collapse_cells");
            }
            const auto c = collapse(g.graph, cells);
            j["cells"] = cells_json(c.cell_vectors);
            j["reduced"] = matrix_json(c.reduced);
            j["invariance_residual"] = c.invariance_residual;
            j["exact"] = c.exact();
        }
        out << j.dump(2) << '\n';
        return 0;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace ctqw::cli
