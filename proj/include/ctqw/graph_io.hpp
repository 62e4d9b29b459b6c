// graph_io.hpp
// JSON graph files:  {"n": int, "edges": [[j,k,w],...], "cells": [[...],...]}
// "cells" is optional. Every unordered pair may be listed at most once.

#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ctqw/graph.hpp"

namespace ctqw {

struct GraphFile {
    WeightedGraph graph;
    std::optional<Cells> cells;
};

inline GraphFile graph_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("graph JSON must be an object");
    if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<long long>() <= 0) {
        throw std::invalid_argument("graph JSON needs a positive integer \"n\"");
    }
    const auto n = j["n"].get<std::size_t>();
    std::vector<Edge> edges;
    if (j.contains("edges")) {
        if (!j["edges"].is_array()) throw std::invalid_argument("\"edges\" must be an array");
        for (const auto& e : j["edges"]) {
            if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() ||
                !e[1].is_number_integer() || !e[2].is_number()) {
                throw std::invalid_argument("each edge must be [j, k, w] with integer j, k");
            }
            if (e[0].get<long long>() < 0 || e[1].get<long long>() < 0) {
                throw std::invalid_argument("edge endpoints must be non-negative");
            }
            edges.push_back({e[0].get<Vertex>(), e[1].get<Vertex>(), e[2].get<double>()});
        }
    }
    GraphFile out{WeightedGraph(n, edges), std::nullopt};
    if (j.contains("cells") && !j["cells"].is_null()) {
        Cells cells;
        for (const auto& c : j["cells"]) {
            std::vector<Vertex> cell;
            for (const auto& v : c) {
                if (!v.is_number_integer() || v.get<long long>() < 0) {
                    throw std::invalid_argument("cell entries must be vertex indices");
                }
                cell.push_back(v.get<Vertex>());
            }
            cells.push_back(std::move(cell));
        }
        validate_cells(cells, n);
        out.cells = std::move(cells);
    }
    return out;
}

inline nlohmann::json graph_to_json(const WeightedGraph& g, const std::optional<Cells>& cells = {}) {
    nlohmann::json j;
    j["n"] = g.size();
    j["edges"] = nlohmann::json::array();
    for (const auto& e : g.edges()) j["edges"].push_back({e.u, e.v, e.weight});
    if (cells) j["cells"] = *cells;
    return j;
}

inline GraphFile load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open graph file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("malformed graph file '" + path + "': " + e.what());
    }
    return graph_from_json(j);
}

}  // namespace ctqw
