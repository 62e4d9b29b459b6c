// graph.hpp
// Simple undirected edge-weighted graphs and the named families used by the
// walk engine and the inverse solvers.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ctqw {

using Vertex = std::size_t;

struct Edge {
    Vertex u = 0;
    Vertex v = 0;
    double weight = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// Immutable value type. Absent pairs have weight 0. An edge may be stored with
// weight 0 when it is part of a family's edge set but switched off; it then
// contributes nothing to the adjacency matrix.
class WeightedGraph {
public:
    explicit WeightedGraph(std::size_t n) : n_(n) {
        if (n == 0) throw std::invalid_argument("graph must have at least one vertex");
    }

    WeightedGraph(std::size_t n, std::span<const Edge> edges) : WeightedGraph(n) {
        for (const auto& e : edges) {
            check_pair(e.u, e.v);
            check_weight(e.weight);
            auto [it, inserted] = weights_.emplace(key(e.u, e.v), e.weight);
            if (!inserted) {
                throw std::invalid_argument("edge (" + std::to_string(e.u) + "," +
                                            std::to_string(e.v) + ") listed twice");
            }
        }
    }

    WeightedGraph(std::size_t n, std::initializer_list<Edge> edges)
        : WeightedGraph(n, std::span<const Edge>(edges.begin(), edges.size())) {}

    std::size_t size() const { return n_; }

    double weight(Vertex j, Vertex k) const {
        check_vertex(j);
        check_vertex(k);
        if (j == k) return 0.0;
        auto it = weights_.find(key(j, k));
        return it == weights_.end() ? 0.0 : it->second;
    }

    bool has_edge(Vertex j, Vertex k) const {
        if (j == k || j >= n_ || k >= n_) return false;
        return weights_.contains(key(j, k));
    }

    std::size_t edge_count() const { return weights_.size(); }

    // Edges with u < v, in lexicographic order.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(weights_.size());
        for (const auto& [uv, w] : weights_) out.push_back({uv.first, uv.second, w});
        return out;
    }

    // Returns a copy with weight(j,k) = weight(k,j) = w. w == 0 removes the edge.
    [[nodiscard]] WeightedGraph set_weight(Vertex j, Vertex k, double w) const {
        check_pair(j, k);
        check_weight(w);
        WeightedGraph out = *this;
        if (w == 0.0) {
            out.weights_.erase(key(j, k));
        } else {
            out.weights_[key(j, k)] = w;
        }
        return out;
    }

    // Dense A_G. Each stored weight is written to both triangles, so the
    // result is exactly symmetric.
    Eigen::MatrixXd adjacency_matrix() const {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_),
                                                  static_cast<Eigen::Index>(n_));
        for (const auto& [uv, w] : weights_) {
            const auto j = static_cast<Eigen::Index>(uv.first);
            const auto k = static_cast<Eigen::Index>(uv.second);
            a(j, k) = w;
            a(k, j) = w;
        }
        return a;
    }

    // Connectivity through strictly positive weights.
    bool is_connected() const {
        std::vector<std::vector<Vertex>> adj(n_);
        for (const auto& [uv, w] : weights_) {
            if (w > 0.0) {
                adj[uv.first].push_back(uv.second);
                adj[uv.second].push_back(uv.first);
            }
        }
        std::vector<bool> seen(n_, false);
        std::queue<Vertex> frontier;
        frontier.push(0);
        seen[0] = true;
        std::size_t count = 1;
        while (!frontier.empty()) {
            const Vertex v = frontier.front();
            frontier.pop();
            for (Vertex u : adj[v]) {
                if (!seen[u]) {
                    seen[u] = true;
                    ++count;
                    frontier.push(u);
                }
            }
        }
        return count == n_;
    }

    friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

private:
    static std::pair<Vertex, Vertex> key(Vertex j, Vertex k) {
        return j < k ? std::pair{j, k} : std::pair{k, j};
    }

    void check_vertex(Vertex v) const {
        if (v >= n_) {
            throw std::out_of_range("vertex " + std::to_string(v) + " out of range [0," +
                                    std::to_string(n_) + ")");
        }
    }

    void check_pair(Vertex j, Vertex k) const {
        check_vertex(j);
        check_vertex(k);
        if (j == k) throw std::invalid_argument("self-loop at vertex " + std::to_string(j));
    }

    static void check_weight(double w) {
        if (!std::isfinite(w) || w < 0.0) {
            throw std::invalid_argument("edge weight must be finite and non-negative");
        }
    }

    std::size_t n_;
    std::map<std::pair<Vertex, Vertex>, double> weights_;
};

using Cells = std::vector<std::vector<Vertex>>;

// Throws unless cells are pairwise disjoint and cover 0..n-1.
inline void validate_cells(const Cells& cells, std::size_t n) {
    std::vector<int> owner(n, -1);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].empty()) throw std::invalid_argument("empty cell");
        for (Vertex v : cells[c]) {
            if (v >= n) throw std::invalid_argument("cell vertex out of range");
            if (owner[v] != -1) {
                throw std::invalid_argument("vertex " + std::to_string(v) +
                                            " appears in more than one cell");
            }
            owner[v] = static_cast<int>(c);
        }
    }
    if (std::find(owner.begin(), owner.end(), -1) != owner.end()) {
        throw std::invalid_argument("cells do not cover every vertex");
    }
}

struct PartitionedGraph {
    PartitionedGraph(WeightedGraph g, Cells c) : graph(std::move(g)), cells(std::move(c)) {
        validate_cells(cells, graph.size());
    }

    // Index of the cell holding v.
    std::size_t cell_of(Vertex v) const {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (std::find(cells[c].begin(), cells[c].end(), v) != cells[c].end()) return c;
        }
        throw std::out_of_range("vertex not in any cell");
    }

    WeightedGraph graph;
    Cells cells;
};

// ---------------------------------------------------------------------------
// Named families. All members are unweighted (every edge has weight 1).

inline WeightedGraph path_graph(std::size_t n) {
    std::vector<Edge> edges;
    for (Vertex j = 0; j + 1 < n; ++j) edges.push_back({j, j + 1, 1.0});
    return {n, edges};
}

inline WeightedGraph cycle_graph(std::size_t n) {
    if (n < 3) throw std::invalid_argument("cycle needs at least 3 vertices");
    std::vector<Edge> edges;
    for (Vertex j = 0; j < n; ++j) edges.push_back({j, (j + 1) % n, 1.0});
    return {n, edges};
}

inline WeightedGraph complete_graph(std::size_t n) {
    std::vector<Edge> edges;
    for (Vertex j = 0; j < n; ++j)
        for (Vertex k = j + 1; k < n; ++k) edges.push_back({j, k, 1.0});
    return {n, edges};
}

// K_{1,n}: center 0, leaves 1..n.
inline WeightedGraph claw_graph(std::size_t leaves) {
    if (leaves == 0) throw std::invalid_argument("claw needs at least one leaf");
    std::vector<Edge> edges;
    for (Vertex k = 1; k <= leaves; ++k) edges.push_back({0, k, 1.0});
    return {leaves + 1, edges};
}

// Cells are laid out consecutively in the order given.
inline PartitionedGraph complete_multipartite(std::span<const std::size_t> parts) {
    if (parts.empty()) throw std::invalid_argument("multipartite graph needs at least one part");
    Cells cells;
    std::size_t next = 0;
    for (std::size_t size : parts) {
        if (size == 0) throw std::invalid_argument("part sizes must be at least 1");
        std::vector<Vertex> cell(size);
        std::iota(cell.begin(), cell.end(), next);
        next += size;
        cells.push_back(std::move(cell));
    }
    std::vector<Edge> edges;
    for (std::size_t a = 0; a < cells.size(); ++a)
        for (std::size_t b = a + 1; b < cells.size(); ++b)
            for (Vertex j : cells[a])
                for (Vertex k : cells[b]) edges.push_back({std::min(j, k), std::max(j, k), 1.0});
    return {WeightedGraph(next, edges), std::move(cells)};
}

inline PartitionedGraph complete_multipartite(std::initializer_list<std::size_t> parts) {
    return complete_multipartite(std::span<const std::size_t>(parts.begin(), parts.size()));
}

// Q_d on 2^d vertices; j ~ k iff their labels differ in exactly one bit.
inline WeightedGraph hypercube(std::size_t dim) {
    if (dim > 20) throw std::invalid_argument("hypercube dimension too large");
    const std::size_t n = std::size_t{1} << dim;
    std::vector<Edge> edges;
    for (Vertex j = 0; j < n; ++j)
        for (std::size_t b = 0; b < dim; ++b) {
            const Vertex k = j ^ (std::size_t{1} << b);
            if (j < k) edges.push_back({j, k, 1.0});
        }
    return {n, edges};
}

// j ~ k iff (k - j) mod n lies in the connection set.
inline WeightedGraph circulant(std::size_t n, std::span<const long> connections) {
    if (n == 0) throw std::invalid_argument("circulant needs at least one vertex");
    const auto nn = static_cast<long>(n);
    std::set<long> shifts;
    for (long s : connections) {
        const long r = ((s % nn) + nn) % nn;
        if (r == 0) throw std::invalid_argument("circulant connection set may not contain 0 (mod n)");
        shifts.insert(r);
    }
    for (long r : shifts) {
        if (!shifts.contains((nn - r) % nn)) {
            throw std::invalid_argument("circulant connection set must be closed under negation: " +
                                        std::to_string(r) + " present, " +
                                        std::to_string((nn - r) % nn) + " missing");
        }
    }
    std::set<std::pair<Vertex, Vertex>> pairs;
    for (Vertex j = 0; j < n; ++j)
        for (long r : shifts) {
            const Vertex k = (j + static_cast<Vertex>(r)) % n;
            pairs.insert({std::min(j, k), std::max(j, k)});
        }
    std::vector<Edge> edges;
    for (auto [j, k] : pairs) edges.push_back({j, k, 1.0});
    return {n, edges};
}

enum class Family { path, cycle, complete, claw, complete_multipartite, hypercube, circulant };

struct FamilySpec {
    Family family = Family::path;
    std::size_t n = 0;               // vertices; leaves for claw; dimension for hypercube
    std::vector<std::size_t> parts;  // complete-multipartite
    std::vector<long> connections;   // circulant
};

inline Family parse_family(const std::string& name) {
    if (name == "path") return Family::path;
    if (name == "cycle") return Family::cycle;
    if (name == "complete") return Family::complete;
    if (name == "claw" || name == "star") return Family::claw;
    if (name == "complete-multipartite" || name == "multipartite" || name == "bipartite")
        return Family::complete_multipartite;
    if (name == "hypercube") return Family::hypercube;
    if (name == "circulant") return Family::circulant;
    throw std::invalid_argument("unknown graph family '" + name + "'");
}

inline PartitionedGraph build_partitioned(const FamilySpec& spec) {
    if (spec.family != Family::complete_multipartite) {
        throw std::invalid_argument("only complete-multipartite graphs carry a partition");
    }
    return complete_multipartite(spec.parts);
}

inline WeightedGraph build_family(const FamilySpec& spec) {
    auto need_n = [&](std::size_t min) {
        if (spec.n < min) {
            throw std::invalid_argument("family parameter n must be at least " + std::to_string(min));
        }
    };
    switch (spec.family) {
        case Family::path: need_n(1); return path_graph(spec.n);
        case Family::cycle: need_n(3); return cycle_graph(spec.n);
        case Family::complete: need_n(1); return complete_graph(spec.n);
        case Family::claw: need_n(1); return claw_graph(spec.n);
        case Family::complete_multipartite: return complete_multipartite(spec.parts).graph;
        case Family::hypercube: return hypercube(spec.n);
        case Family::circulant: need_n(1); return circulant(spec.n, spec.connections);
    }
    throw std::invalid_argument("unhandled family");
}

// G (+) H on |G|*|H| vertices; (g, h) has index g*|H| + h.
inline WeightedGraph cartesian_product(const WeightedGraph& g, const WeightedGraph& h) {
    const std::size_t ng = g.size();
    const std::size_t nh = h.size();
    std::vector<Edge> edges;
    edges.reserve(ng * h.edge_count() + nh * g.edge_count());
    for (Vertex i = 0; i < ng; ++i)
        for (const auto& e : h.edges()) edges.push_back({i * nh + e.u, i * nh + e.v, e.weight});
    for (Vertex j = 0; j < nh; ++j)
        for (const auto& e : g.edges()) edges.push_back({e.u * nh + j, e.v * nh + j, e.weight});
    return {ng * nh, edges};
}

}  // namespace ctqw
