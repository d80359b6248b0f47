// Copyright 2026 The qdouble Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QDOUBLE_CELLULATION_HPP
#define QDOUBLE_CELLULATION_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qdouble/groups.hpp"

namespace qdouble {

/// A directed edge i -> f.
struct Arrow {
    int i = 0;
    int f = 0;
    friend bool operator==(const Arrow &, const Arrow &) = default;
};

/// One step of a plaquette boundary walk. orient = +1 walks i_e -> f_e.
struct WalkStep {
    int edge = 0;
    int orient = 1;
    friend bool operator==(const WalkStep &, const WalkStep &) = default;
};

/// Directed graph, optionally embedded in a closed orientable surface.
///
/// When `surface` is set every edge lies on exactly two boundary slots with
/// opposite orientation. dual[e] = (i, f) points from the plaquette whose walk
/// traverses e backwards to the plaquette that traverses it forwards, i.e. the
/// primal arrow rotated a quarter turn counterclockwise.
struct Cellulation {
    int num_vertices = 0;
    std::vector<Arrow> edges;
    std::vector<std::vector<WalkStep>> plaquettes;
    std::vector<Arrow> dual;
    int genus = 0;
    bool surface = true;

    int num_edges() const {
        return static_cast<int>(edges.size());
    }
    int num_plaquettes() const {
        return static_cast<int>(plaquettes.size());
    }
    int euler_characteristic() const {
        return num_vertices - num_edges() + num_plaquettes();
    }
    /// Edges touching v, each once, ascending.
    std::vector<int> incident_edges(int v) const {
        std::vector<int> out;
        for (int e = 0; e < num_edges(); e++) {
            if (edges[e].i == v || edges[e].f == v) {
                out.push_back(e);
            }
        }
        return out;
    }
    /// Distinct edges on the boundary of p, ascending.
    std::vector<int> boundary_edges(int p) const {
        std::vector<int> out;
        for (const WalkStep &s : plaquettes[p]) {
            out.push_back(s.edge);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

/// Every violated invariant, each naming its location. Empty means valid.
inline std::vector<std::string> cellulation_violations(const Cellulation &c) {
    std::vector<std::string> out;
    if (c.num_vertices < 1) {
        out.push_back("cellulation has no vertices");
        return out;
    }
    for (int e = 0; e < c.num_edges(); e++) {
        const Arrow &a = c.edges[e];
        if (a.i < 0 || a.i >= c.num_vertices || a.f < 0 || a.f >= c.num_vertices) {
            out.push_back("edge " + std::to_string(e) + " has an endpoint out of range");
        } else if (a.i == a.f) {
            out.push_back("edge " + std::to_string(e) + " is a self-loop");
        }
    }
    if (!out.empty() || !c.surface) {
        return out;
    }
    std::vector<int> forward(c.num_edges(), 0), backward(c.num_edges(), 0);
    std::vector<int> fwd_plaq(c.num_edges(), -1), bwd_plaq(c.num_edges(), -1);
    for (int p = 0; p < c.num_plaquettes(); p++) {
        const auto &walk = c.plaquettes[p];
        if (walk.empty()) {
            out.push_back("plaquette " + std::to_string(p) + " has an empty boundary");
            continue;
        }
        bool in_range = true;
        for (const WalkStep &s : walk) {
            if (s.edge < 0 || s.edge >= c.num_edges() || (s.orient != 1 && s.orient != -1)) {
                in_range = false;
            }
        }
        if (!in_range) {
            out.push_back("plaquette " + std::to_string(p) + " references an invalid edge or orientation");
            continue;
        }
        auto start = [&](const WalkStep &s) {
            return s.orient > 0 ? c.edges[s.edge].i : c.edges[s.edge].f;
        };
        auto end = [&](const WalkStep &s) {
            return s.orient > 0 ? c.edges[s.edge].f : c.edges[s.edge].i;
        };
        for (std::size_t k = 0; k < walk.size(); k++) {
            if (end(walk[k]) != start(walk[(k + 1) % walk.size()])) {
                out.push_back(
                    "plaquette " + std::to_string(p) + " boundary walk is not closed at step " + std::to_string(k));
                break;
            }
        }
        for (const WalkStep &s : walk) {
            if (s.orient > 0) {
                forward[s.edge]++;
                fwd_plaq[s.edge] = p;
            } else {
                backward[s.edge]++;
                bwd_plaq[s.edge] = p;
            }
        }
    }
    for (int e = 0; e < c.num_edges(); e++) {
        if (forward[e] != 1 || backward[e] != 1) {
            out.push_back(
                "edge " + std::to_string(e) + " must appear once in each direction across plaquette boundaries (seen " +
                std::to_string(forward[e]) + " forward, " + std::to_string(backward[e]) + " backward)");
        }
    }
    if (static_cast<int>(c.dual.size()) != c.num_edges()) {
        out.push_back("dual orientation table has the wrong length");
    } else {
        for (int e = 0; e < c.num_edges(); e++) {
            if (forward[e] == 1 && backward[e] == 1 && !(c.dual[e] == Arrow{bwd_plaq[e], fwd_plaq[e]})) {
                out.push_back("dual edge " + std::to_string(e) + " does not match its two plaquettes");
            }
        }
    }
    if (c.euler_characteristic() != 2 - 2 * c.genus) {
        out.push_back(
            "Euler characteristic " + std::to_string(c.euler_characteristic()) + " does not match genus " +
            std::to_string(c.genus));
    }
    return out;
}

inline void validate_cellulation(const Cellulation &c) {
    auto v = cellulation_violations(c);
    if (!v.empty()) {
        std::string msg;
        for (const auto &s : v) {
            msg += (msg.empty() ? "" : "; ") + s;
        }
        throw InvariantError(msg);
    }
}

/// Derives dual[] from the boundary walks.
inline void assign_dual_orientation(Cellulation &c) {
    c.dual.assign(c.num_edges(), Arrow{-1, -1});
    for (int p = 0; p < c.num_plaquettes(); p++) {
        for (const WalkStep &s : c.plaquettes[p]) {
            if (s.edge < 0 || s.edge >= c.num_edges()) {
                continue;
            }
            (s.orient > 0 ? c.dual[s.edge].f : c.dual[s.edge].i) = p;
        }
    }
}

/// A bare directed graph without plaquettes.
inline Cellulation directed_graph(int num_vertices, std::vector<Arrow> edges) {
    Cellulation c;
    c.num_vertices = num_vertices;
    c.edges = std::move(edges);
    c.surface = false;
    validate_cellulation(c);
    return c;
}

/// Two vertices joined by the single edge 0 -> 1.
inline Cellulation two_vertex_graph() {
    return directed_graph(2, {{0, 1}});
}

/// Three vertices, edges 0 -> 1, 1 -> 2, 0 -> 2. A graph with one cycle and no faces.
inline Cellulation triangle_graph() {
    return directed_graph(3, {{0, 1}, {1, 2}, {0, 2}});
}

/// Vertex (x, y) = y lx + x. Edge 2v runs +x from v, edge 2v+1 runs +y.
/// Plaquette (x, y) = y lx + x has its lower-left corner at vertex (x, y) and a
/// counterclockwise boundary.
inline Cellulation square_torus(int lx, int ly) {
    if (lx < 2 || ly < 2) {
        throw std::invalid_argument("square_torus needs lx >= 2 and ly >= 2");
    }
    Cellulation c;
    c.num_vertices = lx * ly;
    c.genus = 1;
    auto vid = [&](int x, int y) {
        return ((y + ly) % ly) * lx + (x + lx) % lx;
    };
    for (int y = 0; y < ly; y++) {
        for (int x = 0; x < lx; x++) {
            c.edges.push_back({vid(x, y), vid(x + 1, y)});
            c.edges.push_back({vid(x, y), vid(x, y + 1)});
        }
    }
    for (int y = 0; y < ly; y++) {
        for (int x = 0; x < lx; x++) {
            c.plaquettes.push_back({
                {2 * vid(x, y), 1},
                {2 * vid(x + 1, y) + 1, 1},
                {2 * vid(x, y + 1), -1},
                {2 * vid(x, y) + 1, -1},
            });
        }
    }
    assign_dual_orientation(c);
    validate_cellulation(c);
    return c;
}

/// Square lattice modulo (1, 1) and (n, 0): vertex (x, y) is (x - y) mod n.
/// Edge 2v runs +x from v to v+1, edge 2v+1 runs +y from v to v-1.
/// Plaquette v has its lower-left corner at v.
inline Cellulation sheared_torus(int n) {
    if (n < 2) {
        throw std::invalid_argument("sheared_torus needs n >= 2");
    }
    Cellulation c;
    c.num_vertices = n;
    c.genus = 1;
    auto m = [&](int v) {
        return ((v % n) + n) % n;
    };
    for (int v = 0; v < n; v++) {
        c.edges.push_back({v, m(v + 1)});
        c.edges.push_back({v, m(v - 1)});
    }
    for (int v = 0; v < n; v++) {
        c.plaquettes.push_back({
            {2 * v, 1},
            {2 * m(v + 1) + 1, 1},
            {2 * m(v - 1), -1},
            {2 * v + 1, -1},
        });
    }
    assign_dual_orientation(c);
    validate_cellulation(c);
    return c;
}

/// Hexagon with opposite sides identified: two vertices, three edges 0 -> 1,
/// one plaquette with boundary e0 e1^-1 e2 e0^-1 e1 e2^-1.
inline Cellulation hexagon_torus() {
    Cellulation c;
    c.num_vertices = 2;
    c.genus = 1;
    c.edges = {{0, 1}, {0, 1}, {0, 1}};
    c.plaquettes = {{{0, 1}, {1, -1}, {2, 1}, {0, -1}, {1, 1}, {2, -1}}};
    assign_dual_orientation(c);
    validate_cellulation(c);
    return c;
}

/// Sphere made of two n-gons glued along their boundary. Edge k runs
/// k -> k+1 for k < n-1, edge n-1 runs 0 -> n-1. Plaquette 0 follows the
/// cycle, plaquette 1 follows it backwards.
inline Cellulation polygon_sphere(int n) {
    if (n < 2) {
        throw std::invalid_argument("polygon_sphere needs n >= 2");
    }
    Cellulation c;
    c.num_vertices = n;
    c.genus = 0;
    for (int k = 0; k + 1 < n; k++) {
        c.edges.push_back({k, k + 1});
    }
    c.edges.push_back({0, n - 1});
    std::vector<WalkStep> up, down;
    for (int k = 0; k + 1 < n; k++) {
        up.push_back({k, 1});
    }
    up.push_back({n - 1, -1});
    down.push_back({n - 1, 1});
    for (int k = n - 2; k >= 0; k--) {
        down.push_back({k, -1});
    }
    c.plaquettes = {up, down};
    assign_dual_orientation(c);
    validate_cellulation(c);
    return c;
}

using json = nlohmann::json;

inline json cellulation_to_json(const Cellulation &c) {
    json edges = json::array(), plaq = json::array(), dual = json::array();
    for (const Arrow &a : c.edges) {
        edges.push_back({a.i, a.f});
    }
    for (const auto &walk : c.plaquettes) {
        json w = json::array();
        for (const WalkStep &s : walk) {
            w.push_back({s.edge, s.orient});
        }
        plaq.push_back(w);
    }
    for (const Arrow &a : c.dual) {
        dual.push_back({a.i, a.f});
    }
    return {
        {"vertices", c.num_vertices},
        {"edges", edges},
        {"plaquettes", plaq},
        {"dual_edges", dual},
        {"genus", c.genus},
        {"surface", c.surface},
    };
}

/// Result of parsing: a cellulation, or every violated invariant.
struct CellulationParse {
    Cellulation cell;
    std::vector<std::string> errors;
    bool ok() const {
        return errors.empty();
    }
};

inline CellulationParse cellulation_from_json(const json &doc) {
    CellulationParse r;
    try {
        Cellulation &c = r.cell;
        c.num_vertices = doc.at("vertices").get<int>();
        for (const json &e : doc.at("edges")) {
            c.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
        }
        c.surface = doc.value("surface", true);
        c.genus = doc.value("genus", 1);
        if (doc.contains("plaquettes")) {
            for (const json &walk : doc.at("plaquettes")) {
                std::vector<WalkStep> w;
                for (const json &s : walk) {
                    w.push_back({s.at(0).get<int>(), s.at(1).get<int>()});
                }
                c.plaquettes.push_back(std::move(w));
            }
        }
        if (doc.contains("dual_edges")) {
            for (const json &e : doc.at("dual_edges")) {
                c.dual.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
            }
        } else {
            assign_dual_orientation(c);
        }
        r.errors = cellulation_violations(c);
    } catch (const json::exception &e) {
        r.errors.push_back(std::string("malformed cellulation document: ") + e.what());
    }
    return r;
}

/// "square:LXxLY", "sheared:N", "sphere:N", "hexagon", "edge", "triangle" or a JSON path.
inline Cellulation parse_cell_spec(const std::string &spec) {
    if (spec == "hexagon") {
        return hexagon_torus();
    }
    if (spec == "edge") {
        return two_vertex_graph();
    }
    if (spec == "triangle") {
        return triangle_graph();
    }
    if (spec.rfind("sphere:", 0) == 0) {
        return polygon_sphere(std::stoi(spec.substr(7)));
    }
    if (spec.rfind("sheared:", 0) == 0) {
        return sheared_torus(std::stoi(spec.substr(8)));
    }
    if (spec.rfind("square:", 0) == 0) {
        std::string dims = spec.substr(7);
        auto x = dims.find('x');
        if (x == std::string::npos) {
            throw std::invalid_argument("square cell spec must look like square:LxL");
        }
        return square_torus(std::stoi(dims.substr(0, x)), std::stoi(dims.substr(x + 1)));
    }
    std::ifstream in(spec);
    if (!in) {
        throw std::invalid_argument("unknown cellulation spec '" + spec + "'");
    }
    auto r = cellulation_from_json(json::parse(in));
    if (!r.ok()) {
        std::string msg;
        for (const auto &s : r.errors) {
            msg += (msg.empty() ? "" : "; ") + s;
        }
        throw InvariantError(msg);
    }
    return r.cell;
}

/// Breadth-first tree. parent_edge[x] = -1 at the root; order lists nodes in
/// discovery order, so parents precede children.
struct SpanningTree {
    int root = 0;
    std::vector<int> parent;
    std::vector<int> parent_edge;
    std::vector<int> order;

    std::vector<int> tree_edges() const {
        std::vector<int> out;
        for (int x : order) {
            if (parent_edge[x] >= 0) {
                out.push_back(parent_edge[x]);
            }
        }
        return out;
    }
};

namespace detail {

inline SpanningTree bfs_tree(int num_nodes, const std::vector<Arrow> &arcs, const char *what) {
    SpanningTree t;
    t.parent.assign(num_nodes, -1);
    t.parent_edge.assign(num_nodes, -1);
    std::vector<bool> seen(num_nodes, false);
    seen[0] = true;
    t.order.push_back(0);
    for (std::size_t k = 0; k < t.order.size(); k++) {
        int x = t.order[k];
        for (int e = 0; e < static_cast<int>(arcs.size()); e++) {
            const Arrow &a = arcs[e];
            if (a.i == a.f || (a.i != x && a.f != x)) {
                continue;
            }
            int y = a.i == x ? a.f : a.i;
            if (!seen[y]) {
                seen[y] = true;
                t.parent[y] = x;
                t.parent_edge[y] = e;
                t.order.push_back(y);
            }
        }
    }
    if (static_cast<int>(t.order.size()) != num_nodes) {
        throw std::invalid_argument(std::string(what) + " is disconnected");
    }
    return t;
}

}  // namespace detail

inline SpanningTree spanning_tree(const Cellulation &c) {
    return detail::bfs_tree(c.num_vertices, c.edges, "cellulation");
}

inline SpanningTree dual_spanning_tree(const Cellulation &c) {
    if (c.num_plaquettes() == 0) {
        throw std::invalid_argument("graph has no plaquettes");
    }
    return detail::bfs_tree(c.num_plaquettes(), c.dual, "dual cellulation");
}

/// Signed edge weights along the tree path from x to the root: +1 when the
/// path traverses an arc forwards.
inline std::vector<int> tree_path_weights(const SpanningTree &t, const std::vector<Arrow> &arcs, int x) {
    std::vector<int> w(arcs.size(), 0);
    while (t.parent_edge[x] >= 0) {
        int e = t.parent_edge[x];
        w[e] += arcs[e].i == x ? 1 : -1;
        x = t.parent[x];
    }
    return w;
}

}  // namespace qdouble

#endif
