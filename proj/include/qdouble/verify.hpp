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

#ifndef QDOUBLE_VERIFY_HPP
#define QDOUBLE_VERIFY_HPP

#include <Eigen/Eigenvalues>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "qdouble/catalog.hpp"
#include "qdouble/cellulation.hpp"
#include "qdouble/gates.hpp"
#include "qdouble/irreps.hpp"
#include "qdouble/kwmaps.hpp"
#include "qdouble/register.hpp"

namespace qdouble {

struct BudgetExceeded : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct VerifyLimits {
    std::size_t oracle_terms = 1000000;
    std::size_t dense_dim = 4096;
    // Above this (input dimension x largest register) identity maps are
    // compared on seeded random inputs instead of the full input basis.
    std::size_t identity_work = std::size_t(1) << 22;
    int random_inputs = 1;
    std::uint64_t seed = 7;
    // Largest register, in amplitudes, built by the nil-2 identities.
    std::size_t register_budget = std::size_t(1) << 24;
};

namespace detail {

inline std::size_t capped_power(std::size_t base, int exp, std::size_t cap) {
    std::size_t r = 1;
    for (int k = 0; k < exp; k++) {
        if (r > cap / std::max<std::size_t>(base, 1)) {
            return cap + 1;
        }
        r *= base;
    }
    return r;
}

inline std::vector<int> walk_edges_sorted(const std::vector<WalkStep> &walk) {
    std::vector<int> out;
    for (const WalkStep &s : walk) {
        out.push_back(s.edge);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace detail

/// |D(G)> by enumerating every vertex assignment and writing the domain walls
/// g_i^-1 g_f on the edges. Edge sites are labelled e0..e{E-1}. Touches no gate.
inline QuditRegister oracle_double_state(
    const GroupRef &G, const Cellulation &cell, std::size_t budget = 1000000) {
    int n = G->order();
    std::size_t terms = detail::capped_power(n, cell.num_vertices, budget);
    if (terms > budget) {
        throw BudgetExceeded(
            "oracle needs " + std::to_string(n) + "^" + std::to_string(cell.num_vertices) + " terms, budget " +
            std::to_string(budget));
    }
    QuditRegister out;
    for (int e = 0; e < cell.num_edges(); e++) {
        out.add_site({"e" + std::to_string(e), Role::edge, G});
    }
    out.amplitudes().setZero();
    std::vector<int> g(cell.num_vertices, 0);
    for (std::size_t t = 0; t < terms; t++) {
        std::size_t idx = 0;
        for (const Arrow &a : cell.edges) {
            idx = idx * n + G->mul(G->inv(g[a.i]), g[a.f]);
        }
        out.amplitudes()(static_cast<Eigen::Index>(idx)) += 1.0;
        for (int v = cell.num_vertices - 1; v >= 0; v--) {
            if (++g[v] < n) {
                break;
            }
            g[v] = 0;
        }
    }
    out.normalize();
    return out;
}

/// weight * sum of terms, each acting on the listed cellulation edges.
struct EdgeOperator {
    std::vector<int> edges;
    std::vector<LocalOperator> terms;
    double weight = 1.0;

    QuditRegister applied(const QuditRegister &r, const std::vector<int> &edge_ids) const {
        std::vector<int> targets;
        for (int e : edges) {
            targets.push_back(edge_ids.at(e));
        }
        QuditRegister acc = r;
        acc.amplitudes().setZero();
        for (const LocalOperator &op : terms) {
            QuditRegister c = r;
            c.apply(op, targets);
            acc.amplitudes() += c.amplitudes();
        }
        acc.amplitudes() *= weight;
        return acc;
    }

    cplx expectation(const QuditRegister &r, const std::vector<int> &edge_ids) const {
        return r.amplitudes().dot(applied(r, edge_ids).amplitudes()) / r.amplitudes().squaredNorm();
    }
};

/// A^g_v: R^g on edges ending at v, L^g on edges leaving v.
inline LocalOperator vertex_term(const FiniteGroup &G, const Cellulation &cell, int v, int g) {
    std::vector<int> edges = cell.incident_edges(v);
    if (edges.empty()) {
        throw std::invalid_argument("vertex " + std::to_string(v) + " has no edges");
    }
    std::optional<LocalOperator> op;
    for (int e : edges) {
        LocalOperator f = cell.edges[e].f == v ? right_mult(G, g) : left_mult(G, g);
        op = op ? tensor(*op, f) : f;
    }
    return *op;
}

inline EdgeOperator vertex_stabilizer(const FiniteGroup &G, const Cellulation &cell, int v) {
    EdgeOperator a;
    a.edges = cell.incident_edges(v);
    for (int g = 0; g < G.order(); g++) {
        a.terms.push_back(vertex_term(G, cell, v, g));
    }
    a.weight = 1.0 / G.order();
    return a;
}

/// Ordered product of g_e^{O_e} along the walk.
inline int walk_holonomy(const FiniteGroup &G, const std::vector<WalkStep> &walk, const std::vector<int> &edge_value) {
    int h = 0;
    for (const WalkStep &s : walk) {
        int x = edge_value[s.edge];
        h = G.mul(h, s.orient > 0 ? x : G.inv(x));
    }
    return h;
}

/// Projector onto walk holonomy == h; h = identity gives B_p.
inline EdgeOperator walk_projector(const FiniteGroup &G, const std::vector<WalkStep> &walk, int num_edges, int h = 0) {
    EdgeOperator b;
    b.edges = detail::walk_edges_sorted(walk);
    int k = static_cast<int>(b.edges.size());
    int n = G.order();
    int total = static_cast<int>(detail::capped_power(n, k, std::size_t(1) << 30));
    std::vector<cplx> diag(total);
    std::vector<int> value(num_edges, 0);
    for (int x = 0; x < total; x++) {
        int rem = x;
        for (int t = k - 1; t >= 0; t--) {
            value[b.edges[t]] = rem % n;
            rem /= n;
        }
        diag[x] = walk_holonomy(G, walk, value) == h ? 1.0 : 0.0;
    }
    b.terms.push_back(LocalOperator::diagonal(std::vector<int>(k, n), diag, false));
    return b;
}

inline EdgeOperator plaquette_stabilizer(const FiniteGroup &G, const Cellulation &cell, int p) {
    return walk_projector(G, cell.plaquettes.at(p), cell.num_edges());
}

/// (1/|G|) sum_g chi(g)^* A^g_v for a one-dimensional character chi of G.
inline EdgeOperator charge_projector(
    const FiniteGroup &G, const Cellulation &cell, int v, const std::vector<cplx> &chi) {
    EdgeOperator a = vertex_stabilizer(G, cell, v);
    for (int g = 0; g < G.order(); g++) {
        for (cplx &ph : a.terms[g].phase) {
            ph *= std::conj(chi[g]);
        }
        a.terms[g].unitary = false;
    }
    return a;
}

struct LoopValue {
    int irrep = 0;
    int dim = 1;
    int plaquette = 0;
    cplx value;
};

struct StabilizerReport {
    std::vector<double> vertex;
    std::vector<double> plaquette;
    std::vector<LoopValue> loops;
    double max_imag = 0.0;
    std::optional<double> fidelity;
    std::optional<int> gsd;

    double min_expectation() const {
        double m = 1.0;
        for (double x : vertex) {
            m = std::min(m, x);
        }
        for (double x : plaquette) {
            m = std::min(m, x);
        }
        return m;
    }

    /// Largest |<W^mu_p> - d^mu|.
    double loop_deviation() const {
        double d = 0.0;
        for (const LoopValue &l : loops) {
            d = std::max(d, std::abs(l.value - cplx(l.dim)));
        }
        return d;
    }

    nlohmann::json to_json() const {
        nlohmann::json ls = nlohmann::json::array();
        for (const LoopValue &l : loops) {
            ls.push_back({{"irrep", l.irrep}, {"dim", l.dim}, {"plaquette", l.plaquette},
                          {"re", l.value.real()}, {"im", l.value.imag()}});
        }
        nlohmann::json j = {
            {"vertex", vertex},
            {"plaquette", plaquette},
            {"loops", ls},
            {"min_expectation", min_expectation()},
            {"max_imag", max_imag},
        };
        if (fidelity) {
            j["fidelity_vs_oracle"] = *fidelity;
        }
        if (gsd) {
            j["gsd"] = *gsd;
        }
        return j;
    }
};

/// <A_v>, <B_p> and, when an irrep table is available, plaquette Wilson loops.
inline StabilizerReport stabilizer_report(
    const QuditRegister &state, const std::vector<int> &edge_ids, const FiniteGroup &G, const Cellulation &cell,
    bool loops = true) {
    QuditRegister r = state;
    r.normalize();
    StabilizerReport rep;
    auto record = [&](cplx z) {
        rep.max_imag = std::max(rep.max_imag, std::abs(z.imag()));
        return z.real();
    };
    for (int v = 0; v < cell.num_vertices; v++) {
        rep.vertex.push_back(record(vertex_stabilizer(G, cell, v).expectation(r, edge_ids)));
    }
    for (int p = 0; p < cell.num_plaquettes(); p++) {
        rep.plaquette.push_back(record(plaquette_stabilizer(G, cell, p).expectation(r, edge_ids)));
    }
    if (loops && cell.num_plaquettes() > 0) {
        IrrepTable t;
        try {
            t = irrep_table(G);
        } catch (const std::domain_error &) {
            t = one_dimensional_irreps(G);
        }
        for (std::size_t mu = 0; mu < t.irreps.size(); mu++) {
            for (int p = 0; p < cell.num_plaquettes(); p++) {
                LoopOperator w = loop_z(t.irreps[mu], cell.plaquettes[p], cell);
                std::vector<int> targets;
                for (int e : w.edges) {
                    targets.push_back(edge_ids.at(e));
                }
                rep.loops.push_back({static_cast<int>(mu), t.irreps[mu].dim, p, expectation(r, w.op, targets)});
            }
        }
    }
    return rep;
}

/// Dense matrix of ops.back() ... ops.front() on the full edge space.
inline Matrix dense_edge_operator(
    const std::vector<EdgeOperator> &ops, const FiniteGroup &G, const Cellulation &cell, std::size_t budget = 4096) {
    std::size_t dim = detail::capped_power(G.order(), cell.num_edges(), budget);
    if (dim > budget) {
        throw BudgetExceeded("edge space exceeds the dense budget " + std::to_string(budget));
    }
    GroupRef g = share(G);
    QuditRegister tmpl;
    std::vector<int> ids;
    for (int e = 0; e < cell.num_edges(); e++) {
        ids.push_back(tmpl.add_site({"e" + std::to_string(e), Role::edge, g}));
    }
    int n = static_cast<int>(dim);
    Matrix m(n, n);
    for (int col = 0; col < n; col++) {
        QuditRegister r = tmpl;
        r.amplitudes().setZero();
        r.amplitudes()(col) = 1.0;
        for (const EdgeOperator &op : ops) {
            r = op.applied(r, ids);
        }
        m.col(col) = r.amplitudes();
    }
    return m;
}

/// Dense prod_v A_v prod_p B_p on the full edge space.
inline Matrix ground_space_projector(const FiniteGroup &G, const Cellulation &cell, std::size_t budget = 4096) {
    std::vector<EdgeOperator> ops;
    for (int p = 0; p < cell.num_plaquettes(); p++) {
        ops.push_back(plaquette_stabilizer(G, cell, p));
    }
    for (int v = 0; v < cell.num_vertices; v++) {
        ops.push_back(vertex_stabilizer(G, cell, v));
    }
    return dense_edge_operator(ops, G, cell, budget);
}

/// Number of eigenvalues >= 1 - 1e-8 of the ground-space projector.
inline int ground_state_degeneracy(const FiniteGroup &G, const Cellulation &cell, std::size_t budget = 4096) {
    Matrix p = ground_space_projector(G, cell, budget);
    Matrix h = (p + p.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    int count = 0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); k++) {
        if (es.eigenvalues()(k) >= 1.0 - 1e-8) {
            count++;
        }
    }
    return count;
}

/// Commuting pairs (a, b) modulo simultaneous conjugation.
inline int commuting_pair_orbit_count(const FiniteGroup &G) {
    int n = G.order();
    std::vector<bool> seen(static_cast<std::size_t>(n) * n, false);
    int orbits = 0;
    for (int a = 0; a < n; a++) {
        for (int b = 0; b < n; b++) {
            if (G.mul(a, b) != G.mul(b, a) || seen[a * n + b]) {
                continue;
            }
            orbits++;
            for (int h = 0; h < n; h++) {
                seen[G.conj(h, a) * n + G.conj(h, b)] = true;
            }
        }
    }
    return orbits;
}

/// Closed walks: every plaquette boundary plus one cycle per non-tree edge.
inline std::vector<std::vector<WalkStep>> closed_walks(const Cellulation &cell) {
    std::vector<std::vector<WalkStep>> out = cell.plaquettes;
    SpanningTree t = spanning_tree(cell);
    std::vector<bool> in_tree(cell.num_edges(), false);
    for (int e : t.tree_edges()) {
        in_tree[e] = true;
    }
    // path from x up to the root, as steps walked from x
    auto up = [&](int x) {
        std::vector<WalkStep> path;
        while (t.parent_edge[x] >= 0) {
            int e = t.parent_edge[x];
            path.push_back({e, cell.edges[e].i == x ? +1 : -1});
            x = t.parent[x];
        }
        return path;
    };
    for (int e = 0; e < cell.num_edges(); e++) {
        if (in_tree[e]) {
            continue;
        }
        // e, then f_e up to the root, then down from the root to i_e
        std::vector<WalkStep> loop{{e, +1}};
        for (const WalkStep &s : up(cell.edges[e].f)) {
            loop.push_back(s);
        }
        std::vector<WalkStep> back = up(cell.edges[e].i);
        for (auto it = back.rbegin(); it != back.rend(); ++it) {
            loop.push_back({it->edge, -it->orient});
        }
        out.push_back(loop);
    }
    return out;
}

/// Abelian anyon content of a nil-2 pre-correction state against the recorded
/// outcomes: vertex v with label a carries the G-character chi^a o pi, and
/// plaquette p with label n has holonomy n^-1. Returns the largest
/// 1 - <projector>.
inline double nil2_syndrome_mismatch(
    const QuditRegister &pre, const std::vector<int> &edge_ids, const FactorSystem &fs, const Cellulation &cell,
    const std::vector<std::pair<std::string, int>> &outcomes) {
    const FiniteGroup &G = *fs.parent;
    const FiniteGroup &Q = fs.quotient;
    const FiniteGroup &N = fs.normal;
    QuditRegister r = pre;
    r.normalize();
    double worst = 0.0;
    for (const auto &[label, a] : outcomes) {
        int k = std::stoi(label.substr(1));
        double x = 0.0;
        if (label[0] == 'v') {
            std::vector<cplx> chi(G.order());
            for (int g = 0; g < G.order(); g++) {
                chi[g] = Q.abelian().character(a, fs.proj[g]);
            }
            x = charge_projector(G, cell, k, chi).expectation(r, edge_ids).real();
        } else {
            int h = fs.embed[N.inv(a)];
            x = walk_projector(G, cell.plaquettes.at(k), cell.num_edges(), h).expectation(r, edge_ids).real();
        }
        worst = std::max(worst, 1.0 - x);
    }
    return worst;
}

/// One row of the identity table.
struct IdentityCheck {
    std::string id;
    std::string group;
    std::string graph;
    double deviation = 0.0;
    int cases = 0;
    bool applicable = true;
    bool dense = true;
    std::string note;

    bool passed(double tol = 1e-10) const {
        return !applicable || deviation <= tol;
    }

    nlohmann::json to_json() const {
        nlohmann::json j = {
            {"identity", id}, {"group", group}, {"graph", graph}, {"applicable", applicable},
            {"cases", cases}, {"inputs", dense ? "basis" : "random"},
        };
        if (applicable) {
            j["deviation"] = deviation;
        }
        if (!note.empty()) {
            j["note"] = note;
        }
        return j;
    }
};

inline const std::vector<std::string> &identity_ids() {
    static const std::vector<std::string> ids = {
        "two_step_gauging",
        "symmetry_kernel",
        "dual_loop",
        "residual_symmetry",
        "dressed_loop_kernel",
        "vertex_term",
        "cl_left",
        "cr_left",
        "cl_right",
        "cr_right",
        "cl_character",
        "cr_character",
        "ung_left",
        "ung_character",
        "nil2_expressions",
        "ddw_push_through",
        "entangler_definition",
        "edge_simplification",
        "irrep_sum_rule",
    };
    return ids;
}

namespace detail {

/// Largest |a - b| entry, computed without densifying monomial pairs.
inline double operator_deviation(const LocalOperator &a, const LocalOperator &b) {
    if (a.dims != b.dims) {
        return std::numeric_limits<double>::infinity();
    }
    if (a.monomial && b.monomial) {
        double d = 0.0;
        for (std::size_t k = 0; k < a.perm.size(); k++) {
            if (a.perm[k] == b.perm[k]) {
                d = std::max(d, std::abs(a.phase[k] - b.phase[k]));
            } else {
                d = std::max({d, std::abs(a.phase[k]), std::abs(b.phase[k])});
            }
        }
        return d;
    }
    return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

struct MapInputs {
    QuditRegister tmpl;
    std::vector<Vector> columns;
    bool dense = true;
};

inline MapInputs map_inputs(QuditRegister tmpl, std::size_t work_per_column, const VerifyLimits &lim) {
    MapInputs in;
    std::size_t dim = static_cast<std::size_t>(tmpl.amplitudes().size());
    if (dim * work_per_column <= lim.identity_work) {
        for (std::size_t k = 0; k < dim; k++) {
            Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
            v(static_cast<Eigen::Index>(k)) = 1.0;
            in.columns.push_back(std::move(v));
        }
    } else {
        in.dense = false;
        std::mt19937_64 rng(lim.seed);
        std::normal_distribution<double> gauss;
        for (int k = 0; k < lim.random_inputs; k++) {
            Vector v(static_cast<Eigen::Index>(dim));
            for (Eigen::Index a = 0; a < v.size(); a++) {
                v(a) = cplx(gauss(rng), gauss(rng));
            }
            in.columns.push_back(v.normalized());
        }
    }
    in.tmpl = std::move(tmpl);
    return in;
}

/// Each call returns (lhs, rhs) output pairs, one per case, for one input.
using CaseFn = std::function<std::vector<std::pair<QuditRegister, QuditRegister>>(const QuditRegister &)>;

/// Max over cases of max|A - lambda B| / max|A|, with lambda = 1 or the
/// least-squares scale. Column outputs are matched by site labels.
inline double compare_cases(const MapInputs &in, const CaseFn &fn, bool fit_scale, int *cases) {
    std::vector<std::vector<Vector>> lhs, rhs;
    for (const Vector &col : in.columns) {
        QuditRegister x = in.tmpl;
        x.amplitudes() = col;
        auto pairs = fn(x);
        if (lhs.empty()) {
            lhs.resize(pairs.size());
            rhs.resize(pairs.size());
        }
        for (std::size_t c = 0; c < pairs.size(); c++) {
            QuditRegister b = pairs[c].second.aligned_to(pairs[c].first);
            lhs[c].push_back(pairs[c].first.amplitudes());
            rhs[c].push_back(b.amplitudes());
        }
    }
    if (cases) {
        *cases = static_cast<int>(lhs.size());
    }
    double worst = 0.0;
    for (std::size_t c = 0; c < lhs.size(); c++) {
        cplx lambda = 1.0;
        if (fit_scale) {
            cplx ba = 0.0;
            double bb = 0.0;
            for (std::size_t k = 0; k < lhs[c].size(); k++) {
                ba += rhs[c][k].dot(lhs[c][k]);
                bb += rhs[c][k].squaredNorm();
            }
            lambda = bb > 0 ? ba / bb : cplx(0.0);
        }
        double scale = 0.0, diff = 0.0;
        for (std::size_t k = 0; k < lhs[c].size(); k++) {
            scale = std::max(scale, lhs[c][k].cwiseAbs().maxCoeff());
            diff = std::max(diff, (lhs[c][k] - lambda * rhs[c][k]).cwiseAbs().maxCoeff());
        }
        worst = std::max(worst, scale > 0 ? diff / scale : diff);
    }
    return worst;
}

inline std::vector<int> vertex_template(QuditRegister &r, const Cellulation &cell, const GroupRef &G) {
    std::vector<int> ids;
    for (int v = 0; v < cell.num_vertices; v++) {
        ids.push_back(r.add_site({"v" + std::to_string(v), Role::vertex, G}));
    }
    return ids;
}

inline QuditRegister apply_all(QuditRegister r, const LocalOperator &op, const std::vector<int> &ids) {
    for (int id : ids) {
        r.apply(op, {id});
    }
    return r;
}

inline KwResult entangler_map(const QuditRegister &x, const std::vector<int> &vids, const Cellulation &cell, const GroupRef &G) {
    Measurer m(KwMode::linear());
    return kw_entangler(x, vids, cell, G, m, "e", false);
}

/// KW^{N<G} in linear mode: edges n0.., residual vertices v{k}.Q.
inline KwResult kwn_map(
    const QuditRegister &x, const std::vector<int> &vids, const Cellulation &cell, const FactorSystem &fs) {
    Measurer m(KwMode::linear());
    return kw_n_in_g(x, vids, cell, fs, m, "n", false);
}

struct NormalCase {
    Subgroup sub;
    FactorSystem fs;
    std::string name;
};

inline std::vector<NormalCase> normal_cases(const GroupRef &G) {
    std::vector<NormalCase> out;
    for (const Subgroup &n : normal_subgroups(*G)) {
        FactorSystem fs = factor_system_of(*G, n);
        fs.parent = G;
        out.push_back({n, std::move(fs), "N" + std::to_string(n.order())});
    }
    return out;
}

inline std::size_t work_estimate(std::initializer_list<std::pair<std::size_t, int>> parts) {
    std::size_t w = 1;
    for (auto [base, exp] : parts) {
        w *= capped_power(base, exp, std::size_t(1) << 40);
        if (w > (std::size_t(1) << 40)) {
            return std::size_t(1) << 40;
        }
    }
    return w;
}

/// Omega_VVPP: chi^{omega(q_i, q_i^-1 q_f)}(n_{i'}^-1 n_{f'}) per edge, on (V: Q, P: N).
/// The exponent sign matches the pairing of cz_abelian.
inline void apply_omega_vvpp(
    QuditRegister &r, const FactorSystem &fs, const Cellulation &cell, const std::vector<int> &vids,
    const std::vector<int> &pids) {
    const FiniteGroup &N = fs.normal;
    const FiniteGroup &Q = fs.quotient;
    const AbelianStructure &s = N.abelian();
    for (int e = 0; e < cell.num_edges(); e++) {
        int pi = cell.dual[e].i, pf = cell.dual[e].f;
        if (pi == pf) {
            continue;
        }
        r.apply_diagonal({vids[cell.edges[e].i], vids[cell.edges[e].f], pids[pi], pids[pf]}, [&](const std::vector<int> &l) {
            int w = fs.omega[l[0]][Q.mul(Q.inv(l[0]), l[1])];
            return s.character(w, N.mul(N.inv(l[2]), l[3]));
        });
    }
}

}  // namespace detail

/// Runs one identity for one group on one graph. Non-applicable combinations
/// (no closed walks, no plaquettes, no nil-2 decomposition) are reported as such.
inline IdentityCheck check_identity(
    const std::string &id, const GroupRef &G, const Cellulation &cell, const std::string &graph,
    const VerifyLimits &lim = {}) {
    IdentityCheck out;
    out.id = id;
    out.group = G->name();
    out.graph = graph;
    const int V = cell.num_vertices, E = cell.num_edges();
    const std::size_t n = G->order();
    auto na = [&](std::string why) {
        out.applicable = false;
        out.note = std::move(why);
        return out;
    };

    if (id == "cl_left" || id == "cr_left" || id == "cl_right" || id == "cr_right") {
        LocalOperator c = id[1] == 'l' ? controlled_left(*G) : controlled_right(*G);
        LocalOperator one = LocalOperator::identity({G->order()});
        for (int g = 0; g < G->order(); g++) {
            LocalOperator L = left_mult(*G, g), R = right_mult(*G, g);
            LocalOperator inner, want;
            if (id == "cl_left") {
                inner = tensor(L, L), want = tensor(L, one);
            } else if (id == "cr_left") {
                inner = tensor(L, R), want = tensor(L, one);
            } else if (id == "cl_right") {
                inner = tensor(R, one), want = tensor(R, L);
            } else {
                inner = tensor(R, one), want = tensor(R, R);
            }
            LocalOperator got = c.adjoint().times(inner.times(c));
            out.deviation = std::max(out.deviation, detail::operator_deviation(got, want));
            out.cases++;
        }
        return out;
    }
    if (id == "cl_character" || id == "cr_character" || id == "irrep_sum_rule") {
        IrrepTable t = irrep_table(*G);
        if (id == "irrep_sum_rule") {
            for (int g = 0; g < G->order(); g++) {
                cplx s = 0.0;
                for (std::size_t mu = 0; mu < t.irreps.size(); mu++) {
                    s += static_cast<double>(t.irreps[mu].dim) * t.characters[mu][g];
                }
                s /= static_cast<double>(G->order());
                out.deviation = std::max(out.deviation, std::abs(s - (g == 0 ? 1.0 : 0.0)));
                out.cases++;
            }
            return out;
        }
        bool left = id == "cl_character";
        LocalOperator c = left ? controlled_left(*G) : controlled_right(*G);
        int d = G->order();
        for (const Irrep &mu : t.irreps) {
            for (int i = 0; i < mu.dim; i++) {
                for (int j = 0; j < mu.dim; j++) {
                    // CL (Z_v Z_e) CL^dag and CR (Z_e Z^bar_v) CR^dag, as matrix products
                    std::vector<cplx> prod(d * d), single(d * d);
                    for (int a = 0; a < d; a++) {
                        for (int b = 0; b < d; b++) {
                            Matrix m = left ? Matrix(mu.rho[a] * mu.rho[b]) : Matrix(mu.rho[b] * mu.rho[G->inv(a)]);
                            prod[a * d + b] = m(i, j);
                            single[a * d + b] = mu.rho[b](i, j);
                        }
                    }
                    LocalOperator z = LocalOperator::diagonal({d, d}, prod, false);
                    LocalOperator want = LocalOperator::diagonal({d, d}, single, false);
                    LocalOperator got = c.times(z.times(c.adjoint()));
                    out.deviation = std::max(out.deviation, detail::operator_deviation(got, want));
                    out.cases++;
                }
            }
        }
        return out;
    }
    if (id == "ung_left" || id == "ung_character" || id == "edge_simplification") {
        for (const detail::NormalCase &nc : detail::normal_cases(G)) {
            const FactorSystem &fs = nc.fs;
            const FiniteGroup &N = fs.normal;
            const FiniteGroup &Q = fs.quotient;
            int nq = Q.order(), nn = N.order(), ng = nq * nn;
            if (id == "edge_simplification") {
                for (int gi = 0; gi < G->order(); gi++) {
                    for (int gf = 0; gf < G->order(); gf++) {
                        int ni = fs.tpart[gi], qi = fs.proj[gi], nf = fs.tpart[gf], qf = fs.proj[gf];
                        int qb = Q.inv(qi);
                        int ne = N.mul(
                            N.mul(N.inv(fs.omega[qb][qi]), fs.sigma[qb][N.mul(N.inv(ni), nf)]), fs.omega[qb][qf]);
                        bool t_ok = ne == fs.tpart[G->mul(G->inv(gi), gf)];
                        int dressed = N.mul(fs.sigma[qi][ne], fs.omega[qi][Q.mul(qb, qf)]);
                        bool d_ok = dressed == N.mul(N.inv(ni), nf);
                        out.deviation = std::max(out.deviation, t_ok && d_ok ? 0.0 : 1.0);
                        out.cases++;
                    }
                }
                continue;
            }
            LocalOperator u = u_ng_edge_factor(fs);
            if (id == "ung_left") {
                GroupRef pairs = share(extension_from_factor_system(fs, G->name() + ".pairs"));
                for (int x = 0; x < ng; x++) {
                    int nx = x / nq, qx = x % nq;
                    LocalOperator Lg = left_mult(*pairs, x);
                    std::vector<int> perm(nn);
                    for (int m = 0; m < nn; m++) {
                        perm[m] = N.mul(N.mul(nx, fs.sigma[qx][m]), N.inv(nx));
                    }
                    LocalOperator edge = LocalOperator::permutation({nn}, perm);
                    LocalOperator got = u.adjoint().times(tensor(tensor(Lg, LocalOperator::identity({nn})), Lg).times(u));
                    LocalOperator want = tensor(tensor(Lg, edge), Lg);
                    out.deviation = std::max(out.deviation, detail::operator_deviation(got, want));
                    out.cases++;
                }
                continue;
            }
            if (!N.is_abelian()) {
                continue;
            }
            const AbelianStructure &s = N.abelian();
            for (int nu = 0; nu < nn; nu++) {
                LocalOperator zt = z_tilde(fs, nu);
                std::vector<cplx> dressed(static_cast<std::size_t>(ng) * nn * ng), plain(dressed.size());
                for (int xi = 0; xi < ng; xi++) {
                    for (int m = 0; m < nn; m++) {
                        for (int xf = 0; xf < ng; xf++) {
                            std::size_t k = (static_cast<std::size_t>(xi) * nn + m) * ng + xf;
                            dressed[k] = zt.phase[(static_cast<std::size_t>(xi % nq) * nn + m) * nq + xf % nq];
                            plain[k] = std::conj(s.character(nu, xi / nq)) * s.character(nu, m) * s.character(nu, xf / nq);
                        }
                    }
                }
                LocalOperator z = LocalOperator::diagonal({ng, nn, ng}, dressed);
                LocalOperator want = LocalOperator::diagonal({ng, nn, ng}, plain);
                out.deviation = std::max(out.deviation, detail::operator_deviation(u.adjoint().times(z.times(u)), want));
                out.cases++;
            }
        }
        return out;
    }

    // Map identities on vertex inputs.
    auto walks = closed_walks(cell);
    if (id == "nil2_expressions" || id == "ddw_push_through") {
        if (!cell.surface || cell.num_plaquettes() == 0) {
            return na("needs a closed-surface cellulation");
        }
        bool any = false;
        int skipped = 0;
        for (const detail::NormalCase &nc : detail::normal_cases(G)) {
            if (!is_nil2_extension(nc.fs)) {
                continue;
            }
            any = true;
            const FactorSystem &fs = nc.fs;
            GroupRef N = share(fs.normal), Q = share(fs.quotient);
            int qv = id == "nil2_expressions" ? V + E : V;
            if (detail::work_estimate({{Q->order(), qv}, {N->order(), cell.num_plaquettes() + E}}) >
                lim.register_budget) {
                skipped++;
                continue;
            }
            QuditRegister tmpl;
            std::vector<int> vids, pids;
            for (int v = 0; v < V; v++) {
                vids.push_back(tmpl.add_site({"v" + std::to_string(v), Role::vertex, Q}));
            }
            for (int p = 0; p < cell.num_plaquettes(); p++) {
                pids.push_back(tmpl.add_site({"p" + std::to_string(p), Role::plaquette, N}));
            }
            std::size_t work = detail::work_estimate(
                {{Q->order(), V + E}, {N->order(), cell.num_plaquettes() + E}});
            detail::MapInputs in = detail::map_inputs(tmpl, work, lim);
            out.dense = out.dense && in.dense;
            LocalOperator om = omega_gate(fs);
            auto kw_hat = [&](QuditRegister x) {
                Measurer m(KwMode::linear());
                KwResult k = kw_hat_abelian(std::move(x), pids, cell, N, m, "e", false);
                for (int e = 0; e < E; e++) {
                    k.reg.rename_site(k.edge_ids[e], "e" + std::to_string(e) + ".N");
                }
                return k;
            };
            detail::CaseFn fn;
            if (id == "nil2_expressions") {
                fn = [&](const QuditRegister &x) {
                    // gates, then every measurement at the end
                    QuditRegister r = x;
                    std::vector<int> en, eq;
                    for (int e = 0; e < E; e++) {
                        en.push_back(r.add_site({"e" + std::to_string(e) + ".N", Role::edge, N}, true));
                        eq.push_back(r.add_site({"e" + std::to_string(e) + ".Q", Role::edge, Q}, false));
                    }
                    LocalOperator cz = cz_abelian(*N), cx = cx_abelian(*Q);
                    for (int e = 0; e < E; e++) {
                        if (cell.dual[e].i != cell.dual[e].f) {
                            r.apply(cz.adjoint(), {pids[cell.dual[e].i], en[e]});
                            r.apply(cz, {pids[cell.dual[e].f], en[e]});
                        }
                    }
                    for (int e = 0; e < E; e++) {
                        r.apply(om, {vids[cell.edges[e].i], en[e], vids[cell.edges[e].f]});
                    }
                    for (int e = 0; e < E; e++) {
                        r.apply(cx.adjoint(), {vids[cell.edges[e].i], eq[e]});
                        r.apply(cx, {vids[cell.edges[e].f], eq[e]});
                    }
                    Measurer m(KwMode::linear());
                    for (int id2 : vids) {
                        m.measure(r, id2);
                    }
                    for (int id2 : pids) {
                        m.measure(r, id2);
                    }
                    // composed maps
                    KwResult h = kw_hat(x);
                    for (int e = 0; e < E; e++) {
                        h.reg.apply(om, {vids[cell.edges[e].i], h.edge_ids[e], vids[cell.edges[e].f]});
                    }
                    Measurer m2(KwMode::linear());
                    KwResult q = kw_abelian(std::move(h.reg), vids, cell, Q, m2, "q", false);
                    for (int e = 0; e < E; e++) {
                        q.reg.rename_site(q.edge_ids[e], "e" + std::to_string(e) + ".Q");
                    }
                    std::vector<std::pair<QuditRegister, QuditRegister>> res;
                    res.emplace_back(std::move(r), std::move(q.reg));
                    return res;
                };
            } else {
                fn = [&](const QuditRegister &x) {
                    KwResult lhs = kw_hat(x);
                    for (int e = 0; e < E; e++) {
                        lhs.reg.apply(om, {vids[cell.edges[e].i], lhs.edge_ids[e], vids[cell.edges[e].f]});
                    }
                    QuditRegister y = x;
                    detail::apply_omega_vvpp(y, fs, cell, vids, pids);
                    KwResult rhs = kw_hat(std::move(y));
                    std::vector<std::pair<QuditRegister, QuditRegister>> res;
                    res.emplace_back(std::move(lhs.reg), std::move(rhs.reg));
                    return res;
                };
            }
            int cases = 0;
            out.deviation = std::max(out.deviation, detail::compare_cases(in, fn, false, &cases));
            out.cases += cases;
        }
        if (!any) {
            return na("no central extension of abelian groups");
        }
        if (out.cases == 0) {
            throw BudgetExceeded(id + ": every case exceeds the register budget");
        }
        if (skipped > 0) {
            out.note = std::to_string(skipped) + " normal subgroup(s) over the register budget";
        }
        return out;
    }

    std::size_t work = detail::work_estimate({{n, V + E}});
    if (work > lim.register_budget) {
        throw BudgetExceeded(
            id + " on " + graph + " needs " + std::to_string(n) + "^" + std::to_string(V + E) +
            " amplitudes, over the register budget");
    }
    QuditRegister tmpl;
    std::vector<int> vids = detail::vertex_template(tmpl, cell, G);
    std::vector<int> gens = generating_set(*G);
    if (gens.empty()) {
        gens.push_back(0);
    }
    detail::MapInputs in = detail::map_inputs(tmpl, work, lim);
    out.dense = in.dense;
    auto pack = [](QuditRegister a, QuditRegister b) {
        std::vector<std::pair<QuditRegister, QuditRegister>> r;
        r.emplace_back(std::move(a), std::move(b));
        return r;
    };

    if (id == "entangler_definition") {
        out.deviation = detail::compare_cases(
            in,
            [&](const QuditRegister &x) {
                return pack(detail::entangler_map(x, vids, cell, G).reg, kw_exact_g(x, vids, cell, G, "e", false));
            },
            true, &out.cases);
        return out;
    }
    if (id == "symmetry_kernel") {
        out.deviation = detail::compare_cases(
            in,
            [&](const QuditRegister &x) {
                QuditRegister base = detail::entangler_map(x, vids, cell, G).reg;
                std::vector<std::pair<QuditRegister, QuditRegister>> r;
                for (int g : gens) {
                    QuditRegister moved = detail::apply_all(x, left_mult(*G, g), vids);
                    r.emplace_back(detail::entangler_map(moved, vids, cell, G).reg, base);
                }
                return r;
            },
            false, &out.cases);
        return out;
    }
    if (id == "vertex_term") {
        out.deviation = detail::compare_cases(
            in,
            [&](const QuditRegister &x) {
                KwResult base = detail::entangler_map(x, vids, cell, G);
                std::vector<std::pair<QuditRegister, QuditRegister>> r;
                for (int v = 0; v < V; v++) {
                    std::vector<int> targets;
                    for (int e : cell.incident_edges(v)) {
                        targets.push_back(base.edge_ids[e]);
                    }
                    for (int g : gens) {
                        QuditRegister moved = x;
                        moved.apply(right_mult(*G, g), {vids[v]});
                        QuditRegister rhs = base.reg;
                        rhs.apply(vertex_term(*G, cell, v, g), targets);
                        r.emplace_back(detail::entangler_map(moved, vids, cell, G).reg, std::move(rhs));
                    }
                }
                return r;
            },
            false, &out.cases);
        return out;
    }
    if (id == "dual_loop") {
        if (walks.empty()) {
            return na("graph has no closed walks");
        }
        IrrepTable t = irrep_table(*G);
        std::vector<LoopOperator> ops;
        std::vector<int> dims;
        for (const Irrep &mu : t.irreps) {
            for (const auto &w : walks) {
                ops.push_back(loop_z(mu, w, cell));
                dims.push_back(mu.dim);
            }
        }
        out.deviation = detail::compare_cases(
            in,
            [&](const QuditRegister &x) {
                KwResult base = detail::entangler_map(x, vids, cell, G);
                std::vector<std::pair<QuditRegister, QuditRegister>> r;
                for (std::size_t k = 0; k < ops.size(); k++) {
                    std::vector<int> targets;
                    for (int e : ops[k].edges) {
                        targets.push_back(base.edge_ids[e]);
                    }
                    QuditRegister lhs = base.reg;
                    lhs.apply(ops[k].op, targets);
                    QuditRegister rhs = base.reg;
                    rhs.amplitudes() *= static_cast<double>(dims[k]);
                    r.emplace_back(std::move(lhs), std::move(rhs));
                }
                return r;
            },
            false, &out.cases);
        return out;
    }

    // Identities indexed by normal subgroups.
    if (id == "dressed_loop_kernel" && walks.empty()) {
        return na("graph has no closed walks");
    }
    int total_cases = 0;
    for (const detail::NormalCase &nc : detail::normal_cases(G)) {
        const FactorSystem &fs = nc.fs;
        GroupRef Q = share(fs.quotient);
        detail::CaseFn fn;
        bool fit = false;
        if (id == "two_step_gauging") {
            fit = true;
            fn = [&](const QuditRegister &x) {
                KwResult k1 = detail::kwn_map(x, vids, cell, fs);
                Measurer m(KwMode::linear());
                KwResult k2 = Q->is_abelian() ? kw_abelian(std::move(k1.reg), k1.q_ids, cell, Q, m, "q", false)
                                              : kw_entangler(std::move(k1.reg), k1.q_ids, cell, Q, m, "q", false);
                QuditRegister r = std::move(k2.reg);
                for (int e = 0; e < E; e++) {
                    r.merge_sites(k1.edge_ids[e], k2.edge_ids[e], {"e" + std::to_string(e), Role::edge, G}, fs.pair_to_parent);
                }
                return pack(kw_exact_g(x, vids, cell, G, "e", false), std::move(r));
            };
        } else if (id == "residual_symmetry") {
            fn = [&](const QuditRegister &x) {
                KwResult base = detail::kwn_map(x, vids, cell, fs);
                std::vector<std::pair<QuditRegister, QuditRegister>> r;
                for (int g : gens) {
                    QuditRegister moved = detail::apply_all(x, left_mult(*G, g), vids);
                    QuditRegister rhs = detail::apply_all(base.reg, left_mult(*Q, fs.proj[g]), base.q_ids);
                    r.emplace_back(detail::kwn_map(moved, vids, cell, fs).reg, std::move(rhs));
                }
                return r;
            };
        } else if (id == "dressed_loop_kernel") {
            if (!fs.normal.is_abelian()) {
                continue;
            }
            fn = [&](const QuditRegister &x) {
                KwResult base = detail::kwn_map(x, vids, cell, fs);
                std::vector<std::pair<QuditRegister, QuditRegister>> r;
                for (int nu = 0; nu < fs.n_order(); nu++) {
                    for (const auto &w : walks) {
                        QuditRegister lhs = base.reg;
                        for (const WalkStep &s : w) {
                            int exp = s.orient > 0 ? nu : fs.normal.inv(nu);
                            const Arrow &a = cell.edges[s.edge];
                            lhs.apply(z_tilde(fs, exp), {base.q_ids[a.i], base.edge_ids[s.edge], base.q_ids[a.f]});
                        }
                        r.emplace_back(std::move(lhs), base.reg);
                    }
                }
                return r;
            };
        } else {
            throw std::invalid_argument("unknown identity " + id);
        }
        int cases = 0;
        out.deviation = std::max(out.deviation, detail::compare_cases(in, fn, fit, &cases));
        total_cases += cases;
    }
    out.cases = total_cases;
    if (id == "dressed_loop_kernel" && total_cases == 0) {
        return na("no abelian normal subgroup");
    }
    return out;
}

inline std::vector<IdentityCheck> identity_suite(
    const GroupRef &G, const std::vector<std::pair<std::string, Cellulation>> &graphs, const VerifyLimits &lim = {},
    const std::vector<std::string> &ids = identity_ids()) {
    std::vector<IdentityCheck> out;
    for (const auto &[name, cell] : graphs) {
        for (const std::string &id : ids) {
            out.push_back(check_identity(id, G, cell, name, lim));
        }
    }
    return out;
}

}  // namespace qdouble

#endif
