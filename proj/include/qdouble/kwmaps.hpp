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

#ifndef QDOUBLE_KWMAPS_HPP
#define QDOUBLE_KWMAPS_HPP

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qdouble/cellulation.hpp"
#include "qdouble/factor_system.hpp"
#include "qdouble/feedforward.hpp"
#include "qdouble/gates.hpp"
#include "qdouble/register.hpp"

namespace qdouble {

struct KwMode {
    enum class Kind { postselect, sample, forced };
    Kind kind = Kind::postselect;
    std::uint64_t seed = 0;
    std::map<std::string, int> forced;  // site label -> outcome; missing labels are trivial
    bool renormalize = true;            // postselect only; false keeps the bare projection

    static KwMode postselect() {
        return {};
    }
    /// Postselection without renormalization, so maps stay linear.
    static KwMode linear() {
        KwMode m;
        m.renormalize = false;
        return m;
    }
    static KwMode sample(std::uint64_t seed) {
        KwMode m;
        m.kind = Kind::sample;
        m.seed = seed;
        return m;
    }
    static KwMode forced_outcomes(std::map<std::string, int> table) {
        KwMode m;
        m.kind = Kind::forced;
        m.forced = std::move(table);
        return m;
    }
    std::string describe() const {
        switch (kind) {
            case Kind::postselect:
                return "postselect";
            case Kind::sample:
                return "sample:" + std::to_string(seed);
            default:
                return "forced";
        }
    }
};

/// Performs the single-site measurements of a protocol and owns its rng.
class Measurer {
   public:
    explicit Measurer(KwMode mode) : mode_(std::move(mode)), rng_(mode_.seed) {
    }

    const KwMode &mode() const {
        return mode_;
    }
    bool postselect() const {
        return mode_.kind == KwMode::Kind::postselect;
    }

    /// Returns the outcome and multiplies `probability` by its Born weight.
    int measure(QuditRegister &r, int id, double *probability = nullptr) {
        const SiteSpec &s = r.site(id);
        std::string label = s.label;
        if (postselect()) {
            int d = s.dim();
            double before = r.amplitudes().squaredNorm();
            r.project(id, Vector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d))));
            double after = r.amplitudes().squaredNorm();
            if (after == 0.0 && mode_.renormalize) {
                throw ZeroProbabilityOutcome("postselected branch on " + label + " has zero weight");
            }
            if (probability && before > 0.0) {
                *probability *= after / before;
            }
            if (mode_.renormalize) {
                r.normalize();
            }
            return 0;
        }
        if (!s.group->is_abelian()) {
            throw std::domain_error("measured modes need abelian outcome groups, got " + s.group->name());
        }
        int forced = -1;
        if (mode_.kind == KwMode::Kind::forced) {
            auto it = mode_.forced.find(label);
            forced = it == mode_.forced.end() ? 0 : it->second;
        }
        std::vector<double> p;
        if (probability) {
            p = r.fourier_probabilities(id);
        }
        int a = r.measure_fourier(id, forced >= 0 ? nullptr : &rng_, forced);
        if (probability) {
            double total = 0;
            for (double x : p) {
                total += x;
            }
            *probability *= p[a] / total;
        }
        return a;
    }

   private:
    KwMode mode_;
    std::mt19937_64 rng_;
};

struct KwResult {
    QuditRegister reg;
    std::vector<int> edge_ids;
    std::vector<int> q_ids;  // kw_n_in_g: residual Q vertex sites
    std::vector<std::pair<std::string, int>> outcomes;
    std::vector<CorrectionPlan> corrections;
    double probability = 1.0;  // Born weight of the recorded branch
};

/// max over generators g of |prod_v L^g psi - psi| / |psi|
inline double symmetry_violation(const QuditRegister &r, const std::vector<int> &ids, const FiniteGroup &G) {
    double worst = 0;
    double n = r.norm();
    for (int g : generating_set(G)) {
        QuditRegister copy = r;
        LocalOperator l = left_mult(G, g);
        for (int id : ids) {
            copy.apply(l, {id});
        }
        worst = std::max(worst, (copy.amplitudes() - r.amplitudes()).norm() / n);
    }
    return worst;
}

inline void require_symmetric(const QuditRegister &r, const std::vector<int> &ids, const FiniteGroup &G) {
    double v = symmetry_violation(r, ids, G);
    if (v > 1e-10) {
        throw std::invalid_argument(
            "input is not " + G.name() + "-symmetric (deviation " + std::to_string(v) + ")");
    }
}

namespace detail {

inline std::vector<int> add_edge_sites(
    QuditRegister &r, const Cellulation &cell, const GroupRef &group, const std::string &prefix, bool plus) {
    std::vector<int> ids;
    for (int e = 0; e < cell.num_edges(); e++) {
        ids.push_back(r.add_site({prefix + std::to_string(e), Role::edge, group}, plus));
    }
    return ids;
}

inline void check_sites(const QuditRegister &r, const std::vector<int> &ids, int count, const FiniteGroup &G) {
    if (static_cast<int>(ids.size()) != count) {
        throw std::invalid_argument("need one site per cell");
    }
    for (int id : ids) {
        if (r.site(id).group->table() != G.table()) {
            throw std::invalid_argument("site " + r.site(id).label + " does not carry " + G.name());
        }
    }
}

}  // namespace detail

/// Abelian KW: edges in |1>, per edge (CX_{i e})^dag CX_{f e}, Fourier
/// measurement of every vertex, Z-string repair.
inline KwResult kw_abelian(
    QuditRegister state, const std::vector<int> &vertex_ids, const Cellulation &cell, const GroupRef &A,
    Measurer &measurer, const std::string &edge_prefix = "e", bool check_symmetry = true) {
    A->abelian();
    detail::check_sites(state, vertex_ids, cell.num_vertices, *A);
    if (check_symmetry) {
        require_symmetric(state, vertex_ids, *A);
    }
    KwResult out;
    out.edge_ids = detail::add_edge_sites(state, cell, A, edge_prefix, false);
    LocalOperator cx = cx_abelian(*A);
    LocalOperator cxd = cx.adjoint();
    for (int e = 0; e < cell.num_edges(); e++) {
        state.apply(cxd, {vertex_ids[cell.edges[e].i], out.edge_ids[e]});
        state.apply(cx, {vertex_ids[cell.edges[e].f], out.edge_ids[e]});
    }
    SyndromeSet s{SyndromeKind::charge, {}, A};
    for (int v = 0; v < cell.num_vertices; v++) {
        std::string label = state.site(vertex_ids[v]).label;
        s.labels.push_back(measurer.measure(state, vertex_ids[v], &out.probability));
        out.outcomes.emplace_back(label, s.labels.back());
    }
    CorrectionPlan plan = charge_correction(s, cell, spanning_tree(cell));
    for (int e = 0; e < cell.num_edges(); e++) {
        if (plan.exponent[e] != 0) {
            state.apply(z_abelian(*A, A->inv(plan.exponent[e])), {out.edge_ids[e]});
        }
    }
    out.corrections.push_back(plan);
    out.reg = std::move(state);
    return out;
}

/// Abelian KW-hat: edges in |+>, per edge CZ^dag_{i' e} CZ_{f' e} along the
/// dual arrow, Fourier measurement of every plaquette, X-string repair.
inline KwResult kw_hat_abelian(
    QuditRegister state, const std::vector<int> &plaquette_ids, const Cellulation &cell, const GroupRef &A,
    Measurer &measurer, const std::string &edge_prefix = "e", bool check_symmetry = true) {
    A->abelian();
    detail::check_sites(state, plaquette_ids, cell.num_plaquettes(), *A);
    if (check_symmetry) {
        require_symmetric(state, plaquette_ids, *A);
    }
    KwResult out;
    out.edge_ids = detail::add_edge_sites(state, cell, A, edge_prefix, true);
    LocalOperator cz = cz_abelian(*A);
    LocalOperator czd = cz.adjoint();
    for (int e = 0; e < cell.num_edges(); e++) {
        if (cell.dual[e].i == cell.dual[e].f) {
            continue;
        }
        state.apply(czd, {plaquette_ids[cell.dual[e].i], out.edge_ids[e]});
        state.apply(cz, {plaquette_ids[cell.dual[e].f], out.edge_ids[e]});
    }
    SyndromeSet s{SyndromeKind::flux, {}, A};
    for (int p = 0; p < cell.num_plaquettes(); p++) {
        std::string label = state.site(plaquette_ids[p]).label;
        s.labels.push_back(measurer.measure(state, plaquette_ids[p], &out.probability));
        out.outcomes.emplace_back(label, s.labels.back());
    }
    CorrectionPlan plan = flux_correction(s, cell, dual_spanning_tree(cell));
    for (int e = 0; e < cell.num_edges(); e++) {
        if (plan.exponent[e] != 0) {
            state.apply(left_mult(*A, plan.exponent[e]), {out.edge_ids[e]});
        }
    }
    out.corrections.push_back(plan);
    out.reg = std::move(state);
    return out;
}

/// KW^G from the cluster entangler: edges in |1>, per edge CL^dag_{i e} CR^dag_{f e},
/// then <+| on every vertex. Measured modes need abelian G.
inline KwResult kw_entangler(
    QuditRegister state, const std::vector<int> &vertex_ids, const Cellulation &cell, const GroupRef &G,
    Measurer &measurer, const std::string &edge_prefix = "e", bool check_symmetry = true) {
    detail::check_sites(state, vertex_ids, cell.num_vertices, *G);
    if (check_symmetry) {
        require_symmetric(state, vertex_ids, *G);
    }
    KwResult out;
    out.edge_ids = detail::add_edge_sites(state, cell, G, edge_prefix, false);
    LocalOperator u = ug_edge_factor(*G);
    for (int e = 0; e < cell.num_edges(); e++) {
        state.apply(u, {vertex_ids[cell.edges[e].i], out.edge_ids[e], vertex_ids[cell.edges[e].f]});
    }
    SyndromeSet s{SyndromeKind::charge, {}, G};
    for (int v = 0; v < cell.num_vertices; v++) {
        std::string label = state.site(vertex_ids[v]).label;
        s.labels.push_back(measurer.measure(state, vertex_ids[v], &out.probability));
        out.outcomes.emplace_back(label, s.labels.back());
    }
    if (!measurer.postselect()) {
        CorrectionPlan plan = charge_correction(s, cell, spanning_tree(cell));
        for (int e = 0; e < cell.num_edges(); e++) {
            if (plan.exponent[e] != 0) {
                state.apply(z_abelian(*G, G->inv(plan.exponent[e])), {out.edge_ids[e]});
            }
        }
        out.corrections.push_back(plan);
    }
    out.reg = std::move(state);
    return out;
}

/// Definitional KW^G: |{g_v}> -> |{g_{i_e}^-1 g_{f_e}}> by basis enumeration.
/// Non-vertex sites are kept in order; edge sites are appended.
inline QuditRegister kw_exact_g(
    const QuditRegister &state, const std::vector<int> &vertex_ids, const Cellulation &cell, const GroupRef &G,
    const std::string &edge_prefix = "e", bool normalize = true) {
    detail::check_sites(state, vertex_ids, cell.num_vertices, *G);
    std::vector<int> vpos;
    for (int id : vertex_ids) {
        vpos.push_back(state.position(id));
    }
    std::vector<bool> is_vertex(state.num_sites(), false);
    for (int p : vpos) {
        is_vertex[p] = true;
    }
    QuditRegister out;
    std::vector<int> keep;
    for (int k = 0; k < state.num_sites(); k++) {
        if (!is_vertex[k]) {
            keep.push_back(k);
            out.add_site(state.sites()[k]);
        }
    }
    for (int e = 0; e < cell.num_edges(); e++) {
        out.add_site({edge_prefix + std::to_string(e), Role::edge, G});
    }
    out.amplitudes().setZero();
    int n = G->order();
    const Vector &in = state.amplitudes();
    for (Eigen::Index a = 0; a < in.size(); a++) {
        if (in(a) == cplx(0)) {
            continue;
        }
        auto labels = state.labels_of(static_cast<std::size_t>(a));
        std::size_t idx = 0;
        for (int k : keep) {
            idx = idx * state.sites()[k].dim() + labels[k];
        }
        for (const Arrow &arc : cell.edges) {
            idx = idx * n + G->mul(G->inv(labels[vpos[arc.i]]), labels[vpos[arc.f]]);
        }
        out.amplitudes()(static_cast<Eigen::Index>(idx)) += in(a);
    }
    if (normalize) {
        out.normalize();
    }
    return out;
}

/// KW^{N<G} = U^{N<G} KW^N on vertex sites carrying fs.parent.
///
/// Vertices are relabelled to the pair basis (t(g), pi(g)); C[N] edges start
/// in |1>; each edge gets the combined N-entangler, Omega and Sigma^-1; the N
/// part of every vertex is measured and repaired with dressed Z~ strings.
/// Returns edges on C[N] and live Q parts of the vertices.
inline KwResult kw_n_in_g(
    QuditRegister state, const std::vector<int> &vertex_ids, const Cellulation &cell, const FactorSystem &fs,
    Measurer &measurer, const std::string &edge_prefix = "e", bool check_symmetry = true) {
    if (!fs.has_parent()) {
        throw std::invalid_argument("kw_n_in_g needs a factor system with parent tables");
    }
    const FiniteGroup &G = *fs.parent;
    if (!measurer.postselect() && !fs.normal.is_abelian()) {
        throw std::domain_error("measured KW^{N<G} needs abelian N");
    }
    detail::check_sites(state, vertex_ids, cell.num_vertices, G);
    if (check_symmetry) {
        require_symmetric(state, vertex_ids, G);
    }
    GroupRef n_ref = share(fs.normal);
    GroupRef q_ref = share(fs.quotient);
    GroupRef pair_ref = share(extension_from_factor_system(fs, G.name() + ".pairs"));
    std::vector<int> to_pair(G.order());
    for (int g = 0; g < G.order(); g++) {
        to_pair[g] = fs.pair_index(fs.tpart[g], fs.proj[g]);
    }
    std::vector<int> vids = vertex_ids;
    for (int &id : vids) {
        state.relabel_site(id, to_pair, pair_ref);
    }
    KwResult out;
    out.edge_ids = detail::add_edge_sites(state, cell, n_ref, edge_prefix, false);
    LocalOperator u = u_ng_edge_factor(fs);
    for (int e = 0; e < cell.num_edges(); e++) {
        state.apply(u, {vids[cell.edges[e].i], out.edge_ids[e], vids[cell.edges[e].f]});
    }
    std::vector<int> n_ids;
    for (int v = 0; v < cell.num_vertices; v++) {
        std::string base = state.site(vids[v]).label;
        auto [nid, qid] = state.split_site(vids[v], {base + ".N", Role::vertex, n_ref}, {base + ".Q", Role::vertex, q_ref});
        n_ids.push_back(nid);
        out.q_ids.push_back(qid);
    }
    SyndromeSet s{SyndromeKind::charge, {}, n_ref};
    for (int v = 0; v < cell.num_vertices; v++) {
        std::string label = state.site(n_ids[v]).label;
        s.labels.push_back(measurer.measure(state, n_ids[v], &out.probability));
        out.outcomes.emplace_back(label, s.labels.back());
    }
    if (!measurer.postselect()) {
        CorrectionPlan plan = charge_correction(s, cell, spanning_tree(cell));
        for (int e = 0; e < cell.num_edges(); e++) {
            if (plan.exponent[e] != 0) {
                state.apply(
                    z_tilde(fs, fs.normal.inv(plan.exponent[e])),
                    {out.q_ids[cell.edges[e].i], out.edge_ids[e], out.q_ids[cell.edges[e].f]});
            }
        }
        out.corrections.push_back(plan);
    }
    out.reg = std::move(state);
    return out;
}

}  // namespace qdouble

#endif
