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

#ifndef QDOUBLE_PROTOCOLS_HPP
#define QDOUBLE_PROTOCOLS_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qdouble/catalog.hpp"
#include "qdouble/kwmaps.hpp"

namespace qdouble {

struct ProtocolRound {
    std::string name;
    std::vector<std::string> layers;
    std::vector<std::pair<std::string, int>> outcomes;
    std::vector<CorrectionPlan> corrections;
    double probability = 1.0;
};

/// Output edges are live sites labelled e0..e{E-1} carrying `group`.
struct ProtocolTranscript {
    std::string protocol;
    GroupRef group;
    KwMode mode;
    std::vector<ProtocolRound> rounds;
    int shots = 0;
    QuditRegister state;
    std::vector<int> edge_ids;
    std::optional<QuditRegister> pre_correction;
    std::optional<double> fidelity_vs_oracle;

    nlohmann::json to_json() const {
        nlohmann::json rs = nlohmann::json::array();
        for (const ProtocolRound &r : rounds) {
            nlohmann::json outcomes = nlohmann::json::array();
            for (const auto &[label, a] : r.outcomes) {
                outcomes.push_back({label, a});
            }
            nlohmann::json plans = nlohmann::json::array();
            for (const CorrectionPlan &p : r.corrections) {
                plans.push_back(plan_to_json(p));
            }
            rs.push_back({
                {"name", r.name},
                {"layers", r.layers},
                {"outcomes", outcomes},
                {"corrections", plans},
                {"probability", r.probability},
            });
        }
        nlohmann::json j = {
            {"protocol", protocol},
            {"group", group->name()},
            {"mode", mode.describe()},
            {"shots", shots},
            {"rounds", rs},
        };
        if (fidelity_vs_oracle) {
            j["fidelity_vs_oracle"] = *fidelity_vs_oracle;
        }
        return j;
    }
};

struct NonSolvableGroup : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::vector<int> plus_sites(
    QuditRegister &r, int count, const std::string &prefix, Role role, const GroupRef &g) {
    std::vector<int> ids;
    for (int k = 0; k < count; k++) {
        ids.push_back(r.add_site({prefix + std::to_string(k), role, g}, true));
    }
    return ids;
}

inline ProtocolRound round_from(const std::string &name, std::vector<std::string> layers, const KwResult &r) {
    ProtocolRound out;
    out.name = name;
    out.layers = std::move(layers);
    out.outcomes = r.outcomes;
    out.corrections = r.corrections;
    out.probability = r.probability;
    return out;
}

/// Drops live one-dimensional sites.
inline void drop_trivial_sites(QuditRegister &r) {
    std::vector<int> ids = r.ids();
    for (int id : ids) {
        if (r.site(id).dim() == 1) {
            r.project(id, Vector::Ones(1));
        }
    }
}

inline std::string perfect_core_name(const FiniteGroup &g, const Subgroup &core) {
    FiniteGroup c = subgroup_as_group(g, core);
    if (c.order() == 60 && is_isomorphic(c, alternating_group(5))) {
        return "A5";
    }
    return "of order " + std::to_string(c.order());
}

}  // namespace detail

/// KW^A on |+>^A_V. One shot.
inline ProtocolTranscript prepare_abelian_double(const GroupRef &A, const Cellulation &cell, const KwMode &mode) {
    if (!A->is_abelian()) {
        throw std::invalid_argument("prepare_abelian_double needs an abelian group, got " + A->name());
    }
    ProtocolTranscript t;
    t.protocol = "abelian";
    t.group = A;
    t.mode = mode;
    Measurer m(mode);
    QuditRegister r;
    auto vids = detail::plus_sites(r, cell.num_vertices, "v", Role::vertex, A);
    KwResult k = kw_abelian(std::move(r), vids, cell, A, m, "e");
    t.rounds.push_back(detail::round_from(
        "KW^A", {"CX^dag(i_e, e) CX(f_e, e) per edge", "Fourier measurement of V", "Z-string correction"}, k));
    t.shots = 1;
    t.state = std::move(k.reg);
    t.edge_ids = k.edge_ids;
    return t;
}

/// One-shot nil-2 double: CZ^N from |+>^N_P onto C[N] edges in |+>, then
/// Omega_VEV, then CX^Q from |+>^Q_V onto C[Q] edges in |1>; V and P are
/// measured in one layer and repaired with X^n (dual) and Z^q (direct) strings.
inline ProtocolTranscript prepare_nil2_double(FactorSystem fs, const Cellulation &cell, const KwMode &mode) {
    if (!is_nil2_extension(fs)) {
        throw std::invalid_argument("prepare_nil2_double needs a central extension of abelian groups");
    }
    if (!cell.surface || cell.num_plaquettes() == 0) {
        throw std::invalid_argument("prepare_nil2_double needs a closed-surface cellulation");
    }
    if (!fs.has_parent()) {
        fs = with_extension_parent(fs);
    }
    GroupRef N = share(fs.normal), Q = share(fs.quotient);
    ProtocolTranscript t;
    t.protocol = "nil2";
    t.group = fs.parent;
    t.mode = mode;
    Measurer m(mode);
    QuditRegister r;
    auto vids = detail::plus_sites(r, cell.num_vertices, "v", Role::vertex, Q);
    auto pids = detail::plus_sites(r, cell.num_plaquettes(), "p", Role::plaquette, N);
    std::vector<int> en, eq;
    for (int e = 0; e < cell.num_edges(); e++) {
        en.push_back(r.add_site({"e" + std::to_string(e) + ".N", Role::edge, N}, true));
        eq.push_back(r.add_site({"e" + std::to_string(e) + ".Q", Role::edge, Q}, false));
    }
    LocalOperator cz = cz_abelian(*N), czd = cz.adjoint();
    for (int e = 0; e < cell.num_edges(); e++) {
        if (cell.dual[e].i != cell.dual[e].f) {
            r.apply(czd, {pids[cell.dual[e].i], en[e]});
            r.apply(cz, {pids[cell.dual[e].f], en[e]});
        }
    }
    LocalOperator om = omega_gate(fs);
    for (int e = 0; e < cell.num_edges(); e++) {
        r.apply(om, {vids[cell.edges[e].i], en[e], vids[cell.edges[e].f]});
    }
    LocalOperator cx = cx_abelian(*Q), cxd = cx.adjoint();
    for (int e = 0; e < cell.num_edges(); e++) {
        r.apply(cxd, {vids[cell.edges[e].i], eq[e]});
        r.apply(cx, {vids[cell.edges[e].f], eq[e]});
    }
    ProtocolRound round;
    round.name = "nil2";
    round.layers = {
        "CZ^N(i'_e, e)^dag CZ^N(f'_e, e) per edge",
        "Omega(i_e, e, f_e) per edge",
        "CX^Q(i_e, e)^dag CX^Q(f_e, e) per edge",
        "Fourier measurement of V and P",
        "X^n dual strings and Z^q direct strings",
    };
    SyndromeSet charges{SyndromeKind::charge, {}, Q};
    SyndromeSet fluxes{SyndromeKind::flux, {}, N};
    for (int v = 0; v < cell.num_vertices; v++) {
        charges.labels.push_back(m.measure(r, vids[v], &round.probability));
        round.outcomes.emplace_back("v" + std::to_string(v), charges.labels.back());
    }
    for (int p = 0; p < cell.num_plaquettes(); p++) {
        fluxes.labels.push_back(m.measure(r, pids[p], &round.probability));
        round.outcomes.emplace_back("p" + std::to_string(p), fluxes.labels.back());
    }
    CorrectionPlan fplan = flux_correction(fluxes, cell, dual_spanning_tree(cell));
    CorrectionPlan cplan = charge_correction(charges, cell, spanning_tree(cell));
    round.corrections = {fplan, cplan};

    auto merge_all = [&](QuditRegister reg) {
        std::vector<int> out;
        for (int e = 0; e < cell.num_edges(); e++) {
            out.push_back(
                reg.merge_sites(en[e], eq[e], {"e" + std::to_string(e), Role::edge, fs.parent}, fs.pair_to_parent));
        }
        return std::make_pair(std::move(reg), out);
    };
    t.pre_correction = merge_all(r).first;
    for (int e = 0; e < cell.num_edges(); e++) {
        if (fplan.exponent[e] != 0) {
            r.apply(left_mult(*N, fplan.exponent[e]), {en[e]});
        }
        if (cplan.exponent[e] != 0) {
            r.apply(z_abelian(*Q, Q->inv(cplan.exponent[e])), {eq[e]});
        }
    }
    auto [merged, ids] = merge_all(std::move(r));
    t.state = std::move(merged);
    t.edge_ids = ids;
    t.rounds.push_back(std::move(round));
    t.shots = 1;
    return t;
}

/// Two shots: KW^{N<G} with charge repair, then KW^Q on the residual vertices.
inline ProtocolTranscript prepare_metabelian_double(FactorSystem fs, const Cellulation &cell, const KwMode &mode) {
    if (!is_metabelian_extension(fs)) {
        throw std::invalid_argument("prepare_metabelian_double needs abelian N and Q");
    }
    if (!fs.has_parent()) {
        fs = with_extension_parent(fs);
    }
    GroupRef Q = share(fs.quotient);
    ProtocolTranscript t;
    t.protocol = "metabelian";
    t.group = fs.parent;
    t.mode = mode;
    Measurer m(mode);
    QuditRegister r;
    auto vids = detail::plus_sites(r, cell.num_vertices, "v", Role::vertex, fs.parent);
    KwResult k1 = kw_n_in_g(std::move(r), vids, cell, fs, m, "e.N");
    t.rounds.push_back(detail::round_from(
        "KW^{N<G}",
        {"Sigma^-1 Omega CL^dag CR^dag on (i_e, e, f_e) per edge", "Fourier measurement of N parts of V",
         "Z~ string correction"},
        k1));
    for (int v = 0; v < cell.num_vertices; v++) {
        k1.reg.rename_site(k1.q_ids[v], "v" + std::to_string(v) + ".Q");
    }
    KwResult k2 = kw_abelian(std::move(k1.reg), k1.q_ids, cell, Q, m, "e.Q");
    t.rounds.push_back(detail::round_from(
        "KW^Q", {"CX^dag(i_e, e) CX(f_e, e) per edge", "Fourier measurement of V", "Z-string correction"}, k2));
    QuditRegister out = std::move(k2.reg);
    for (int e = 0; e < cell.num_edges(); e++) {
        t.edge_ids.push_back(out.merge_sites(
            k1.edge_ids[e], k2.edge_ids[e], {"e" + std::to_string(e), Role::edge, fs.parent}, fs.pair_to_parent));
    }
    t.state = std::move(out);
    t.shots = 2;
    return t;
}

/// Sequential gauging along the derived series: round j gauges
/// N_j / N_{j-1} inside G / N_{j-1}, where N_0 = 1 < N_1 < ... < N_l = G are
/// the derived-series terms in reverse. The input is a G-symmetric state on
/// vertex sites carrying g.
inline ProtocolTranscript gauge_input_state(
    QuditRegister state, std::vector<int> vertex_ids, const GroupRef &g, const Cellulation &cell, const KwMode &mode,
    std::string protocol = "gauge") {
    DerivedSeries ds = derived_series(*g);
    if (!ds.solvable) {
        throw NonSolvableGroup(
            "group " + g->name() + " is not solvable: perfect core " + detail::perfect_core_name(*g, ds.perfect_core()));
    }
    require_symmetric(state, vertex_ids, *g);
    ProtocolTranscript t;
    t.protocol = std::move(protocol);
    t.group = g;
    t.mode = mode;
    Measurer m(mode);
    int l = ds.derived_length;
    GroupRef cur = g;
    std::vector<int> proj(g->order());
    std::iota(proj.begin(), proj.end(), 0);
    std::vector<FactorSystem> chain;
    std::vector<std::vector<int>> round_edges;
    for (int j = 1; j <= l; j++) {
        const Subgroup &nj = ds.terms[l - j];
        Subgroup image;
        for (int x : nj.members) {
            image.members.push_back(proj[x]);
        }
        std::sort(image.members.begin(), image.members.end());
        image.members.erase(std::unique(image.members.begin(), image.members.end()), image.members.end());
        FactorSystem fs = factor_system_of(*cur, image);
        fs.parent = cur;
        std::string tag = "r" + std::to_string(j);
        for (int v = 0; v < cell.num_vertices; v++) {
            state.rename_site(vertex_ids[v], tag + ".v" + std::to_string(v));
        }
        KwResult k = kw_n_in_g(std::move(state), vertex_ids, cell, fs, m, tag + ".e", j == 1);
        t.rounds.push_back(detail::round_from(
            "KW^{N" + std::to_string(j) + "<G" + std::to_string(j) + "}",
            {"Sigma^-1 Omega CL^dag CR^dag on (i_e, e, f_e) per edge", "Fourier measurement of N parts of V",
             "Z~ string correction"},
            k));
        state = std::move(k.reg);
        vertex_ids = k.q_ids;
        round_edges.push_back(k.edge_ids);
        for (int &x : proj) {
            x = fs.proj[x];
        }
        cur = share(fs.quotient);
        chain.push_back(std::move(fs));
    }
    detail::drop_trivial_sites(state);
    for (int e = 0; e < cell.num_edges(); e++) {
        const FactorSystem &last = chain.back();
        int combined = round_edges.back()[e];
        state.relabel_site(combined, last.pair_to_parent, last.parent);
        for (int j = l - 2; j >= 0; j--) {
            combined = state.merge_sites(
                round_edges[j][e], combined, {"e", Role::edge, chain[j].parent}, chain[j].pair_to_parent);
        }
        state.rename_site(combined, "e" + std::to_string(e));
        t.edge_ids.push_back(combined);
    }
    t.state = std::move(state);
    t.shots = l;
    return t;
}

inline ProtocolTranscript prepare_solvable_double(const GroupRef &g, const Cellulation &cell, const KwMode &mode) {
    QuditRegister r;
    auto vids = detail::plus_sites(r, cell.num_vertices, "v", Role::vertex, g);
    return gauge_input_state(std::move(r), vids, g, cell, mode, "solvable");
}

}  // namespace qdouble

#endif
