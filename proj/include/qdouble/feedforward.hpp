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

#ifndef QDOUBLE_FEEDFORWARD_HPP
#define QDOUBLE_FEEDFORWARD_HPP

#include <string>
#include <vector>

#include "json.hpp"
#include "qdouble/cellulation.hpp"
#include "qdouble/groups.hpp"

namespace qdouble {

enum class SyndromeKind { charge, flux };

/// Abelian outcome labels on vertices (charge) or plaquettes (flux).
struct SyndromeSet {
    SyndromeKind kind = SyndromeKind::charge;
    std::vector<int> labels;
    GroupRef group;

    bool trivial() const {
        for (int a : labels) {
            if (a != 0) {
                return false;
            }
        }
        return true;
    }
    int total() const {
        int t = 0;
        for (int a : labels) {
            t = group->mul(t, a);
        }
        return t;
    }
};

enum class CorrectionBasis { z_type, x_type };

/// Per-edge exponents. Z-type: apply Z^{-c_e}; X-type: apply L^{c_e}.
struct CorrectionPlan {
    CorrectionBasis basis = CorrectionBasis::z_type;
    std::vector<int> exponent;
    GroupRef group;

    bool empty() const {
        for (int c : exponent) {
            if (c != 0) {
                return false;
            }
        }
        return true;
    }

    CorrectionPlan inverse() const {
        CorrectionPlan p = *this;
        for (int &c : p.exponent) {
            c = group->inv(c);
        }
        return p;
    }
};

/// Signed sum at each node: +c_e where the arc ends, -c_e where it starts.
inline std::vector<int> plan_boundary(
    const FiniteGroup &A, const std::vector<Arrow> &arcs, const std::vector<int> &exponent, int num_nodes) {
    std::vector<int> b(num_nodes, 0);
    for (std::size_t e = 0; e < arcs.size(); e++) {
        b[arcs[e].f] = A.mul(b[arcs[e].f], exponent[e]);
        b[arcs[e].i] = A.mul(b[arcs[e].i], A.inv(exponent[e]));
    }
    return b;
}

/// Moves every label to the root along tree paths. The returned exponents
/// have boundary equal to the labels.
inline std::vector<int> tree_transport(
    const FiniteGroup &A, const std::vector<Arrow> &arcs, const SpanningTree &tree, const std::vector<int> &labels) {
    std::vector<int> subtotal = labels;
    std::vector<int> exponent(arcs.size(), 0);
    for (auto it = tree.order.rbegin(); it != tree.order.rend(); ++it) {
        int w = *it;
        int e = tree.parent_edge[w];
        if (e < 0) {
            continue;
        }
        int p = tree.parent[w];
        exponent[e] = arcs[e].f == w ? subtotal[w] : A.inv(subtotal[w]);
        subtotal[p] = A.mul(subtotal[p], subtotal[w]);
    }
    return exponent;
}

inline void check_global_constraint(const SyndromeSet &s) {
    if (!s.group->is_abelian()) {
        throw std::domain_error("syndromes must be abelian");
    }
    if (s.total() != 0) {
        throw std::invalid_argument(
            std::string(s.kind == SyndromeKind::charge ? "charges" : "fluxes") +
            " do not multiply to the identity (total " + std::to_string(s.total()) + ")");
    }
}

inline CorrectionPlan charge_correction(const SyndromeSet &s, const Cellulation &cell, const SpanningTree &tree) {
    check_global_constraint(s);
    if (static_cast<int>(s.labels.size()) != cell.num_vertices) {
        throw std::invalid_argument("charge syndrome needs one label per vertex");
    }
    return {CorrectionBasis::z_type, tree_transport(*s.group, cell.edges, tree, s.labels), s.group};
}

inline CorrectionPlan flux_correction(const SyndromeSet &s, const Cellulation &cell, const SpanningTree &dual_tree) {
    check_global_constraint(s);
    if (static_cast<int>(s.labels.size()) != cell.num_plaquettes()) {
        throw std::invalid_argument("flux syndrome needs one label per plaquette");
    }
    return {CorrectionBasis::x_type, tree_transport(*s.group, cell.dual, dual_tree, s.labels), s.group};
}

inline nlohmann::json plan_to_json(const CorrectionPlan &p) {
    return {
        {"basis", p.basis == CorrectionBasis::z_type ? "Z" : "X"},
        {"group", p.group ? p.group->name() : ""},
        {"exponents", p.exponent},
    };
}

}  // namespace qdouble

#endif
