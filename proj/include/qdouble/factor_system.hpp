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

#ifndef QDOUBLE_FACTOR_SYSTEM_HPP
#define QDOUBLE_FACTOR_SYSTEM_HPP

#include <string>
#include <vector>

#include "qdouble/groups.hpp"

namespace qdouble {

/// Extension data 1 -> N -> G -> Q -> 1.
///
/// sigma[q][n] is the automorphism sigma^q applied to n and omega[q1][q2] the
/// 2-cocycle. The parent tables relate the pair basis (n, q) to elements of a
/// concrete group G = iota(n) s(q):
///   lift[q]   = s(q)            embed[n] = iota(n)
///   proj[g]   = pi(g)           tpart[g] = t(g)
///   pair_to_parent[n * |Q| + q] = iota(n) s(q)
struct FactorSystem {
    FiniteGroup normal;
    FiniteGroup quotient;
    std::vector<std::vector<int>> sigma;
    std::vector<std::vector<int>> omega;

    GroupRef parent;
    std::vector<int> lift;
    std::vector<int> embed;
    std::vector<int> proj;
    std::vector<int> tpart;
    std::vector<int> pair_to_parent;

    int n_order() const {
        return normal.order();
    }
    int q_order() const {
        return quotient.order();
    }
    bool has_parent() const {
        return parent != nullptr;
    }
    int pair_index(int n, int q) const {
        return n * quotient.order() + q;
    }
    int sigma_inverse(int q, int n) const {
        for (int m = 0; m < normal.order(); m++) {
            if (sigma[q][m] == n) {
                return m;
            }
        }
        throw InvariantError("sigma is not a bijection");
    }
};

/// Throws InvariantError naming the first violated invariant (the offending
/// triple for the cocycle condition).
inline void validate_factor_system(const FactorSystem &fs) {
    const FiniteGroup &N = fs.normal;
    const FiniteGroup &Q = fs.quotient;
    int nn = N.order(), nq = Q.order();
    if (static_cast<int>(fs.sigma.size()) != nq || static_cast<int>(fs.omega.size()) != nq) {
        throw InvariantError("factor system tables do not match |Q|");
    }
    for (int q = 0; q < nq; q++) {
        if (static_cast<int>(fs.sigma[q].size()) != nn || static_cast<int>(fs.omega[q].size()) != nq) {
            throw InvariantError("factor system tables do not match |N| or |Q|");
        }
        std::vector<bool> hit(nn, false);
        for (int n = 0; n < nn; n++) {
            int m = fs.sigma[q][n];
            if (m < 0 || m >= nn || hit[m]) {
                throw InvariantError("sigma^" + std::to_string(q) + " is not a permutation of N");
            }
            hit[m] = true;
        }
        for (int a = 0; a < nn; a++) {
            for (int b = 0; b < nn; b++) {
                if (fs.sigma[q][N.mul(a, b)] != N.mul(fs.sigma[q][a], fs.sigma[q][b])) {
                    throw InvariantError("sigma^" + std::to_string(q) + " is not an automorphism of N");
                }
            }
        }
        for (int q2 = 0; q2 < nq; q2++) {
            int w = fs.omega[q][q2];
            if (w < 0 || w >= nn) {
                throw InvariantError("omega value out of range");
            }
        }
    }
    for (int n = 0; n < nn; n++) {
        if (fs.sigma[0][n] != n) {
            throw InvariantError("sigma of the identity is not the identity automorphism");
        }
    }
    for (int q = 0; q < nq; q++) {
        if (fs.omega[0][q] != 0 || fs.omega[q][0] != 0) {
            throw InvariantError("omega is not counital at q=" + std::to_string(q));
        }
    }
    for (int q1 = 0; q1 < nq; q1++) {
        for (int q2 = 0; q2 < nq; q2++) {
            for (int q3 = 0; q3 < nq; q3++) {
                int lhs = N.mul(fs.sigma[q1][fs.omega[q2][q3]], fs.omega[q1][Q.mul(q2, q3)]);
                int rhs = N.mul(fs.omega[q1][q2], fs.omega[Q.mul(q1, q2)][q3]);
                if (lhs != rhs) {
                    throw InvariantError(
                        "cocycle condition fails at (" + std::to_string(q1) + "," + std::to_string(q2) + "," +
                        std::to_string(q3) + ")");
                }
            }
        }
    }
}

/// sigma^{q1} o sigma^{q2} = c^{omega(q1,q2)} o sigma^{q1 q2} on all of N.
inline bool sigma_composition_holds(const FactorSystem &fs) {
    const FiniteGroup &N = fs.normal;
    const FiniteGroup &Q = fs.quotient;
    for (int q1 = 0; q1 < Q.order(); q1++) {
        for (int q2 = 0; q2 < Q.order(); q2++) {
            int w = fs.omega[q1][q2];
            for (int n = 0; n < N.order(); n++) {
                if (fs.sigma[q1][fs.sigma[q2][n]] != N.conj(w, fs.sigma[Q.mul(q1, q2)][n])) {
                    return false;
                }
            }
        }
    }
    return true;
}

/// G built on pairs (n, q) with index n * |Q| + q and product
/// (n1, q1)(n2, q2) = (n1 sigma^{q1}[n2] omega(q1, q2), q1 q2).
inline FiniteGroup extension_from_factor_system(const FactorSystem &fs, std::string name = {}) {
    validate_factor_system(fs);
    const FiniteGroup &N = fs.normal;
    const FiniteGroup &Q = fs.quotient;
    int nq = Q.order(), order = N.order() * nq;
    std::vector<int> mult(static_cast<std::size_t>(order) * order);
    for (int x = 0; x < order; x++) {
        int n1 = x / nq, q1 = x % nq;
        for (int y = 0; y < order; y++) {
            int n2 = y / nq, q2 = y % nq;
            int n = N.mul(N.mul(n1, fs.sigma[q1][n2]), fs.omega[q1][q2]);
            mult[static_cast<std::size_t>(x) * order + y] = n * nq + Q.mul(q1, q2);
        }
    }
    if (name.empty()) {
        name = N.name() + "." + Q.name();
    }
    return FiniteGroup(std::move(name), order, std::move(mult));
}

/// Returns fs with parent = extension_from_factor_system(fs) and all tables.
inline FactorSystem with_extension_parent(FactorSystem fs, std::string name = {}) {
    FiniteGroup g = extension_from_factor_system(fs, std::move(name));
    int nn = fs.normal.order(), nq = fs.quotient.order();
    fs.lift.resize(nq);
    fs.embed.resize(nn);
    fs.proj.resize(nn * nq);
    fs.tpart.resize(nn * nq);
    fs.pair_to_parent.resize(nn * nq);
    for (int q = 0; q < nq; q++) {
        fs.lift[q] = q;
    }
    for (int n = 0; n < nn; n++) {
        fs.embed[n] = n * nq;
    }
    for (int x = 0; x < nn * nq; x++) {
        fs.proj[x] = x % nq;
        fs.tpart[x] = x / nq;
        fs.pair_to_parent[x] = x;
    }
    fs.parent = share(std::move(g));
    return fs;
}

/// Factor system of g relative to a normal subgroup. N is indexed by the
/// sorted member list, Q by cosets ordered by lowest element, and the lift of
/// each coset is its lowest-indexed element.
inline FactorSystem factor_system_of(const FiniteGroup &g, const Subgroup &n) {
    if (!is_subgroup(g, n)) {
        throw std::invalid_argument("factor_system_of: not a subgroup");
    }
    if (!is_normal(g, n)) {
        throw std::invalid_argument("factor_system_of: subgroup is not normal");
    }
    FactorSystem fs;
    fs.normal = subgroup_as_group(g, n, g.name() + ".N" + std::to_string(n.order()));
    Quotient q = quotient(g, n, g.name() + "/N" + std::to_string(n.order()));
    fs.quotient = q.group;
    fs.lift = q.lift;
    fs.proj = q.proj;
    fs.embed = n.members;
    int nn = fs.normal.order(), nq = fs.quotient.order();
    std::vector<int> embed_inv(g.order(), -1);
    for (int i = 0; i < nn; i++) {
        embed_inv[n.members[i]] = i;
    }
    fs.sigma.assign(nq, std::vector<int>(nn));
    fs.omega.assign(nq, std::vector<int>(nq));
    for (int a = 0; a < nq; a++) {
        for (int m = 0; m < nn; m++) {
            fs.sigma[a][m] = embed_inv[g.conj(fs.lift[a], fs.embed[m])];
        }
        for (int b = 0; b < nq; b++) {
            int w = g.mul(g.mul(fs.lift[a], fs.lift[b]), g.inv(fs.lift[fs.quotient.mul(a, b)]));
            fs.omega[a][b] = embed_inv[w];
        }
    }
    fs.tpart.resize(g.order());
    for (int x = 0; x < g.order(); x++) {
        fs.tpart[x] = embed_inv[g.mul(x, g.inv(fs.lift[fs.proj[x]]))];
    }
    fs.pair_to_parent.resize(nn * nq);
    for (int m = 0; m < nn; m++) {
        for (int a = 0; a < nq; a++) {
            fs.pair_to_parent[m * nq + a] = g.mul(fs.embed[m], fs.lift[a]);
        }
    }
    fs.parent = share(g);
    validate_factor_system(fs);
    return fs;
}

inline bool is_nil2_extension(const FactorSystem &fs) {
    if (!fs.normal.is_abelian() || !fs.quotient.is_abelian()) {
        return false;
    }
    for (const auto &row : fs.sigma) {
        for (int n = 0; n < static_cast<int>(row.size()); n++) {
            if (row[n] != n) {
                return false;
            }
        }
    }
    return true;
}

inline bool is_metabelian_extension(const FactorSystem &fs) {
    return fs.normal.is_abelian() && fs.quotient.is_abelian();
}

/// Product N x Q with trivial action and cocycle.
inline FactorSystem split_product_system(const FiniteGroup &n, const FiniteGroup &q) {
    FactorSystem fs;
    fs.normal = n;
    fs.quotient = q;
    fs.sigma.assign(q.order(), std::vector<int>(n.order()));
    for (auto &row : fs.sigma) {
        std::iota(row.begin(), row.end(), 0);
    }
    fs.omega.assign(q.order(), std::vector<int>(q.order(), 0));
    return fs;
}

}  // namespace qdouble

#endif
