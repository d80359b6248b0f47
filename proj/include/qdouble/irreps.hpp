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

#ifndef QDOUBLE_IRREPS_HPP
#define QDOUBLE_IRREPS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdouble/factor_system.hpp"
#include "qdouble/groups.hpp"

namespace qdouble {

using Matrix = Eigen::MatrixXcd;

struct Irrep {
    int dim = 1;
    std::vector<Matrix> rho;  // indexed by group element
};

struct IrrepTable {
    std::vector<Irrep> irreps;
    std::vector<std::vector<cplx>> characters;  // [irrep][element]
    bool complete = false;                      // all irreps of the group present
};

namespace detail {

inline void fill_characters(IrrepTable &t) {
    t.characters.clear();
    for (const Irrep &r : t.irreps) {
        std::vector<cplx> chi;
        for (const Matrix &m : r.rho) {
            chi.push_back(m.trace());
        }
        t.characters.push_back(std::move(chi));
    }
}

/// Extends generator images to a homomorphism by breadth-first search over words.
inline Irrep irrep_from_generators(
    const FiniteGroup &g, const std::vector<int> &gens, const std::vector<Matrix> &images) {
    Irrep r;
    r.dim = static_cast<int>(images.front().rows());
    r.rho.assign(g.order(), Matrix());
    std::vector<bool> done(g.order(), false);
    r.rho[0] = Matrix::Identity(r.dim, r.dim);
    done[0] = true;
    std::vector<int> frontier{0};
    for (std::size_t i = 0; i < frontier.size(); i++) {
        int x = frontier[i];
        for (std::size_t k = 0; k < gens.size(); k++) {
            int y = g.mul(x, gens[k]);
            if (!done[y]) {
                done[y] = true;
                r.rho[y] = r.rho[x] * images[k];
                frontier.push_back(y);
            }
        }
    }
    return r;
}

inline Matrix mat2(cplx a, cplx b, cplx c, cplx d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace detail

/// Throws std::logic_error if any invariant fails at the given tolerance.
inline void validate_irrep_table(const FiniteGroup &g, const IrrepTable &t, double tol = 1e-12) {
    int n = g.order();
    int dim_sum = 0;
    for (const Irrep &r : t.irreps) {
        dim_sum += r.dim * r.dim;
        if (static_cast<int>(r.rho.size()) != n) {
            throw std::logic_error("irrep has wrong number of matrices");
        }
        for (int a = 0; a < n; a++) {
            Matrix u = r.rho[a].adjoint() * r.rho[a];
            if ((u - Matrix::Identity(r.dim, r.dim)).cwiseAbs().maxCoeff() > tol) {
                throw std::logic_error("irrep matrix is not unitary");
            }
            for (int b = 0; b < n; b++) {
                if ((r.rho[a] * r.rho[b] - r.rho[g.mul(a, b)]).cwiseAbs().maxCoeff() > tol) {
                    throw std::logic_error("irrep is not a homomorphism");
                }
            }
        }
    }
    if (t.complete && dim_sum != n) {
        throw std::logic_error("irrep dimensions do not square-sum to |G|");
    }
    for (std::size_t i = 0; i < t.characters.size(); i++) {
        for (std::size_t j = 0; j < t.characters.size(); j++) {
            cplx s = 0;
            for (int a = 0; a < n; a++) {
                s += std::conj(t.characters[i][a]) * t.characters[j][a];
            }
            s /= static_cast<double>(n);
            if (std::abs(s - (i == j ? 1.0 : 0.0)) > tol) {
                throw std::logic_error("character orthogonality fails");
            }
        }
    }
}

/// The |G/[G,G]| one-dimensional irreps: canonical characters of the
/// abelianization pulled back to g. For abelian g, irrep a is chi^a.
inline IrrepTable one_dimensional_irreps(const FiniteGroup &g) {
    IrrepTable t;
    if (g.is_abelian()) {
        const AbelianStructure &s = g.abelian();
        for (int a = 0; a < g.order(); a++) {
            Irrep r;
            for (int b = 0; b < g.order(); b++) {
                r.rho.push_back(Matrix::Constant(1, 1, s.character(a, b)));
            }
            t.irreps.push_back(std::move(r));
        }
        t.complete = true;
    } else {
        Quotient ab = quotient(g, commutator_subgroup(g));
        const AbelianStructure &s = ab.group.abelian();
        for (int a = 0; a < ab.group.order(); a++) {
            Irrep r;
            for (int b = 0; b < g.order(); b++) {
                r.rho.push_back(Matrix::Constant(1, 1, s.character(a, ab.proj[b])));
            }
            t.irreps.push_back(std::move(r));
        }
    }
    detail::fill_characters(t);
    return t;
}

namespace detail {

/// Permutation action restricted to the sum-zero subspace, in an orthonormal
/// basis. Irreducible for the full symmetric group on the points.
inline Irrep standard_rep(const std::vector<std::vector<int>> &action) {
    int k = static_cast<int>(action.front().size());
    Eigen::MatrixXd basis(k, k - 1);
    basis.setZero();
    for (int c = 0; c < k - 1; c++) {
        double norm = std::sqrt(static_cast<double>((c + 1) * (c + 2)));
        for (int r = 0; r <= c; r++) {
            basis(r, c) = 1.0 / norm;
        }
        basis(c + 1, c) = -(c + 1) / norm;
    }
    Irrep out;
    out.dim = k - 1;
    for (const auto &p : action) {
        Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; i++) {
            perm(p[i], i) = 1.0;
        }
        out.rho.push_back((basis.transpose() * perm * basis).cast<cplx>());
    }
    return out;
}

inline Irrep twist_by_sign(const Irrep &r, const std::vector<std::vector<int>> &elems) {
    Irrep out = r;
    for (std::size_t x = 0; x < elems.size(); x++) {
        std::vector<int> p = elems[x];
        int sign = 1;
        for (std::size_t i = 0; i < p.size(); i++) {
            for (std::size_t j = i + 1; j < p.size(); j++) {
                if (p[i] > p[j]) {
                    sign = -sign;
                }
            }
        }
        out.rho[x] *= static_cast<double>(sign);
    }
    return out;
}

struct ReferenceIrreps {
    FiniteGroup group;
    std::vector<Irrep> higher;
};

inline std::vector<ReferenceIrreps> reference_irreps() {
    const double h = std::sqrt(3.0) / 2.0;
    const cplx I(0, 1);
    std::vector<ReferenceIrreps> refs;
    auto index_of = [](const std::vector<std::vector<int>> &elems, const std::vector<int> &p) {
        return static_cast<int>(std::lower_bound(elems.begin(), elems.end(), p) - elems.begin());
    };
    {
        std::vector<std::vector<int>> elems;
        FiniteGroup s3 = permutation_group("S3", 3, {{1, 2, 0}, {1, 0, 2}}, &elems);
        refs.push_back(
            {s3,
             {irrep_from_generators(
                 s3, {index_of(elems, {1, 2, 0}), index_of(elems, {1, 0, 2})},
                 {mat2(-0.5, -h, h, -0.5), mat2(1, 0, 0, -1)})}});
    }
    {
        std::vector<std::vector<int>> elems;
        FiniteGroup d4 = permutation_group("D4", 4, {{1, 2, 3, 0}, {0, 3, 2, 1}}, &elems);
        refs.push_back(
            {d4,
             {irrep_from_generators(
                 d4, {index_of(elems, {1, 2, 3, 0}), index_of(elems, {0, 3, 2, 1})},
                 {mat2(0, -1, 1, 0), mat2(1, 0, 0, -1)})}});
    }
    {
        // Q8 as the central extension of Z2^2 by Z2 with omega = a1a2 + a1b2 + b1b2.
        FiniteGroup z2 = build_cyclic(2);
        FactorSystem fs = split_product_system(z2, direct_product(z2, z2));
        for (int x = 0; x < 4; x++) {
            for (int y = 0; y < 4; y++) {
                int a1 = x / 2, b1 = x % 2, a2 = y / 2, b2 = y % 2;
                fs.omega[x][y] = (a1 * a2 + a1 * b2 + b1 * b2) % 2;
            }
        }
        FiniteGroup q8 = extension_from_factor_system(fs, "Q8");
        refs.push_back(
            {q8,
             {irrep_from_generators(
                 q8, {fs.pair_index(0, 2), fs.pair_index(0, 1)}, {mat2(I, 0, 0, -I), mat2(0, 1, -1, 0)})}});
    }
    {
        std::vector<std::vector<int>> elems;
        FiniteGroup a4 = permutation_group("A4", 4, {{1, 2, 0, 3}, {1, 0, 3, 2}}, &elems);
        refs.push_back({a4, {standard_rep(elems)}});
    }
    {
        std::vector<std::vector<int>> elems;
        FiniteGroup s4 = permutation_group("S4", 4, {{1, 2, 3, 0}, {1, 0, 2, 3}}, &elems);
        // action on the three pairings {01|23}, {02|13}, {03|12}
        std::vector<std::vector<int>> on_pairings;
        for (const auto &p : elems) {
            std::vector<int> img(3);
            for (int k = 0; k < 3; k++) {
                int a = p[0], b = p[k + 1];
                int partner = a == 0 ? b : (b == 0 ? a : -1);
                if (partner < 0) {
                    // 0 sits in the other block
                    int c = 0;
                    for (int t = 1; t < 4; t++) {
                        if (t != k + 1) {
                            c = t;
                            break;
                        }
                    }
                    int x = p[c];
                    int y = 6 - p[0] - p[k + 1] - x;
                    partner = x == 0 ? y : x;
                }
                img[k] = partner - 1;
            }
            on_pairings.push_back(img);
        }
        Irrep std3 = standard_rep(elems);
        refs.push_back({s4, {standard_rep(on_pairings), std3, twist_by_sign(std3, elems)}});
    }
    return refs;
}

}  // namespace detail

/// Full irrep table for abelian groups and for groups isomorphic to S3, D4,
/// Q8, A4 or S4. Higher-dimensional irreps live on a reference copy of each
/// group, are transported along an isomorphism and re-validated.
inline IrrepTable irrep_table(const FiniteGroup &g) {
    if (g.is_abelian()) {
        IrrepTable t = one_dimensional_irreps(g);
        validate_irrep_table(g, t);
        return t;
    }
    for (const detail::ReferenceIrreps &ref : detail::reference_irreps()) {
        if (ref.group.order() != g.order()) {
            continue;
        }
        auto phi = find_isomorphism(ref.group, g);
        if (!phi) {
            continue;
        }
        IrrepTable t = one_dimensional_irreps(g);
        for (const Irrep &r : ref.higher) {
            Irrep moved;
            moved.dim = r.dim;
            moved.rho.assign(g.order(), Matrix());
            for (int x = 0; x < g.order(); x++) {
                moved.rho[(*phi)[x]] = r.rho[x];
            }
            t.irreps.push_back(std::move(moved));
        }
        t.complete = true;
        detail::fill_characters(t);
        validate_irrep_table(g, t);
        return t;
    }
    throw std::domain_error("irrep_table: unsupported non-abelian group " + g.name());
}

}  // namespace qdouble

#endif
