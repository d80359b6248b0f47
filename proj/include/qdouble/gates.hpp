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

#ifndef QDOUBLE_GATES_HPP
#define QDOUBLE_GATES_HPP

#include <cmath>
#include <vector>

#include "qdouble/cellulation.hpp"
#include "qdouble/factor_system.hpp"
#include "qdouble/irreps.hpp"
#include "qdouble/register.hpp"

namespace qdouble {

/// L^g |h> = |g h>
inline LocalOperator left_mult(const FiniteGroup &G, int g) {
    std::vector<int> perm(G.order());
    for (int h = 0; h < G.order(); h++) {
        perm[h] = G.mul(g, h);
    }
    return LocalOperator::permutation({G.order()}, perm);
}

/// R^g |h> = |h g^-1>
inline LocalOperator right_mult(const FiniteGroup &G, int g) {
    std::vector<int> perm(G.order());
    for (int h = 0; h < G.order(); h++) {
        perm[h] = G.mul(h, G.inv(g));
    }
    return LocalOperator::permutation({G.order()}, perm);
}

/// Z^a |b> = chi^a(b) |b> on an abelian site.
inline LocalOperator z_abelian(const FiniteGroup &A, int a) {
    const AbelianStructure &s = A.abelian();
    std::vector<cplx> ph(A.order());
    for (int b = 0; b < A.order(); b++) {
        ph[b] = s.character(a, b);
    }
    return LocalOperator::diagonal({A.order()}, ph);
}

/// CL |g1, g2> = |g1, g1 g2>
inline LocalOperator controlled_left(const FiniteGroup &G) {
    int n = G.order();
    std::vector<int> perm(n * n);
    for (int a = 0; a < n; a++) {
        for (int b = 0; b < n; b++) {
            perm[a * n + b] = a * n + G.mul(a, b);
        }
    }
    return LocalOperator::permutation({n, n}, perm);
}

/// CR |g1, g2> = |g1, g2 g1^-1>
inline LocalOperator controlled_right(const FiniteGroup &G) {
    int n = G.order();
    std::vector<int> perm(n * n);
    for (int a = 0; a < n; a++) {
        for (int b = 0; b < n; b++) {
            perm[a * n + b] = a * n + G.mul(b, G.inv(a));
        }
    }
    return LocalOperator::permutation({n, n}, perm);
}

/// CX |a_v, a_e> = |a_v, a_v a_e>
inline LocalOperator cx_abelian(const FiniteGroup &A) {
    A.abelian();
    return controlled_left(A);
}

/// CZ |a_v, a_e> = chi^{a_v}(a_e) |a_v, a_e>
inline LocalOperator cz_abelian(const FiniteGroup &A) {
    const AbelianStructure &s = A.abelian();
    int n = A.order();
    std::vector<cplx> ph(n * n);
    for (int a = 0; a < n; a++) {
        for (int b = 0; b < n; b++) {
            ph[a * n + b] = s.character(a, b);
        }
    }
    return LocalOperator::diagonal({n, n}, ph);
}

/// F_{ab} = chi^a(b) / sqrt|A|
inline LocalOperator fourier_abelian(const FiniteGroup &A) {
    const AbelianStructure &s = A.abelian();
    int n = A.order();
    Matrix f(n, n);
    for (int a = 0; a < n; a++) {
        for (int b = 0; b < n; b++) {
            f(a, b) = s.character(a, b) / std::sqrt(static_cast<double>(n));
        }
    }
    return LocalOperator::from_matrix({n}, f);
}

/// Z^mu_ij |g> = rho^mu(g)_ij |g>; not unitary in general.
inline LocalOperator z_irrep_component(const Irrep &mu, int i, int j) {
    std::vector<cplx> ph;
    for (const Matrix &m : mu.rho) {
        ph.push_back(m(i, j));
    }
    return LocalOperator::diagonal({static_cast<int>(mu.rho.size())}, ph, false);
}

/// Tr prod_k rho^mu(g_{e_k})^{O_k} along the walk, as a diagonal operator on
/// the distinct edges of the walk (ascending edge order).
struct LoopOperator {
    std::vector<int> edges;
    LocalOperator op;
};

inline LoopOperator loop_z(const Irrep &mu, const std::vector<WalkStep> &loop, const Cellulation &cell) {
    if (loop.empty()) {
        throw std::invalid_argument("empty loop");
    }
    for (std::size_t k = 0; k < loop.size(); k++) {
        const Arrow &a = cell.edges[loop[k].edge];
        const Arrow &b = cell.edges[loop[(k + 1) % loop.size()].edge];
        int end = loop[k].orient > 0 ? a.f : a.i;
        int start = loop[(k + 1) % loop.size()].orient > 0 ? b.i : b.f;
        if (end != start) {
            throw std::invalid_argument("loop is not closed");
        }
    }
    LoopOperator out;
    for (const WalkStep &s : loop) {
        out.edges.push_back(s.edge);
    }
    std::sort(out.edges.begin(), out.edges.end());
    out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
    int n = static_cast<int>(mu.rho.size());
    int k = static_cast<int>(out.edges.size());
    int total = 1;
    for (int t = 0; t < k; t++) {
        total *= n;
    }
    std::vector<cplx> ph(total);
    std::vector<int> digits(k, 0);
    for (int x = 0; x < total; x++) {
        int rem = x;
        for (int t = k - 1; t >= 0; t--) {
            digits[t] = rem % n;
            rem /= n;
        }
        Matrix m = Matrix::Identity(mu.dim, mu.dim);
        for (const WalkStep &s : loop) {
            int t = static_cast<int>(std::lower_bound(out.edges.begin(), out.edges.end(), s.edge) - out.edges.begin());
            const Matrix &r = mu.rho[digits[t]];
            m = s.orient > 0 ? Matrix(m * r) : Matrix(m * r.adjoint());
        }
        ph[x] = m.trace();
    }
    out.op = LocalOperator::diagonal(std::vector<int>(k, n), ph, false);
    return out;
}

/// Sigma |q, n> = |q, sigma^q[n]> on (C[Q], C[N]).
inline LocalOperator sigma_gate(const FactorSystem &fs) {
    int nq = fs.q_order(), nn = fs.n_order();
    std::vector<int> perm(nq * nn);
    for (int q = 0; q < nq; q++) {
        for (int n = 0; n < nn; n++) {
            perm[q * nn + n] = q * nn + fs.sigma[q][n];
        }
    }
    return LocalOperator::permutation({nq, nn}, perm);
}

/// Omega |q1, n, q2> = |q1, n omega(q1, q1^-1 q2)^-1, q2> on (C[Q], C[N], C[Q]).
inline LocalOperator omega_gate(const FactorSystem &fs) {
    const FiniteGroup &N = fs.normal;
    const FiniteGroup &Q = fs.quotient;
    int nq = Q.order(), nn = N.order();
    std::vector<int> perm(nq * nn * nq);
    for (int q1 = 0; q1 < nq; q1++) {
        for (int n = 0; n < nn; n++) {
            for (int q2 = 0; q2 < nq; q2++) {
                int w = fs.omega[q1][Q.mul(Q.inv(q1), q2)];
                perm[(q1 * nn + n) * nq + q2] = (q1 * nn + N.mul(n, N.inv(w))) * nq + q2;
            }
        }
    }
    return LocalOperator::permutation({nq, nn, nq}, perm);
}

/// U^G edge factor CL^dag_{i e} CR^dag_{f e}:
/// |g_i, g_e, g_f> -> |g_i, g_i^-1 g_e g_f, g_f>.
inline LocalOperator ug_edge_factor(const FiniteGroup &G) {
    int n = G.order();
    std::vector<int> perm(n * n * n);
    for (int a = 0; a < n; a++) {
        for (int e = 0; e < n; e++) {
            for (int b = 0; b < n; b++) {
                perm[(a * n + e) * n + b] = (a * n + G.mul(G.mul(G.inv(a), e), b)) * n + b;
            }
        }
    }
    return LocalOperator::permutation({n, n, n}, perm);
}

/// Edge map of U^{N<G} composed after the N-entangler, on (C[G], C[N], C[G])
/// with vertices in the pair basis x = n |Q| + q:
///   n_e -> sigma^{-q_i}[ n_i^-1 n_e n_f omega(q_i, q_i^-1 q_f)^-1 ].
inline int ung_edge_value(const FactorSystem &fs, int xi, int ne, int xf) {
    const FiniteGroup &N = fs.normal;
    const FiniteGroup &Q = fs.quotient;
    int nq = Q.order();
    int ni = xi / nq, qi = xi % nq, nf = xf / nq, qf = xf % nq;
    int m = N.mul(N.mul(N.inv(ni), ne), nf);
    m = N.mul(m, N.inv(fs.omega[qi][Q.mul(Q.inv(qi), qf)]));
    return fs.sigma_inverse(qi, m);
}

inline LocalOperator u_ng_edge_factor(const FactorSystem &fs) {
    int ng = fs.n_order() * fs.q_order(), nn = fs.n_order();
    std::vector<int> perm(ng * nn * ng);
    for (int xi = 0; xi < ng; xi++) {
        for (int ne = 0; ne < nn; ne++) {
            for (int xf = 0; xf < ng; xf++) {
                perm[(xi * nn + ne) * ng + xf] = (xi * nn + ung_edge_value(fs, xi, ne, xf)) * ng + xf;
            }
        }
    }
    return LocalOperator::permutation({ng, nn, ng}, perm);
}

/// Dressed character Z~^nu |q_i, n_e, q_f> = chi^nu(sigma^{q_i}[n_e] omega(q_i, q_i^-1 q_f)) on
/// (C[Q], C[N], C[Q]); requires abelian N.
inline LocalOperator z_tilde(const FactorSystem &fs, int nu) {
    const FiniteGroup &N = fs.normal;
    const FiniteGroup &Q = fs.quotient;
    const AbelianStructure &s = N.abelian();
    int nq = Q.order(), nn = N.order();
    std::vector<cplx> ph(nq * nn * nq);
    for (int qi = 0; qi < nq; qi++) {
        for (int n = 0; n < nn; n++) {
            for (int qf = 0; qf < nq; qf++) {
                int m = N.mul(fs.sigma[qi][n], fs.omega[qi][Q.mul(Q.inv(qi), qf)]);
                ph[(qi * nn + n) * nq + qf] = s.character(nu, m);
            }
        }
    }
    return LocalOperator::diagonal({nq, nn, nq}, ph);
}

/// Dense matrix of a k-site operator embedded into a larger ordered site list.
/// `targets` are positions into `dims`.
inline Matrix embed_operator(const LocalOperator &op, const std::vector<int> &targets, const std::vector<int> &dims) {
    QuditRegister scratch;
    std::vector<int> ids;
    for (int d : dims) {
        ids.push_back(scratch.add_site({"s", Role::edge, share(build_cyclic(d))}));
    }
    int total = static_cast<int>(scratch.amplitudes().size());
    Matrix m(total, total);
    std::vector<int> tids;
    for (int t : targets) {
        tids.push_back(ids[t]);
    }
    for (int col = 0; col < total; col++) {
        scratch.amplitudes().setZero();
        scratch.amplitudes()(col) = 1.0;
        QuditRegister r = scratch;
        r.apply(op, tids);
        m.col(col) = r.amplitudes();
    }
    return m;
}

}  // namespace qdouble

#endif
