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

#include "qdouble/kwmaps.hpp"

#include <random>

#include "gtest/gtest.h"
#include "qdouble/catalog.hpp"
#include "qdouble/verify.hpp"

using namespace qdouble;

namespace {

QuditRegister sites(const std::string &prefix, int count, const GroupRef &g, Role role, bool plus = true) {
    std::vector<SiteSpec> s;
    for (int k = 0; k < count; k++) {
        s.push_back({prefix + std::to_string(k), role, g});
    }
    return plus ? init_plus(s) : init_identity(s);
}

QuditRegister random_state(const std::string &prefix, int count, const GroupRef &g, std::uint64_t seed) {
    QuditRegister r = sites(prefix, count, g, Role::vertex);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    for (Eigen::Index k = 0; k < r.amplitudes().size(); k++) {
        r.amplitudes()(k) = cplx(nd(rng), nd(rng));
    }
    r.normalize();
    return r;
}

QuditRegister symmetrized(const QuditRegister &r, const GroupRef &g) {
    QuditRegister acc = r;
    acc.amplitudes().setZero();
    for (int x = 0; x < g->order(); x++) {
        QuditRegister c = r;
        for (int id : r.ids()) {
            c.apply(left_mult(*g, x), {id});
        }
        acc.amplitudes() += c.amplitudes();
    }
    acc.normalize();
    return acc;
}

QuditRegister basis_state(const std::vector<int> &labels, const GroupRef &g) {
    QuditRegister r;
    for (std::size_t k = 0; k < labels.size(); k++) {
        r.add_site({"v" + std::to_string(k), Role::vertex, g}, false, labels[k]);
    }
    return r;
}

}  // namespace

TEST(kwmaps, toric_code_on_square) {
    GroupRef z2 = share(build_cyclic(2));
    Cellulation c = square_torus(2, 2);
    QuditRegister in = sites("v", 4, z2, Role::vertex);
    Measurer m(KwMode::postselect());
    KwResult r = kw_abelian(in, in.ids(), c, z2, m);
    ASSERT_EQ(r.reg.num_sites(), 8);
    ASSERT_TRUE(r.corrections[0].empty());
    StabilizerReport rep = stabilizer_report(r.reg, r.edge_ids, *z2, c);
    ASSERT_GE(rep.min_expectation(), 1 - 1e-9);
    ASSERT_NEAR(fidelity(r.reg, oracle_double_state(z2, c)), 1, 1e-9);
}

TEST(kwmaps, trivial_group) {
    GroupRef z1 = share(build_cyclic(1));
    Cellulation c = hexagon_torus();
    QuditRegister in = sites("v", 2, z1, Role::vertex);
    Measurer m(KwMode::postselect());
    KwResult r = kw_abelian(in, in.ids(), c, z1, m);
    ASSERT_EQ(r.reg.amplitudes().size(), 1);
    ASSERT_NEAR(std::abs(r.reg.amplitudes()(0)), 1, 1e-15);
    QuditRegister p = sites("p", 1, z1, Role::plaquette);
    Measurer m2(KwMode::postselect());
    KwResult h = kw_hat_abelian(p, p.ids(), c, z1, m2);
    ASSERT_NEAR(std::abs(h.reg.amplitudes()(0)), 1, 1e-15);
}

TEST(kwmaps, sampled_runs_match_postselection) {
    GroupRef z2 = share(build_cyclic(2));
    Cellulation c = square_torus(2, 2);
    QuditRegister in = sites("v", 4, z2, Role::vertex);
    Measurer post(KwMode::postselect());
    KwResult ref = kw_abelian(in, in.ids(), c, z2, post);
    int nontrivial = 0;
    for (std::uint64_t seed = 0; seed < 20; seed++) {
        Measurer m(KwMode::sample(seed));
        KwResult r = kw_abelian(in, in.ids(), c, z2, m);
        nontrivial += r.corrections[0].empty() ? 0 : 1;
        ASSERT_GE(fidelity(r.reg, ref.reg), 1 - 1e-9) << "seed " << seed;
    }
    ASSERT_GT(nontrivial, 0);
}

TEST(kwmaps, rejects_asymmetric_input) {
    GroupRef z2 = share(build_cyclic(2));
    Cellulation c = square_torus(2, 2);
    QuditRegister in = basis_state({1, 0, 0, 0}, z2);
    Measurer m(KwMode::sample(1));
    ASSERT_THROW(kw_abelian(in, in.ids(), c, z2, m), std::invalid_argument);
    GroupRef s3 = share(named_group("S3"));
    QuditRegister v = sites("v", 2, s3, Role::vertex);
    ASSERT_THROW(kw_abelian(v, v.ids(), hexagon_torus(), s3, m), std::domain_error);
}

TEST(kwmaps, exact_map_examples) {
    GroupRef s3 = share(named_group("S3"));
    Cellulation edge = two_vertex_graph();
    for (int a = 0; a < 6; a++) {
        for (int b = 0; b < 6; b++) {
            QuditRegister in = basis_state({a, b}, s3);
            QuditRegister out = kw_exact_g(in, in.ids(), edge, s3);
            ASSERT_EQ(out.amplitudes()(s3->mul(s3->inv(a), b)), cplx(1));
        }
    }
    Cellulation hex = hexagon_torus();
    for (int g = 0; g < 6; g++) {
        QuditRegister in = basis_state({g, g}, s3);
        QuditRegister out = kw_exact_g(in, in.ids(), hex, s3);
        ASSERT_EQ(out.amplitudes()(0), cplx(1));
    }
    QuditRegister plus = sites("v", 2, s3, Role::vertex);
    ASSERT_NEAR(fidelity(kw_exact_g(plus, plus.ids(), hex, s3), oracle_double_state(s3, hex)), 1, 1e-12);
}

TEST(kwmaps, entangler_matches_exact_map) {
    for (const char *name : {"S3", "Z2xZ2", "D4"}) {
        GroupRef g = share(named_group(name));
        Cellulation hex = hexagon_torus();
        QuditRegister in = symmetrized(random_state("v", 2, g, 5), g);
        Measurer m(KwMode::postselect());
        KwResult r = kw_entangler(in, in.ids(), hex, g, m);
        ASSERT_NEAR(fidelity(r.reg, kw_exact_g(in, in.ids(), hex, g)), 1, 1e-10) << name;
    }
}

TEST(kwmaps, two_step_gauging_of_s3) {
    FactorSystem fs = example_system("S3");
    GroupRef s3 = fs.parent;
    GroupRef q = share(fs.quotient);
    Cellulation hex = hexagon_torus();
    for (std::uint64_t seed = 1; seed <= 3; seed++) {
        QuditRegister in = symmetrized(random_state("v", 2, s3, seed), s3);
        Measurer m(KwMode::postselect());
        KwResult n = kw_n_in_g(in, in.ids(), hex, fs, m, "n");
        KwResult qr = kw_abelian(n.reg, n.q_ids, hex, q, m, "q");
        QuditRegister out = qr.reg;
        for (int e = 0; e < hex.num_edges(); e++) {
            int id = out.merge_sites(n.edge_ids[e], qr.edge_ids[e], {"e" + std::to_string(e), Role::edge, s3},
                                     fs.pair_to_parent);
            (void)id;
        }
        QuditRegister want = kw_exact_g(in, in.ids(), hex, s3);
        ASSERT_NEAR(fidelity(out.aligned_to(want), want), 1, 1e-10) << "seed " << seed;
    }
}

TEST(kwmaps, n_in_g_on_basis_states) {
    FactorSystem fs = example_system("D4");
    GroupRef g = fs.parent;
    Cellulation hex = hexagon_torus();
    for (int a = 0; a < g->order(); a++) {
        for (int b = 0; b < g->order(); b += 3) {
            QuditRegister in = basis_state({a, b}, g);
            Measurer m(KwMode::postselect());
            KwResult r = kw_n_in_g(in, in.ids(), hex, fs, m, "e", false);
            QuditRegister want;
            for (int e = 0; e < hex.num_edges(); e++) {
                const Arrow &arc = hex.edges[e];
                int gi = arc.i == 0 ? a : b, gf = arc.f == 0 ? a : b;
                want.add_site({"e" + std::to_string(e), Role::edge, share(fs.normal)}, false,
                              fs.tpart[g->mul(g->inv(gi), gf)]);
            }
            want.add_site({"v0.Q", Role::vertex, share(fs.quotient)}, false, fs.proj[a]);
            want.add_site({"v1.Q", Role::vertex, share(fs.quotient)}, false, fs.proj[b]);
            ASSERT_NEAR(fidelity(r.reg.aligned_to(want), want), 1, 1e-12) << a << " " << b;
        }
    }
}

TEST(kwmaps, trivial_factor_system) {
    GroupRef z3 = share(build_cyclic(3));
    FactorSystem fs = with_extension_parent(split_product_system(build_cyclic(3), build_cyclic(2)), "Z3xZ2");
    Cellulation hex = hexagon_torus();
    // v0 in |+>_N |1>_Q, v1 in |+>_N |q=1>_Q
    QuditRegister in;
    for (int v = 0; v < 2; v++) {
        Vector local = Vector::Zero(6);
        for (int n = 0; n < 3; n++) {
            local(fs.pair_to_parent[fs.pair_index(n, v)]) = 1 / std::sqrt(3.0);
        }
        in.add_site_state({"v" + std::to_string(v), Role::vertex, fs.parent}, local);
    }
    Measurer m(KwMode::postselect());
    KwResult r = kw_n_in_g(in, in.ids(), hex, fs, m, "e", false);
    QuditRegister nv = sites("w", 2, z3, Role::vertex);
    Measurer m2(KwMode::postselect());
    KwResult a = kw_abelian(nv, nv.ids(), hex, z3, m2);
    QuditRegister want = a.reg;
    want.add_site({"v0.Q", Role::vertex, share(fs.quotient)}, false, 0);
    want.add_site({"v1.Q", Role::vertex, share(fs.quotient)}, false, 1);
    ASSERT_NEAR(fidelity(r.reg.aligned_to(want), want), 1, 1e-12);
}

TEST(kwmaps, measured_n_in_g_needs_abelian_normal_subgroup) {
    GroupRef s4 = share(named_group("S4"));
    FactorSystem fs = factor_system_of(*s4, commutator_subgroup(*s4));
    fs.parent = s4;
    QuditRegister in = sites("v", 2, s4, Role::vertex);
    Measurer m(KwMode::sample(3));
    ASSERT_THROW(kw_n_in_g(in, in.ids(), hexagon_torus(), fs, m), std::domain_error);
}

TEST(kwmaps, hat_is_fourier_conjugate_on_dual_graph) {
    for (const char *name : {"Z2", "Z3"}) {
        GroupRef a = share(named_group(name));
        Cellulation c = sheared_torus(3);
        Cellulation dual = directed_graph(c.num_plaquettes(), c.dual);
        LocalOperator f = fourier_abelian(*a);
        for (std::uint64_t seed = 0; seed < 4; seed++) {
            QuditRegister in = random_state("p", c.num_plaquettes(), a, seed);
            for (int k = 0; k < in.num_sites(); k++) {
                in.rename_site(in.ids()[k], "p" + std::to_string(k));
            }
            Measurer m1(KwMode::linear()), m2(KwMode::linear());
            KwResult hat = kw_hat_abelian(in, in.ids(), c, a, m1, "e", false);
            KwResult kw = kw_abelian(in, in.ids(), dual, a, m2, "e", false);
            QuditRegister conj = kw.reg;
            for (int id : kw.edge_ids) {
                conj.apply(f, {id});
            }
            ASSERT_LT((hat.reg.amplitudes() - conj.amplitudes()).cwiseAbs().maxCoeff(), 1e-10) << name;
        }
    }
}

TEST(kwmaps, hat_output_is_a_double_ground_state) {
    GroupRef z2 = share(build_cyclic(2));
    Cellulation c = square_torus(2, 2);
    QuditRegister in = sites("p", 4, z2, Role::plaquette);
    Measurer m(KwMode::sample(9));
    KwResult r = kw_hat_abelian(in, in.ids(), c, z2, m);
    ASSERT_GE(stabilizer_report(r.reg, r.edge_ids, *z2, c).min_expectation(), 1 - 1e-9);
}
