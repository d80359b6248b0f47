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

#include "qdouble/feedforward.hpp"

#include <random>

#include "gtest/gtest.h"
#include "qdouble/catalog.hpp"
#include "qdouble/kwmaps.hpp"

using namespace qdouble;

namespace {

QuditRegister plus_sites(const std::string &prefix, int count, const GroupRef &g, Role role) {
    std::vector<SiteSpec> sites;
    for (int k = 0; k < count; k++) {
        sites.push_back({prefix + std::to_string(k), role, g});
    }
    return init_plus(sites);
}

std::vector<int> random_syndrome(const FiniteGroup &a, int count, std::mt19937_64 &rng) {
    std::vector<int> s(count);
    int total = 0;
    for (int k = 0; k + 1 < count; k++) {
        s[k] = static_cast<int>(rng() % a.order());
        total = a.mul(total, s[k]);
    }
    s[count - 1] = a.inv(total);
    return s;
}

}  // namespace

TEST(feedforward, trivial_outcomes_give_empty_plans) {
    GroupRef z3 = share(build_cyclic(3));
    Cellulation c = square_torus(2, 2);
    SyndromeSet ch{SyndromeKind::charge, std::vector<int>(4, 0), z3};
    SyndromeSet fl{SyndromeKind::flux, std::vector<int>(4, 0), z3};
    ASSERT_TRUE(charge_correction(ch, c, spanning_tree(c)).empty());
    ASSERT_TRUE(flux_correction(fl, c, dual_spanning_tree(c)).empty());
}

TEST(feedforward, pair_on_single_edge) {
    GroupRef z2 = share(build_cyclic(2));
    Cellulation c = two_vertex_graph();
    CorrectionPlan p = charge_correction({SyndromeKind::charge, {1, 1}, z2}, c, spanning_tree(c));
    ASSERT_EQ(p.basis, CorrectionBasis::z_type);
    ASSERT_EQ(p.exponent, std::vector<int>({1}));
}

TEST(feedforward, global_constraint) {
    GroupRef z2 = share(build_cyclic(2));
    Cellulation c = square_torus(2, 2);
    SyndromeSet one{SyndromeKind::flux, {0, 1, 0, 0}, z2};
    ASSERT_THROW(flux_correction(one, c, dual_spanning_tree(c)), std::invalid_argument);
    SyndromeSet charge{SyndromeKind::charge, {0, 0, 1, 0}, z2};
    ASSERT_THROW(charge_correction(charge, c, spanning_tree(c)), std::invalid_argument);
    GroupRef s3 = share(named_group("S3"));
    ASSERT_THROW(check_global_constraint({SyndromeKind::charge, {0, 0}, s3}), std::domain_error);
}

TEST(feedforward, boundary_reproduces_syndrome) {
    std::mt19937_64 rng(11);
    for (const char *name : {"Z2", "Z3", "Z6", "Z2xZ2"}) {
        GroupRef a = share(named_group(name));
        for (Cellulation c : {square_torus(2, 3), sheared_torus(4), hexagon_torus()}) {
            for (int trial = 0; trial < 5; trial++) {
                SyndromeSet ch{SyndromeKind::charge, random_syndrome(*a, c.num_vertices, rng), a};
                CorrectionPlan p = charge_correction(ch, c, spanning_tree(c));
                ASSERT_EQ(plan_boundary(*a, c.edges, p.exponent, c.num_vertices), ch.labels) << name;
                SyndromeSet fl{SyndromeKind::flux, random_syndrome(*a, c.num_plaquettes(), rng), a};
                CorrectionPlan q = flux_correction(fl, c, dual_spanning_tree(c));
                ASSERT_EQ(plan_boundary(*a, c.dual, q.exponent, c.num_plaquettes()), fl.labels) << name;
                CorrectionPlan inv = p.inverse();
                for (std::size_t e = 0; e < p.exponent.size(); e++) {
                    ASSERT_EQ(a->mul(p.exponent[e], inv.exponent[e]), 0);
                }
            }
        }
    }
}

TEST(feedforward, only_tree_edges_are_used) {
    GroupRef z3 = share(build_cyclic(3));
    Cellulation c = square_torus(2, 3);
    SpanningTree t = spanning_tree(c);
    std::vector<int> tree = t.tree_edges();
    CorrectionPlan p = charge_correction({SyndromeKind::charge, {1, 2, 0, 1, 1, 1}, z3}, c, t);
    for (int e = 0; e < c.num_edges(); e++) {
        if (std::find(tree.begin(), tree.end(), e) == tree.end()) {
            ASSERT_EQ(p.exponent[e], 0);
        }
    }
}

TEST(feedforward, charge_branch_is_repaired) {
    GroupRef z3 = share(build_cyclic(3));
    Cellulation c = hexagon_torus();
    QuditRegister in = plus_sites("v", c.num_vertices, z3, Role::vertex);
    Measurer post(KwMode::postselect());
    KwResult ref = kw_abelian(in, in.ids(), c, z3, post);
    Measurer forced(KwMode::forced_outcomes({{"v0", 1}, {"v1", 2}}));
    KwResult got = kw_abelian(in, in.ids(), c, z3, forced);
    ASSERT_FALSE(got.corrections[0].empty());
    ASSERT_NEAR(fidelity(got.reg, ref.reg), 1, 1e-9);
}

TEST(feedforward, flux_branch_is_repaired) {
    GroupRef z2 = share(build_cyclic(2));
    Cellulation c = square_torus(2, 2);
    QuditRegister in = plus_sites("p", c.num_plaquettes(), z2, Role::plaquette);
    Measurer post(KwMode::postselect());
    KwResult ref = kw_hat_abelian(in, in.ids(), c, z2, post);
    Measurer forced(KwMode::forced_outcomes({{"p0", 1}, {"p3", 1}}));
    KwResult got = kw_hat_abelian(in, in.ids(), c, z2, forced);
    ASSERT_EQ(got.corrections[0].basis, CorrectionBasis::x_type);
    ASSERT_FALSE(got.corrections[0].empty());
    ASSERT_NEAR(fidelity(got.reg, ref.reg), 1, 1e-9);
}

TEST(feedforward, plan_json) {
    GroupRef z2 = share(build_cyclic(2));
    Cellulation c = two_vertex_graph();
    json j = plan_to_json(charge_correction({SyndromeKind::charge, {1, 1}, z2}, c, spanning_tree(c)));
    ASSERT_EQ(j["basis"], "Z");
    ASSERT_EQ(j["exponents"], json::array({1}));
}
