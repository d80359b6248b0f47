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

#include "qdouble/groups.hpp"

#include "gtest/gtest.h"
#include "qdouble/catalog.hpp"
#include "qdouble/factor_system.hpp"
#include "qdouble/irreps.hpp"

using namespace qdouble;

namespace {

std::vector<int> order_histogram(const FiniteGroup &g) {
    std::vector<int> h;
    for (int a = 0; a < g.order(); a++) {
        h.push_back(g.element_order(a));
    }
    std::sort(h.begin(), h.end());
    return h;
}

}  // namespace

TEST(groups, build_cyclic) {
    ASSERT_EQ(build_cyclic(1).order(), 1);
    auto z2 = build_cyclic(2);
    ASSERT_EQ(z2.mul(1, 1), 0);
    auto z4 = build_cyclic(4);
    int order_two = 0;
    for (int a = 0; a < 4; a++) {
        if (z4.element_order(a) == 2) {
            ASSERT_EQ(a, 2);
            order_two++;
        }
    }
    ASSERT_EQ(order_two, 1);
    ASSERT_THROW(build_cyclic(0), std::invalid_argument);
}

TEST(groups, rejects_bad_tables) {
    ASSERT_THROW(FiniteGroup("bad", 2, {0, 1, 1, 1}), InvariantError);
    ASSERT_THROW(FiniteGroup("bad", 2, {1, 0, 0, 1}), InvariantError);
    // Latin square with identity 0 but not associative.
    std::vector<int> t = {0, 1, 2, 3, 4, 1, 0, 3, 4, 2, 2, 4, 0, 1, 3, 3, 2, 4, 0, 1, 4, 3, 1, 2, 0};
    ASSERT_THROW(FiniteGroup("bad", 5, t), InvariantError);
}

TEST(groups, direct_product) {
    auto v = direct_product(build_cyclic(2), build_cyclic(2));
    ASSERT_EQ(order_histogram(v), (std::vector<int>{1, 2, 2, 2}));
    auto s3 = symmetric_group(3);
    ASSERT_TRUE(is_isomorphic(direct_product(build_cyclic(1), s3), s3));
    auto z6 = direct_product(build_cyclic(2), build_cyclic(3));
    ASSERT_TRUE(z6.is_abelian());
    ASSERT_EQ(order_histogram(z6), (std::vector<int>{1, 2, 3, 3, 6, 6}));
    ASSERT_TRUE(is_isomorphic(z6, build_cyclic(6)));
}

TEST(groups, element_order_histograms) {
    // Frozen from an independent permutation-group computation.
    ASSERT_EQ(order_histogram(named_group("S3")), (std::vector<int>{1, 2, 2, 2, 3, 3}));
    ASSERT_EQ(order_histogram(named_group("D4")), (std::vector<int>{1, 2, 2, 2, 2, 2, 4, 4}));
    ASSERT_EQ(order_histogram(named_group("Q8")), (std::vector<int>{1, 2, 4, 4, 4, 4, 4, 4}));
    ASSERT_EQ(named_group("A4").order(), 12);
    ASSERT_EQ(named_group("S4").order(), 24);
    ASSERT_EQ(named_group("A5").order(), 60);
}

TEST(groups, extension_d4) {
    FactorSystem fs = example_system("D4");
    const FiniteGroup &g = *fs.parent;
    ASSERT_EQ(g.order(), 8);
    ASSERT_FALSE(g.is_abelian());
    ASSERT_EQ(center(g).order(), 2);
    int order_four = 0;
    for (int a = 0; a < 8; a++) {
        order_four += g.element_order(a) == 4;
    }
    ASSERT_EQ(order_four, 2);
    ASSERT_TRUE(is_isomorphic(g, dihedral_group(4)));
    ASSERT_TRUE(is_nil2_extension(fs));
}

TEST(groups, extension_q8) {
    FactorSystem fs = example_system("Q8");
    const FiniteGroup &g = *fs.parent;
    int order_two = 0;
    for (int a = 0; a < 8; a++) {
        order_two += g.element_order(a) == 2;
    }
    ASSERT_EQ(order_two, 1);
    ASSERT_FALSE(is_isomorphic(g, dihedral_group(4)));
}

TEST(groups, extension_s3) {
    FactorSystem fs = example_system("S3");
    ASSERT_TRUE(is_isomorphic(*fs.parent, symmetric_group(3)));
    ASSERT_FALSE(is_nil2_extension(fs));
    ASSERT_TRUE(is_metabelian_extension(fs));
}

TEST(groups, extension_split) {
    auto fs = split_product_system(build_cyclic(3), build_cyclic(4));
    ASSERT_TRUE(is_isomorphic(extension_from_factor_system(fs), build_cyclic(12)));
    ASSERT_TRUE(is_nil2_extension(split_product_system(build_cyclic(1), build_cyclic(1))));
}

TEST(groups, extension_rejects_bad_cocycle) {
    auto fs = split_product_system(build_cyclic(2), build_cyclic(3));
    fs.omega[1][1] = 1;
    try {
        extension_from_factor_system(fs);
        FAIL() << "expected rejection";
    } catch (const InvariantError &e) {
        ASSERT_NE(std::string(e.what()).find("cocycle condition fails at ("), std::string::npos);
    }
}

TEST(groups, factor_system_of_s3) {
    std::vector<std::vector<int>> elems;
    auto s3 = symmetric_group(3);
    auto a3 = commutator_subgroup(s3);
    auto fs = factor_system_of(s3, a3);
    ASSERT_EQ(fs.n_order(), 3);
    ASSERT_EQ(fs.q_order(), 2);
    for (int n = 0; n < 3; n++) {
        ASSERT_EQ(fs.sigma[1][n], fs.normal.inv(n));
    }
    for (auto &row : fs.omega) {
        for (int w : row) {
            ASSERT_EQ(w, 0);
        }
    }
}

TEST(groups, factor_system_of_split) {
    auto g = direct_product(build_cyclic(3), build_cyclic(2));
    Subgroup n{{0, 2, 4}};
    auto fs = factor_system_of(g, n);
    ASSERT_TRUE(is_nil2_extension(fs));
    for (auto &row : fs.omega) {
        for (int w : row) {
            ASSERT_EQ(w, 0);
        }
    }
}

TEST(groups, factor_system_of_rejects_non_normal) {
    auto s3 = symmetric_group(3);
    Subgroup h;
    for (int a = 0; a < 6; a++) {
        if (s3.element_order(a) == 2) {
            h = generate_subgroup(s3, {a});
            break;
        }
    }
    ASSERT_THROW(factor_system_of(s3, h), std::invalid_argument);
}

TEST(groups, factor_system_round_trips) {
    for (const auto &name : catalog_names()) {
        auto g = named_group(name);
        for (const auto &n : normal_subgroups(g)) {
            auto fs = factor_system_of(g, n);
            validate_factor_system(fs);
            ASSERT_TRUE(sigma_composition_holds(fs)) << name;
            ASSERT_TRUE(is_isomorphic(extension_from_factor_system(fs), g)) << name << " N=" << n.order();
            for (int x = 0; x < g.order(); x++) {
                ASSERT_EQ(g.mul(fs.embed[fs.tpart[x]], fs.lift[fs.proj[x]]), x);
            }
            for (int p = 0; p < g.order(); p++) {
                int m = p / fs.q_order(), q = p % fs.q_order();
                ASSERT_EQ(fs.tpart[fs.pair_to_parent[p]], m);
                ASSERT_EQ(fs.proj[fs.pair_to_parent[p]], q);
            }
        }
    }
}

TEST(groups, normal_subgroup_counts) {
    std::map<std::string, int> expected = {
        {"Z2", 2}, {"Z3", 2}, {"Z2xZ2", 5}, {"Z6", 4}, {"S3", 3}, {"D4", 6}, {"Q8", 6}, {"A4", 3}, {"S4", 4}};
    for (auto &[name, count] : expected) {
        ASSERT_EQ(static_cast<int>(normal_subgroups(named_group(name)).size()), count) << name;
    }
}

TEST(groups, commutator_subgroup) {
    ASSERT_TRUE(commutator_subgroup(build_cyclic(6)).is_trivial());
    ASSERT_EQ(commutator_subgroup(symmetric_group(3)).order(), 3);
    ASSERT_EQ(commutator_subgroup(symmetric_group(4)).order(), 12);
    ASSERT_TRUE(is_normal(symmetric_group(4), commutator_subgroup(symmetric_group(4))));
}

TEST(groups, derived_series) {
    std::map<std::string, std::vector<int>> chains = {
        {"Z2", {2, 1}},
        {"Z2xZ2", {4, 1}},
        {"Z6", {6, 1}},
        {"S3", {6, 3, 1}},
        {"D4", {8, 2, 1}},
        {"Q8", {8, 2, 1}},
        {"A4", {12, 4, 1}},
        {"S4", {24, 12, 4, 1}},
    };
    for (auto &[name, chain] : chains) {
        auto g = named_group(name);
        auto s = derived_series(g);
        std::vector<int> orders;
        for (auto &t : s.terms) {
            orders.push_back(t.order());
        }
        ASSERT_EQ(orders, chain) << name;
        ASSERT_TRUE(s.solvable);
        ASSERT_EQ(s.derived_length, static_cast<int>(chain.size()) - 1);
        for (std::size_t j = 1; j < s.terms.size(); j++) {
            ASSERT_TRUE(is_normal(g, s.terms[j]));
            ASSERT_TRUE(is_normal(g, s.terms[j], &s.terms[j - 1]));
            auto step = factor_system_of(subgroup_as_group(g, s.terms[j - 1]), [&] {
                Subgroup inner;
                for (int m : s.terms[j].members) {
                    inner.members.push_back(static_cast<int>(
                        std::lower_bound(s.terms[j - 1].members.begin(), s.terms[j - 1].members.end(), m) -
                        s.terms[j - 1].members.begin()));
                }
                return inner;
            }());
            ASSERT_TRUE(step.quotient.is_abelian()) << name;
        }
        ASSERT_LE(static_cast<double>(s.terms.size() - 1), std::log2(g.order()) + 1e-9);
    }
}

TEST(groups, a5_is_perfect) {
    auto a5 = alternating_group(5);
    auto s = derived_series(a5);
    ASSERT_FALSE(s.solvable);
    ASSERT_EQ(s.perfect_core().order(), 60);
    ASSERT_EQ(perfect_core(a5).order(), 60);
    ASSERT_EQ(central_quotient(a5).order(), 60);
}

TEST(groups, center_and_quotients) {
    ASSERT_EQ(center(build_cyclic(5)).order(), 5);
    ASSERT_EQ(center(dihedral_group(4)).order(), 2);
    ASSERT_TRUE(center(symmetric_group(3)).is_trivial());
    ASSERT_EQ(central_quotient(dihedral_group(4)).order(), 4);
    ASSERT_TRUE(perfect_core(symmetric_group(4)).is_trivial());
}

TEST(groups, abelian_pairing) {
    auto g = named_group("Z2xZ2");
    const auto &s = g.abelian();
    for (int a = 0; a < 4; a++) {
        for (int b = 0; b < 4; b++) {
            ASSERT_EQ(s.character(a, b), s.character(b, a));
            for (int c = 0; c < 4; c++) {
                ASSERT_NEAR(std::abs(s.character(a, g.mul(b, c)) - s.character(a, b) * s.character(a, c)), 0, 1e-15);
                ASSERT_NEAR(std::abs(s.character(g.mul(a, b), c) - s.character(a, c) * s.character(b, c)), 0, 1e-15);
            }
        }
    }
    auto z4 = build_cyclic(4);
    ASSERT_EQ(z4.abelian().character(1, 1), cplx(0, 1));
}

TEST(irreps, abelian) {
    auto t = irrep_table(build_cyclic(2));
    ASSERT_EQ(t.irreps.size(), 2u);
    ASSERT_EQ(t.characters[1][1], cplx(-1));
}

TEST(irreps, catalog_dimensions) {
    std::map<std::string, std::vector<int>> dims = {
        {"S3", {1, 1, 2}}, {"D4", {1, 1, 1, 1, 2}}, {"Q8", {1, 1, 1, 1, 2}},
        {"A4", {1, 1, 1, 3}}, {"S4", {1, 1, 2, 3, 3}}};
    for (auto &[name, want] : dims) {
        auto g = named_group(name);
        auto t = irrep_table(g);
        std::vector<int> got;
        int sum = 0;
        for (auto &r : t.irreps) {
            got.push_back(r.dim);
            sum += r.dim * r.dim;
        }
        ASSERT_EQ(got, want) << name;
        ASSERT_EQ(sum, g.order());
    }
    // A transported copy: D4 as the central extension.
    auto t = irrep_table(*example_system("D4").parent);
    ASSERT_EQ(t.irreps.size(), 5u);
}

TEST(irreps, unsupported) {
    ASSERT_THROW(irrep_table(named_group("A5")), std::domain_error);
    auto t = one_dimensional_irreps(named_group("A5"));
    ASSERT_EQ(t.irreps.size(), 1u);
    validate_irrep_table(named_group("A5"), t);
}

TEST(irreps, dimension_weighted_sum) {
    for (std::string name : {"Z3", "S3", "D4", "Q8", "A4", "S4"}) {
        auto g = named_group(name);
        auto t = irrep_table(g);
        for (int x = 0; x < g.order(); x++) {
            cplx s = 0;
            for (std::size_t mu = 0; mu < t.irreps.size(); mu++) {
                s += static_cast<double>(t.irreps[mu].dim) * t.characters[mu][x];
            }
            s /= static_cast<double>(g.order());
            ASSERT_NEAR(std::abs(s - (x == 0 ? 1.0 : 0.0)), 0, 1e-12) << name;
        }
    }
}

TEST(catalog, json_round_trip) {
    auto g = named_group("S3");
    auto back = group_from_json(group_to_json(g));
    ASSERT_EQ(back.table(), g.table());
    json ext = {{"name", "D4x"},
                {"extension",
                 {{"n", "Z2"}, {"q", "Z2xZ2"}, {"omega", factor_system_to_json(example_system("D4"))["omega"]}}}};
    ASSERT_TRUE(is_isomorphic(group_from_json(ext), dihedral_group(4)));
}
