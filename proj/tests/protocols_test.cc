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

#include "qdouble/protocols.hpp"

#include <random>

#include "gtest/gtest.h"
#include "qdouble/catalog.hpp"
#include "qdouble/verify.hpp"

using namespace qdouble;

namespace {

double oracle_fidelity(const ProtocolTranscript &t, const Cellulation &cell) {
    QuditRegister o = oracle_double_state(t.group, cell);
    return fidelity(t.state.aligned_to(o), o);
}

std::vector<int> edge_ids_of(const QuditRegister &r, const Cellulation &cell) {
    std::vector<int> ids;
    for (int e = 0; e < cell.num_edges(); e++) {
        ids.push_back(r.find("e" + std::to_string(e)));
    }
    return ids;
}

QuditRegister symmetric_random(const GroupRef &g, int count, std::uint64_t seed) {
    QuditRegister r;
    std::vector<int> ids;
    for (int k = 0; k < count; k++) {
        ids.push_back(r.add_site({"v" + std::to_string(k), Role::vertex, g}));
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    for (Eigen::Index k = 0; k < r.amplitudes().size(); k++) {
        r.amplitudes()(k) = cplx(nd(rng), nd(rng));
    }
    QuditRegister acc = r;
    acc.amplitudes().setZero();
    for (int x = 0; x < g->order(); x++) {
        QuditRegister c = r;
        for (int id : ids) {
            c.apply(left_mult(*g, x), {id});
        }
        acc.amplitudes() += c.amplitudes();
    }
    acc.normalize();
    return acc;
}

}  // namespace

TEST(protocols, abelian_double) {
    GroupRef z2 = share(build_cyclic(2));
    Cellulation sq = square_torus(2, 2);
    ProtocolTranscript t = prepare_abelian_double(z2, sq, KwMode::sample(4));
    ASSERT_EQ(t.shots, 1);
    ASSERT_GE(oracle_fidelity(t, sq), 1 - 1e-9);
    GroupRef z3 = share(build_cyclic(3));
    Cellulation hex = hexagon_torus();
    ProtocolTranscript u = prepare_abelian_double(z3, hex, KwMode::sample(5));
    ASSERT_GE(stabilizer_report(u.state, u.edge_ids, *z3, hex).min_expectation(), 1 - 1e-9);
    ProtocolTranscript trivial = prepare_abelian_double(share(build_cyclic(1)), hex, KwMode::postselect());
    ASSERT_EQ(trivial.shots, 1);
    ASSERT_NEAR(std::abs(trivial.state.amplitudes()(0)), 1, 1e-15);
    ASSERT_THROW(prepare_abelian_double(share(named_group("S3")), hex, KwMode::postselect()), std::invalid_argument);
}

TEST(protocols, metabelian_s3) {
    Cellulation hex = hexagon_torus();
    FactorSystem fs = example_system("S3");
    for (std::uint64_t seed = 0; seed < 3; seed++) {
        ProtocolTranscript t = prepare_metabelian_double(fs, hex, KwMode::sample(seed));
        ASSERT_EQ(t.shots, 2);
        ASSERT_GE(oracle_fidelity(t, hex), 1 - 1e-9);
        ProtocolTranscript s = prepare_solvable_double(fs.parent, hex, KwMode::sample(seed));
        ASSERT_EQ(s.shots, 2);
        ASSERT_GE(fidelity(s.state.aligned_to(t.state), t.state), 1 - 1e-9);
    }
    ASSERT_THROW(prepare_metabelian_double(factor_system_of(*fs.parent, Subgroup{{0}}), hex, KwMode::postselect()),
                 std::invalid_argument);
}

TEST(protocols, solvable_s4_takes_three_shots) {
    GroupRef s4 = share(named_group("S4"));
    Cellulation hex = hexagon_torus();
    ProtocolTranscript t = prepare_solvable_double(s4, hex, KwMode::sample(2));
    ASSERT_EQ(t.shots, 3);
    ASSERT_EQ(t.rounds.size(), 3u);
    ASSERT_GE(oracle_fidelity(t, hex), 1 - 1e-8);
}

TEST(protocols, solvable_abelian_is_one_shot) {
    GroupRef z6 = share(build_cyclic(6));
    Cellulation hex = hexagon_torus();
    ProtocolTranscript a = prepare_abelian_double(z6, hex, KwMode::postselect());
    ProtocolTranscript s = prepare_solvable_double(z6, hex, KwMode::postselect());
    ASSERT_EQ(s.shots, 1);
    ASSERT_GE(fidelity(s.state.aligned_to(a.state), a.state), 1 - 1e-9);
}

TEST(protocols, rejects_non_solvable) {
    GroupRef a5 = share(named_group("A5"));
    try {
        prepare_solvable_double(a5, hexagon_torus(), KwMode::postselect());
        FAIL() << "A5 accepted";
    } catch (const NonSolvableGroup &e) {
        ASSERT_NE(std::string(e.what()).find("A5"), std::string::npos);
    }
}

TEST(protocols, gauging_symmetric_inputs) {
    GroupRef z2 = share(build_cyclic(2));
    Cellulation sq = square_torus(2, 2);
    QuditRegister cat;
    std::vector<int> ids;
    for (int v = 0; v < 4; v++) {
        ids.push_back(cat.add_site({"v" + std::to_string(v), Role::vertex, z2}));
    }
    cat.amplitudes().setZero();
    cat.amplitudes()(0) = cat.amplitudes()(15) = 1 / std::sqrt(2.0);
    ProtocolTranscript t = gauge_input_state(cat, ids, z2, sq, KwMode::sample(1));
    ASSERT_NEAR(std::abs(t.state.amplitudes()(0)), 1, 1e-12);

    GroupRef s3 = share(named_group("S3"));
    Cellulation hex = hexagon_torus();
    for (std::uint64_t seed = 0; seed < 3; seed++) {
        QuditRegister in = symmetric_random(s3, 2, seed);
        ProtocolTranscript g = gauge_input_state(in, in.ids(), s3, hex, KwMode::sample(seed));
        QuditRegister want = kw_exact_g(in, in.ids(), hex, s3);
        ASSERT_GE(fidelity(g.state.aligned_to(want), want), 1 - 1e-9);
    }
    QuditRegister bad = symmetric_random(s3, 2, 9);
    bad.apply(left_mult(*s3, 1), {bad.ids()[0]});
    bad.amplitudes() += symmetric_random(s3, 2, 10).amplitudes();
    ASSERT_THROW(gauge_input_state(bad, bad.ids(), s3, hex, KwMode::postselect()), std::invalid_argument);
}

TEST(protocols, nil2_on_sphere_matches_oracle) {
    for (const char *name : {"D4", "Q8"}) {
        FactorSystem fs = example_system(name);
        for (int n : {2, 3}) {
            Cellulation c = polygon_sphere(n);
            for (std::uint64_t seed = 0; seed < 4; seed++) {
                ProtocolTranscript t = prepare_nil2_double(fs, c, KwMode::sample(seed));
                ASSERT_EQ(t.shots, 1);
                ASSERT_GE(oracle_fidelity(t, c), 1 - 1e-9) << name << " n=" << n << " seed " << seed;
            }
        }
    }
}

TEST(protocols, nil2_syndromes_follow_outcomes) {
    for (const char *name : {"D4", "Q8"}) {
        FactorSystem fs = example_system(name);
        for (Cellulation c : {hexagon_torus(), polygon_sphere(3)}) {
            for (std::uint64_t seed = 0; seed < 5; seed++) {
                ProtocolTranscript t = prepare_nil2_double(fs, c, KwMode::sample(seed));
                const QuditRegister &pre = *t.pre_correction;
                double mismatch = nil2_syndrome_mismatch(pre, edge_ids_of(pre, c), fs, c, t.rounds[0].outcomes);
                ASSERT_LT(mismatch, 1e-9) << name << " seed " << seed;
                ASSERT_GE(stabilizer_report(t.state, t.edge_ids, *fs.parent, c).min_expectation(), 1 - 1e-9);
            }
        }
    }
}

// On a torus the ground space of D(G) is degenerate. The one-shot output is a
// ground state, but in a sector whose overlap with the oracle state is |N|^-2.
TEST(protocols, nil2_torus_sector_overlap) {
    Cellulation hex = hexagon_torus();
    for (const char *name : {"D4", "Q8"}) {
        FactorSystem fs = example_system(name);
        ProtocolTranscript t = prepare_nil2_double(fs, hex, KwMode::postselect());
        ASSERT_GE(stabilizer_report(t.state, t.edge_ids, *fs.parent, hex).min_expectation(), 1 - 1e-9);
        ASSERT_NEAR(oracle_fidelity(t, hex), 0.25, 1e-9) << name;
    }
}

TEST(protocols, nil2_with_trivial_cocycle) {
    FactorSystem fs = with_extension_parent(
        split_product_system(build_cyclic(2), named_group("Z2xZ2")), "Z2xZ2xZ2");
    Cellulation c = polygon_sphere(2);
    ProtocolTranscript t = prepare_nil2_double(fs, c, KwMode::sample(3));
    ASSERT_GE(oracle_fidelity(t, c), 1 - 1e-9);
    ASSERT_THROW(prepare_nil2_double(example_system("S3"), c, KwMode::postselect()), std::invalid_argument);
    ASSERT_THROW(prepare_nil2_double(example_system("D4"), two_vertex_graph(), KwMode::postselect()),
                 std::invalid_argument);
}

TEST(protocols, transcript_json) {
    GroupRef z2 = share(build_cyclic(2));
    ProtocolTranscript t = prepare_abelian_double(z2, square_torus(2, 2), KwMode::sample(7));
    json j = t.to_json();
    ASSERT_EQ(j["protocol"], "abelian");
    ASSERT_EQ(j["shots"], 1);
    ASSERT_EQ(j["mode"], "sample:7");
    ASSERT_EQ(j["rounds"].size(), 1u);
    ASSERT_EQ(j["rounds"][0]["outcomes"].size(), 4u);
}

TEST(protocols, d4_routes_agree_on_sphere) {
    FactorSystem nil2 = example_system("D4");
    GroupRef d4 = share(named_group("D4"));
    FactorSystem meta = factor_system_of(*d4, commutator_subgroup(*d4));
    meta.parent = d4;
    Cellulation c = polygon_sphere(3);
    ProtocolTranscript one = prepare_nil2_double(nil2, c, KwMode::sample(1));
    ProtocolTranscript two = prepare_metabelian_double(meta, c, KwMode::sample(1));
    QuditRegister o = oracle_double_state(d4, c);
    ASSERT_EQ(two.shots, 2);
    ASSERT_GE(fidelity(two.state.aligned_to(o), o), 1 - 1e-9);
    // the two presentations of D4 carry different element labels
    ASSERT_TRUE(is_isomorphic(*one.group, *d4));
    QuditRegister o1 = oracle_double_state(one.group, c);
    ASSERT_GE(fidelity(one.state.aligned_to(o1), o1), 1 - 1e-9);
}
