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

#ifndef QDOUBLE_GROUPS_HPP
#define QDOUBLE_GROUPS_HPP

#include <algorithm>
#include <complex>
#include <cstdint>
#include <deque>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdouble {

using cplx = std::complex<double>;

/// Raised when a group, factor system or cellulation violates its invariants.
struct InvariantError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Coordinates of an abelian group as Z_{n_1} x ... x Z_{n_k}.
///
/// Element `a` has coordinates coords[a]; the canonical character pairing is
/// chi^a(b) = exp(2 pi i sum_k a_k b_k / n_k). The pairing is symmetric and
/// a -> chi^a is a group isomorphism onto the dual group.
struct AbelianStructure {
    std::vector<int> factors;
    std::vector<int> generators;
    std::vector<std::vector<int>> coords;
    std::vector<int> by_coords;  // mixed-radix index -> element
    int lcm = 1;

    int element_from(const std::vector<int> &c) const {
        std::size_t idx = 0;
        for (std::size_t k = 0; k < factors.size(); k++) {
            idx = idx * factors[k] + static_cast<std::size_t>(((c[k] % factors[k]) + factors[k]) % factors[k]);
        }
        return by_coords[idx];
    }

    /// Exponent k such that chi^a(b) = exp(2 pi i k / lcm).
    int pairing_exponent(int a, int b) const {
        long long k = 0;
        for (std::size_t i = 0; i < factors.size(); i++) {
            k += static_cast<long long>(coords[a][i]) * coords[b][i] * (lcm / factors[i]);
        }
        return static_cast<int>(k % lcm);
    }

    cplx character(int a, int b) const {
        int k = pairing_exponent(a, b);
        if (k == 0) {
            return 1.0;
        }
        if (2 * k == lcm) {
            return -1.0;
        }
        if (4 * k == lcm) {
            return cplx(0, 1);
        }
        if (4 * k == 3 * lcm) {
            return cplx(0, -1);
        }
        double angle = 2.0 * std::numbers::pi * k / lcm;
        return {std::cos(angle), std::sin(angle)};
    }
};

/// A finite group stored as a dense multiplication table.
///
/// Elements are indices 0..order-1 and index 0 is the identity. The
/// constructor checks closure, the unit, inverses and associativity
/// exhaustively, so every instance is a valid group.
class FiniteGroup {
   public:
    FiniteGroup() : FiniteGroup("Z1", 1, {0}) {
    }

    FiniteGroup(std::string name, int order, std::vector<int> mult)
        : name_(std::move(name)), order_(order), mult_(std::move(mult)) {
        validate();
    }

    const std::string &name() const {
        return name_;
    }
    int order() const {
        return order_;
    }
    int mul(int a, int b) const {
        return mult_[static_cast<std::size_t>(a) * order_ + b];
    }
    int inv(int a) const {
        return inv_[a];
    }
    /// g h g^-1
    int conj(int g, int h) const {
        return mul(mul(g, h), inv(g));
    }
    /// g h g^-1 h^-1
    int commutator(int g, int h) const {
        return mul(mul(g, h), mul(inv(g), inv(h)));
    }
    int power(int a, int k) const {
        int r = 0;
        if (k < 0) {
            a = inv(a);
            k = -k;
        }
        for (int i = 0; i < k; i++) {
            r = mul(r, a);
        }
        return r;
    }
    int element_order(int a) const {
        int k = 1;
        for (int x = a; x != 0; x = mul(x, a)) {
            k++;
        }
        return k;
    }
    bool is_abelian() const {
        return abelian_ != nullptr;
    }
    const AbelianStructure &abelian() const {
        if (!abelian_) {
            throw std::domain_error("group " + name_ + " is not abelian");
        }
        return *abelian_;
    }
    const std::vector<int> &table() const {
        return mult_;
    }

    FiniteGroup renamed(std::string name) const {
        FiniteGroup g = *this;
        g.name_ = std::move(name);
        return g;
    }

   private:
    void validate() {
        if (order_ < 1) {
            throw InvariantError("group order must be positive");
        }
        std::size_t n = static_cast<std::size_t>(order_);
        if (mult_.size() != n * n) {
            throw InvariantError("multiplication table of " + name_ + " has wrong size");
        }
        for (int v : mult_) {
            if (v < 0 || v >= order_) {
                throw InvariantError("multiplication table of " + name_ + " has an entry out of range");
            }
        }
        for (int a = 0; a < order_; a++) {
            if (mul(0, a) != a || mul(a, 0) != a) {
                throw InvariantError("element 0 of " + name_ + " is not a two-sided identity");
            }
        }
        inv_.assign(n, -1);
        for (int a = 0; a < order_; a++) {
            std::vector<bool> row(n, false), col(n, false);
            for (int b = 0; b < order_; b++) {
                if (row[mul(a, b)] || col[mul(b, a)]) {
                    throw InvariantError("multiplication table of " + name_ + " is not a Latin square");
                }
                row[mul(a, b)] = true;
                col[mul(b, a)] = true;
                if (mul(a, b) == 0) {
                    inv_[a] = b;
                }
            }
            if (mul(inv_[a], a) != 0) {
                throw InvariantError("left and right inverses differ in " + name_);
            }
        }
        for (int a = 0; a < order_; a++) {
            for (int b = 0; b < order_; b++) {
                int ab = mul(a, b);
                for (int c = 0; c < order_; c++) {
                    if (mul(ab, c) != mul(a, mul(b, c))) {
                        throw InvariantError(
                            "multiplication of " + name_ + " is not associative at (" + std::to_string(a) + "," +
                            std::to_string(b) + "," + std::to_string(c) + ")");
                    }
                }
            }
        }
        bool commutes = true;
        for (int a = 0; a < order_ && commutes; a++) {
            for (int b = 0; b < a; b++) {
                if (mul(a, b) != mul(b, a)) {
                    commutes = false;
                    break;
                }
            }
        }
        if (commutes) {
            abelian_ = std::make_shared<const AbelianStructure>(decompose_abelian());
        }
    }

    // Backtracking search for a basis g_1..g_k with |<g_1..g_k>| = prod ord(g_i),
    // largest orders first. The first element chosen for Z_n is 1.
    AbelianStructure decompose_abelian() const {
        std::vector<int> candidates(order_);
        std::iota(candidates.begin(), candidates.end(), 0);
        std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
            return element_order(a) > element_order(b);
        });
        std::vector<int> chosen;
        std::vector<bool> span(order_, false);
        span[0] = true;
        int span_size = 1;
        std::vector<int> result;
        auto search = [&](auto &&self, int min_pos) -> bool {
            if (span_size == order_) {
                result = chosen;
                return true;
            }
            for (std::size_t ci = static_cast<std::size_t>(min_pos); ci < candidates.size(); ci++) {
                int g = candidates[ci];
                if (g == 0) {
                    continue;
                }
                int k = element_order(g);
                bool trivial_meet = true;
                for (int p = 1, x = g; p < k; p++, x = mul(x, g)) {
                    if (span[x]) {
                        trivial_meet = false;
                        break;
                    }
                }
                if (!trivial_meet) {
                    continue;
                }
                std::vector<bool> saved = span;
                int saved_size = span_size;
                std::vector<int> members;
                for (int a = 0; a < order_; a++) {
                    if (span[a]) {
                        members.push_back(a);
                    }
                }
                for (int p = 1, x = g; p < k; p++, x = mul(x, g)) {
                    for (int m : members) {
                        span[mul(m, x)] = true;
                    }
                }
                span_size = saved_size * k;
                chosen.push_back(g);
                if (self(self, static_cast<int>(ci) + 1)) {
                    return true;
                }
                chosen.pop_back();
                span = saved;
                span_size = saved_size;
            }
            return false;
        };
        search(search, 0);

        AbelianStructure s;
        s.generators = result;
        for (int g : result) {
            s.factors.push_back(element_order(g));
            s.lcm = std::lcm(s.lcm, s.factors.back());
        }
        s.coords.assign(order_, std::vector<int>(s.factors.size(), 0));
        s.by_coords.assign(order_, 0);
        std::vector<int> c(s.factors.size(), 0);
        for (int idx = 0; idx < order_; idx++) {
            int x = 0;
            for (std::size_t k = 0; k < c.size(); k++) {
                x = mul(x, power(s.generators[k], c[k]));
            }
            s.coords[x] = c;
            s.by_coords[idx] = x;
            for (int k = static_cast<int>(c.size()) - 1; k >= 0; k--) {
                if (++c[k] < s.factors[k]) {
                    break;
                }
                c[k] = 0;
            }
        }
        return s;
    }

    std::string name_;
    int order_;
    std::vector<int> mult_;
    std::vector<int> inv_;
    std::shared_ptr<const AbelianStructure> abelian_;
};

using GroupRef = std::shared_ptr<const FiniteGroup>;

inline GroupRef share(FiniteGroup g) {
    return std::make_shared<const FiniteGroup>(std::move(g));
}

/// Sorted set of element indices of a subgroup.
struct Subgroup {
    std::vector<int> members;

    int order() const {
        return static_cast<int>(members.size());
    }
    bool contains(int g) const {
        return std::binary_search(members.begin(), members.end(), g);
    }
    bool is_trivial() const {
        return members.size() == 1;
    }
    friend bool operator==(const Subgroup &, const Subgroup &) = default;
};

inline FiniteGroup build_cyclic(int n) {
    if (n < 1) {
        throw std::invalid_argument("cyclic group order must be at least 1");
    }
    std::vector<int> mult(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; a++) {
        for (int b = 0; b < n; b++) {
            mult[static_cast<std::size_t>(a) * n + b] = (a + b) % n;
        }
    }
    return FiniteGroup("Z" + std::to_string(n), n, std::move(mult));
}

/// Element (i, j) of a x b has index i * |b| + j.
inline FiniteGroup direct_product(const FiniteGroup &a, const FiniteGroup &b) {
    int na = a.order(), nb = b.order(), n = na * nb;
    std::vector<int> mult(static_cast<std::size_t>(n) * n);
    for (int x = 0; x < n; x++) {
        for (int y = 0; y < n; y++) {
            mult[static_cast<std::size_t>(x) * n + y] = a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb);
        }
    }
    return FiniteGroup(a.name() + "x" + b.name(), n, std::move(mult));
}

/// Closure of a set of permutations of {0..degree-1}. Elements are sorted
/// lexicographically by image list, so the identity permutation is index 0.
inline FiniteGroup permutation_group(
    const std::string &name, int degree, const std::vector<std::vector<int>> &generators,
    std::vector<std::vector<int>> *elements_out = nullptr) {
    std::vector<int> id(degree);
    std::iota(id.begin(), id.end(), 0);
    std::set<std::vector<int>> seen{id};
    std::deque<std::vector<int>> queue{id};
    while (!queue.empty()) {
        auto p = queue.front();
        queue.pop_front();
        for (const auto &g : generators) {
            std::vector<int> q(degree);
            for (int i = 0; i < degree; i++) {
                q[i] = g[p[i]];
            }
            if (seen.insert(q).second) {
                queue.push_back(q);
            }
        }
    }
    std::vector<std::vector<int>> elems(seen.begin(), seen.end());
    int n = static_cast<int>(elems.size());
    std::vector<int> mult(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; a++) {
        for (int b = 0; b < n; b++) {
            // (a*b)(i) = a(b(i))
            std::vector<int> c(degree);
            for (int i = 0; i < degree; i++) {
                c[i] = elems[a][elems[b][i]];
            }
            auto it = std::lower_bound(elems.begin(), elems.end(), c);
            mult[static_cast<std::size_t>(a) * n + b] = static_cast<int>(it - elems.begin());
        }
    }
    if (elements_out) {
        *elements_out = elems;
    }
    return FiniteGroup(name, n, std::move(mult));
}

inline FiniteGroup symmetric_group(int degree) {
    if (degree < 1) {
        throw std::invalid_argument("symmetric group degree must be at least 1");
    }
    if (degree == 1) {
        return FiniteGroup("S1", 1, {0});
    }
    std::vector<int> cycle(degree), swap(degree);
    std::iota(swap.begin(), swap.end(), 0);
    std::swap(swap[0], swap[1]);
    for (int i = 0; i < degree; i++) {
        cycle[i] = (i + 1) % degree;
    }
    return permutation_group("S" + std::to_string(degree), degree, {cycle, swap});
}

inline FiniteGroup alternating_group(int degree) {
    if (degree < 3) {
        return FiniteGroup("A" + std::to_string(degree), 1, {0});
    }
    std::vector<std::vector<int>> gens;
    for (int k = 2; k < degree; k++) {
        std::vector<int> p(degree);
        std::iota(p.begin(), p.end(), 0);
        // 3-cycle (0 1 k)
        p[0] = 1;
        p[1] = k;
        p[k] = 0;
        gens.push_back(p);
    }
    return permutation_group("A" + std::to_string(degree), degree, gens);
}

/// Symmetries of a regular n-gon acting on its vertices (order 2n).
inline FiniteGroup dihedral_group(int n) {
    std::vector<int> rot(n), refl(n);
    for (int i = 0; i < n; i++) {
        rot[i] = (i + 1) % n;
        refl[i] = (n - i) % n;
    }
    return permutation_group("D" + std::to_string(n), n, {rot, refl});
}

inline Subgroup generate_subgroup(const FiniteGroup &g, const std::vector<int> &generators) {
    std::vector<bool> in(g.order(), false);
    in[0] = true;
    std::vector<int> members{0};
    for (std::size_t i = 0; i < members.size(); i++) {
        for (int s : generators) {
            int x = g.mul(members[i], s);
            if (!in[x]) {
                in[x] = true;
                members.push_back(x);
            }
        }
    }
    std::sort(members.begin(), members.end());
    return {members};
}

inline Subgroup whole_group(const FiniteGroup &g) {
    Subgroup s;
    s.members.resize(g.order());
    std::iota(s.members.begin(), s.members.end(), 0);
    return s;
}

inline Subgroup trivial_subgroup() {
    return {{0}};
}

inline bool is_subgroup(const FiniteGroup &g, const Subgroup &h) {
    if (h.members.empty() || h.members.front() != 0) {
        return false;
    }
    for (int a : h.members) {
        if (!h.contains(g.inv(a))) {
            return false;
        }
        for (int b : h.members) {
            if (!h.contains(g.mul(a, b))) {
                return false;
            }
        }
    }
    return true;
}

/// True when h is normal in the subgroup `within` (default: all of g).
inline bool is_normal(const FiniteGroup &g, const Subgroup &h, const Subgroup *within = nullptr) {
    Subgroup all = within ? *within : whole_group(g);
    for (int x : all.members) {
        for (int a : h.members) {
            if (!h.contains(g.conj(x, a))) {
                return false;
            }
        }
    }
    return true;
}

/// [H, H] computed inside g.
inline Subgroup commutator_subgroup(const FiniteGroup &g, const Subgroup &h) {
    std::vector<int> comms;
    std::vector<bool> seen(g.order(), false);
    for (int a : h.members) {
        for (int b : h.members) {
            int c = g.commutator(a, b);
            if (!seen[c]) {
                seen[c] = true;
                comms.push_back(c);
            }
        }
    }
    return generate_subgroup(g, comms);
}

inline Subgroup commutator_subgroup(const FiniteGroup &g) {
    return commutator_subgroup(g, whole_group(g));
}

struct DerivedSeries {
    /// G = terms[0] > terms[1] > ... ; the last term is the perfect core.
    std::vector<Subgroup> terms;
    bool solvable = false;
    /// Number of steps to reach the trivial group; only meaningful when solvable.
    int derived_length = 0;

    const Subgroup &perfect_core() const {
        return terms.back();
    }
};

inline DerivedSeries derived_series(const FiniteGroup &g) {
    DerivedSeries s;
    s.terms.push_back(whole_group(g));
    while (true) {
        Subgroup next = commutator_subgroup(g, s.terms.back());
        if (next == s.terms.back()) {
            break;
        }
        s.terms.push_back(std::move(next));
    }
    s.solvable = s.terms.back().is_trivial();
    s.derived_length = s.solvable ? static_cast<int>(s.terms.size()) - 1 : 0;
    return s;
}

inline Subgroup center(const FiniteGroup &g) {
    Subgroup z;
    for (int a = 0; a < g.order(); a++) {
        bool central = true;
        for (int b = 0; b < g.order() && central; b++) {
            central = g.mul(a, b) == g.mul(b, a);
        }
        if (central) {
            z.members.push_back(a);
        }
    }
    return z;
}

inline Subgroup perfect_core(const FiniteGroup &g) {
    return derived_series(g).perfect_core();
}

/// g / n with cosets ordered by their lowest element; lift[q] is that element.
struct Quotient {
    FiniteGroup group;
    std::vector<int> proj;
    std::vector<int> lift;
};

inline Quotient quotient(const FiniteGroup &g, const Subgroup &n, std::string name = {}) {
    if (!is_subgroup(g, n) || !is_normal(g, n)) {
        throw std::invalid_argument("quotient requires a normal subgroup");
    }
    Quotient q;
    q.proj.assign(g.order(), -1);
    for (int a = 0; a < g.order(); a++) {
        if (q.proj[a] != -1) {
            continue;
        }
        int label = static_cast<int>(q.lift.size());
        q.lift.push_back(a);
        for (int m : n.members) {
            q.proj[g.mul(a, m)] = label;
        }
    }
    int k = static_cast<int>(q.lift.size());
    std::vector<int> mult(static_cast<std::size_t>(k) * k);
    for (int x = 0; x < k; x++) {
        for (int y = 0; y < k; y++) {
            mult[static_cast<std::size_t>(x) * k + y] = q.proj[g.mul(q.lift[x], q.lift[y])];
        }
    }
    if (name.empty()) {
        name = g.name() + "/" + std::to_string(n.order());
    }
    q.group = FiniteGroup(std::move(name), k, std::move(mult));
    return q;
}

inline FiniteGroup central_quotient(const FiniteGroup &g) {
    return quotient(g, center(g), g.name() + "/Z").group;
}

/// The subgroup as a standalone group; element i is members[i].
inline FiniteGroup subgroup_as_group(const FiniteGroup &g, const Subgroup &h, std::string name = {}) {
    int k = h.order();
    std::vector<int> mult(static_cast<std::size_t>(k) * k);
    for (int x = 0; x < k; x++) {
        for (int y = 0; y < k; y++) {
            int p = g.mul(h.members[x], h.members[y]);
            mult[static_cast<std::size_t>(x) * k + y] =
                static_cast<int>(std::lower_bound(h.members.begin(), h.members.end(), p) - h.members.begin());
        }
    }
    if (name.empty()) {
        name = g.name() + "[" + std::to_string(k) + "]";
    }
    return FiniteGroup(std::move(name), k, std::move(mult));
}

/// Greedy generating set: repeatedly add the first element outside the span.
inline std::vector<int> generating_set(const FiniteGroup &g) {
    std::vector<int> gens;
    Subgroup span = trivial_subgroup();
    std::vector<int> order(g.order());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return g.element_order(a) > g.element_order(b);
    });
    for (int a : order) {
        if (span.order() == g.order()) {
            break;
        }
        if (!span.contains(a)) {
            gens.push_back(a);
            span = generate_subgroup(g, gens);
        }
    }
    return gens;
}

/// Backtracking search over generator images; returns phi with phi[a] in b.
inline std::optional<std::vector<int>> find_isomorphism(const FiniteGroup &a, const FiniteGroup &b) {
    if (a.order() != b.order() || a.is_abelian() != b.is_abelian()) {
        return std::nullopt;
    }
    int n = a.order();
    std::vector<int> count_a(n + 1, 0), count_b(n + 1, 0);
    for (int x = 0; x < n; x++) {
        count_a[a.element_order(x)]++;
        count_b[b.element_order(x)]++;
    }
    if (count_a != count_b) {
        return std::nullopt;
    }
    std::vector<int> gens = generating_set(a);
    std::vector<int> images(gens.size(), 0);

    auto try_extend = [&]() -> std::optional<std::vector<int>> {
        std::vector<int> phi(n, -1);
        phi[0] = 0;
        std::vector<int> frontier{0};
        for (std::size_t i = 0; i < frontier.size(); i++) {
            int x = frontier[i];
            for (std::size_t k = 0; k < gens.size(); k++) {
                int y = a.mul(x, gens[k]);
                int img = b.mul(phi[x], images[k]);
                if (phi[y] == -1) {
                    phi[y] = img;
                    frontier.push_back(y);
                } else if (phi[y] != img) {
                    return std::nullopt;
                }
            }
        }
        std::vector<bool> hit(n, false);
        for (int x = 0; x < n; x++) {
            if (phi[x] < 0 || hit[phi[x]]) {
                return std::nullopt;
            }
            hit[phi[x]] = true;
        }
        for (int x = 0; x < n; x++) {
            for (int y = 0; y < n; y++) {
                if (phi[a.mul(x, y)] != b.mul(phi[x], phi[y])) {
                    return std::nullopt;
                }
            }
        }
        return phi;
    };

    auto search = [&](auto &&self, std::size_t k) -> std::optional<std::vector<int>> {
        if (k == gens.size()) {
            return try_extend();
        }
        int want = a.element_order(gens[k]);
        for (int y = 0; y < n; y++) {
            if (b.element_order(y) != want) {
                continue;
            }
            images[k] = y;
            if (auto r = self(self, k + 1)) {
                return r;
            }
        }
        return std::nullopt;
    };
    return search(search, 0);
}

inline bool is_isomorphic(const FiniteGroup &a, const FiniteGroup &b) {
    return find_isomorphism(a, b).has_value();
}

}  // namespace qdouble

#endif
