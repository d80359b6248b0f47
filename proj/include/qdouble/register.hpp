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

#ifndef QDOUBLE_REGISTER_HPP
#define QDOUBLE_REGISTER_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qdouble/groups.hpp"

namespace qdouble {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Role { vertex, edge, plaquette };

inline const char *role_name(Role r) {
    switch (r) {
        case Role::vertex:
            return "vertex";
        case Role::edge:
            return "edge";
        default:
            return "plaquette";
    }
}

/// A live site: a label, a role and the group whose algebra it carries.
struct SiteSpec {
    std::string label;
    Role role = Role::vertex;
    GroupRef group;

    int dim() const {
        return group->order();
    }
};

/// Operator on 1..k sites in the product basis of its targets (first target
/// slowest). Monomial operators map basis state k to phase[k] |perm[k]>; this
/// covers permutations and diagonals. Anything else is dense.
struct LocalOperator {
    std::vector<int> dims;
    bool monomial = true;
    std::vector<int> perm;
    std::vector<cplx> phase;
    Matrix dense;
    bool unitary = true;

    int size() const {
        int d = 1;
        for (int x : dims) {
            d *= x;
        }
        return d;
    }

    static LocalOperator permutation(std::vector<int> dims, std::vector<int> perm) {
        LocalOperator op;
        op.dims = std::move(dims);
        op.phase.assign(perm.size(), 1.0);
        op.perm = std::move(perm);
        return op;
    }

    static LocalOperator diagonal(std::vector<int> dims, std::vector<cplx> phase, bool unitary = true) {
        LocalOperator op;
        op.dims = std::move(dims);
        op.perm.resize(phase.size());
        for (std::size_t k = 0; k < phase.size(); k++) {
            op.perm[k] = static_cast<int>(k);
        }
        op.phase = std::move(phase);
        op.unitary = unitary;
        return op;
    }

    static LocalOperator from_matrix(std::vector<int> dims, Matrix m, bool unitary = true) {
        LocalOperator op;
        op.dims = std::move(dims);
        op.monomial = false;
        op.dense = std::move(m);
        op.unitary = unitary;
        return op;
    }

    static LocalOperator identity(std::vector<int> dims) {
        LocalOperator op;
        op.dims = std::move(dims);
        int n = op.size();
        op.perm.resize(n);
        for (int k = 0; k < n; k++) {
            op.perm[k] = k;
        }
        op.phase.assign(n, 1.0);
        return op;
    }

    Matrix matrix() const {
        if (!monomial) {
            return dense;
        }
        int n = size();
        Matrix m = Matrix::Zero(n, n);
        for (int k = 0; k < n; k++) {
            m(perm[k], k) = phase[k];
        }
        return m;
    }

    LocalOperator adjoint() const {
        if (!monomial) {
            return from_matrix(dims, dense.adjoint(), unitary);
        }
        LocalOperator op = *this;
        for (std::size_t k = 0; k < perm.size(); k++) {
            op.perm[perm[k]] = static_cast<int>(k);
            op.phase[perm[k]] = std::conj(phase[k]);
        }
        return op;
    }

    /// this * other (other acts first) on the same targets.
    LocalOperator times(const LocalOperator &other) const {
        if (dims != other.dims) {
            throw std::invalid_argument("operator target dimensions differ");
        }
        if (monomial && other.monomial) {
            LocalOperator op = other;
            for (std::size_t k = 0; k < perm.size(); k++) {
                op.perm[k] = perm[other.perm[k]];
                op.phase[k] = phase[other.perm[k]] * other.phase[k];
            }
            op.unitary = unitary && other.unitary;
            return op;
        }
        return from_matrix(dims, matrix() * other.matrix(), unitary && other.unitary);
    }

    bool is_unitary(double tol = 1e-12) const {
        if (monomial) {
            std::vector<bool> hit(perm.size(), false);
            for (std::size_t k = 0; k < perm.size(); k++) {
                if (hit[perm[k]] || std::abs(std::abs(phase[k]) - 1.0) > tol) {
                    return false;
                }
                hit[perm[k]] = true;
            }
            return true;
        }
        int n = size();
        return (dense.adjoint() * dense - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= tol;
    }
};

/// Raised when a forced measurement outcome has (numerically) zero probability.
/// a (x) b, with a on the leading targets.
inline LocalOperator tensor(const LocalOperator &a, const LocalOperator &b) {
    std::vector<int> dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    int na = a.size(), nb = b.size();
    if (a.monomial && b.monomial) {
        std::vector<int> perm(static_cast<std::size_t>(na) * nb);
        std::vector<cplx> phase(perm.size());
        for (int x = 0; x < na; x++) {
            for (int y = 0; y < nb; y++) {
                perm[x * nb + y] = a.perm[x] * nb + b.perm[y];
                phase[x * nb + y] = a.phase[x] * b.phase[y];
            }
        }
        LocalOperator op = LocalOperator::permutation(dims, perm);
        op.phase = std::move(phase);
        op.unitary = a.unitary && b.unitary;
        return op;
    }
    Matrix ma = a.matrix(), mb = b.matrix();
    Matrix m(na * nb, na * nb);
    for (int i = 0; i < na; i++) {
        for (int j = 0; j < na; j++) {
            m.block(i * nb, j * nb, nb, nb) = ma(i, j) * mb;
        }
    }
    return LocalOperator::from_matrix(dims, m, a.unitary && b.unitary);
}

struct ZeroProbabilityOutcome : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Dense state over live sites; site-major with the last site fastest.
/// Sites are addressed by a stable id that survives retirement of others.
class QuditRegister {
   public:
    QuditRegister() : amps_(Vector::Ones(1)) {
    }

    /// Appends a site in |1> (basis index `basis`) or in |+>.
    int add_site(SiteSpec spec, bool plus = false, int basis = 0) {
        int d = spec.dim();
        Vector local = Vector::Zero(d);
        if (plus) {
            local.setConstant(1.0 / std::sqrt(static_cast<double>(d)));
        } else {
            local(basis) = 1.0;
        }
        return add_site_state(std::move(spec), local);
    }

    int add_site_state(SiteSpec spec, const Vector &local) {
        int d = spec.dim();
        if (local.size() != d) {
            throw std::invalid_argument("local state has the wrong dimension");
        }
        Vector next(amps_.size() * d);
        for (Eigen::Index a = 0; a < amps_.size(); a++) {
            next.segment(a * d, d) = amps_(a) * local;
        }
        amps_ = std::move(next);
        sites_.push_back(std::move(spec));
        ids_.push_back(next_id_);
        return next_id_++;
    }

    const std::vector<SiteSpec> &sites() const {
        return sites_;
    }
    const std::vector<int> &ids() const {
        return ids_;
    }
    int num_sites() const {
        return static_cast<int>(sites_.size());
    }
    const Vector &amplitudes() const {
        return amps_;
    }
    Vector &amplitudes() {
        return amps_;
    }
    bool is_live(int id) const {
        return std::find(ids_.begin(), ids_.end(), id) != ids_.end();
    }
    int position(int id) const {
        auto it = std::find(ids_.begin(), ids_.end(), id);
        if (it == ids_.end()) {
            throw std::invalid_argument("site " + std::to_string(id) + " is retired or unknown");
        }
        return static_cast<int>(it - ids_.begin());
    }
    const SiteSpec &site(int id) const {
        return sites_[position(id)];
    }
    int find(const std::string &label) const {
        for (int k = 0; k < num_sites(); k++) {
            if (sites_[k].label == label) {
                return ids_[k];
            }
        }
        throw std::invalid_argument("no live site labelled " + label);
    }
    void rename_site(int id, std::string label) {
        sites_[position(id)].label = std::move(label);
    }
    double norm() const {
        return amps_.norm();
    }
    void normalize() {
        double n = amps_.norm();
        if (n == 0) {
            throw std::domain_error("cannot normalize the zero vector");
        }
        amps_ /= n;
    }

    /// Stride of the site at position p.
    std::size_t stride(int p) const {
        std::size_t s = 1;
        for (int k = num_sites() - 1; k > p; k--) {
            s *= static_cast<std::size_t>(sites_[k].dim());
        }
        return s;
    }

    /// Applies op on the given target ids (first target slowest).
    void apply(const LocalOperator &op, const std::vector<int> &targets) {
        if (op.dims.size() != targets.size()) {
            throw std::invalid_argument("operator arity does not match target count");
        }
        std::vector<int> pos;
        for (std::size_t t = 0; t < targets.size(); t++) {
            pos.push_back(position(targets[t]));
            if (sites_[pos.back()].dim() != op.dims.at(t)) {
                throw std::invalid_argument("operator dimension does not match site " + sites_[pos.back()].label);
            }
            for (std::size_t u = 0; u < t; u++) {
                if (pos[u] == pos[t]) {
                    throw std::invalid_argument("repeated target site");
                }
            }
        }
        int D = op.size();
        std::vector<std::size_t> offs(D, 0);
        for (int k = 0; k < D; k++) {
            int rem = k;
            std::size_t off = 0;
            for (int t = static_cast<int>(pos.size()) - 1; t >= 0; t--) {
                off += static_cast<std::size_t>(rem % op.dims[t]) * stride(pos[t]);
                rem /= op.dims[t];
            }
            offs[k] = off;
        }
        std::vector<std::size_t> bases = base_offsets(pos);
        std::vector<cplx> buf(D);
        if (op.monomial) {
            for (std::size_t b : bases) {
                for (int k = 0; k < D; k++) {
                    buf[k] = amps_(b + offs[k]);
                }
                for (int k = 0; k < D; k++) {
                    amps_(b + offs[op.perm[k]]) = op.phase[k] * buf[k];
                }
            }
        } else {
            Vector in(D), out(D);
            for (std::size_t b : bases) {
                for (int k = 0; k < D; k++) {
                    in(k) = amps_(b + offs[k]);
                }
                out.noalias() = op.dense * in;
                for (int k = 0; k < D; k++) {
                    amps_(b + offs[k]) = out(k);
                }
            }
        }
    }

    /// Multiplies every amplitude by f(labels of the target sites).
    void apply_diagonal(const std::vector<int> &targets, const std::function<cplx(const std::vector<int> &)> &f) {
        std::vector<int> pos;
        for (int id : targets) {
            pos.push_back(position(id));
        }
        std::vector<int> labels(pos.size());
        std::vector<int> digits(num_sites(), 0);
        for (Eigen::Index a = 0; a < amps_.size(); a++) {
            for (std::size_t t = 0; t < pos.size(); t++) {
                labels[t] = digits[pos[t]];
            }
            amps_(a) *= f(labels);
            increment(digits);
        }
    }

    /// Probability of each Fourier outcome on an abelian site.
    std::vector<double> fourier_probabilities(int id) const {
        auto branches = fourier_branches(id);
        std::vector<double> p;
        for (const Vector &v : branches) {
            p.push_back(v.squaredNorm());
        }
        return p;
    }

    /// Measures an abelian site after the character transform; returns the
    /// dual-group label a. forced >= 0 selects that branch; otherwise the
    /// outcome is sampled from rng. The site is retired and the state
    /// renormalized.
    int measure_fourier(int id, std::mt19937_64 *rng, int forced = -1) {
        const SiteSpec &s = site(id);
        if (!s.group->is_abelian()) {
            throw std::domain_error("Fourier measurement needs an abelian site group, got " + s.group->name());
        }
        auto branches = fourier_branches(id);
        std::vector<double> p;
        double total = 0;
        for (const Vector &v : branches) {
            p.push_back(v.squaredNorm());
            total += p.back();
        }
        int outcome = forced;
        if (forced >= 0) {
            if (forced >= static_cast<int>(p.size())) {
                throw std::invalid_argument("forced outcome out of range");
            }
            if (p[forced] <= 1e-14 * total) {
                std::ostringstream msg;
                msg << "forced outcome " << forced << " on site " << s.label << " has probability "
                    << p[forced] / total;
                throw ZeroProbabilityOutcome(msg.str());
            }
        } else {
            if (rng == nullptr) {
                throw std::invalid_argument("sampling needs an rng");
            }
            double u = uniform01(*rng) * total;
            outcome = static_cast<int>(p.size()) - 1;
            double acc = 0;
            for (std::size_t a = 0; a < p.size(); a++) {
                acc += p[a];
                if (u < acc && p[a] > 0) {
                    outcome = static_cast<int>(a);
                    break;
                }
            }
            while (p[outcome] == 0) {
                outcome--;
            }
        }
        int pos = position(id);
        amps_ = std::move(branches[outcome]);
        sites_.erase(sites_.begin() + pos);
        ids_.erase(ids_.begin() + pos);
        normalize();
        return outcome;
    }

    /// Projects a site onto <phi| without normalizing and retires it.
    void project(int id, const Vector &phi) {
        int pos = position(id);
        int d = sites_[pos].dim();
        std::size_t st = stride(pos);
        std::size_t outer = static_cast<std::size_t>(amps_.size()) / (st * d);
        Vector next = Vector::Zero(static_cast<Eigen::Index>(outer * st));
        for (std::size_t o = 0; o < outer; o++) {
            for (int b = 0; b < d; b++) {
                cplx w = std::conj(phi(b));
                if (w == cplx(0)) {
                    continue;
                }
                next.segment(o * st, st) += w * amps_.segment((o * d + b) * st, st);
            }
        }
        amps_ = std::move(next);
        sites_.erase(sites_.begin() + pos);
        ids_.erase(ids_.begin() + pos);
    }

    /// Replaces the site's group and permutes its basis: |x> -> |map[x]>.
    void relabel_site(int id, const std::vector<int> &map, GroupRef group) {
        int pos = position(id);
        int d = sites_[pos].dim();
        if (static_cast<int>(map.size()) != d || group->order() != d) {
            throw std::invalid_argument("relabel map has the wrong size");
        }
        std::vector<int> perm(map.begin(), map.end());
        apply(LocalOperator::permutation({d}, perm), {id});
        sites_[pos].group = std::move(group);
    }

    /// Splits a site of dimension |a| |b| into two adjacent sites (a slower)
    /// with basis x = i |b| + j. Pure reshape. Returns the two new ids.
    std::pair<int, int> split_site(int id, SiteSpec first, SiteSpec second) {
        int pos = position(id);
        if (first.dim() * second.dim() != sites_[pos].dim()) {
            throw std::invalid_argument("split dimensions do not multiply to the site dimension");
        }
        sites_[pos] = std::move(first);
        ids_[pos] = next_id_++;
        sites_.insert(sites_.begin() + pos + 1, std::move(second));
        ids_.insert(ids_.begin() + pos + 1, next_id_++);
        return {ids_[pos], ids_[pos + 1]};
    }

    /// Merges two sites into one new site at the first one's position;
    /// basis pair (x, y) goes to table[x * dim(b) + y].
    int merge_sites(int a, int b, SiteSpec merged, const std::vector<int> &table) {
        int pa = position(a), pb = position(b);
        int da = sites_[pa].dim(), db = sites_[pb].dim();
        if (merged.dim() != da * db || static_cast<int>(table.size()) != da * db) {
            throw std::invalid_argument("merge table has the wrong size");
        }
        std::vector<int> order = ids_;
        order.erase(order.begin() + pb);
        pa = static_cast<int>(std::find(order.begin(), order.end(), a) - order.begin());
        order.insert(order.begin() + pa + 1, b);
        *this = reordered(order);
        pa = position(a);
        sites_[pa] = std::move(merged);
        ids_[pa] = next_id_++;
        sites_.erase(sites_.begin() + pa + 1);
        ids_.erase(ids_.begin() + pa + 1);
        int nid = ids_[pa];
        relabel_site(nid, table, sites_[pa].group);
        return nid;
    }

    /// Same state with sites permuted into the given id order.
    QuditRegister reordered(const std::vector<int> &order) const {
        if (order.size() != ids_.size()) {
            throw std::invalid_argument("reorder needs every live site exactly once");
        }
        QuditRegister r;
        r.next_id_ = next_id_;
        std::vector<int> src;
        for (int id : order) {
            src.push_back(position(id));
            r.sites_.push_back(sites_[src.back()]);
            r.ids_.push_back(id);
        }
        std::vector<std::size_t> src_stride;
        for (int p : src) {
            src_stride.push_back(stride(p));
        }
        r.amps_.resize(amps_.size());
        std::vector<int> digits(order.size(), 0);
        for (Eigen::Index a = 0; a < r.amps_.size(); a++) {
            std::size_t from = 0;
            for (std::size_t k = 0; k < order.size(); k++) {
                from += digits[k] * src_stride[k];
            }
            r.amps_(a) = amps_(static_cast<Eigen::Index>(from));
            for (int k = static_cast<int>(order.size()) - 1; k >= 0; k--) {
                if (++digits[k] < r.sites_[k].dim()) {
                    break;
                }
                digits[k] = 0;
            }
        }
        return r;
    }

    /// Reorders this register's sites to match other's label order.
    QuditRegister aligned_to(const QuditRegister &other) const {
        std::vector<int> order;
        for (const SiteSpec &s : other.sites_) {
            order.push_back(find(s.label));
        }
        return reordered(order);
    }

    void check_same_layout(const QuditRegister &other) const {
        if (sites_.size() != other.sites_.size()) {
            throw std::invalid_argument("registers have different numbers of live sites");
        }
        for (std::size_t k = 0; k < sites_.size(); k++) {
            if (sites_[k].dim() != other.sites_[k].dim() ||
                sites_[k].group->table() != other.sites_[k].group->table()) {
                throw std::invalid_argument("registers differ at site " + std::to_string(k));
            }
        }
    }

    cplx inner(const QuditRegister &other) const {
        check_same_layout(other);
        return amps_.dot(other.amps_);
    }

    /// Basis labels of amplitude index a.
    std::vector<int> labels_of(std::size_t a) const {
        std::vector<int> out(sites_.size());
        for (int k = num_sites() - 1; k >= 0; k--) {
            out[k] = static_cast<int>(a % sites_[k].dim());
            a /= sites_[k].dim();
        }
        return out;
    }

    /// [[labels...], re, im] for amplitudes above the cutoff.
    nlohmann::json dump(double cutoff = 1e-14) const {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index a = 0; a < amps_.size(); a++) {
            if (std::abs(amps_(a)) < cutoff) {
                continue;
            }
            rows.push_back({labels_of(static_cast<std::size_t>(a)), amps_(a).real(), amps_(a).imag()});
        }
        nlohmann::json sites = nlohmann::json::array();
        for (const SiteSpec &s : sites_) {
            sites.push_back({{"label", s.label}, {"role", role_name(s.role)}, {"group", s.group->name()}});
        }
        return {{"sites", sites}, {"amplitudes", rows}};
    }

   private:
    void increment(std::vector<int> &digits) const {
        for (int k = num_sites() - 1; k >= 0; k--) {
            if (++digits[k] < sites_[k].dim()) {
                return;
            }
            digits[k] = 0;
        }
    }

    /// Offsets of all amplitudes whose target digits are zero.
    std::vector<std::size_t> base_offsets(const std::vector<int> &pos) const {
        std::vector<bool> is_target(sites_.size(), false);
        for (int p : pos) {
            is_target[p] = true;
        }
        std::vector<std::size_t> bases{0};
        for (int k = 0; k < num_sites(); k++) {
            if (is_target[k]) {
                continue;
            }
            std::size_t st = stride(k);
            std::vector<std::size_t> next;
            next.reserve(bases.size() * sites_[k].dim());
            for (std::size_t b : bases) {
                for (int x = 0; x < sites_[k].dim(); x++) {
                    next.push_back(b + x * st);
                }
            }
            bases = std::move(next);
        }
        return bases;
    }

    /// branches[a] = (<a| F) on the site, i.e. sum_b chi^a(b)/sqrt|A| <b|.
    std::vector<Vector> fourier_branches(int id) const {
        int pos = position(id);
        const SiteSpec &s = sites_[pos];
        const AbelianStructure &ab = s.group->abelian();
        int d = s.dim();
        std::vector<Vector> out;
        double scale = 1.0 / std::sqrt(static_cast<double>(d));
        for (int a = 0; a < d; a++) {
            Vector phi(d);
            for (int b = 0; b < d; b++) {
                phi(b) = std::conj(ab.character(a, b)) * scale;
            }
            QuditRegister copy = *this;
            copy.project(id, phi);
            out.push_back(std::move(copy.amps_));
        }
        return out;
    }

    std::vector<SiteSpec> sites_;
    std::vector<int> ids_;
    Vector amps_;
    int next_id_ = 0;
};

/// Product state with every site in |+>.
inline QuditRegister init_plus(const std::vector<SiteSpec> &sites) {
    QuditRegister r;
    for (const SiteSpec &s : sites) {
        r.add_site(s, true);
    }
    return r;
}

/// Product state with every site at the identity element.
inline QuditRegister init_identity(const std::vector<SiteSpec> &sites) {
    QuditRegister r;
    for (const SiteSpec &s : sites) {
        r.add_site(s, false);
    }
    return r;
}

inline double fidelity(const QuditRegister &a, const QuditRegister &b) {
    cplx ip = a.inner(b);
    double na = a.amplitudes().squaredNorm(), nb = b.amplitudes().squaredNorm();
    return std::norm(ip) / (na * nb);
}

inline cplx inner_product(const QuditRegister &a, const QuditRegister &b) {
    return a.inner(b);
}

/// <psi| op |psi> for a normalized register.
inline cplx expectation(const QuditRegister &r, const LocalOperator &op, const std::vector<int> &targets) {
    QuditRegister copy = r;
    copy.apply(op, targets);
    return r.amplitudes().dot(copy.amplitudes());
}

}  // namespace qdouble

#endif
