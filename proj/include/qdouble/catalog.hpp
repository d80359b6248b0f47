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

#ifndef QDOUBLE_CATALOG_HPP
#define QDOUBLE_CATALOG_HPP

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "qdouble/factor_system.hpp"
#include "qdouble/groups.hpp"

namespace qdouble {

/// Central extension of Z2^2 by Z2. `kind` selects the cocycle on
/// q = (a, b) with index 2a + b:
///   "D4": omega = a1 b2
///   "Q8": omega = a1 a2 + a1 b2 + b1 b2
inline FactorSystem z2_central_system(const std::string &kind) {
    FiniteGroup z2 = build_cyclic(2);
    FactorSystem fs = split_product_system(z2, direct_product(z2, z2).renamed("Z2xZ2"));
    for (int x = 0; x < 4; x++) {
        for (int y = 0; y < 4; y++) {
            int a1 = x / 2, b1 = x % 2, a2 = y / 2, b2 = y % 2;
            if (kind == "D4") {
                fs.omega[x][y] = (a1 * b2) % 2;
            } else if (kind == "Q8") {
                fs.omega[x][y] = (a1 * a2 + a1 * b2 + b1 * b2) % 2;
            } else {
                throw std::invalid_argument("unknown central system " + kind);
            }
        }
    }
    return with_extension_parent(fs, kind);
}

/// Z3 by Z2 with sigma^1[n] = -n and trivial omega.
inline FactorSystem s3_system() {
    FactorSystem fs = split_product_system(build_cyclic(3), build_cyclic(2));
    fs.sigma[1] = {0, 2, 1};
    return with_extension_parent(fs, "S3");
}

/// Factor systems given explicitly as examples: "D4", "Q8", "S3".
inline FactorSystem example_system(const std::string &name) {
    if (name == "S3") {
        return s3_system();
    }
    return z2_central_system(name);
}

/// Built-in groups by name: Zn, S3, S4, Sn, A4, A5, An, Dn, Q8, Z2xZ2 and
/// any 'x'-separated product of these.
inline FiniteGroup named_group(const std::string &name) {
    auto pos = name.find('x');
    if (pos != std::string::npos) {
        FiniteGroup a = named_group(name.substr(0, pos));
        FiniteGroup b = named_group(name.substr(pos + 1));
        return direct_product(a, b).renamed(name);
    }
    auto number = [&](std::size_t from) {
        std::string digits = name.substr(from);
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
            throw std::invalid_argument("unknown group '" + name + "'");
        }
        return std::stoi(digits);
    };
    if (name == "Q8") {
        return *z2_central_system("Q8").parent;
    }
    if (name.empty()) {
        throw std::invalid_argument("empty group name");
    }
    switch (name[0]) {
        case 'Z':
            return build_cyclic(number(1));
        case 'S':
            return symmetric_group(number(1)).renamed(name);
        case 'A':
            return alternating_group(number(1)).renamed(name);
        case 'D':
            return dihedral_group(number(1)).renamed(name);
        default:
            throw std::invalid_argument("unknown group '" + name + "'");
    }
}

/// Solvable groups of order at most 24 used by the test and verification suites.
inline std::vector<std::string> catalog_names() {
    return {"Z2", "Z3", "Z2xZ2", "Z6", "S3", "D4", "Q8", "A4", "S4"};
}

/// All normal subgroups, found as normal closures of at most two elements.
inline std::vector<Subgroup> normal_subgroups(const FiniteGroup &g) {
    auto closure = [&](std::vector<int> gens) {
        while (true) {
            Subgroup h = generate_subgroup(g, gens);
            std::vector<int> more = h.members;
            bool grew = false;
            for (int x = 0; x < g.order(); x++) {
                for (int m : h.members) {
                    int c = g.conj(x, m);
                    if (!h.contains(c)) {
                        more.push_back(c);
                        grew = true;
                    }
                }
            }
            if (!grew) {
                return h;
            }
            gens = more;
        }
    };
    std::set<std::vector<int>> seen;
    std::vector<Subgroup> out;
    for (int a = 0; a < g.order(); a++) {
        for (int b = a; b < g.order(); b++) {
            Subgroup h = closure({a, b});
            if (seen.insert(h.members).second) {
                out.push_back(h);
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Subgroup &x, const Subgroup &y) {
        return x.order() != y.order() ? x.order() < y.order() : x.members < y.members;
    });
    return out;
}

using json = nlohmann::json;

FiniteGroup group_from_json(const json &doc);

/// Registry of groups from the file named by QDOUBLE_CATALOG, if set.
inline std::map<std::string, json> user_catalog() {
    std::map<std::string, json> out;
    const char *path = std::getenv("QDOUBLE_CATALOG");
    if (path == nullptr || *path == '\0') {
        return out;
    }
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument(std::string("cannot read group catalog ") + path);
    }
    json doc = json::parse(in);
    const json &list = doc.is_array() ? doc : doc.at("groups");
    for (const json &entry : list) {
        out[entry.at("name").get<std::string>()] = entry;
    }
    return out;
}

/// Resolves a group spec: a catalog name, "Zn", an 'x'-product, a path to a
/// JSON document, or a name from the QDOUBLE_CATALOG file.
inline FiniteGroup parse_group_spec(const std::string &spec) {
    auto user = user_catalog();
    if (auto it = user.find(spec); it != user.end()) {
        return group_from_json(it->second);
    }
    if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") {
        std::ifstream in(spec);
        if (!in) {
            throw std::invalid_argument("cannot read group document " + spec);
        }
        return group_from_json(json::parse(in));
    }
    return named_group(spec);
}

/// {name, order, mult_table} or {name, extension: {n, q, sigma, omega}} where
/// n and q are group specs (strings) or nested documents.
inline FactorSystem factor_system_from_json(const json &ext) {
    auto sub = [](const json &j) {
        return j.is_string() ? parse_group_spec(j.get<std::string>()) : group_from_json(j);
    };
    FactorSystem fs;
    fs.normal = sub(ext.at("n"));
    fs.quotient = sub(ext.at("q"));
    int nn = fs.normal.order(), nq = fs.quotient.order();
    if (ext.contains("sigma")) {
        fs.sigma = ext.at("sigma").get<std::vector<std::vector<int>>>();
    } else {
        fs.sigma.assign(nq, std::vector<int>(nn));
        for (auto &row : fs.sigma) {
            std::iota(row.begin(), row.end(), 0);
        }
    }
    if (ext.contains("omega")) {
        fs.omega = ext.at("omega").get<std::vector<std::vector<int>>>();
    } else {
        fs.omega.assign(nq, std::vector<int>(nq, 0));
    }
    validate_factor_system(fs);
    return fs;
}

inline FiniteGroup group_from_json(const json &doc) {
    std::string name = doc.value("name", std::string("G"));
    if (doc.contains("extension")) {
        return extension_from_factor_system(factor_system_from_json(doc.at("extension")), name);
    }
    int order = doc.at("order").get<int>();
    std::vector<int> mult;
    const json &table = doc.at("mult_table");
    if (static_cast<int>(table.size()) != order) {
        throw InvariantError("mult_table must have " + std::to_string(order) + " rows");
    }
    for (const json &row : table) {
        if (static_cast<int>(row.size()) != order) {
            throw InvariantError("mult_table row has wrong length");
        }
        for (const json &x : row) {
            mult.push_back(x.get<int>());
        }
    }
    return FiniteGroup(name, order, std::move(mult));
}

inline json group_to_json(const FiniteGroup &g) {
    json rows = json::array();
    for (int a = 0; a < g.order(); a++) {
        json row = json::array();
        for (int b = 0; b < g.order(); b++) {
            row.push_back(g.mul(a, b));
        }
        rows.push_back(row);
    }
    return {{"name", g.name()}, {"order", g.order()}, {"mult_table", rows}};
}

inline json factor_system_to_json(const FactorSystem &fs) {
    json j = {
        {"n", group_to_json(fs.normal)},
        {"q", group_to_json(fs.quotient)},
        {"sigma", fs.sigma},
        {"omega", fs.omega},
    };
    if (fs.has_parent()) {
        j["lift"] = fs.lift;
        j["embed"] = fs.embed;
        j["proj"] = fs.proj;
        j["tpart"] = fs.tpart;
    }
    return j;
}

}  // namespace qdouble

#endif
