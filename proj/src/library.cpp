#include "liesym/library.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace liesym {

std::vector<std::string> FunctionLibrary::entry_names() const {
    std::vector<std::string> names;
    names.reserve(entries.size());
    for (const auto& e : entries) names.push_back(to_text(e, space));
    return names;
}

void validate_library(const FunctionLibrary& lib) {
    if (lib.entries.empty()) throw std::invalid_argument("function library is empty");
    for (const auto& e : lib.entries)
        for (const auto& [exps, c] : e.terms())
            for (const auto& [var, k] : exps)
                if (var.is_deriv() && var.order() > 0)
                    throw std::invalid_argument(
                        "library entry depends on a derivative coordinate: " +
                        to_text(e, lib.space));
}

namespace {

// Exponent vectors of all monomials of exact degree d in nvars variables.
void monomials_of_degree(int nvars, int d, std::vector<int>& current,
                         std::vector<std::vector<int>>& out) {
    int filled = static_cast<int>(current.size());
    if (filled == nvars - 1) {
        current.push_back(d);
        out.push_back(current);
        current.pop_back();
        return;
    }
    for (int e = d; e >= 0; --e) {
        current.push_back(e);
        monomials_of_degree(nvars, d - e, current, out);
        current.pop_back();
    }
}

JetPoly monomial_from_exponents(const JetSpace& space, const std::vector<int>& exps) {
    ExpMap m;
    for (int i = 0; i < space.p(); ++i)
        if (exps[i] > 0) m[JetVar::indep(i)] = exps[i];
    for (int a = 0; a < space.q(); ++a)
        if (exps[space.p() + a] > 0) m[JetVar::deriv(a)] = exps[space.p() + a];
    JetPoly poly;
    poly.add_term(1.0, std::move(m));
    return poly;
}

}  // namespace

FunctionLibrary build_poly_library(const JetSpace& space, int degree) {
    if (degree < 1) throw std::invalid_argument("library degree must be >= 1");
    int nvars = space.p() + space.q();
    if (nvars == 0) throw std::invalid_argument("jet space has no variables");
    FunctionLibrary lib{space, {}};
    lib.entries.push_back(JetPoly::one());
    for (int d = 1; d <= degree; ++d) {
        std::vector<std::vector<int>> exps;
        std::vector<int> scratch;
        monomials_of_degree(nvars, d, scratch, exps);
        std::stable_sort(exps.begin(), exps.end(),
                         [](const std::vector<int>& a, const std::vector<int>& b) {
                             int ma = *std::max_element(a.begin(), a.end());
                             int mb = *std::max_element(b.begin(), b.end());
                             if (ma != mb) return ma > mb;
                             return a > b;  // lexicographically descending
                         });
        for (const auto& e : exps) lib.entries.push_back(monomial_from_exponents(space, e));
    }
    return lib;
}

FunctionLibrary build_linear_library(const JetSpace& space, bool include_constant) {
    FunctionLibrary lib{space, {}};
    if (include_constant) lib.entries.push_back(JetPoly::one());
    for (int i = 0; i < space.p(); ++i) lib.entries.push_back(JetPoly(JetVar::indep(i)));
    for (int a = 0; a < space.q(); ++a) lib.entries.push_back(JetPoly(JetVar::deriv(a)));
    validate_library(lib);
    return lib;
}

std::vector<JetPoly> d_theta(const FunctionLibrary& lib, const MultiIndex& j) {
    std::vector<JetPoly> out;
    out.reserve(lib.entries.size());
    for (const auto& e : lib.entries)
        out.push_back(total_derivative_multi(lib.space, e, j));
    return out;
}

FunctionLibrary library_from_json_text(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    JetSpace space = make_space(doc.at("coords").get<std::vector<std::string>>(),
                                doc.at("fields").get<std::vector<std::string>>());
    FunctionLibrary lib{space, {}};
    for (const auto& entry : doc.at("entries"))
        lib.entries.push_back(parse_poly(space, entry.get<std::string>()));
    validate_library(lib);
    return lib;
}

std::string library_to_json_text(const FunctionLibrary& lib) {
    nlohmann::json doc;
    doc["coords"] = lib.space.coords;
    doc["fields"] = lib.space.fields;
    doc["entries"] = lib.entry_names();
    return doc.dump(2);
}

FunctionLibrary make_library(const JetSpace& space, const std::string& spec) {
    if (spec == "linear") return build_linear_library(space, false);
    if (spec == "affine") return build_linear_library(space, true);
    if (spec.rfind("poly", 0) == 0) {
        int degree = std::stoi(spec.substr(4));
        return build_poly_library(space, degree);
    }
    if (!spec.empty() && spec[0] == '@') {
        std::ifstream in(spec.substr(1));
        if (!in) throw std::runtime_error("cannot open library file " + spec.substr(1));
        std::stringstream ss;
        ss << in.rdbuf();
        FunctionLibrary lib = library_from_json_text(ss.str());
        if (!(lib.space == space))
            throw std::runtime_error("library file coordinates do not match the dataset");
        return lib;
    }
    throw std::invalid_argument("unknown library spec '" + spec +
                                "' (expected polyN, linear, affine, or @file.json)");
}

}  // namespace liesym
