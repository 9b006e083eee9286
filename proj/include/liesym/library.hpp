#ifndef LIESYM_LIBRARY_HPP
#define LIESYM_LIBRARY_HPP

#include <string>
#include <vector>

#include "liesym/jetpoly.hpp"

namespace liesym {

// Ordered list of candidate coefficient functions Theta(x, u). Entries use
// only order-0 variables (independents and plain field values); entry order
// fixes the column order of the coefficient matrix W.
struct FunctionLibrary {
    JetSpace space;
    std::vector<JetPoly> entries;

    int size() const { return static_cast<int>(entries.size()); }
    std::vector<std::string> entry_names() const;
};

void validate_library(const FunctionLibrary& lib);

// All monomials of total degree <= degree in the p+q order-0 variables,
// constant included. Listing order: by total degree, then largest exponent
// first, then exponent vector (coords before fields) lexicographically
// descending; for degree 2 this yields 1, x, u, x^2, u^2, xu.
FunctionLibrary build_poly_library(const JetSpace& space, int degree);

// [x, u] or [1, x, u].
FunctionLibrary build_linear_library(const JetSpace& space, bool include_constant);

// Componentwise total derivative D_J of every entry.
std::vector<JetPoly> d_theta(const FunctionLibrary& lib, const MultiIndex& j);

// JSON spec {coords:[...], fields:[...], entries:["x*u", ...]}.
FunctionLibrary library_from_json_text(const std::string& text);
std::string library_to_json_text(const FunctionLibrary& lib);

// Named forms: "polyN" (monomials up to degree N), "linear", "affine",
// or "@path/to/library.json".
FunctionLibrary make_library(const JetSpace& space, const std::string& spec);

}  // namespace liesym

#endif
