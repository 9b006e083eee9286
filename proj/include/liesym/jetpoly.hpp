#ifndef LIESYM_JETPOLY_HPP
#define LIESYM_JETPOLY_HPP

#include <compare>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace liesym {

// Multi-index over independent-coordinate indices, stored as a sorted multiset.
using MultiIndex = std::vector<int>;

MultiIndex sorted_multi_index(MultiIndex j);

// Declares the coordinate system of a jet space: p independent variables
// (e.g. t, x, y) and q dependent variables (e.g. u, v). Names are used for
// text rendering and parsing; indices everywhere else.
struct JetSpace {
    std::vector<std::string> coords;
    std::vector<std::string> fields;

    int p() const { return static_cast<int>(coords.size()); }
    int q() const { return static_cast<int>(fields.size()); }

    int coord_index(const std::string& name) const;   // -1 if absent
    int field_index(const std::string& name) const;   // -1 if absent

    bool operator==(const JetSpace& o) const = default;
};

JetSpace make_space(std::vector<std::string> coords, std::vector<std::string> fields);

// One jet coordinate: either an independent variable x^i or a derivative
// coordinate u^alpha_J. J is kept sorted; J empty means u^alpha itself.
class JetVar {
public:
    static JetVar indep(int coord);
    static JetVar deriv(int field, MultiIndex j = {});

    bool is_indep() const { return indep_; }
    bool is_deriv() const { return !indep_; }
    int coord() const;
    int field() const;
    const MultiIndex& index() const;
    int order() const;  // |J| for derivative coordinates, 0 for independents

    // Derivative coordinate with one more differentiation in direction i.
    JetVar differentiated(int coord) const;

    std::string name(const JetSpace& space) const;
    static JetVar parse(const JetSpace& space, const std::string& name);

    // Canonical order: independents first (by coordinate), then derivative
    // coordinates by (field, |J|, J).
    std::strong_ordering operator<=>(const JetVar& o) const;
    bool operator==(const JetVar& o) const = default;

private:
    JetVar(bool indep, int idx, MultiIndex j)
        : indep_(indep), idx_(idx), j_(std::move(j)) {}
    bool indep_;
    int idx_;
    MultiIndex j_;
};

// Exponent map of a monomial; no zero exponents stored.
using ExpMap = std::map<JetVar, int>;

struct Monomial {
    double coeff = 0.0;
    ExpMap exps;

    int degree() const;
};

// Assignment of values to jet coordinates.
using JetValues = std::map<JetVar, double>;

// Polynomial over jet coordinates with real coefficients, kept in canonical
// form: unique exponent maps, no zero coefficients, the zero polynomial has
// no terms.
class JetPoly {
public:
    JetPoly() = default;
    explicit JetPoly(double c);
    explicit JetPoly(const JetVar& v, int exponent = 1);

    static JetPoly zero() { return JetPoly(); }
    static JetPoly one() { return JetPoly(1.0); }

    bool is_zero() const { return terms_.empty(); }
    int num_terms() const { return static_cast<int>(terms_.size()); }
    int degree() const;  // total degree; -1 for the zero polynomial
    const std::map<ExpMap, double>& terms() const { return terms_; }

    std::vector<Monomial> monomials() const;  // ascending (degree, exponents)

    JetPoly& operator+=(const JetPoly& o);
    JetPoly& operator-=(const JetPoly& o);
    JetPoly& operator*=(const JetPoly& o);
    JetPoly& operator*=(double s);

    friend JetPoly operator+(JetPoly a, const JetPoly& b) { return a += b; }
    friend JetPoly operator-(JetPoly a, const JetPoly& b) { return a -= b; }
    friend JetPoly operator*(JetPoly a, const JetPoly& b) { return a *= b; }
    friend JetPoly operator*(JetPoly a, double s) { return a *= s; }
    friend JetPoly operator*(double s, JetPoly a) { return a *= s; }
    friend JetPoly operator-(JetPoly a) { return a *= -1.0; }

    bool operator==(const JetPoly& o) const;

    void add_term(double coeff, ExpMap exps);

private:
    std::map<ExpMap, double> terms_;
    void prune();
};

// Total derivative D_i: treats dependent variables as functions of the
// independents, so D_i x^j = delta_ij and D_i u^a_J = u^a_{J,i}.
JetPoly total_derivative(const JetSpace& space, const JetPoly& poly, int coord);

// Left fold of total_derivative over the entries of J; D_{} is the identity.
JetPoly total_derivative_multi(const JetSpace& space, const JetPoly& poly, const MultiIndex& j);

// Exact evaluation; throws if a jet coordinate of `poly` has no value.
double evaluate(const JetPoly& poly, const JetValues& values, const JetSpace& space);

// Generic lookup-based evaluation; Lookup is (const JetVar&) -> const double*
// returning nullptr for unhoused variables.
template <class Lookup>
double evaluate_with(const JetPoly& poly, const JetSpace& space, Lookup&& lookup) {
    double total = 0.0;
    for (const auto& [exps, coeff] : poly.terms()) {
        double term = coeff;
        for (const auto& [var, e] : exps) {
            const double* v = lookup(var);
            if (v == nullptr)
                throw std::runtime_error("unhoused variable " + var.name(space) +
                                         " in polynomial evaluation");
            double base = *v;
            for (int k = 0; k < e; ++k) term *= base;
        }
        total += term;
    }
    return total;
}

// Deterministic text form, e.g. "u + x*u_x", "-2*t*x", "0". Round-trips
// through parse_poly.
std::string to_text(const JetPoly& poly, const JetSpace& space);

// Parses the expanded-sum format emitted by to_text (signs, '*', '^').
JetPoly parse_poly(const JetSpace& space, const std::string& text);

std::string format_real(double v);

}  // namespace liesym

#endif
