#ifndef LIESYM_PROLONG_HPP
#define LIESYM_PROLONG_HPP

#include <Eigen/Core>
#include <map>
#include <vector>

#include "liesym/library.hpp"

namespace liesym {

// Ordered row labels of the prolonged coefficient matrix: independent
// coordinates and/or derivative coordinates, each given as a JetVar.
using DerivCoordSet = std::vector<JetVar>;

DerivCoordSet parse_deriv_coords(const JetSpace& space,
                                 const std::vector<std::string>& names);

// All derivative coordinates (alpha, J) with |J| <= order, fields outermost,
// J ordered by (|J|, lexicographic).
DerivCoordSet full_deriv_coords(const JetSpace& space, int order);

// Sub-multisets of a sorted multi-index together with the multiset binomial
// multiplicity prod_c C(mult_J(c), mult_I(c)). `proper` drops I == J.
struct SubMultiset {
    MultiIndex part;        // I
    MultiIndex complement;  // J \ I
    double multiplicity;
};
std::vector<SubMultiset> sub_multisets(const MultiIndex& j, bool proper);

// Coefficient of d/du^alpha_J in the prolonged vector field, as p+q blocks of
// r polynomials each (one block per row of W):
//   block i   (i < p):  -sum_{I subset J, I != J} m(J,I) u^alpha_{I,i} D_{J\I}Theta
//   block p+b:           delta_{alpha b} D_J Theta
// Requires |J| >= 1; order-0 rows are structural.
std::vector<std::vector<JetPoly>> phi_coefficient(const FunctionLibrary& lib,
                                                  int alpha, const MultiIndex& j);

// Symbolic prolonged coefficient matrix: one row per entry of `rows`, and
// (p+q)*r columns grouped in p+q blocks matching the stacking of vec(W).
struct ThetaN {
    JetSpace space;
    int r = 0;
    DerivCoordSet rows;
    std::vector<std::vector<JetPoly>> entries;  // rows x ((p+q)*r)

    int num_rows() const { return static_cast<int>(rows.size()); }
    int num_cols() const { return (space.p() + space.q()) * r; }

    template <class Lookup>
    Eigen::MatrixXd evaluate(Lookup&& lookup) const {
        Eigen::MatrixXd m(num_rows(), num_cols());
        for (int i = 0; i < num_rows(); ++i)
            for (int k = 0; k < num_cols(); ++k)
                m(i, k) = evaluate_with(entries[i][k], space, lookup);
        return m;
    }
    Eigen::MatrixXd evaluate_at(const JetValues& values) const;
};

ThetaN build_theta_n(const FunctionLibrary& lib, const DerivCoordSet& rows);

// Explicit symbolic prolongation of v = W Theta . grad up to order n: maps
// each independent coordinate to its xi^i and each derivative coordinate
// (|J| <= n) to its phi^J_alpha. W is (p+q) x r.
std::map<JetVar, JetPoly> prolong_vector_field(const FunctionLibrary& lib,
                                               const Eigen::MatrixXd& w, int order);

}  // namespace liesym

#endif
