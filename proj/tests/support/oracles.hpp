#ifndef LIESYM_TESTS_ORACLES_HPP
#define LIESYM_TESTS_ORACLES_HPP

// Independent oracles used by the test suites. Everything here is computed
// from first principles (nested finite differences, the classical
// prolongation formula) and must not call into the code paths it checks.

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "liesym/jetpoly.hpp"
#include "liesym/library.hpp"
#include "liesym/prolong.hpp"

namespace liesym::oracle {

// Nested central differences of a smooth callable f: R^p -> R at x, one
// differentiation per entry of j. O(h^2) accurate per level.
inline double central_derivative(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x, const MultiIndex& j, double h) {
    if (j.empty()) return f(x);
    MultiIndex rest(j.begin() + 1, j.end());
    int c = j.front();
    std::vector<double> xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    return (central_derivative(f, xp, rest, h) - central_derivative(f, xm, rest, h)) / (2 * h);
}

// Jet of a smooth vector function u = g(x) at a point: exact values for the
// independents, finite-difference values for every derivative coordinate up
// to `order`.
inline JetValues finite_difference_jet(
    const JetSpace& space,
    const std::function<std::vector<double>(const std::vector<double>&)>& g,
    const std::vector<double>& x, int order, double h) {
    JetValues vals;
    for (int i = 0; i < space.p(); ++i) vals[JetVar::indep(i)] = x[i];
    for (int a = 0; a < space.q(); ++a) {
        auto component = [&, a](const std::vector<double>& pt) { return g(pt)[a]; };
        for (const JetVar& v : full_deriv_coords(space, order)) {
            if (v.field() != a) continue;
            vals[v] = central_derivative(component, x, v.index(), h);
        }
    }
    return vals;
}

// Classical prolongation coefficient
//   phi^J_alpha = D_J(phi_alpha - sum_i xi^i u^alpha_i) + sum_i xi^i u^alpha_{J,i}
// computed purely with symbolic total derivatives. xi and phi are the
// order-0 components of the vector field.
inline JetPoly classical_phi(const JetSpace& space, const std::vector<JetPoly>& xi,
                             const std::vector<JetPoly>& phi, int alpha,
                             const MultiIndex& j) {
    JetPoly inner = phi[alpha];
    for (int i = 0; i < space.p(); ++i)
        inner -= xi[i] * JetPoly(JetVar::deriv(alpha, {i}));
    JetPoly result = total_derivative_multi(space, inner, j);
    for (int i = 0; i < space.p(); ++i) {
        MultiIndex ji = j;
        ji.push_back(i);
        result += xi[i] * JetPoly(JetVar::deriv(alpha, std::move(ji)));
    }
    return result;
}

inline double erand(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace liesym::oracle

#endif
