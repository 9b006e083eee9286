#ifndef LIESYM_METRICS_HPP
#define LIESYM_METRICS_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "liesym/library.hpp"

namespace liesym {

// Thin-QR orthonormalization; throws on rank-deficient input.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& basis);

// sqrt(sum of squared principal angles) between two equal-dimensional
// subspaces given by orthonormal bases. Singular values are clamped into
// [0, 1] before arccos.
double grassmann_distance(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2);

// Principal angles of span(sub) inside span(big); sub may have fewer columns.
// Returns sqrt(sum theta_i^2) over sub's dimension.
double subspace_containment(const Eigen::MatrixXd& sub, const Eigen::MatrixXd& big);

// Encodes one generator (coordinate name -> polynomial text) as a stacked
// coefficient vector over the library ordering; throws if a term falls
// outside the library span.
Eigen::VectorXd encode_generator(const FunctionLibrary& lib,
                                 const std::vector<std::pair<std::string, std::string>>&
                                     components);

// Published reference algebras, one orthonormal column per generator.
Eigen::MatrixXd truth_algebra(const std::string& name, const FunctionLibrary& lib);
std::vector<std::string> truth_algebra_names();
int truth_algebra_dimension(const std::string& name);

// The same fixtures serialized as JSON (what ships in data/).
std::string truth_algebras_json();

// Zeroes every coefficient on a library entry of total degree != 1, then
// orthonormalizes; used for linear-part comparison protocols.
Eigen::MatrixXd project_linear_part(const Eigen::MatrixXd& q, const FunctionLibrary& lib);

}  // namespace liesym

#endif
