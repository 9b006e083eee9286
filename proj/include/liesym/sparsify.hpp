#ifndef LIESYM_SPARSIFY_HPP
#define LIESYM_SPARSIFY_HPP

#include <Eigen/Core>

namespace liesym {

// Linearized ADMM with adaptive penalty for min ||Q R||_{1,1} s.t. R^T R = I.
// The problem is nonconvex (the orthogonal group); a single run can settle on
// a first-order critical point such as R = I when the entries of Q are
// magnitude-symmetric, so the solver restarts from a few seeded initial
// rotations and keeps the best converged objective.
struct LadmapParams {
    double eps1 = 1e-4;      // feasibility tolerance on ||QR - Z||_inf
    double eps2 = 1e-4;      // step tolerance
    double beta0 = 10.0;
    double beta_max = 1e10;
    double rho0 = 1.9;
    double eta_r_factor = 1.02;  // eta_R = factor * ||Q||_2^2
    double eta_z = 1.02;
    int max_iterations = 10000;
    int restarts = 4;  // attempt 0 starts at R = I, the rest at seeded rotations
    void validate() const;
};

struct LadmapDiagnostics {
    int iterations = 0;  // of the selected attempt
    bool converged = false;
    double feasibility = 0.0;  // ||QR - Z||_inf at exit
    double step = 0.0;         // beta-scaled step norm at exit
    double objective_initial = 0.0;
    double objective_final = 0.0;  // ||Q R||_{1,1}
    int selected_restart = 0;
};

double soft_threshold(double x, double eps);

// Returns Q* = Q R with R orthogonal; span(Q*) = span(Q) exactly.
Eigen::MatrixXd ladmap_sparsify(const Eigen::MatrixXd& q, const LadmapParams& params,
                                LadmapDiagnostics* diag = nullptr);

// Sign-fix each column (largest-magnitude entry positive), then order columns
// by (number of non-negligible entries, entries lexicographically).
Eigen::MatrixXd canonicalize_basis(const Eigen::MatrixXd& q, double tol = 1e-8);

}  // namespace liesym

#endif
