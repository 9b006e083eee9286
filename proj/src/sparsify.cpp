#include "liesym/sparsify.hpp"
#include "liesym/binio.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace liesym {

void LadmapParams::validate() const {
    if (eps1 <= 0 || eps2 <= 0) throw std::invalid_argument("tolerances must be positive");
    if (beta0 <= 0 || beta_max < beta0)
        throw std::invalid_argument("need beta_max >= beta0 > 0");
    if (rho0 < 1) throw std::invalid_argument("rho0 must be >= 1");
    if (eta_r_factor <= 1 || eta_z <= 1)
        throw std::invalid_argument("eta factors must exceed 1");
    if (max_iterations < 1) throw std::invalid_argument("max iterations must be >= 1");
}

double soft_threshold(double x, double eps) {
    if (eps < 0) throw std::invalid_argument("soft threshold shift must be >= 0");
    double mag = std::abs(x) - eps;
    return mag > 0 ? (x > 0 ? mag : -mag) : 0.0;
}

namespace {

// matrix infinity norm: maximum absolute row sum
double inf_norm(const Eigen::MatrixXd& m) {
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double l11(const Eigen::MatrixXd& m) { return m.cwiseAbs().sum(); }

}  // namespace

namespace {

Eigen::MatrixXd ladmap_run(const Eigen::MatrixXd& q, const LadmapParams& params,
                           LadmapDiagnostics& out) {
    const long d = q.cols();
    Eigen::JacobiSVD<Eigen::MatrixXd> qsvd(q);
    double q2 = qsvd.singularValues()(0);
    const double eta_r = params.eta_r_factor * q2 * q2;
    const double eta_z = params.eta_z;

    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd z = q * r;
    Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(q.rows(), d);
    double beta = params.beta0;

    out = LadmapDiagnostics{};
    out.objective_initial = l11(q);
    double step = 0;
    for (int k = 0; k < params.max_iterations; ++k) {
        Eigen::MatrixXd residual = q * r - z;
        Eigen::MatrixXd r_target =
            r - (q.transpose() * (lambda + beta * residual)) / (beta * eta_r);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(r_target,
                                              Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::MatrixXd r_next = svd.matrixU() * svd.matrixV().transpose();

        Eigen::MatrixXd z_target = z + (lambda + beta * (q * r_next - z)) / (beta * eta_z);
        Eigen::MatrixXd z_next = z_target.unaryExpr(
            [&](double v) { return soft_threshold(v, 1.0 / (beta * eta_z)); });

        lambda += beta * (q * r_next - z_next);

        step = beta * std::max(std::sqrt(eta_r) * inf_norm(r_next - r),
                               std::sqrt(eta_z) * inf_norm(z_next - z));
        beta = std::min(params.beta_max, (step < params.eps2 ? params.rho0 : 1.0) * beta);

        r = r_next;
        z = z_next;
        out.iterations = k + 1;
        out.feasibility = inf_norm(q * r - z);
        if (out.feasibility < params.eps1 && step <= params.eps2) {
            out.converged = true;
            break;
        }
    }
    out.step = step;
    Eigen::MatrixXd q_star = q * r;
    out.objective_final = l11(q_star);
    return q_star;
}

Eigen::MatrixXd seeded_rotation(long d, uint64_t seed) {
    // QR of a gaussian matrix, diagonal sign fixed
    GaussianRng rng(seed);
    Eigen::MatrixXd g(d, d);
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j) g(i, j) = rng.gaussian();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
    for (long c = 0; c < d; ++c)
        if (r(c, c) < 0) q.col(c) = -q.col(c);
    return q;
}

}  // namespace

Eigen::MatrixXd ladmap_sparsify(const Eigen::MatrixXd& q, const LadmapParams& params,
                                LadmapDiagnostics* diag) {
    params.validate();
    const long d = q.cols();
    if (d == 0) {
        if (diag) *diag = LadmapDiagnostics{0, true, 0, 0, 0, 0, 0};
        return q;
    }
    Eigen::MatrixXd gram = q.transpose() * q;
    if ((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument("basis must have orthonormal columns");

    Eigen::MatrixXd best;
    LadmapDiagnostics best_diag;
    for (int attempt = 0; attempt < std::max(1, params.restarts); ++attempt) {
        Eigen::MatrixXd r0 = attempt == 0
                                 ? Eigen::MatrixXd::Identity(d, d).eval()
                                 : seeded_rotation(d, 0x51ad3a9 + 7919u * attempt);
        LadmapDiagnostics run_diag;
        Eigen::MatrixXd q_star = ladmap_run(q * r0, params, run_diag);
        run_diag.selected_restart = attempt;
        bool better = best.size() == 0 ||
                      (run_diag.converged && !best_diag.converged) ||
                      (run_diag.converged == best_diag.converged &&
                       run_diag.objective_final < best_diag.objective_final);
        if (better) {
            best = q_star;
            best_diag = run_diag;
        }
    }
    best_diag.objective_initial = l11(q);
    if (diag) *diag = best_diag;
    return best;
}

Eigen::MatrixXd canonicalize_basis(const Eigen::MatrixXd& q, double tol) {
    Eigen::MatrixXd out = q;
    const long n = q.rows(), d = q.cols();
    for (long c = 0; c < d; ++c) {
        long imax = 0;
        for (long i = 1; i < n; ++i)
            if (std::abs(out(i, c)) > std::abs(out(imax, c))) imax = i;
        if (out(imax, c) < 0) out.col(c) = -out.col(c);
    }
    std::vector<long> order(d);
    for (long c = 0; c < d; ++c) order[c] = c;
    auto sparsity = [&](long c) {
        long nz = 0;
        for (long i = 0; i < n; ++i)
            if (std::abs(out(i, c)) > tol) ++nz;
        return nz;
    };
    std::stable_sort(order.begin(), order.end(), [&](long a, long b) {
        long sa = sparsity(a), sb = sparsity(b);
        if (sa != sb) return sa < sb;
        for (long i = 0; i < n; ++i) {
            if (out(i, a) < out(i, b) - tol) return true;
            if (out(i, a) > out(i, b) + tol) return false;
        }
        return false;
    });
    Eigen::MatrixXd sorted(n, d);
    for (long c = 0; c < d; ++c) sorted.col(c) = out.col(order[c]);
    return sorted;
}

}  // namespace liesym
