#include <cmath>

#include "doctest.h"
#include "liesym/metrics.hpp"
#include "liesym/sparsify.hpp"
#include "liesym/binio.hpp"
#include "support/oracles.hpp"

using namespace liesym;

namespace {

// random orthogonal matrix via QR of a gaussian matrix
Eigen::MatrixXd random_orthogonal(int d, uint64_t seed) {
    GaussianRng rng(seed);
    Eigen::MatrixXd g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = rng.gaussian();
    return orthonormalize(g);
}

// sparse orthonormal basis with disjoint column supports
Eigen::MatrixXd planted_sparse(int n, int d, uint64_t seed) {
    GaussianRng rng(seed);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, d);
    int per = n / d;
    for (int c = 0; c < d; ++c) {
        for (int k = 0; k < 3; ++k) {
            int row = c * per + static_cast<int>(rng.next_u64() % per);
            s(row, c) = rng.gaussian();
        }
        while (s.col(c).norm() < 1e-6) s(c * per, c) = 1.0;
        s.col(c).normalize();
    }
    return s;
}

}  // namespace

TEST_CASE("soft thresholding") {
    CHECK(soft_threshold(1.2, 0.5) == doctest::Approx(0.7));
    CHECK(soft_threshold(-0.3, 0.5) == 0.0);
    CHECK(soft_threshold(-1.0, 0.5) == doctest::Approx(-0.5));
    CHECK(soft_threshold(0.0, 0.0) == 0.0);
    CHECK(soft_threshold(2.0, 0.0) == 2.0);
    CHECK_THROWS(soft_threshold(1.0, -0.1));
}

TEST_CASE("worked basis rotation example") {
    // the mixed pair spans the same plane as the axis-sparse pair
    Eigen::MatrixXd q(4, 2);
    q << 0.5, 0.5, -0.5, 0.5, 0.5, 0.5, 0.5, -0.5;
    LadmapParams params;
    LadmapDiagnostics diag;
    Eigen::MatrixXd q_star = ladmap_sparsify(q, params, &diag);
    CHECK(diag.converged);

    Eigen::MatrixXd expect(4, 2);
    double s = std::sqrt(2.0) / 2;
    expect << s, 0, 0, s, s, 0, 0, -s;  // columns up to order/sign
    Eigen::MatrixXd a = canonicalize_basis(q_star), b = canonicalize_basis(expect);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-6);

    // span is preserved exactly
    CHECK(grassmann_distance(orthonormalize(q_star), q) < 1e-8);
    CHECK(diag.objective_final <= diag.objective_initial + 1e-9);
}

TEST_CASE("axis-sparse input is left unchanged up to sign") {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(5, 2);
    q(1, 0) = -1.0;
    q(3, 1) = 1.0;
    LadmapParams params;
    Eigen::MatrixXd q_star = ladmap_sparsify(q, params);
    CHECK((canonicalize_basis(q_star) - canonicalize_basis(q)).cwiseAbs().maxCoeff() <
          1e-8);
}

TEST_CASE("planted rotations are recovered") {
    LadmapParams params;
    params.eps1 = 1e-7;
    params.eps2 = 1e-7;
    for (uint64_t seed : {1, 2, 3, 4, 5}) {
        Eigen::MatrixXd s = planted_sparse(30, 5, seed);
        Eigen::MatrixXd q = s * random_orthogonal(5, seed + 100);
        LadmapDiagnostics diag;
        Eigen::MatrixXd q_star = ladmap_sparsify(q, params, &diag);
        CHECK(diag.converged);
        CHECK(q_star.cwiseAbs().sum() <= s.cwiseAbs().sum() + 1e-6);
        CHECK(grassmann_distance(orthonormalize(q_star), orthonormalize(s)) < 1e-8);
    }
}

TEST_CASE("iterate stays on the rotation manifold") {
    Eigen::MatrixXd s = planted_sparse(12, 3, 9);
    Eigen::MatrixXd q = s * random_orthogonal(3, 77);
    Eigen::MatrixXd q_star = ladmap_sparsify(q, LadmapParams{});
    Eigen::MatrixXd gram = q_star.transpose() * q_star;
    CHECK((gram - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("non-orthonormal input is rejected") {
    Eigen::MatrixXd q(3, 2);
    q << 1, 1, 0, 1, 0, 0;
    CHECK_THROWS(ladmap_sparsify(q, LadmapParams{}));
    LadmapParams bad;
    bad.rho0 = 0.5;
    CHECK_THROWS(ladmap_sparsify(Eigen::MatrixXd::Identity(3, 2), bad));
}

TEST_CASE("canonicalization invariances") {
    Eigen::MatrixXd q(4, 2);
    q << 0.9, 0.0, 0.1, -0.8, 0.0, 0.1, 0.4, 0.0;
    Eigen::MatrixXd base = canonicalize_basis(q);

    Eigen::MatrixXd flipped = q;
    flipped.col(0) = -flipped.col(0);
    CHECK((canonicalize_basis(flipped) - base).cwiseAbs().maxCoeff() == 0.0);

    Eigen::MatrixXd permuted(4, 2);
    permuted.col(0) = q.col(1);
    permuted.col(1) = q.col(0);
    CHECK((canonicalize_basis(permuted) - base).cwiseAbs().maxCoeff() == 0.0);

    CHECK((canonicalize_basis(base) - base).cwiseAbs().maxCoeff() == 0.0);
}
