#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "liesym/discover.hpp"
#include <Eigen/SVD>
#include "liesym/metrics.hpp"
#include "support/oracles.hpp"

using namespace liesym;

namespace {

// order-0 dataset of points on the unit circle
ProlongedDataset circle_points(int n, uint64_t seed) {
    JetSpace space = make_space({}, {"x", "y"});
    ProlongedDataset ds;
    ds.space = space;
    ds.order = 0;
    ds.pde = "circle";
    ds.channels = {JetVar::deriv(0), JetVar::deriv(1)};
    GaussianRng rng(seed);
    for (int i = 0; i < n; ++i) {
        double th = 2 * M_PI * rng.uniform();
        ds.prov.push_back(Provenance{0, i, 0});
        ds.values.push_back(std::cos(th));
        ds.values.push_back(std::sin(th));
    }
    return ds;
}

ResidualSpec circle_residual(const JetSpace& space) {
    auto f = std::make_shared<CallableRhs>(
        parse_deriv_coords(space, {"x", "y"}), std::vector<JetVar>{JetVar::deriv(0)},
        [](const Eigen::VectorXd& z) {
            return Eigen::VectorXd::Constant(1, z(0) * z(0) + z(1) * z(1) - 1);
        },
        [](const Eigen::VectorXd& z) {
            Eigen::MatrixXd j(1, 2);
            j << 2 * z(0), 2 * z(1);
            return j;
        });
    return ResidualSpec{f, {}};
}

std::vector<long> iota_samples(long n) {
    std::vector<long> idx(n);
    for (long i = 0; i < n; ++i) idx[i] = i;
    return idx;
}

}  // namespace

TEST_CASE("null space extraction on a hand matrix") {
    JetSpace space = make_space({}, {"x", "y"});
    FunctionLibrary lib = build_linear_library(space, false);
    CriterionSystem sys;
    sys.gram = false;
    sys.library = lib;
    sys.mat = Eigen::MatrixXd::Zero(2, 4);
    sys.mat(0, 0) = 1.0;  // sigma = {1, 0, 0, 0}
    GeneratorBasis basis = null_space(sys, 0.5);
    CHECK(basis.d == 3);
    CHECK(basis.spectrum(0) == doctest::Approx(1.0));
    CHECK((sys.mat * basis.q).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((basis.q.transpose() * basis.q - Eigen::MatrixXd::Identity(3, 3))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    CHECK(null_space(sys, 0.0).d == 0);
    CHECK_THROWS(null_space(sys, -1.0));
}

TEST_CASE("circle equation yields the rotation generator") {
    ProlongedDataset ds = circle_points(60, 17);
    FunctionLibrary lib = build_linear_library(ds.space, false);
    ResidualSpec residual = circle_residual(ds.space);
    DerivCoordSet rows = residual.default_rows();
    CriterionSystem sys = build_c(ds, iota_samples(60), residual, lib, rows);
    GeneratorBasis basis = null_space(sys, 1e-6);
    REQUIRE(basis.d == 1);
    Eigen::VectorXd g = basis.q.col(0);
    Eigen::VectorXd expect(4);
    expect << 0, -1, 1, 0;
    expect.normalize();
    CHECK(std::abs(g.dot(expect)) > 1.0 - 1e-10);
    CHECK(basis.w[0](0, 1) == doctest::Approx(-basis.w[0](1, 0)).epsilon(1e-9));
}

TEST_CASE("gram accumulation equals the dense normal matrix") {
    ProlongedDataset ds = circle_points(40, 3);
    FunctionLibrary lib = build_linear_library(ds.space, false);
    ResidualSpec residual = circle_residual(ds.space);
    DerivCoordSet rows = residual.default_rows();
    auto idx = iota_samples(40);
    CriterionSystem dense = build_c(ds, idx, residual, lib, rows);
    CriterionSystem gram = accumulate_gram(ds, idx, residual, lib, rows);
    Eigen::MatrixXd expect = dense.mat.transpose() * dense.mat;
    CHECK((gram.mat - expect).cwiseAbs().maxCoeff() <
          1e-10 * expect.cwiseAbs().maxCoeff());

    GeneratorBasis bd = null_space(dense, 1e-6);
    GeneratorBasis bg = null_space(gram, 1e-6);
    // the gram eigenvalues match the squared singular values; taking square
    // roots costs half the digits on the near-zero tail, so compare squares
    // with an absolute floor set by the matrix scale
    for (int i = 0; i < bd.spectrum.size(); ++i) {
        double a = bg.spectrum(i) * bg.spectrum(i);
        double b = bd.spectrum(i) * bd.spectrum(i);
        CHECK(std::abs(a - b) < 1e-10 * expect.norm() + 1e-10 * std::abs(b));
    }
    CHECK(bd.d == bg.d);
    CHECK(grassmann_distance(bd.q, bg.q) < 1e-6);

    CriterionSystem one = accumulate_gram(ds, {0}, residual, lib, rows);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(one.mat);
    int rank = 0;
    for (long i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-10 * svd.singularValues()(0)) ++rank;
    CHECK(rank <= 1);
}

TEST_CASE("gram path selection ratio") {
    CHECK(prefer_gram(100, 1, 16));        // 6.25 >= 4
    CHECK_FALSE(prefer_gram(100, 1, 30));  // 3.33 < 4
    CHECK_FALSE(prefer_gram(100, 1, 60));
    CHECK(prefer_gram(100, 2, 30));        // 6.67 >= 4
}

TEST_CASE("row scaling leaves the exact null space unchanged") {
    ProlongedDataset ds = circle_points(50, 29);
    FunctionLibrary lib = build_linear_library(ds.space, false);
    ResidualSpec residual = circle_residual(ds.space);
    DerivCoordSet rows = residual.default_rows();
    CriterionSystem sys = build_c(ds, iota_samples(50), residual, lib, rows);
    GeneratorBasis before = null_space(sys, 1e-6);
    GaussianRng rng(5);
    for (long i = 0; i < sys.mat.rows(); i += 3)
        sys.mat.row(i) *= 0.5 + 2 * rng.uniform();
    GeneratorBasis after = null_space(sys, 1e-6);
    REQUIRE(before.d == after.d);
    CHECK(grassmann_distance(before.q, after.q) < 1e-8);
}

TEST_CASE("sample permutation invariance") {
    ProlongedDataset ds = circle_points(80, 31);
    FunctionLibrary lib = build_linear_library(ds.space, false);
    ResidualSpec residual = circle_residual(ds.space);
    DerivCoordSet rows = residual.default_rows();
    auto idx = iota_samples(80);
    CriterionSystem a = build_c(ds, idx, residual, lib, rows);
    std::reverse(idx.begin(), idx.end());
    CriterionSystem b = build_c(ds, idx, residual, lib, rows);
    GeneratorBasis ba = null_space(a, 1e-6), bb = null_space(b, 1e-6);
    REQUIRE(ba.d == bb.d);
    CHECK(grassmann_distance(ba.q, bb.q) < 1e-10);
}

TEST_CASE("generator rendering") {
    JetSpace space = make_space({"t", "x"}, {"u"});
    FunctionLibrary lib = build_poly_library(space, 2);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 10);
    w(0, 1) = -3;
    w(1, 2) = -1;
    w(2, 3) = 2;
    CHECK(render_generator(w, lib) == "-3*t ∂/∂t + -x ∂/∂x + 2*u ∂/∂u");

    Eigen::MatrixXd unit = Eigen::MatrixXd::Zero(3, 10);
    unit(0, 0) = 1;
    CHECK(render_generator(unit, lib) == "∂/∂t");

    CHECK(render_generator(Eigen::MatrixXd::Zero(3, 10), lib) == "0");

    Eigen::MatrixXd noisy = unit;
    noisy(2, 5) = 1e-12;
    CHECK(render_generator(noisy, lib) == "∂/∂t");

    Eigen::MatrixXd multi = Eigen::MatrixXd::Zero(3, 10);
    multi(2, 1) = -2;
    multi(2, 5) = -1;
    CHECK(render_generator(multi, lib) == "(-2*t - x^2) ∂/∂u");
}

TEST_CASE("spectrum report") {
    GeneratorBasis basis;
    basis.spectrum = Eigen::VectorXd(4);
    basis.spectrum << 10, 5, 1e-6, 1e-8;
    basis.eps2 = 0.5;
    basis.d = 2;
    SpectrumReport rep = spectrum_report(basis);
    CHECK(rep.last_kept == doctest::Approx(5.0));
    CHECK(rep.first_null == doctest::Approx(1e-6));
    CHECK(rep.gap_ratio == doctest::Approx(5e6));
    CHECK(rep.to_text().find("d = 2") != std::string::npos);

    GeneratorBasis empty;
    empty.spectrum = basis.spectrum;
    empty.eps2 = 1e-12;
    empty.d = 0;
    CHECK(spectrum_report(empty).to_text().find("no generators found") !=
          std::string::npos);
}

TEST_CASE("discovery result json round trip") {
    ProlongedDataset ds = circle_points(30, 7);
    FunctionLibrary lib = build_linear_library(ds.space, false);
    ResidualSpec residual = circle_residual(ds.space);
    CriterionSystem sys =
        build_c(ds, iota_samples(30), residual, lib, residual.default_rows());
    DiscoveryResult res;
    res.pde = "circle";
    res.library = lib;
    res.rows = residual.default_rows();
    res.gram = false;
    res.num_samples = 30;
    res.dataset_fingerprint = ds.fingerprint();
    res.config_echo = {{"threshold", "1e-06"}, {"samples", "30"}};
    res.basis = null_space(sys, 1e-6);

    std::string text = result_to_json_text(res);
    DiscoveryResult back = result_from_json_text(text);
    CHECK(back.pde == res.pde);
    CHECK(back.basis.d == res.basis.d);
    CHECK((back.basis.q - res.basis.q).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.basis.expressions == res.basis.expressions);
    CHECK(back.config_echo == res.config_echo);
    CHECK(back.dataset_fingerprint == res.dataset_fingerprint);
    CHECK(result_to_json_text(back) == text);
}
