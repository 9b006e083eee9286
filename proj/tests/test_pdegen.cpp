#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "liesym/pdegen.hpp"

using namespace liesym;

namespace {

GridSpec small_grid() {
    GridSpec g;
    g.L = 20.0;
    g.nx = 64;
    g.T = 2.0;
    g.nt = 100;
    g.substeps = 5;
    return g;
}

double x_of(const GridSpec& g, int j) { return -g.L / 2 + j * g.h(); }

}  // namespace

TEST_CASE("fourier initial conditions") {
    GridSpec g = small_grid();
    GaussianRng rng1(42), rng2(42);
    Grid a = sample_fourier_ic(g, 1, 10, 1.0, rng1);
    Grid b = sample_fourier_ic(g, 1, 10, 1.0, rng2);
    CHECK(a.v == b.v);  // determinism

    GaussianRng rng3(7);
    Grid c = sample_fourier_ic(g, 1, 0, 1.0, rng3);
    for (int j = 1; j < g.nx; ++j) CHECK(c.at(j) == doctest::Approx(c.at(0)));

    GaussianRng rng4(7);
    Grid c2 = sample_fourier_ic(g, 2, 0, 1.0, rng4);
    CHECK(c2.at(3, 5) == doctest::Approx(c.at(0) / 2));  // a0/4 vs a0/2, same draw

    // periodic extension: value repeats after nx steps by construction of the basis
    GaussianRng rng5(9);
    Grid d = sample_fourier_ic(g, 1, 4, 1.0, rng5);
    double w = 2 * M_PI / g.L;
    double lhs = 0, rhs = 0;
    GaussianRng rng6(9);
    double a0 = rng6.gaussian();
    lhs = rhs = a0 / 2;
    for (int k = 1; k <= 4; ++k) {
        double ca = rng6.gaussian(), cb = rng6.gaussian();
        lhs += ca * std::cos(k * w * (-g.L / 2)) + cb * std::sin(k * w * (-g.L / 2));
        rhs += ca * std::cos(k * w * (g.L / 2)) + cb * std::sin(k * w * (g.L / 2));
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(d.at(0) == doctest::Approx(lhs).epsilon(1e-12));
}

TEST_CASE("central difference stencils against analytic derivatives") {
    GridSpec g = small_grid();
    Grid f = Grid::zeros(1, g.nx);
    double w = 2 * M_PI / g.L;
    for (int j = 0; j < g.nx; ++j) f.at(j) = std::sin(w * x_of(g, j));

    Grid d1 = spatial_derivs_periodic(f, 0, 1, g.h());
    double h = g.h();
    double max_err = 0;
    for (int j = 0; j < g.nx; ++j)
        max_err = std::max(max_err, std::abs(d1.at(j) - w * std::cos(w * x_of(g, j))));
    CHECK(max_err < w * w * w * h * h / 6 * 1.01);

    Grid c = Grid::zeros(1, g.nx);
    for (auto& v : c.v) v = 3.25;
    for (int order = 1; order <= 3; ++order) {
        Grid d = spatial_derivs_periodic(c, 0, order, g.h());
        for (double v : d.v) CHECK(v == 0.0);
    }
    CHECK_THROWS(spatial_derivs_periodic(f, 0, 4, g.h()));
}

TEST_CASE("stencil eigenvalues match discrete Fourier symbols") {
    GridSpec g = small_grid();
    double h = g.h();
    for (int mode : {1, 3, 7}) {
        double k = 2 * M_PI * mode / g.L;
        Grid fc = Grid::zeros(1, g.nx), fs = Grid::zeros(1, g.nx);
        for (int j = 0; j < g.nx; ++j) {
            fc.at(j) = std::cos(k * x_of(g, j));
            fs.at(j) = std::sin(k * x_of(g, j));
        }
        // first derivative: symbol i*sin(kh)/h; acting on cos gives -sin * sym
        Grid d1 = spatial_derivs_periodic(fc, 0, 1, h);
        double sym1 = std::sin(k * h) / h;
        for (int j = 0; j < g.nx; j += 5)
            CHECK(d1.at(j) == doctest::Approx(-sym1 * fs.at(j)).epsilon(1e-10));
        // second derivative: symbol -4 sin^2(kh/2)/h^2
        Grid d2 = spatial_derivs_periodic(fc, 0, 2, h);
        double sym2 = -4 * std::pow(std::sin(k * h / 2), 2) / (h * h);
        for (int j = 0; j < g.nx; j += 5)
            CHECK(d2.at(j) == doctest::Approx(sym2 * fc.at(j)).epsilon(1e-10));
        // third derivative on sin: (sin 2kh - 2 sin kh)/h^3 * cos, which tends
        // to -k^3 cos as h -> 0
        Grid d3 = spatial_derivs_periodic(fs, 0, 3, h);
        double sym3 = (std::sin(2 * k * h) - 2 * std::sin(k * h)) / (h * h * h);
        for (int j = 0; j < g.nx; j += 5)
            CHECK(d3.at(j) == doctest::Approx(sym3 * fc.at(j)).epsilon(1e-8));
    }
}

TEST_CASE("rk4 on the heat equation matches the discrete mode decay") {
    GridSpec g;
    g.L = 20.0;
    g.nx = 100;
    g.T = 2.0;
    g.nt = 200;
    g.substeps = 1;
    PdeSpec heat = builtin_pde("heat");
    Grid u0 = Grid::zeros(1, g.nx);
    double k = 2 * M_PI / g.L;
    for (int j = 0; j < g.nx; ++j) u0.at(j) = std::sin(k * x_of(g, j));
    TrajectoryDataset traj = rk4_integrate(heat, {{u0}}, g);

    // the semi-discrete system decays each mode with the stencil symbol
    double lambda = -4 * std::pow(std::sin(k * g.h() / 2), 2) / (g.h() * g.h());
    for (int it : {50, 100, 199}) {
        double t = traj.t[it];
        double expect_discrete = std::exp(lambda * t);
        double expect_continuum = std::exp(-k * k * t);
        double got = traj.value(0, it, 25, 0) / u0.at(25);
        CHECK(got == doctest::Approx(expect_discrete).epsilon(1e-8));
        CHECK(got == doctest::Approx(expect_continuum).epsilon(1e-3));
    }

    // zero right-hand side keeps the state constant
    PdeSpec frozen = heat;
    frozen.rhs = [](const std::vector<Grid>& f, const SpatialOps&, std::vector<Grid>& out) {
        out[0] = Grid::zeros(f[0].dims, f[0].nx);
    };
    TrajectoryDataset still = rk4_integrate(frozen, {{u0}}, g);
    for (int j = 0; j < g.nx; ++j)
        CHECK(still.value(0, still.grid.nt - 1, j, 0) == doctest::Approx(u0.at(j)));
}

TEST_CASE("burgers trajectories follow the log-heat family") {
    // u = log(phi) with phi a positive heat solution solves u_t = u_xx + u_x^2
    GridSpec g;
    g.L = 20.0;
    g.nx = 100;
    g.T = 1.0;
    g.nt = 100;
    g.substeps = 2;
    double k = 2 * M_PI / g.L;
    auto phi = [&](double t, double x) {
        return 2.0 + std::exp(-k * k * t) * std::cos(k * x);
    };
    Grid u0 = Grid::zeros(1, g.nx);
    for (int j = 0; j < g.nx; ++j) u0.at(j) = std::log(phi(0, x_of(g, j)));
    TrajectoryDataset traj = rk4_integrate(builtin_pde("burgers"), {{u0}}, g);
    double max_err = 0;
    for (int it : {20, 50, 99})
        for (int j = 0; j < g.nx; j += 3)
            max_err = std::max(max_err, std::abs(traj.value(0, it, j, 0) -
                                                 std::log(phi(traj.t[it], x_of(g, j)))));
    CHECK(max_err < 1e-2);
}

TEST_CASE("heat equation conserves total mass") {
    GridSpec g = small_grid();
    PdeSpec heat = builtin_pde("heat");
    auto ics = make_initial_conditions(heat, g, 2, 8, 1.0, 11);
    TrajectoryDataset traj = rk4_integrate(heat, ics, g);
    for (int ic = 0; ic < 2; ++ic) {
        double m0 = 0, m1 = 0;
        for (int j = 0; j < g.nx; ++j) {
            m0 += traj.value(ic, 0, j, 0) * g.h();
            m1 += traj.value(ic, g.nt - 1, j, 0) * g.h();
        }
        CHECK(m1 == doctest::Approx(m0).epsilon(1e-10));
    }
}

TEST_CASE("dataset determinism and builtin zoo") {
    GridSpec g = small_grid();
    TrajectoryDataset a = generate_dataset(builtin_pde("heat"), g, 2, 5, 1.0, 123);
    TrajectoryDataset b = generate_dataset(builtin_pde("heat"), g, 2, 5, 1.0, 123);
    CHECK(a.data == b.data);
    CHECK(a.fingerprint() == b.fingerprint());
    TrajectoryDataset c = generate_dataset(builtin_pde("heat"), g, 2, 5, 1.0, 124);
    CHECK(a.fingerprint() != c.fingerprint());

    CHECK(builtin_pde("burgers").dims == 1);
    CHECK(builtin_pde("wave2d").num_fields == 2);
    CHECK(builtin_pde("wave2d").stored_fields == 1);
    CHECK(builtin_pde("rd2d").stored_fields == 2);
    CHECK_THROWS_WITH_AS(builtin_pde("navier"), doctest::Contains("options"),
                         std::invalid_argument);
}

TEST_CASE("subsample strides") {
    GridSpec g;
    g.L = 20;
    g.nx = 20;
    g.T = 0.5;
    g.nt = 10;
    g.substeps = 1;
    TrajectoryDataset traj = generate_dataset(builtin_pde("heat"), g, 1, 3, 1.0, 5);

    TrajectoryDataset same = subsample(traj, 1, 1);
    CHECK(same.data == traj.data);

    TrajectoryDataset coarse = subsample(traj, 5, 2);
    CHECK(coarse.grid.nx == 4);
    CHECK(coarse.grid.nt == 5);
    CHECK(coarse.value(0, 1, 2, 0) == traj.value(0, 2, 10, 0));
    CHECK(coarse.t[1] == traj.t[2]);
    CHECK_THROWS(subsample(traj, 3, 1));

    // 2d strided copy picks the matching grid nodes
    GridSpec g2;
    g2.L = 20;
    g2.nx = 20;
    g2.T = 0.1;
    g2.nt = 4;
    TrajectoryDataset w = generate_dataset(builtin_pde("wave2d"), g2, 1, 2, 0.5, 3);
    TrajectoryDataset ws = subsample(w, 10, 1);
    CHECK(ws.grid.nx == 2);
    CHECK(ws.value(0, 2, 1, 0) == w.value(0, 2, 10, 0));  // (ix,iy)=(0,10)
}

TEST_CASE("trajectory persistence round trip") {
    GridSpec g;
    g.L = 20;
    g.nx = 16;
    g.T = 0.5;
    g.nt = 8;
    TrajectoryDataset traj = generate_dataset(builtin_pde("burgers"), g, 2, 3, 0.7, 99);
    std::string dir = (std::filesystem::temp_directory_path() / "liesym_traj_test").string();
    std::filesystem::remove_all(dir);
    save_trajectory(traj, dir);
    TrajectoryDataset back = load_trajectory(dir);
    CHECK(back.data == traj.data);
    CHECK(back.pde == traj.pde);
    CHECK(back.seed == traj.seed);
    CHECK(back.n_f == traj.n_f);
    CHECK(back.ic_scale == traj.ic_scale);
    CHECK(back.grid.nx == traj.grid.nx);
    CHECK(back.fingerprint() == traj.fingerprint());
    std::filesystem::remove_all(dir);
}
