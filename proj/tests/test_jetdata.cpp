#include <functional>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "doctest.h"
#include "liesym/jetdata.hpp"
#include "liesym/prolong.hpp"

using namespace liesym;

namespace {

// inject an analytic space-time field into a trajectory container
TrajectoryDataset synthetic_traj(const GridSpec& g,
                                 const std::function<double(double, double)>& f) {
    TrajectoryDataset traj;
    traj.pde = "synthetic";
    traj.grid = g;
    traj.dims = 1;
    traj.nfields = 1;
    traj.field_names = {"u"};
    traj.n_ics = 1;
    traj.t.resize(g.nt);
    traj.data.resize(static_cast<size_t>(g.nt) * g.nx);
    for (int it = 0; it < g.nt; ++it) {
        traj.t[it] = it * g.dt_store();
        for (int j = 0; j < g.nx; ++j)
            traj.data[static_cast<size_t>(it) * g.nx + j] =
                f(traj.t[it], -g.L / 2 + j * g.h());
    }
    return traj;
}

}  // namespace

TEST_CASE("jets of a static quadratic are exact") {
    GridSpec g;
    g.L = 20;
    g.nx = 40;
    g.T = 1;
    g.nt = 12;
    TrajectoryDataset traj = synthetic_traj(g, [](double, double x) { return x * x; });
    ProlongedDataset ds = estimate_jet(traj, 2);
    JetSpace s = ds.space;
    for (long i = 0; i < ds.num_points(); i += 7) {
        PointRef pt(ds, i);
        double x = pt.at(JetVar::indep(1));
        CHECK(pt.at(JetVar::deriv(0)) == doctest::Approx(x * x).epsilon(1e-12));
        // periodic wrap distorts derivatives on the two boundary nodes
        if (std::abs(x) > g.L / 2 - 2 * g.h() - 1e-9) continue;
        CHECK(pt.at(JetVar::parse(s, "u_x")) == doctest::Approx(2 * x).epsilon(1e-9));
        CHECK(pt.at(JetVar::parse(s, "u_xx")) == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(pt.at(JetVar::parse(s, "u_t")) == doctest::Approx(0.0));
        CHECK(pt.at(JetVar::parse(s, "u_tx")) == doctest::Approx(0.0));
    }
}

TEST_CASE("constant fields have zero derivative channels") {
    GridSpec g;
    g.L = 10;
    g.nx = 16;
    g.T = 1;
    g.nt = 9;
    TrajectoryDataset traj = synthetic_traj(g, [](double, double) { return 1.75; });
    ProlongedDataset ds = estimate_jet(traj, 3);
    for (const JetVar& v : ds.channels) {
        if (v.is_indep() || v.order() == 0) continue;
        for (long i = 0; i < ds.num_points(); i += 11)
            CHECK(PointRef(ds, i).at(v) == doctest::Approx(0.0));
    }
}

TEST_CASE("interior slices and completeness") {
    GridSpec g;
    g.L = 10;
    g.nx = 16;
    g.T = 1;
    g.nt = 10;
    TrajectoryDataset traj =
        synthetic_traj(g, [](double t, double x) { return t * t + x; });
    ProlongedDataset ds = estimate_jet(traj, 2);
    std::set<int> its;
    for (const Provenance& p : ds.prov) its.insert(p.it);
    CHECK(*its.begin() == 2);
    CHECK(*its.rbegin() == g.nt - 3);
    CHECK(ds.num_points() == (g.nt - 4) * g.nx);
    CHECK(ds.channels.size() == 2 + 6);  // t, x + jets of u up to order 2

    GridSpec tiny = g;
    tiny.nt = 4;
    TrajectoryDataset small = synthetic_traj(tiny, [](double, double x) { return x; });
    CHECK_THROWS(estimate_jet(small, 2));
    CHECK_THROWS(estimate_jet(traj, 2, 3));  // stride must divide nx
}

TEST_CASE("second-order convergence on a smooth wave") {
    auto field = [](double t, double x) {
        return std::sin(2 * M_PI * x / 10.0 + 0.3 * t);
    };
    auto max_err = [&](int nx) {
        GridSpec g;
        g.L = 10;
        g.nx = nx;
        g.T = 0.4;
        g.nt = 9;
        TrajectoryDataset traj = synthetic_traj(g, field);
        ProlongedDataset ds = estimate_jet(traj, 2);
        JetVar uxx = JetVar::parse(ds.space, "u_xx");
        double k = 2 * M_PI / 10.0, err = 0;
        for (long i = 0; i < ds.num_points(); ++i) {
            PointRef pt(ds, i);
            double t = pt.at(JetVar::indep(0)), x = pt.at(JetVar::indep(1));
            err = std::max(err, std::abs(pt.at(uxx) + k * k * field(t, x)));
        }
        return err;
    };
    double e1 = max_err(32), e2 = max_err(64);
    double order = std::log2(e1 / e2);
    CHECK(order > 1.8);
}

TEST_CASE("mixed and third derivatives against an analytic field") {
    GridSpec g;
    g.L = 12;
    g.nx = 96;
    g.T = 1.0;
    g.nt = 101;
    double k = 2 * M_PI / g.L, w = 0.9;
    auto field = [&](double t, double x) { return std::sin(k * x) * std::cos(w * t); };
    TrajectoryDataset traj = synthetic_traj(g, field);
    ProlongedDataset ds = estimate_jet(traj, 3);
    JetSpace s = ds.space;
    JetVar utx = JetVar::parse(s, "u_tx"), uxxx = JetVar::parse(s, "u_xxx");
    JetVar utxx = JetVar::parse(s, "u_txx"), uttt = JetVar::parse(s, "u_ttt");
    double tol_x = k * k * k * g.h() * g.h();
    for (long i = 0; i < ds.num_points(); i += 97) {
        PointRef pt(ds, i);
        double t = pt.at(JetVar::indep(0)), x = pt.at(JetVar::indep(1));
        CHECK(pt.at(utx) ==
              doctest::Approx(-w * k * std::cos(k * x) * std::sin(w * t)).epsilon(2e-3));
        CHECK(std::abs(pt.at(uxxx) + k * k * k * std::cos(k * x) * std::cos(w * t)) <
              tol_x);
        CHECK(pt.at(utxx) ==
              doctest::Approx(w * k * k * std::sin(k * x) * std::sin(w * t))
                  .epsilon(2e-3)
                  .scale(1.0));
        CHECK(pt.at(uttt) ==
              doctest::Approx(w * w * w * std::sin(k * x) * std::sin(w * t))
                  .epsilon(2e-3)
                  .scale(1.0));
    }
}

TEST_CASE("burgers residual is small on generated data") {
    GridSpec g;
    g.L = 20;
    g.nx = 100;
    g.T = 2;
    g.nt = 1000;
    TrajectoryDataset traj = generate_dataset(builtin_pde("burgers"), g, 2, 10, 1.0, 21);
    ProlongedDataset ds = estimate_jet(traj, 2);
    JetSpace s = ds.space;
    JetVar ut = JetVar::parse(s, "u_t"), ux = JetVar::parse(s, "u_x"),
           uxx = JetVar::parse(s, "u_xx");
    std::vector<double> residuals;
    for (long i = 0; i < ds.num_points(); i += 37) {
        PointRef pt(ds, i);
        residuals.push_back(
            std::abs(pt.at(ut) - pt.at(uxx) - pt.at(ux) * pt.at(ux)));
    }
    std::nth_element(residuals.begin(), residuals.begin() + residuals.size() / 2,
                     residuals.end());
    CHECK(residuals[residuals.size() / 2] < 1e-2);
}

TEST_CASE("ic permutation permutes points only") {
    GridSpec g;
    g.L = 10;
    g.nx = 16;
    g.T = 1;
    g.nt = 12;
    PdeSpec heat = builtin_pde("heat");
    auto ics = make_initial_conditions(heat, g, 2, 4, 1.0, 31);
    TrajectoryDataset fwd = rk4_integrate(heat, ics, g);
    std::swap(ics[0], ics[1]);
    TrajectoryDataset rev = rk4_integrate(heat, ics, g);
    ProlongedDataset a = estimate_jet(fwd, 2), b = estimate_jet(rev, 2);
    long half = a.num_points() / 2;
    for (long i = 0; i < half; i += 53)
        for (int c = 0; c < a.num_channels(); ++c)
            CHECK(a.value(i, c) == b.value(half + i, c));
}

TEST_CASE("streaming file source matches in-memory estimation") {
    GridSpec g;
    g.L = 10;
    g.nx = 16;
    g.T = 0.5;
    g.nt = 10;
    TrajectoryDataset traj = generate_dataset(builtin_pde("heat"), g, 2, 4, 1.0, 8);
    std::string dir = (std::filesystem::temp_directory_path() / "liesym_stream").string();
    std::filesystem::remove_all(dir);
    save_trajectory(traj, dir);
    auto src = file_slice_source(dir);
    ProlongedDataset from_file = estimate_jet(*src, 2);
    ProlongedDataset from_mem = estimate_jet(traj, 2);
    CHECK(from_file.values == from_mem.values);
    std::filesystem::remove_all(dir);
}

TEST_CASE("point sampling") {
    GridSpec g;
    g.L = 10;
    g.nx = 16;
    g.T = 1;
    g.nt = 12;
    TrajectoryDataset traj = synthetic_traj(g, [](double t, double x) { return t + x; });
    ProlongedDataset ds = estimate_jet(traj, 2);

    auto s1 = sample_points(ds, 100, 5), s2 = sample_points(ds, 100, 5);
    CHECK(s1 == s2);
    std::set<long> uniq(s1.begin(), s1.end());
    CHECK(uniq.size() == 100);

    auto all = sample_points(ds, ds.num_points(), 9);
    std::set<long> perm(all.begin(), all.end());
    CHECK(static_cast<long>(perm.size()) == ds.num_points());

    CHECK_THROWS(sample_points(ds, ds.num_points() + 1, 1));
}

TEST_CASE("jets persistence round trip") {
    GridSpec g;
    g.L = 10;
    g.nx = 16;
    g.T = 1;
    g.nt = 10;
    TrajectoryDataset traj = generate_dataset(builtin_pde("heat"), g, 1, 3, 1.0, 44);
    ProlongedDataset ds = estimate_jet(traj, 2);
    ds.s_in = parse_deriv_coords(ds.space, {"u", "u_x", "u_xx"});
    ds.s_out = parse_deriv_coords(ds.space, {"u_t"});
    std::string dir = (std::filesystem::temp_directory_path() / "liesym_jets").string();
    std::filesystem::remove_all(dir);
    save_jets(ds, dir);
    ProlongedDataset back = load_jets(dir);
    CHECK(back.values == ds.values);
    CHECK(back.channels == ds.channels);
    CHECK(back.s_in == ds.s_in);
    CHECK(back.s_out == ds.s_out);
    CHECK(back.prov == ds.prov);
    CHECK(back.fingerprint() == ds.fingerprint());
    std::filesystem::remove_all(dir);
}
