#include "liesym/pdegen.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "json.hpp"

namespace liesym {

Grid Grid::zeros(int dims, int nx) {
    Grid g;
    g.dims = dims;
    g.nx = nx;
    g.v.assign(dims == 1 ? nx : static_cast<size_t>(nx) * nx, 0.0);
    return g;
}

void GridSpec::validate() const {
    if (nx < 8) throw std::invalid_argument("grid needs nx >= 8");
    if (nt < 2) throw std::invalid_argument("grid needs nt >= 2");
    if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
    if (L <= 0 || T <= 0) throw std::invalid_argument("domain length and final time must be positive");
}

namespace {

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

Grid spatial_derivs_periodic(const Grid& field, int axis, int order, double h) {
    if (order < 1 || order > 3)
        throw std::invalid_argument("spatial derivative order must be 1, 2 or 3");
    if (axis < 0 || axis >= field.dims) throw std::out_of_range("axis out of range");
    const int n = field.nx;
    Grid out = Grid::zeros(field.dims, n);

    auto stencil = [&](auto&& get, auto&& set) {
        for (int i = 0; i < n; ++i) {
            double d;
            switch (order) {
                case 1:
                    d = (get(wrap(i + 1, n)) - get(wrap(i - 1, n))) / (2 * h);
                    break;
                case 2:
                    d = (get(wrap(i + 1, n)) - 2 * get(i) + get(wrap(i - 1, n))) / (h * h);
                    break;
                default:
                    d = (get(wrap(i + 2, n)) - 2 * get(wrap(i + 1, n)) +
                         2 * get(wrap(i - 1, n)) - get(wrap(i - 2, n))) /
                        (2 * h * h * h);
            }
            set(i, d);
        }
    };

    if (field.dims == 1) {
        stencil([&](int i) { return field.at(i); }, [&](int i, double d) { out.at(i) = d; });
    } else if (axis == 0) {
        for (int iy = 0; iy < n; ++iy)
            stencil([&](int i) { return field.at(i, iy); },
                    [&](int i, double d) { out.at(i, iy) = d; });
    } else {
        for (int ix = 0; ix < n; ++ix)
            stencil([&](int i) { return field.at(ix, i); },
                    [&](int i, double d) { out.at(ix, i) = d; });
    }
    return out;
}

Grid SpatialOps::laplacian(const Grid& f) const {
    Grid out = d2(f, 0);
    if (f.dims == 2) {
        Grid dyy = d2(f, 1);
        for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += dyy.v[i];
    }
    return out;
}

PdeSpec builtin_pde(const std::string& name) {
    PdeSpec spec;
    spec.name = name;
    if (name == "burgers") {
        // potential form u_t = u_xx + u_x^2
        spec.dims = 1;
        spec.field_names = {"u"};
        spec.max_spatial_order = 2;
        spec.rhs = [](const std::vector<Grid>& f, const SpatialOps& ops,
                      std::vector<Grid>& out) {
            Grid ux = ops.d1(f[0], 0), uxx = ops.d2(f[0], 0);
            out[0] = uxx;
            for (size_t i = 0; i < ux.v.size(); ++i) out[0].v[i] += ux.v[i] * ux.v[i];
        };
    } else if (name == "heat") {
        spec.dims = 1;
        spec.field_names = {"u"};
        spec.max_spatial_order = 2;
        spec.rhs = [](const std::vector<Grid>& f, const SpatialOps& ops,
                      std::vector<Grid>& out) { out[0] = ops.d2(f[0], 0); };
    } else if (name == "kdv") {
        // u_t + u_xxx + u u_x = 0
        spec.dims = 1;
        spec.field_names = {"u"};
        spec.max_spatial_order = 3;
        spec.rhs = [](const std::vector<Grid>& f, const SpatialOps& ops,
                      std::vector<Grid>& out) {
            Grid ux = ops.d1(f[0], 0), uxxx = ops.d3(f[0], 0);
            out[0] = Grid::zeros(f[0].dims, f[0].nx);
            for (size_t i = 0; i < ux.v.size(); ++i)
                out[0].v[i] = -uxxx.v[i] - f[0].v[i] * ux.v[i];
        };
    } else if (name == "wave2d") {
        // u_tt = u_xx + u_yy in first-order form u_t = v, v_t = lap u;
        // only u is stored
        spec.dims = 2;
        spec.num_fields = 2;
        spec.stored_fields = 1;
        spec.field_names = {"u", "v"};
        spec.max_spatial_order = 2;
        spec.rhs = [](const std::vector<Grid>& f, const SpatialOps& ops,
                      std::vector<Grid>& out) {
            out[0] = f[1];
            out[1] = ops.laplacian(f[0]);
        };
    } else if (name == "schrodinger2d") {
        // u_t = -0.5 lap v + v(u^2+v^2), v_t = 0.5 lap u - u(u^2+v^2)
        spec.dims = 2;
        spec.num_fields = 2;
        spec.stored_fields = 2;
        spec.field_names = {"u", "v"};
        spec.max_spatial_order = 2;
        spec.rhs = [](const std::vector<Grid>& f, const SpatialOps& ops,
                      std::vector<Grid>& out) {
            Grid lu = ops.laplacian(f[0]), lv = ops.laplacian(f[1]);
            out[0] = Grid::zeros(f[0].dims, f[0].nx);
            out[1] = Grid::zeros(f[0].dims, f[0].nx);
            for (size_t i = 0; i < lu.v.size(); ++i) {
                double u = f[0].v[i], v = f[1].v[i];
                double a2 = u * u + v * v;
                out[0].v[i] = -0.5 * lv.v[i] + v * a2;
                out[1].v[i] = 0.5 * lu.v[i] - u * a2;
            }
        };
    } else if (name == "rd2d") {
        // lambda-omega reaction-diffusion, d1 = d2 = 0.1, beta = 1
        spec.dims = 2;
        spec.num_fields = 2;
        spec.stored_fields = 2;
        spec.field_names = {"u", "v"};
        spec.max_spatial_order = 2;
        spec.rhs = [](const std::vector<Grid>& f, const SpatialOps& ops,
                      std::vector<Grid>& out) {
            constexpr double d1 = 0.1, d2 = 0.1, beta = 1.0;
            Grid lu = ops.laplacian(f[0]), lv = ops.laplacian(f[1]);
            out[0] = Grid::zeros(f[0].dims, f[0].nx);
            out[1] = Grid::zeros(f[0].dims, f[0].nx);
            for (size_t i = 0; i < lu.v.size(); ++i) {
                double u = f[0].v[i], v = f[1].v[i];
                double a2 = u * u + v * v;
                out[0].v[i] = (1.0 - a2) * u + beta * a2 * v + d1 * lu.v[i];
                out[1].v[i] = -beta * a2 * u + (1.0 - a2) * v + d2 * lv.v[i];
            }
        };
    } else {
        std::string options;
        for (const auto& n : builtin_pde_names()) options += (options.empty() ? "" : ", ") + n;
        throw std::invalid_argument("unknown pde '" + name + "'; options: " + options);
    }
    return spec;
}

std::vector<std::string> builtin_pde_names() {
    return {"burgers", "heat", "kdv", "wave2d", "schrodinger2d", "rd2d"};
}

Grid sample_fourier_ic(const GridSpec& grid, int dims, int n_f, double scale,
                       GaussianRng& rng) {
    const int n = grid.nx;
    const double w = 2.0 * M_PI / grid.L;
    Grid out = Grid::zeros(dims, n);
    auto x_of = [&](int j) { return -grid.L / 2 + j * grid.h(); };

    if (dims == 1) {
        double a0 = scale * rng.gaussian();
        for (int j = 0; j < n; ++j) out.at(j) = a0 / 2;
        for (int k = 1; k <= n_f; ++k) {
            double a = scale * rng.gaussian(), b = scale * rng.gaussian();
            for (int j = 0; j < n; ++j)
                out.at(j) += a * std::cos(k * w * x_of(j)) + b * std::sin(k * w * x_of(j));
        }
    } else {
        double a0 = scale * rng.gaussian();
        for (auto& v : out.v) v = a0 / 4;
        for (int m = 1; m <= n_f; ++m) {
            for (int k = 1; k <= n_f; ++k) {
                double a = scale * rng.gaussian(), b = scale * rng.gaussian();
                double c = scale * rng.gaussian(), d = scale * rng.gaussian();
                for (int ix = 0; ix < n; ++ix) {
                    double cx = std::cos(m * w * x_of(ix)), sx = std::sin(m * w * x_of(ix));
                    for (int iy = 0; iy < n; ++iy) {
                        double cy = std::cos(k * w * x_of(iy)),
                               sy = std::sin(k * w * x_of(iy));
                        out.at(ix, iy) += a * cx * cy + b * cx * sy + c * sx * cy + d * sx * sy;
                    }
                }
            }
        }
    }
    return out;
}

std::vector<std::vector<Grid>> make_initial_conditions(const PdeSpec& pde,
                                                       const GridSpec& grid, int n_ics,
                                                       int n_f, double scale,
                                                       uint64_t seed) {
    std::vector<std::vector<Grid>> ics;
    ics.reserve(n_ics);
    for (int ic = 0; ic < n_ics; ++ic) {
        GaussianRng rng = GaussianRng::derived(seed, static_cast<uint64_t>(ic));
        std::vector<Grid> fields;
        for (int f = 0; f < pde.num_fields; ++f)
            fields.push_back(sample_fourier_ic(grid, pde.dims, n_f, scale, rng));
        ics.push_back(std::move(fields));
    }
    return ics;
}

namespace {

void rk4_step(const PdeSpec& pde, const SpatialOps& ops, std::vector<Grid>& state,
              double dt, std::vector<std::vector<Grid>>& k) {
    const int nf = pde.num_fields;
    k.assign(4, {});
    std::vector<Grid> tmp(nf);
    for (auto& stage : k) stage.resize(nf);

    pde.rhs(state, ops, k[0]);
    for (int f = 0; f < nf; ++f) {
        tmp[f] = state[f];
        for (size_t i = 0; i < tmp[f].v.size(); ++i)
            tmp[f].v[i] += 0.5 * dt * k[0][f].v[i];
    }
    pde.rhs(tmp, ops, k[1]);
    for (int f = 0; f < nf; ++f)
        for (size_t i = 0; i < tmp[f].v.size(); ++i)
            tmp[f].v[i] = state[f].v[i] + 0.5 * dt * k[1][f].v[i];
    pde.rhs(tmp, ops, k[2]);
    for (int f = 0; f < nf; ++f)
        for (size_t i = 0; i < tmp[f].v.size(); ++i)
            tmp[f].v[i] = state[f].v[i] + dt * k[2][f].v[i];
    pde.rhs(tmp, ops, k[3]);
    for (int f = 0; f < nf; ++f)
        for (size_t i = 0; i < state[f].v.size(); ++i)
            state[f].v[i] += dt / 6.0 *
                             (k[0][f].v[i] + 2 * k[1][f].v[i] + 2 * k[2][f].v[i] +
                              k[3][f].v[i]);
}

void check_finite(const std::vector<Grid>& fields, int ic, int it) {
    for (const Grid& g : fields)
        for (double v : g.v)
            if (!std::isfinite(v))
                throw std::runtime_error("non-finite state at ic " + std::to_string(ic) +
                                         ", stored step " + std::to_string(it));
}

}  // namespace

void integrate_with_sink(const PdeSpec& pde,
                         const std::vector<std::vector<Grid>>& ics,
                         const GridSpec& grid, TrajectorySink& sink) {
    grid.validate();
    const double dt = grid.dt_store() / grid.substeps;
    SpatialOps ops{grid.h()};
    sink.begin(pde, grid, static_cast<int>(ics.size()));
    std::vector<std::vector<Grid>> k;
    for (size_t ic = 0; ic < ics.size(); ++ic) {
        if (static_cast<int>(ics[ic].size()) != pde.num_fields)
            throw std::invalid_argument("initial condition field count mismatch");
        std::vector<Grid> state = ics[ic];
        for (int it = 0; it < grid.nt; ++it) {
            check_finite(state, static_cast<int>(ic), it);
            sink.slice(static_cast<int>(ic), it, it * grid.dt_store(), state);
            if (it + 1 < grid.nt)
                for (int s = 0; s < grid.substeps; ++s)
                    rk4_step(pde, ops, state, dt, k);
        }
    }
}

namespace {

struct MaterializeSink : TrajectorySink {
    TrajectoryDataset* out;
    int stored_fields = 1;
    void begin(const PdeSpec& pde, const GridSpec& grid, int n_ics) override {
        stored_fields = pde.stored_fields;
        out->data.assign(static_cast<size_t>(n_ics) * grid.nt *
                             (pde.dims == 1 ? grid.nx : static_cast<size_t>(grid.nx) * grid.nx) *
                             stored_fields,
                         0.0);
    }
    void slice(int ic, int it, double, const std::vector<Grid>& fields) override {
        size_t npts = fields[0].points();
        size_t base = ((static_cast<size_t>(ic) * out->grid.nt) + it) * npts * stored_fields;
        for (size_t i = 0; i < npts; ++i)
            for (int f = 0; f < stored_fields; ++f)
                out->data[base + i * stored_fields + f] = fields[f].v[i];
    }
};

}  // namespace

TrajectoryDataset rk4_integrate(const PdeSpec& pde,
                                const std::vector<std::vector<Grid>>& ics,
                                const GridSpec& grid) {
    TrajectoryDataset traj;
    traj.pde = pde.name;
    traj.grid = grid;
    traj.dims = pde.dims;
    traj.nfields = pde.stored_fields;
    traj.field_names.assign(pde.field_names.begin(),
                            pde.field_names.begin() + pde.stored_fields);
    traj.n_ics = static_cast<int>(ics.size());
    traj.t.resize(grid.nt);
    for (int it = 0; it < grid.nt; ++it) traj.t[it] = it * grid.dt_store();
    MaterializeSink sink;
    sink.out = &traj;
    integrate_with_sink(pde, ics, grid, sink);
    return traj;
}

TrajectoryDataset generate_dataset(const PdeSpec& pde, const GridSpec& grid, int n_ics,
                                   int n_f, double scale, uint64_t seed) {
    auto ics = make_initial_conditions(pde, grid, n_ics, n_f, scale, seed);
    TrajectoryDataset traj = rk4_integrate(pde, ics, grid);
    traj.seed = seed;
    traj.n_f = n_f;
    traj.ic_scale = scale;
    return traj;
}

size_t TrajectoryDataset::space_points() const {
    return dims == 1 ? static_cast<size_t>(grid.nx)
                     : static_cast<size_t>(grid.nx) * grid.nx;
}

double TrajectoryDataset::value(int ic, int it, size_t ispace, int field) const {
    size_t idx = ((static_cast<size_t>(ic) * grid.nt + it) * space_points() + ispace) *
                     nfields +
                 field;
    return data[idx];
}

std::vector<size_t> TrajectoryDataset::shape() const {
    std::vector<size_t> s{static_cast<size_t>(n_ics), static_cast<size_t>(grid.nt)};
    s.push_back(grid.nx);
    if (dims == 2) s.push_back(grid.nx);
    s.push_back(nfields);
    return s;
}

uint64_t TrajectoryDataset::fingerprint() const {
    uint64_t h = fnv1a_f64(data);
    std::string meta = pde + "/" + std::to_string(seed) + "/" + std::to_string(n_f) + "/" +
                       std::to_string(n_ics) + "/" + std::to_string(grid.nx) + "/" +
                       std::to_string(grid.nt);
    return fnv1a({reinterpret_cast<const unsigned char*>(meta.data()), meta.size()}, h);
}

TrajectoryDataset subsample(const TrajectoryDataset& traj, int space_stride,
                            int time_stride) {
    if (space_stride < 1 || time_stride < 1)
        throw std::invalid_argument("strides must be positive");
    if (traj.grid.nx % space_stride != 0 || traj.grid.nt % time_stride != 0)
        throw std::invalid_argument("stride does not divide the axis length");
    TrajectoryDataset out = traj;
    out.grid.nx = traj.grid.nx / space_stride;
    // T is unchanged, so the stored step T/nt grows with the time stride
    out.grid.nt = traj.grid.nt / time_stride;
    out.t.clear();
    out.data.clear();
    size_t npts_out = out.space_points();
    out.data.reserve(static_cast<size_t>(out.n_ics) * out.grid.nt * npts_out * out.nfields);
    for (int it = 0; it < out.grid.nt; ++it) out.t.push_back(traj.t[it * time_stride]);
    for (int ic = 0; ic < traj.n_ics; ++ic)
        for (int it = 0; it < out.grid.nt; ++it) {
            int src_t = it * time_stride;
            if (traj.dims == 1) {
                for (int ix = 0; ix < out.grid.nx; ++ix)
                    for (int f = 0; f < traj.nfields; ++f)
                        out.data.push_back(traj.value(ic, src_t, ix * space_stride, f));
            } else {
                for (int ix = 0; ix < out.grid.nx; ++ix)
                    for (int iy = 0; iy < out.grid.nx; ++iy)
                        for (int f = 0; f < traj.nfields; ++f)
                            out.data.push_back(traj.value(
                                ic, src_t,
                                static_cast<size_t>(ix * space_stride) * traj.grid.nx +
                                    iy * space_stride,
                                f));
            }
        }
    return out;
}

namespace {

nlohmann::json grid_to_json(const GridSpec& g) {
    return {{"L", g.L}, {"nx", g.nx}, {"T", g.T}, {"nt", g.nt}, {"substeps", g.substeps}};
}

GridSpec grid_from_json(const nlohmann::json& j) {
    GridSpec g;
    g.L = j.at("L");
    g.nx = j.at("nx");
    g.T = j.at("T");
    g.nt = j.at("nt");
    g.substeps = j.at("substeps");
    return g;
}

}  // namespace

void save_trajectory(const TrajectoryDataset& traj, const std::string& dir) {
    std::filesystem::create_directories(dir);
    write_f64_file(dir + "/dataset.bin", traj.data);
    nlohmann::json meta;
    meta["version"] = 1;
    meta["kind"] = "trajectory";
    meta["pde"] = traj.pde;
    meta["dims"] = traj.dims;
    meta["grid"] = grid_to_json(traj.grid);
    meta["shape"] = traj.shape();
    std::vector<std::string> axes{"ic", "t", "x"};
    if (traj.dims == 2) axes.push_back("y");
    axes.push_back("field");
    meta["axes"] = axes;
    meta["field_names"] = traj.field_names;
    meta["seed"] = traj.seed;
    meta["n_f"] = traj.n_f;
    meta["n_ics"] = traj.n_ics;
    meta["ic_scale"] = traj.ic_scale;
    meta["fingerprint"] = hex64(traj.fingerprint());
    write_text_file(dir + "/dataset.json", meta.dump(2) + "\n");
}

static TrajectoryDataset load_trajectory_impl(const std::string& dir, bool with_data) {
    nlohmann::json meta = nlohmann::json::parse(read_text_file(dir + "/dataset.json"));
    TrajectoryDataset traj;
    traj.pde = meta.at("pde");
    traj.dims = meta.at("dims");
    traj.grid = grid_from_json(meta.at("grid"));
    traj.field_names = meta.at("field_names").get<std::vector<std::string>>();
    traj.nfields = static_cast<int>(traj.field_names.size());
    traj.seed = meta.at("seed");
    traj.n_f = meta.at("n_f");
    traj.n_ics = meta.at("n_ics");
    traj.ic_scale = meta.at("ic_scale");
    traj.t.resize(traj.grid.nt);
    for (int it = 0; it < traj.grid.nt; ++it) traj.t[it] = it * traj.grid.dt_store();
    if (with_data) {
        traj.data = read_f64_file(dir + "/dataset.bin");
        size_t expect = static_cast<size_t>(traj.n_ics) * traj.grid.nt *
                        traj.space_points() * traj.nfields;
        if (traj.data.size() != expect)
            throw std::runtime_error("dataset.bin size does not match metadata in " + dir);
    }
    return traj;
}

TrajectoryDataset load_trajectory(const std::string& dir) {
    return load_trajectory_impl(dir, true);
}

TrajectoryDataset load_trajectory_metadata(const std::string& dir) {
    return load_trajectory_impl(dir, false);
}

}  // namespace liesym
