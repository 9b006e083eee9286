#ifndef LIESYM_PDEGEN_HPP
#define LIESYM_PDEGEN_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "liesym/binio.hpp"

namespace liesym {

// Scalar field sampled on a uniform periodic grid: nx points per axis over a
// torus of length L per axis, x_j = -L/2 + j h with h = L/nx.
struct Grid {
    int dims = 1;
    int nx = 0;
    std::vector<double> v;  // flat, row-major: index = ix (* nx + iy)

    static Grid zeros(int dims, int nx);
    size_t points() const { return v.size(); }
    double& at(int ix) { return v[ix]; }
    double& at(int ix, int iy) { return v[static_cast<size_t>(ix) * nx + iy]; }
    double at(int ix) const { return v[ix]; }
    double at(int ix, int iy) const { return v[static_cast<size_t>(ix) * nx + iy]; }
};

// Periodic second-order central differences; order 1..3 along one axis.
Grid spatial_derivs_periodic(const Grid& field, int axis, int order, double h);

struct GridSpec {
    double L = 20.0;
    int nx = 100;
    double T = 2.0;
    int nt = 1000;
    int substeps = 1;

    double h() const { return L / nx; }
    double dt_store() const { return T / nt; }  // stored sampling step
    void validate() const;
};

// Helpers handed to the right-hand side closures.
struct SpatialOps {
    double h;
    Grid d1(const Grid& f, int axis) const { return spatial_derivs_periodic(f, axis, 1, h); }
    Grid d2(const Grid& f, int axis) const { return spatial_derivs_periodic(f, axis, 2, h); }
    Grid d3(const Grid& f, int axis) const { return spatial_derivs_periodic(f, axis, 3, h); }
    Grid laplacian(const Grid& f) const;
};

// A first-order-in-time system du/dt = rhs(u) on the periodic grid.
// Second-order equations are carried in first-order form with extra fields;
// only the leading `stored_fields` are written to datasets.
struct PdeSpec {
    std::string name;
    int dims = 1;
    int num_fields = 1;
    int stored_fields = 1;
    int max_spatial_order = 2;
    std::vector<std::string> field_names;
    std::function<void(const std::vector<Grid>&, const SpatialOps&, std::vector<Grid>&)> rhs;
};

PdeSpec builtin_pde(const std::string& name);
std::vector<std::string> builtin_pde_names();

struct TrajectoryDataset {
    std::string pde;
    GridSpec grid;
    int dims = 1;
    int nfields = 1;
    std::vector<std::string> field_names;
    uint64_t seed = 0;
    int n_f = 0;
    int n_ics = 0;
    double ic_scale = 1.0;

    std::vector<double> t;     // stored sample times, t_k = k T / nt
    std::vector<double> data;  // [ic][time][space...][field]

    size_t space_points() const;
    size_t slice_stride() const { return space_points() * nfields; }
    double value(int ic, int it, size_t ispace, int field) const;
    std::vector<size_t> shape() const;  // [n_ics, nt, nx (, nx), nfields]
    uint64_t fingerprint() const;
};

// Random truncated Fourier series on the torus; coefficients are i.i.d.
// scale * N(0,1) draws from `rng` in a fixed order.
Grid sample_fourier_ic(const GridSpec& grid, int dims, int n_f, double scale,
                       GaussianRng& rng);

// Initial conditions for every field of `pde`, one rng substream per ic.
std::vector<std::vector<Grid>> make_initial_conditions(const PdeSpec& pde,
                                                       const GridSpec& grid, int n_ics,
                                                       int n_f, double scale,
                                                       uint64_t seed);

// Receives every stored slice in order; used to stream trajectories into jet
// estimation without materializing them.
struct TrajectorySink {
    virtual ~TrajectorySink() = default;
    virtual void begin(const PdeSpec& pde, const GridSpec& grid, int n_ics) {}
    virtual void slice(int ic, int it, double t, const std::vector<Grid>& fields) = 0;
};

// Classical RK4 with step T/(nt*substeps), storing every substeps-th state.
// Throws on non-finite state, naming the step.
void integrate_with_sink(const PdeSpec& pde,
                         const std::vector<std::vector<Grid>>& ics,
                         const GridSpec& grid, TrajectorySink& sink);

TrajectoryDataset rk4_integrate(const PdeSpec& pde,
                                const std::vector<std::vector<Grid>>& ics,
                                const GridSpec& grid);

// Convenience: ICs + integration + metadata.
TrajectoryDataset generate_dataset(const PdeSpec& pde, const GridSpec& grid, int n_ics,
                                   int n_f, double scale, uint64_t seed);

// Strided copy; strides must divide the axis lengths.
TrajectoryDataset subsample(const TrajectoryDataset& traj, int space_stride,
                            int time_stride);

// dataset.bin (row-major little-endian f64) + dataset.json sidecar.
void save_trajectory(const TrajectoryDataset& traj, const std::string& dir);
TrajectoryDataset load_trajectory(const std::string& dir);
TrajectoryDataset load_trajectory_metadata(const std::string& dir);  // no bulk data

}  // namespace liesym

#endif
