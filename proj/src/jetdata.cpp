#include "liesym/jetdata.hpp"
#include "liesym/prolong.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "json.hpp"

namespace liesym {

int ProlongedDataset::channel_of(const JetVar& v) const {
    for (int i = 0; i < num_channels(); ++i)
        if (channels[i] == v) return i;
    return -1;
}

void ProlongedDataset::validate() const {
    if (channels.empty()) throw std::runtime_error("prolonged dataset has no channels");
    if (values.size() % channels.size() != 0)
        throw std::runtime_error("prolonged dataset value buffer is ragged");
    if (static_cast<long>(prov.size()) != num_points())
        throw std::runtime_error("provenance length mismatch");
    for (double v : values)
        if (!std::isfinite(v)) throw std::runtime_error("non-finite jet value");
    for (const JetVar& v : s_in)
        if (channel_of(v) < 0) throw std::runtime_error("input split names a missing channel");
    for (const JetVar& v : s_out) {
        if (channel_of(v) < 0) throw std::runtime_error("output split names a missing channel");
        if (std::find(s_in.begin(), s_in.end(), v) != s_in.end())
            throw std::runtime_error("input/output splits overlap");
    }
}

uint64_t ProlongedDataset::fingerprint() const {
    uint64_t h = fnv1a_f64(values);
    std::string meta = pde + "/" + std::to_string(order) + "/" +
                       std::to_string(channels.size()) + "/" + std::to_string(prov.size());
    return fnv1a({reinterpret_cast<const unsigned char*>(meta.data()), meta.size()}, h);
}

const double* PointRef::operator()(const JetVar& v) const {
    int c = ds_->channel_of(v);
    if (c < 0) return nullptr;
    return &ds_->values[static_cast<size_t>(row_) * ds_->num_channels() + c];
}

double PointRef::at(const JetVar& v) const {
    const double* p = (*this)(v);
    if (!p) throw std::runtime_error("missing jet channel");
    return *p;
}

JetValues PointRef::to_values() const {
    JetValues vals;
    for (int c = 0; c < ds_->num_channels(); ++c)
        vals[ds_->channels[c]] = ds_->value(row_, c);
    return vals;
}

std::vector<JetVar> jet_channels(const JetSpace& space, int order) {
    std::vector<JetVar> ch;
    for (int i = 0; i < space.p(); ++i) ch.push_back(JetVar::indep(i));
    for (const JetVar& v : full_deriv_coords(space, order)) ch.push_back(v);
    return ch;
}

namespace {

struct MemorySource : SliceSource {
    const TrajectoryDataset* traj;
    const GridSpec& grid() const override { return traj->grid; }
    int dims() const override { return traj->dims; }
    int n_ics() const override { return traj->n_ics; }
    const std::vector<std::string>& field_names() const override {
        return traj->field_names;
    }
    uint64_t fingerprint() const override { return traj->fingerprint(); }
    std::string pde() const override { return traj->pde; }
    void read(int ic, int it, std::vector<Grid>& out) const override {
        size_t npts = traj->space_points();
        out.assign(traj->nfields, Grid::zeros(traj->dims, traj->grid.nx));
        for (size_t i = 0; i < npts; ++i)
            for (int f = 0; f < traj->nfields; ++f)
                out[f].v[i] = traj->value(ic, it, i, f);
    }
};

struct FileSource : SliceSource {
    TrajectoryDataset meta;  // metadata only
    std::unique_ptr<F64FileReader> reader;
    uint64_t fp = 0;

    const GridSpec& grid() const override { return meta.grid; }
    int dims() const override { return meta.dims; }
    int n_ics() const override { return meta.n_ics; }
    const std::vector<std::string>& field_names() const override {
        return meta.field_names;
    }
    uint64_t fingerprint() const override { return fp; }
    std::string pde() const override { return meta.pde; }
    void read(int ic, int it, std::vector<Grid>& out) const override {
        size_t npts = meta.space_points();
        size_t stride = npts * meta.nfields;
        std::vector<double> buf(stride);
        reader->read((static_cast<size_t>(ic) * meta.grid.nt + it) * stride, buf);
        out.assign(meta.nfields, Grid::zeros(meta.dims, meta.grid.nx));
        for (size_t i = 0; i < npts; ++i)
            for (int f = 0; f < meta.nfields; ++f) out[f].v[i] = buf[i * meta.nfields + f];
    }
};

}  // namespace

std::unique_ptr<SliceSource> memory_slice_source(const TrajectoryDataset& traj) {
    auto src = std::make_unique<MemorySource>();
    src->traj = &traj;
    return src;
}

std::unique_ptr<SliceSource> file_slice_source(const std::string& dir) {
    auto src = std::make_unique<FileSource>();
    src->meta = load_trajectory_metadata(dir);
    src->reader = std::make_unique<F64FileReader>(dir + "/dataset.bin");
    size_t expect = static_cast<size_t>(src->meta.n_ics) * src->meta.grid.nt *
                    src->meta.space_points() * src->meta.nfields;
    if (src->reader->size() != expect)
        throw std::runtime_error("dataset.bin size does not match metadata in " + dir);
    nlohmann::json meta = nlohmann::json::parse(read_text_file(dir + "/dataset.json"));
    src->fp = std::stoull(meta.at("fingerprint").get<std::string>(), nullptr, 16);
    return src;
}

namespace {

// split a jet multi-index into (time order, spatial axes 0-based)
struct SplitIndex {
    int kt = 0;
    MultiIndex spatial;
};

SplitIndex split_time(const MultiIndex& j) {
    SplitIndex s;
    for (int c : j) {
        if (c == 0)
            ++s.kt;
        else
            s.spatial.push_back(c - 1);
    }
    return s;
}

int time_radius(int kt) { return kt == 0 ? 0 : (kt <= 2 ? 1 : 2); }

Grid spatial_multi_deriv(const Grid& f, const MultiIndex& spatial, double h) {
    Grid out = f;
    size_t i = 0;
    while (i < spatial.size()) {
        size_t jend = i;
        while (jend < spatial.size() && spatial[jend] == spatial[i]) ++jend;
        int count = static_cast<int>(jend - i);
        int axis = spatial[i];
        while (count > 0) {
            int ord = std::min(count, 3);
            out = spatial_derivs_periodic(out, axis, ord, h);
            count -= ord;
        }
        i = jend;
    }
    return out;
}

}  // namespace

ProlongedDataset estimate_jet(const SliceSource& source, int order, int space_stride) {
    if (order < 1 || order > 3) throw std::invalid_argument("jet order must be 1, 2 or 3");
    if (order > 2 && source.dims() != 1)
        throw std::invalid_argument("jet order 3 is only supported for one spatial dimension");
    const GridSpec& grid = source.grid();
    if (grid.nt < 2 * order + 1)
        throw std::invalid_argument("trajectory too short in time for the requested order");
    if (space_stride < 1 || grid.nx % space_stride != 0)
        throw std::invalid_argument("space stride does not divide the grid");

    std::vector<std::string> coords{"t", "x"};
    if (source.dims() == 2) coords.push_back("y");
    JetSpace space = make_space(coords, source.field_names());
    const int q = space.q();

    ProlongedDataset ds;
    ds.space = space;
    ds.order = order;
    ds.pde = source.pde();
    ds.channels = jet_channels(space, order);
    ds.source_fingerprint = source.fingerprint();

    // spatial stencil patterns needed by any channel, deduplicated
    std::vector<MultiIndex> spatial_patterns;
    int max_rad = 0;
    for (const JetVar& v : ds.channels) {
        if (v.is_indep()) continue;
        SplitIndex s = split_time(v.index());
        max_rad = std::max(max_rad, time_radius(s.kt));
        if (std::find(spatial_patterns.begin(), spatial_patterns.end(), s.spatial) ==
            spatial_patterns.end())
            spatial_patterns.push_back(s.spatial);
    }

    const double dt = grid.dt_store();
    const double h = grid.h();
    const int margin = order;  // dropped slices at each end of the time axis
    const int window = 2 * max_rad + 1;

    std::vector<size_t> keep;
    std::vector<std::array<double, 2>> xy;
    auto x_of = [&](int j) { return -grid.L / 2 + j * h; };
    if (source.dims() == 1) {
        for (int ix = 0; ix < grid.nx; ix += space_stride) {
            keep.push_back(ix);
            xy.push_back({x_of(ix), 0.0});
        }
    } else {
        for (int ix = 0; ix < grid.nx; ix += space_stride)
            for (int iy = 0; iy < grid.nx; iy += space_stride) {
                keep.push_back(static_cast<size_t>(ix) * grid.nx + iy);
                xy.push_back({x_of(ix), x_of(iy)});
            }
    }

    const long rows_per_slice = static_cast<long>(keep.size());
    const long interior = grid.nt - 2 * margin;
    const int nch = static_cast<int>(ds.channels.size());
    ds.prov.reserve(static_cast<size_t>(source.n_ics()) * interior * rows_per_slice);
    ds.values.reserve(ds.prov.capacity() * nch);

    struct CachedSlice {
        int it = -1;
        std::vector<std::vector<Grid>> per_field;  // [field][pattern]
    };

    for (int ic = 0; ic < source.n_ics(); ++ic) {
        std::vector<CachedSlice> cache(window);
        std::vector<Grid> fields;
        auto slot_for = [&](int it) -> CachedSlice& { return cache[it % window]; };
        auto ensure = [&](int it) {
            CachedSlice& slot = slot_for(it);
            if (slot.it == it) return;
            source.read(ic, it, fields);
            slot.it = it;
            slot.per_field.assign(q, {});
            for (int f = 0; f < q; ++f) {
                slot.per_field[f].reserve(spatial_patterns.size());
                for (const MultiIndex& pat : spatial_patterns)
                    slot.per_field[f].push_back(spatial_multi_deriv(fields[f], pat, h));
            }
        };

        for (int it = margin; it < grid.nt - margin; ++it) {
            for (int w = it - max_rad; w <= it + max_rad; ++w) ensure(w);
            long base_row = static_cast<long>(ds.prov.size());
            for (long rp = 0; rp < rows_per_slice; ++rp)
                ds.prov.push_back(Provenance{ic, it, static_cast<long>(keep[rp])});
            ds.values.resize(ds.prov.size() * nch);

            for (int chan = 0; chan < nch; ++chan) {
                const JetVar& v = ds.channels[chan];
                if (v.is_indep()) {
                    for (long rp = 0; rp < rows_per_slice; ++rp)
                        ds.values[(base_row + rp) * nch + chan] =
                            v.coord() == 0 ? it * dt : xy[rp][v.coord() - 1];
                    continue;
                }
                SplitIndex s = split_time(v.index());
                long pid = std::find(spatial_patterns.begin(), spatial_patterns.end(),
                                     s.spatial) -
                           spatial_patterns.begin();
                int f = v.field();
                auto g = [&](int slice) -> const Grid& {
                    return slot_for(slice).per_field[f][pid];
                };
                for (long rp = 0; rp < rows_per_slice; ++rp) {
                    size_t ip = keep[rp];
                    double val;
                    switch (s.kt) {
                        case 0:
                            val = g(it).v[ip];
                            break;
                        case 1:
                            val = (g(it + 1).v[ip] - g(it - 1).v[ip]) / (2 * dt);
                            break;
                        case 2:
                            val = (g(it + 1).v[ip] - 2 * g(it).v[ip] + g(it - 1).v[ip]) /
                                  (dt * dt);
                            break;
                        default:
                            val = (g(it + 2).v[ip] - 2 * g(it + 1).v[ip] +
                                   2 * g(it - 1).v[ip] - g(it - 2).v[ip]) /
                                  (2 * dt * dt * dt);
                    }
                    ds.values[(base_row + rp) * nch + chan] = val;
                }
            }
        }
    }
    ds.validate();
    return ds;
}

ProlongedDataset estimate_jet(const TrajectoryDataset& traj, int order, int space_stride) {
    auto src = memory_slice_source(traj);
    return estimate_jet(*src, order, space_stride);
}

std::vector<long> sample_points(const ProlongedDataset& ds, long m, uint64_t seed) {
    long n = ds.num_points();
    if (m > n) throw std::invalid_argument("sample size exceeds the dataset size");
    std::vector<long> idx(n);
    for (long i = 0; i < n; ++i) idx[i] = i;
    GaussianRng rng(seed);
    for (long i = 0; i < m; ++i) {
        long j = i + static_cast<long>(rng.next_u64() % static_cast<uint64_t>(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(m);
    return idx;
}

void save_jets(const ProlongedDataset& ds, const std::string& dir) {
    std::filesystem::create_directories(dir);
    // provenance rides along as three leading f64 columns
    long n = ds.num_points();
    int nch = ds.num_channels();
    std::vector<double> blob(static_cast<size_t>(n) * (3 + nch));
    for (long i = 0; i < n; ++i) {
        blob[i * (3 + nch) + 0] = ds.prov[i].ic;
        blob[i * (3 + nch) + 1] = ds.prov[i].it;
        blob[i * (3 + nch) + 2] = static_cast<double>(ds.prov[i].ispace);
        for (int c = 0; c < nch; ++c) blob[i * (3 + nch) + 3 + c] = ds.value(i, c);
    }
    write_f64_file(dir + "/jets.bin", blob);

    nlohmann::json meta;
    meta["version"] = 1;
    meta["kind"] = "jets";
    meta["pde"] = ds.pde;
    meta["order"] = ds.order;
    meta["coords"] = ds.space.coords;
    meta["fields"] = ds.space.fields;
    std::vector<std::string> names{"ic", "it", "ispace"};
    for (const JetVar& v : ds.channels) names.push_back(v.name(ds.space));
    meta["channels"] = names;
    meta["n_points"] = n;
    auto var_names = [&](const std::vector<JetVar>& vars) {
        std::vector<std::string> out;
        for (const JetVar& v : vars) out.push_back(v.name(ds.space));
        return out;
    };
    meta["s_in"] = var_names(ds.s_in);
    meta["s_out"] = var_names(ds.s_out);
    meta["source_fingerprint"] = hex64(ds.source_fingerprint);
    meta["fingerprint"] = hex64(ds.fingerprint());
    write_text_file(dir + "/jets.json", meta.dump(2) + "\n");
}

ProlongedDataset load_jets(const std::string& dir) {
    nlohmann::json meta = nlohmann::json::parse(read_text_file(dir + "/jets.json"));
    ProlongedDataset ds;
    ds.pde = meta.at("pde");
    ds.order = meta.at("order");
    ds.space = make_space(meta.at("coords").get<std::vector<std::string>>(),
                          meta.at("fields").get<std::vector<std::string>>());
    auto channel_names = meta.at("channels").get<std::vector<std::string>>();
    if (channel_names.size() < 3) throw std::runtime_error("jets.json channel list too short");
    for (size_t i = 3; i < channel_names.size(); ++i)
        ds.channels.push_back(JetVar::parse(ds.space, channel_names[i]));
    for (const auto& n : meta.at("s_in")) ds.s_in.push_back(JetVar::parse(ds.space, n));
    for (const auto& n : meta.at("s_out")) ds.s_out.push_back(JetVar::parse(ds.space, n));
    ds.source_fingerprint =
        std::stoull(meta.at("source_fingerprint").get<std::string>(), nullptr, 16);

    std::vector<double> blob = read_f64_file(dir + "/jets.bin");
    long n = meta.at("n_points");
    int nch = ds.num_channels();
    if (blob.size() != static_cast<size_t>(n) * (3 + nch))
        throw std::runtime_error("jets.bin size does not match metadata in " + dir);
    ds.prov.resize(n);
    ds.values.resize(static_cast<size_t>(n) * nch);
    for (long i = 0; i < n; ++i) {
        ds.prov[i].ic = static_cast<int>(blob[i * (3 + nch) + 0]);
        ds.prov[i].it = static_cast<int>(blob[i * (3 + nch) + 1]);
        ds.prov[i].ispace = static_cast<long>(blob[i * (3 + nch) + 2]);
        for (int c = 0; c < nch; ++c)
            ds.values[i * nch + c] = blob[i * (3 + nch) + 3 + c];
    }
    ds.validate();
    return ds;
}

}  // namespace liesym
