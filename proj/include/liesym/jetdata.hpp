#ifndef LIESYM_JETDATA_HPP
#define LIESYM_JETDATA_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "liesym/jetpoly.hpp"
#include "liesym/pdegen.hpp"

namespace liesym {

struct Provenance {
    int ic = 0;
    int it = 0;
    long ispace = 0;
    bool operator==(const Provenance&) const = default;
};

// Numeric valuation of every jet coordinate up to `order` at sampled grid
// points, stored columnwise: channels are the independent coordinates
// followed by all derivative coordinates of each field.
struct ProlongedDataset {
    JetSpace space;
    int order = 0;
    std::string pde;
    std::vector<JetVar> channels;
    std::vector<Provenance> prov;
    std::vector<double> values;  // num_points x channels, row-major
    std::vector<JetVar> s_in, s_out;
    uint64_t source_fingerprint = 0;

    int num_channels() const { return static_cast<int>(channels.size()); }
    long num_points() const {
        return channels.empty() ? 0 : static_cast<long>(values.size()) / num_channels();
    }
    int channel_of(const JetVar& v) const;  // -1 if absent
    double value(long row, int channel) const {
        return values[static_cast<size_t>(row) * num_channels() + channel];
    }
    void validate() const;
    uint64_t fingerprint() const;
};

// Cheap view of one row; usable as the evaluation lookup for polynomials.
class PointRef {
public:
    PointRef(const ProlongedDataset& ds, long row) : ds_(&ds), row_(row) {}
    const double* operator()(const JetVar& v) const;
    double at(const JetVar& v) const;
    const Provenance& prov() const { return ds_->prov[row_]; }
    JetValues to_values() const;

private:
    const ProlongedDataset* ds_;
    long row_;
};

// Canonical channel list for a space and order: coords, then per field all
// multi-indices |J| <= order sorted by (|J|, lexicographic).
std::vector<JetVar> jet_channels(const JetSpace& space, int order);

// Slice access used by the streaming estimator.
struct SliceSource {
    virtual ~SliceSource() = default;
    virtual const GridSpec& grid() const = 0;
    virtual int dims() const = 0;
    virtual int n_ics() const = 0;
    virtual const std::vector<std::string>& field_names() const = 0;
    virtual uint64_t fingerprint() const = 0;
    virtual std::string pde() const = 0;
    // fields at one stored time slice, full spatial resolution
    virtual void read(int ic, int it, std::vector<Grid>& out) const = 0;
};

std::unique_ptr<SliceSource> memory_slice_source(const TrajectoryDataset& traj);
std::unique_ptr<SliceSource> file_slice_source(const std::string& dir);

// Estimates all jet coordinates up to `order` by second-order central
// differences: periodic in space, interior-only in time (the first and last
// `order` stored slices are dropped). Points are emitted at every
// space_stride-th grid node. Mixed partials are nested first/second-order
// stencils; order 3 is available for one spatial dimension only.
ProlongedDataset estimate_jet(const SliceSource& source, int order, int space_stride = 1);
ProlongedDataset estimate_jet(const TrajectoryDataset& traj, int order,
                              int space_stride = 1);

// Uniform sample of M row indices without replacement, seeded.
std::vector<long> sample_points(const ProlongedDataset& ds, long m, uint64_t seed);

void save_jets(const ProlongedDataset& ds, const std::string& dir);
ProlongedDataset load_jets(const std::string& dir);

}  // namespace liesym

#endif
