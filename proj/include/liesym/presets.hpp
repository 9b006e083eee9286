#ifndef LIESYM_PRESETS_HPP
#define LIESYM_PRESETS_HPP

#include <string>
#include <vector>

#include "liesym/jetdata.hpp"
#include "liesym/pdegen.hpp"
#include "liesym/sparsify.hpp"
#include "liesym/surrogate.hpp"

namespace liesym {

// Everything needed to reproduce one benchmark dataset end to end: grid and
// sampling parameters, the input/output split, and the discovery thresholds.
struct DatasetPreset {
    std::string name;
    GridSpec grid;
    int n_f = 10;
    int n_ics = 10;
    double ic_scale = 1.0;
    uint64_t gen_seed = 1;
    int order = 2;          // prolongation order
    int space_stride = 1;   // jet emission stride
    std::vector<std::string> s_in, s_out;
    int library_degree = 2;
    long samples = 100;     // points drawn for discovery
    double eps2 = 0.5;      // singular value threshold
    LadmapParams ladmap;
    MlpConfig mlp;
};

DatasetPreset dataset_preset(const std::string& name);
std::vector<std::string> preset_names();

// Substep rule keeping explicit integration stable; the dispersive equation
// needs dt <= 0.2 h^3.
int default_substeps(const std::string& pde, const GridSpec& grid);

// Lazy trajectory source: integrates on demand while the jet estimator walks
// forward in time, keeping only a small slice window in memory.
std::unique_ptr<SliceSource> integrating_slice_source(const PdeSpec& pde,
                                                      const GridSpec& grid,
                                                      int n_ics, int n_f, double scale,
                                                      uint64_t seed);

// generate -> estimate, streaming; applies the preset's split declaration.
ProlongedDataset preset_jets(const DatasetPreset& preset);

}  // namespace liesym

#endif
