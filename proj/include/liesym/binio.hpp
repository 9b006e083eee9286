#ifndef LIESYM_BINIO_HPP
#define LIESYM_BINIO_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace liesym {

// Flat little-endian f64 blobs with a JSON sidecar next to them.
void write_f64_file(const std::string& path, std::span<const double> values);
std::vector<double> read_f64_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// Streaming reader for large blobs: fetches [offset, offset+count) doubles.
class F64FileReader {
public:
    explicit F64FileReader(const std::string& path);
    ~F64FileReader();
    F64FileReader(const F64FileReader&) = delete;
    F64FileReader& operator=(const F64FileReader&) = delete;

    size_t size() const { return size_; }
    void read(size_t offset, std::span<double> out) const;

private:
    void* file_;
    size_t size_;
};

// FNV-1a over raw bytes; used for dataset fingerprints.
uint64_t fnv1a(std::span<const unsigned char> bytes, uint64_t seed = 1469598103934665603ull);
uint64_t fnv1a_f64(std::span<const double> values, uint64_t seed = 1469598103934665603ull);
std::string hex64(uint64_t v);

// Deterministic Gaussian sampler (Box-Muller over 53-bit uniforms) so that
// datasets are bit-identical across standard libraries.
class GaussianRng {
public:
    explicit GaussianRng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    double uniform();   // in (0, 1)
    double gaussian();  // standard normal
    uint64_t next_u64();

    // Stream for a substream (e.g. one initial condition) of a master seed.
    static GaussianRng derived(uint64_t master, uint64_t index);

private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace liesym

#endif
