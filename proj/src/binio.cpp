#include "liesym/binio.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace liesym {

static_assert(std::endian::native == std::endian::little,
              "dataset files are little-endian; big-endian hosts are unsupported");

void write_f64_file(const std::string& path, std::span<const double> values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!out) throw std::runtime_error("short write to " + path);
}

std::vector<double> read_f64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::streamsize bytes = in.tellg();
    if (bytes % sizeof(double) != 0)
        throw std::runtime_error(path + " is not a multiple of 8 bytes");
    std::vector<double> values(static_cast<size_t>(bytes) / sizeof(double));
    in.seekg(0);
    in.read(reinterpret_cast<char*>(values.data()), bytes);
    if (!in) throw std::runtime_error("short read from " + path);
    return values;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

F64FileReader::F64FileReader(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open " + path);
    std::fseek(f, 0, SEEK_END);
    long bytes = std::ftell(f);
    if (bytes < 0 || bytes % sizeof(double) != 0) {
        std::fclose(f);
        throw std::runtime_error(path + " is not a multiple of 8 bytes");
    }
    size_ = static_cast<size_t>(bytes) / sizeof(double);
    file_ = f;
}

F64FileReader::~F64FileReader() {
    if (file_) std::fclose(static_cast<FILE*>(file_));
}

void F64FileReader::read(size_t offset, std::span<double> out) const {
    if (offset + out.size() > size_) throw std::out_of_range("read past end of file");
    FILE* f = static_cast<FILE*>(file_);
    if (std::fseek(f, static_cast<long>(offset * sizeof(double)), SEEK_SET) != 0)
        throw std::runtime_error("seek failed");
    size_t got = std::fread(out.data(), sizeof(double), out.size(), f);
    if (got != out.size()) throw std::runtime_error("short read");
}

uint64_t fnv1a(std::span<const unsigned char> bytes, uint64_t seed) {
    uint64_t h = seed;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

uint64_t fnv1a_f64(std::span<const double> values, uint64_t seed) {
    return fnv1a({reinterpret_cast<const unsigned char*>(values.data()),
                  values.size() * sizeof(double)},
                 seed);
}

std::string hex64(uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

uint64_t GaussianRng::next_u64() {
    // splitmix64
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double GaussianRng::uniform() {
    // 53-bit mantissa in (0, 1); never returns 0 so the log below is safe
    uint64_t bits = next_u64() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double GaussianRng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

GaussianRng GaussianRng::derived(uint64_t master, uint64_t index) {
    GaussianRng mix(master ^ (0xa0761d6478bd642full + index * 0xe7037ed1a0b428dbull));
    return GaussianRng(mix.next_u64());
}

}  // namespace liesym
