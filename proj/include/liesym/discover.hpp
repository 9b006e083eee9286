#ifndef LIESYM_DISCOVER_HPP
#define LIESYM_DISCOVER_HPP

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "liesym/surrogate.hpp"

namespace liesym {

// The sampled infinitesimal-criterion system: either the stacked matrix C
// (one l-row block per sample) or its Gram matrix C^T C.
struct CriterionSystem {
    bool gram = false;
    Eigen::MatrixXd mat;  // dense: (M*l) x n; gram: n x n, n = (p+q)*r
    FunctionLibrary library;
    DerivCoordSet rows;
    long num_samples = 0;
    int block_rows = 0;  // l
    uint64_t dataset_fingerprint = 0;

    int num_unknowns() const { return static_cast<int>(mat.cols()); }
};

CriterionSystem build_c(const ProlongedDataset& ds, const std::vector<long>& samples,
                        const ResidualSpec& residual, const FunctionLibrary& lib,
                        const DerivCoordSet& rows);

// Streaming accumulation of C^T C; never materializes C.
CriterionSystem accumulate_gram(const ProlongedDataset& ds,
                                const std::vector<long>& samples,
                                const ResidualSpec& residual, const FunctionLibrary& lib,
                                const DerivCoordSet& rows);

// Ratio test from the discovery algorithm: the Gram path is taken when
// M*l / ((p+q)*r) >= eps1.
bool prefer_gram(long m, int l, int unknowns, double eps1 = 4.0);

struct GeneratorBasis {
    Eigen::VectorXd spectrum;  // singular values of C, descending, full
    double eps2 = 0.0;
    int d = 0;
    Eigen::MatrixXd q;                // ((p+q)*r) x d, orthonormal
    std::vector<Eigen::MatrixXd> w;   // d coefficient matrices, (p+q) x r
    std::vector<std::string> expressions;
};

// Full SVD; d = number of singular values below eps2 (eps2^2 on the Gram
// path), Q = the matching right singular vectors.
GeneratorBasis null_space(const CriterionSystem& sys, double eps2);

// W_i from a basis column: vec stacked by coordinate blocks, row-major.
Eigen::MatrixXd unstack_coefficients(const Eigen::VectorXd& column, int p_plus_q, int r);

// Pretty-printed vector fields; coefficients below 1e-8 * max|W_i| are
// suppressed as numerical noise.
std::vector<std::string> render_generators(const std::vector<Eigen::MatrixXd>& w,
                                           const FunctionLibrary& lib);
std::string render_generator(const Eigen::MatrixXd& w, const FunctionLibrary& lib);

struct SpectrumReport {
    std::vector<double> spectrum;
    double eps2 = 0.0;
    int d = 0;
    double last_kept = 0.0;   // smallest retained singular value
    double first_null = 0.0;  // largest singular value under the threshold
    double gap_ratio = 0.0;   // last_kept / first_null; 0 when undefined
    std::string to_text(int tail = 12) const;
};

SpectrumReport spectrum_report(const GeneratorBasis& basis);

// Full result of one discovery run; serializes to the result JSON schema.
struct DiscoveryResult {
    int version = 1;
    std::string pde;
    FunctionLibrary library;
    DerivCoordSet rows;
    bool gram = false;
    long num_samples = 0;
    uint64_t dataset_fingerprint = 0;
    std::map<std::string, std::string> config_echo;
    GeneratorBasis basis;

    // sparsification output, present when populated
    bool has_sparse = false;
    Eigen::MatrixXd q_sparse;
    std::vector<std::string> expressions_sparse;
    std::map<std::string, double> ladmap_diagnostics;
};

std::string result_to_json_text(const DiscoveryResult& res);
DiscoveryResult result_from_json_text(const std::string& text);
void save_result(const DiscoveryResult& res, const std::string& path);
DiscoveryResult load_result(const std::string& path);

}  // namespace liesym

#endif
