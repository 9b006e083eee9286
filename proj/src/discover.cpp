#include "liesym/discover.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace liesym {

namespace {

Eigen::MatrixXd criterion_block(const ProlongedDataset& ds, long row,
                                const ResidualSpec& residual, const ThetaN& theta,
                                const DerivCoordSet& rows) {
    PointRef pt(ds, row);
    Eigen::MatrixXd jf = residual.residual_jacobian(pt, rows);
    Eigen::MatrixXd th = theta.evaluate(pt);
    return jf * th;
}

}  // namespace

CriterionSystem build_c(const ProlongedDataset& ds, const std::vector<long>& samples,
                        const ResidualSpec& residual, const FunctionLibrary& lib,
                        const DerivCoordSet& rows) {
    ThetaN theta = build_theta_n(lib, rows);
    const int l = residual.num_equations();
    CriterionSystem sys;
    sys.gram = false;
    sys.library = lib;
    sys.rows = rows;
    sys.num_samples = static_cast<long>(samples.size());
    sys.block_rows = l;
    sys.dataset_fingerprint = ds.fingerprint();
    sys.mat.resize(static_cast<long>(samples.size()) * l, theta.num_cols());
    for (size_t i = 0; i < samples.size(); ++i)
        sys.mat.middleRows(static_cast<long>(i) * l, l) =
            criterion_block(ds, samples[i], residual, theta, rows);
    if (!sys.mat.allFinite())
        throw std::runtime_error("criterion matrix has non-finite entries");
    return sys;
}

CriterionSystem accumulate_gram(const ProlongedDataset& ds,
                                const std::vector<long>& samples,
                                const ResidualSpec& residual, const FunctionLibrary& lib,
                                const DerivCoordSet& rows) {
    ThetaN theta = build_theta_n(lib, rows);
    const int l = residual.num_equations();
    CriterionSystem sys;
    sys.gram = true;
    sys.library = lib;
    sys.rows = rows;
    sys.num_samples = static_cast<long>(samples.size());
    sys.block_rows = l;
    sys.dataset_fingerprint = ds.fingerprint();
    sys.mat = Eigen::MatrixXd::Zero(theta.num_cols(), theta.num_cols());
    for (long row : samples) {
        Eigen::MatrixXd ci = criterion_block(ds, row, residual, theta, rows);
        sys.mat.noalias() += ci.transpose() * ci;
    }
    if (!sys.mat.allFinite())
        throw std::runtime_error("criterion matrix has non-finite entries");
    return sys;
}

bool prefer_gram(long m, int l, int unknowns, double eps1) {
    return double(m) * l / double(unknowns) >= eps1;
}

GeneratorBasis null_space(const CriterionSystem& sys, double eps2) {
    // eps2 = 0 is allowed and selects nothing (sigma < 0 never holds)
    if (eps2 < 0) throw std::invalid_argument("singular value threshold must be >= 0");
    if (!sys.mat.allFinite())
        throw std::invalid_argument("criterion matrix has non-finite entries");
    GeneratorBasis basis;
    basis.eps2 = eps2;
    const int n = sys.num_unknowns();
    Eigen::MatrixXd v;
    Eigen::VectorXd sigma;
    if (sys.gram) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sys.mat);
        // eigenvalues ascending; singular values of C are their square roots
        Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
        sigma.resize(n);
        v.resize(n, n);
        for (int i = 0; i < n; ++i) {
            sigma(i) = std::sqrt(lam(n - 1 - i));
            v.col(i) = eig.eigenvectors().col(n - 1 - i);
        }
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.mat, Eigen::ComputeFullV);
        sigma = svd.singularValues();
        if (sigma.size() < n) {
            // rows < cols: the remaining right singular directions are exact nulls
            Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
            full.head(sigma.size()) = sigma;
            sigma = full;
        }
        v = svd.matrixV();
    }
    basis.spectrum = sigma;
    // the Gram path thresholds eigenvalues at eps2^2, which after the square
    // root above is the same comparison
    int d = 0;
    for (int i = 0; i < n; ++i)
        if (sigma(i) < eps2) ++d;
    basis.d = d;
    basis.q = v.rightCols(d);
    const int pq = sys.library.space.p() + sys.library.space.q();
    const int r = sys.library.size();
    for (int i = 0; i < d; ++i)
        basis.w.push_back(unstack_coefficients(basis.q.col(i), pq, r));
    basis.expressions = render_generators(basis.w, sys.library);
    return basis;
}

Eigen::MatrixXd unstack_coefficients(const Eigen::VectorXd& column, int p_plus_q, int r) {
    if (column.size() != static_cast<long>(p_plus_q) * r)
        throw std::invalid_argument("coefficient vector length mismatch");
    Eigen::MatrixXd w(p_plus_q, r);
    for (int b = 0; b < p_plus_q; ++b)
        for (int k = 0; k < r; ++k) w(b, k) = column(b * r + k);
    return w;
}

std::string render_generator(const Eigen::MatrixXd& w, const FunctionLibrary& lib) {
    const JetSpace& space = lib.space;
    double maxabs = w.cwiseAbs().maxCoeff();
    if (maxabs == 0.0) return "0";
    double floor = 1e-8 * maxabs;
    std::ostringstream out;
    bool first = true;
    for (int b = 0; b < w.rows(); ++b) {
        JetPoly coeff;
        for (int k = 0; k < lib.size(); ++k)
            if (std::abs(w(b, k)) >= floor) coeff += w(b, k) * lib.entries[k];
        if (coeff.is_zero()) continue;
        std::string name = b < space.p() ? space.coords[b] : space.fields[b - space.p()];
        std::string text = to_text(coeff, space);
        if (!first) out << " + ";
        first = false;
        if (text == "1")
            out << "∂/∂" << name;
        else if (coeff.num_terms() == 1)
            out << text << " ∂/∂" << name;
        else
            out << "(" << text << ") ∂/∂" << name;
    }
    if (first) return "0";
    return out.str();
}

std::vector<std::string> render_generators(const std::vector<Eigen::MatrixXd>& w,
                                           const FunctionLibrary& lib) {
    std::vector<std::string> out;
    out.reserve(w.size());
    for (const auto& wi : w) out.push_back(render_generator(wi, lib));
    return out;
}

SpectrumReport spectrum_report(const GeneratorBasis& basis) {
    SpectrumReport rep;
    rep.spectrum.assign(basis.spectrum.data(), basis.spectrum.data() + basis.spectrum.size());
    rep.eps2 = basis.eps2;
    rep.d = basis.d;
    int m = static_cast<int>(rep.spectrum.size());
    if (basis.d > 0 && basis.d < m) {
        rep.last_kept = rep.spectrum[m - basis.d - 1];
        rep.first_null = rep.spectrum[m - basis.d];
        if (rep.first_null > 0) rep.gap_ratio = rep.last_kept / rep.first_null;
    }
    return rep;
}

std::string SpectrumReport::to_text(int tail) const {
    std::ostringstream out;
    int m = static_cast<int>(spectrum.size());
    int show = std::min(m, std::max(tail, d + 2));
    out << "singular values (" << m << " total, trailing " << show << "):\n";
    for (int i = m - show; i < m; ++i) {
        out << "  sigma[" << i << "] = " << format_real(spectrum[i]);
        if (i == m - d && d > 0) out << "   <- first below threshold";
        out << "\n";
    }
    out << "threshold = " << format_real(eps2) << ", null dimension d = " << d << "\n";
    if (gap_ratio > 0)
        out << "gap ratio (last kept / first null) = " << format_real(gap_ratio) << "\n";
    else if (d == 0)
        out << "no generators found\n";
    return out.str();
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (long i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (long j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    long rows = static_cast<long>(j.size());
    long cols = rows ? static_cast<long>(j.at(0).size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (long i = 0; i < rows; ++i)
        for (long c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
    return m;
}

}  // namespace

std::string result_to_json_text(const DiscoveryResult& res) {
    nlohmann::json doc;
    doc["version"] = res.version;
    doc["pde"] = res.pde;
    doc["library"] = nlohmann::json::parse(library_to_json_text(res.library));
    std::vector<std::string> row_names;
    for (const JetVar& v : res.rows) row_names.push_back(v.name(res.library.space));
    doc["rows"] = row_names;
    doc["gram"] = res.gram;
    doc["num_samples"] = res.num_samples;
    doc["dataset_fingerprint"] = hex64(res.dataset_fingerprint);
    doc["config"] = res.config_echo;
    std::vector<double> spec(res.basis.spectrum.data(),
                             res.basis.spectrum.data() + res.basis.spectrum.size());
    doc["spectrum"] = spec;
    doc["eps2"] = res.basis.eps2;
    doc["d"] = res.basis.d;
    doc["Q"] = matrix_to_json(res.basis.q);
    nlohmann::json ws = nlohmann::json::array();
    for (const auto& wi : res.basis.w) ws.push_back(matrix_to_json(wi));
    doc["W"] = ws;
    doc["expressions"] = res.basis.expressions;
    if (res.has_sparse) {
        doc["Q_sparse"] = matrix_to_json(res.q_sparse);
        doc["expressions_sparse"] = res.expressions_sparse;
        doc["ladmap_diagnostics"] = res.ladmap_diagnostics;
    }
    return doc.dump(2) + "\n";
}

DiscoveryResult result_from_json_text(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    DiscoveryResult res;
    res.version = doc.at("version");
    res.pde = doc.at("pde");
    res.library = library_from_json_text(doc.at("library").dump());
    res.rows = parse_deriv_coords(res.library.space,
                                  doc.at("rows").get<std::vector<std::string>>());
    res.gram = doc.at("gram");
    res.num_samples = doc.at("num_samples");
    res.dataset_fingerprint =
        std::stoull(doc.at("dataset_fingerprint").get<std::string>(), nullptr, 16);
    res.config_echo = doc.at("config").get<std::map<std::string, std::string>>();
    auto spec = doc.at("spectrum").get<std::vector<double>>();
    res.basis.spectrum = Eigen::Map<Eigen::VectorXd>(spec.data(), spec.size());
    res.basis.eps2 = doc.at("eps2");
    res.basis.d = doc.at("d");
    res.basis.q = matrix_from_json(doc.at("Q"));
    for (const auto& wj : doc.at("W")) res.basis.w.push_back(matrix_from_json(wj));
    res.basis.expressions = doc.at("expressions").get<std::vector<std::string>>();
    if (doc.contains("Q_sparse")) {
        res.has_sparse = true;
        res.q_sparse = matrix_from_json(doc.at("Q_sparse"));
        res.expressions_sparse =
            doc.at("expressions_sparse").get<std::vector<std::string>>();
        res.ladmap_diagnostics =
            doc.at("ladmap_diagnostics").get<std::map<std::string, double>>();
    }
    return res;
}

void save_result(const DiscoveryResult& res, const std::string& path) {
    write_text_file(path, result_to_json_text(res));
}

DiscoveryResult load_result(const std::string& path) {
    return result_from_json_text(read_text_file(path));
}

}  // namespace liesym
