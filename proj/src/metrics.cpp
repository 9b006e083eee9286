#include "liesym/metrics.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace liesym {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& basis) {
    if (basis.cols() == 0) return basis;
    if (basis.rows() < basis.cols())
        throw std::invalid_argument("more columns than rows in orthonormalize");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
    Eigen::MatrixXd r = qr.matrixQR()
                            .topRows(basis.cols())
                            .triangularView<Eigen::Upper>();
    double dmax = r.diagonal().cwiseAbs().maxCoeff();
    if (dmax == 0.0 || r.diagonal().cwiseAbs().minCoeff() < 1e-10 * dmax)
        throw std::invalid_argument("rank-deficient basis in orthonormalize");
    Eigen::MatrixXd q =
        qr.householderQ() * Eigen::MatrixXd::Identity(basis.rows(), basis.cols());
    for (long c = 0; c < q.cols(); ++c)
        if (r(c, c) < 0) q.col(c) = -q.col(c);
    return q;
}

namespace {

void check_orthonormal(const Eigen::MatrixXd& q, const char* which) {
    Eigen::MatrixXd gram = q.transpose() * q;
    gram -= Eigen::MatrixXd::Identity(q.cols(), q.cols());
    if (gram.cwiseAbs().maxCoeff() > 1e-6)
        throw std::invalid_argument(std::string(which) + " basis is not orthonormal");
}

// Principal angles of span(b) relative to span(a), a orthonormal n x da,
// b orthonormal n x db, db <= da. arccos of the overlap singular values loses
// half the digits near zero angle, so small angles are recovered from the
// projection residual (sin theta) instead.
double principal_angle_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd overlap = a.transpose() * b;
    Eigen::JacobiSVD<Eigen::MatrixXd> cos_svd(overlap);
    Eigen::VectorXd coss = cos_svd.singularValues();  // descending
    Eigen::MatrixXd resid = b - a * overlap;
    Eigen::JacobiSVD<Eigen::MatrixXd> sin_svd(resid);
    Eigen::VectorXd sins = sin_svd.singularValues();  // descending
    const long d = coss.size();
    double sum = 0;
    for (long i = 0; i < d; ++i) {
        double c = std::clamp(coss(i), 0.0, 1.0);
        // sins descending pairs with coss ascending
        double s = std::clamp(sins(d - 1 - i), 0.0, 1.0);
        double theta = c * c > 0.5 ? std::asin(s) : std::acos(c);
        sum += theta * theta;
    }
    return std::sqrt(sum);
}

}  // namespace

double grassmann_distance(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2) {
    if (q1.rows() != q2.rows() || q1.cols() != q2.cols())
        throw std::invalid_argument("subspace shapes differ in grassmann_distance");
    check_orthonormal(q1, "first");
    check_orthonormal(q2, "second");
    return principal_angle_norm(q1, q2);
}

double subspace_containment(const Eigen::MatrixXd& sub, const Eigen::MatrixXd& big) {
    if (sub.rows() != big.rows())
        throw std::invalid_argument("ambient dimensions differ in subspace_containment");
    if (sub.cols() > big.cols())
        throw std::invalid_argument("candidate subspace is larger than the container");
    check_orthonormal(sub, "first");
    check_orthonormal(big, "second");
    return principal_angle_norm(big, sub);
}

Eigen::VectorXd encode_generator(
    const FunctionLibrary& lib,
    const std::vector<std::pair<std::string, std::string>>& components) {
    const JetSpace& space = lib.space;
    const int pq = space.p() + space.q();
    const int r = lib.size();

    // monomial exponent map -> (library column, entry coefficient)
    std::map<ExpMap, std::pair<int, double>> table;
    for (int k = 0; k < r; ++k) {
        const auto& terms = lib.entries[k].terms();
        if (terms.size() != 1) continue;  // only monomial entries are invertible
        table[terms.begin()->first] = {k, terms.begin()->second};
    }

    Eigen::VectorXd vec = Eigen::VectorXd::Zero(static_cast<long>(pq) * r);
    for (const auto& [coord_name, poly_text] : components) {
        int block;
        int ci = space.coord_index(coord_name);
        if (ci >= 0) {
            block = ci;
        } else {
            int fi = space.field_index(coord_name);
            if (fi < 0)
                throw std::invalid_argument("unknown coordinate '" + coord_name +
                                            "' in generator");
            block = space.p() + fi;
        }
        JetPoly poly = parse_poly(space, poly_text);
        for (const auto& [exps, coeff] : poly.terms()) {
            auto it = table.find(exps);
            if (it == table.end())
                throw std::invalid_argument("generator term outside the library: " +
                                            poly_text);
            vec(static_cast<long>(block) * r + it->second.first) +=
                coeff / it->second.second;
        }
    }
    return vec;
}

namespace {

using GeneratorTable =
    std::vector<std::vector<std::pair<std::string, std::string>>>;

const std::map<std::string, GeneratorTable>& fixtures() {
    static const std::map<std::string, GeneratorTable> table = {
        {"burgers",
         {
             {{"t", "4*t^2"}, {"x", "4*t*x"}, {"u", "-2*t - x^2"}},
             {{"t", "2*t"}, {"x", "x"}},
             {{"x", "2*t"}, {"u", "-x"}},
             {{"u", "1"}},
             {{"t", "1"}},
             {{"x", "1"}},
         }},
        {"heat",
         {
             {{"u", "2*t + x^2"}},
             {{"t", "2*t"}, {"x", "x"}},
             {{"x", "2*t"}, {"u", "-x*u"}},
             {{"u", "x"}},
             {{"u", "u"}},
             {{"u", "1"}},
             {{"x", "1"}},
             {{"t", "1"}},
         }},
        {"kdv",
         {
             {{"t", "-3*t"}, {"x", "-x"}, {"u", "2*u"}},
             {{"x", "t"}, {"u", "1"}},
             {{"t", "1"}},
             {{"x", "1"}},
         }},
        {"wave2d",
         {
             {{"t", "2*t*x"}, {"x", "t^2 + x^2 - y^2"}, {"y", "2*x*y"}, {"u", "-x*u"}},
             {{"t", "2*t*y"}, {"x", "2*x*y"}, {"y", "t^2 - x^2 + y^2"}, {"u", "-y*u"}},
             {{"u", "t^2 + y^2"}},
             {{"u", "t^2 + 2*x^2 - y^2"}},
             {{"u", "x*y"}},
             {{"t", "t^2 + x^2 + y^2"}, {"x", "2*t*x"}, {"y", "2*t*y"}, {"u", "-t*u"}},
             {{"u", "t*x"}},
             {{"t", "x"}, {"x", "t"}},
             {{"t", "y"}, {"y", "t"}},
             {{"t", "t"}, {"x", "x"}, {"y", "y"}},
             {{"u", "t*y"}},
             {{"x", "-y"}, {"y", "x"}},
             {{"u", "u"}},
             {{"u", "y"}},
             {{"u", "x"}},
             {{"u", "t"}},
             {{"u", "1"}},
             {{"t", "1"}},
             {{"x", "1"}},
             {{"y", "1"}},
         }},
        {"schrodinger2d",
         {
             {{"t", "-2*t"}, {"x", "-x"}, {"y", "-y"}, {"u", "u"}, {"v", "v"}},
             {{"u", "-v"}, {"v", "u"}},
             {{"x", "-y"}, {"y", "x"}},
             {{"t", "1"}},
             {{"x", "1"}},
             {{"y", "1"}},
         }},
        {"rd2d",
         {
             {{"u", "-v"}, {"v", "u"}},
             {{"x", "-y"}, {"y", "x"}},
             {{"t", "1"}},
             {{"x", "1"}},
             {{"y", "1"}},
         }},
        {"topquark",
         {
             {{"p2", "-p3"}, {"p3", "p2"}},
             {{"p0", "p1"}, {"p1", "p0"}},
             {{"p1", "-p3"}, {"p3", "p1"}},
             {{"p0", "p3"}, {"p3", "p0"}},
             {{"p1", "-p2"}, {"p2", "p1"}},
             {{"p0", "p2"}, {"p2", "p0"}},
             {{"p0", "p0"}, {"p1", "p1"}, {"p2", "p2"}, {"p3", "p3"}},
         }},
        {"circle",
         {
             {{"x", "-y"}, {"y", "x"}},
         }},
    };
    return table;
}

}  // namespace

std::vector<std::string> truth_algebra_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : fixtures()) names.push_back(k);
    return names;
}

int truth_algebra_dimension(const std::string& name) {
    auto it = fixtures().find(name);
    if (it == fixtures().end())
        throw std::invalid_argument("unknown reference algebra '" + name + "'");
    return static_cast<int>(it->second.size());
}

Eigen::MatrixXd truth_algebra(const std::string& name, const FunctionLibrary& lib) {
    auto it = fixtures().find(name);
    if (it == fixtures().end()) {
        std::string options;
        for (const auto& n : truth_algebra_names())
            options += (options.empty() ? "" : ", ") + n;
        throw std::invalid_argument("unknown reference algebra '" + name +
                                    "'; options: " + options);
    }
    const GeneratorTable& gens = it->second;
    const long n = static_cast<long>(lib.space.p() + lib.space.q()) * lib.size();
    Eigen::MatrixXd basis(n, static_cast<long>(gens.size()));
    for (size_t g = 0; g < gens.size(); ++g) basis.col(g) = encode_generator(lib, gens[g]);
    return orthonormalize(basis);
}

std::string truth_algebras_json() {
    nlohmann::json doc;
    for (const auto& [name, gens] : fixtures()) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& g : gens) {
            nlohmann::json comp;
            for (const auto& [coord, poly] : g) comp[coord] = poly;
            list.push_back(comp);
        }
        doc[name] = list;
    }
    return doc.dump(2) + "\n";
}

Eigen::MatrixXd project_linear_part(const Eigen::MatrixXd& q, const FunctionLibrary& lib) {
    const int pq = lib.space.p() + lib.space.q();
    const int r = lib.size();
    if (q.rows() != static_cast<long>(pq) * r)
        throw std::invalid_argument("basis rows do not match the library");
    Eigen::MatrixXd projected = q;
    for (int k = 0; k < r; ++k) {
        if (lib.entries[k].degree() == 1) continue;
        for (int b = 0; b < pq; ++b) projected.row(static_cast<long>(b) * r + k).setZero();
    }
    return orthonormalize(projected);
}

}  // namespace liesym
