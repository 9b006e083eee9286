#include "liesym/prolong.hpp"

#include <stdexcept>

namespace liesym {

DerivCoordSet parse_deriv_coords(const JetSpace& space,
                                 const std::vector<std::string>& names) {
    DerivCoordSet rows;
    rows.reserve(names.size());
    for (const auto& n : names) rows.push_back(JetVar::parse(space, n));
    return rows;
}

namespace {

void multi_indices_up_to(int p, int order, MultiIndex& current,
                         std::vector<MultiIndex>& out, int min_coord) {
    if (static_cast<int>(current.size()) == order) return;
    for (int c = min_coord; c < p; ++c) {
        current.push_back(c);
        out.push_back(current);
        multi_indices_up_to(p, order, current, out, c);
        current.pop_back();
    }
}

double binomial(int n, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v = v * (n - i) / (i + 1);
    return v;
}

}  // namespace

DerivCoordSet full_deriv_coords(const JetSpace& space, int order) {
    std::vector<MultiIndex> js;
    js.push_back({});
    MultiIndex scratch;
    multi_indices_up_to(space.p(), order, scratch, js, 0);
    std::stable_sort(js.begin(), js.end(), [](const MultiIndex& a, const MultiIndex& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    DerivCoordSet rows;
    for (int a = 0; a < space.q(); ++a)
        for (const auto& j : js) rows.push_back(JetVar::deriv(a, j));
    return rows;
}

std::vector<SubMultiset> sub_multisets(const MultiIndex& j, bool proper) {
    // multiplicities per distinct coordinate
    std::vector<std::pair<int, int>> counts;  // (coord, mult)
    for (int c : j) {
        if (!counts.empty() && counts.back().first == c)
            ++counts.back().second;
        else
            counts.emplace_back(c, 1);
    }
    std::vector<SubMultiset> out;
    std::vector<int> pick(counts.size(), 0);
    while (true) {
        SubMultiset s;
        s.multiplicity = 1.0;
        for (size_t k = 0; k < counts.size(); ++k) {
            auto [coord, mult] = counts[k];
            for (int i = 0; i < pick[k]; ++i) s.part.push_back(coord);
            for (int i = pick[k]; i < mult; ++i) s.complement.push_back(coord);
            s.multiplicity *= binomial(mult, pick[k]);
        }
        if (!(proper && s.complement.empty())) out.push_back(std::move(s));
        // advance mixed-radix counter
        size_t k = 0;
        for (; k < counts.size(); ++k) {
            if (pick[k] < counts[k].second) {
                ++pick[k];
                break;
            }
            pick[k] = 0;
        }
        if (k == counts.size()) break;
    }
    return out;
}

std::vector<std::vector<JetPoly>> phi_coefficient(const FunctionLibrary& lib,
                                                  int alpha, const MultiIndex& j) {
    if (j.empty())
        throw std::invalid_argument("phi_coefficient requires a nonempty multi-index");
    const JetSpace& space = lib.space;
    if (alpha < 0 || alpha >= space.q())
        throw std::out_of_range("field index out of range in phi_coefficient");
    MultiIndex js = sorted_multi_index(j);
    const int p = space.p(), q = space.q(), r = lib.size();

    std::vector<std::vector<JetPoly>> blocks(p + q, std::vector<JetPoly>(r));
    for (const SubMultiset& s : sub_multisets(js, /*proper=*/true)) {
        std::vector<JetPoly> d_comp = d_theta(lib, s.complement);
        for (int i = 0; i < p; ++i) {
            MultiIndex ji = s.part;
            ji.push_back(i);
            JetPoly u_ii(JetVar::deriv(alpha, std::move(ji)));
            for (int k = 0; k < r; ++k)
                blocks[i][k] -= s.multiplicity * u_ii * d_comp[k];
        }
    }
    std::vector<JetPoly> d_full = d_theta(lib, js);
    for (int k = 0; k < r; ++k) blocks[p + alpha][k] = d_full[k];
    return blocks;
}

ThetaN build_theta_n(const FunctionLibrary& lib, const DerivCoordSet& rows) {
    validate_library(lib);
    const JetSpace& space = lib.space;
    const int p = space.p(), q = space.q(), r = lib.size();
    ThetaN theta{space, r, rows, {}};
    theta.entries.reserve(rows.size());
    for (const JetVar& row : rows) {
        std::vector<JetPoly> line((p + q) * r);
        if (row.is_indep()) {
            for (int k = 0; k < r; ++k) line[row.coord() * r + k] = lib.entries[k];
        } else if (row.order() == 0) {
            for (int k = 0; k < r; ++k) line[(p + row.field()) * r + k] = lib.entries[k];
        } else {
            auto blocks = phi_coefficient(lib, row.field(), row.index());
            for (int b = 0; b < p + q; ++b)
                for (int k = 0; k < r; ++k) line[b * r + k] = std::move(blocks[b][k]);
        }
        theta.entries.push_back(std::move(line));
    }
    return theta;
}

Eigen::MatrixXd ThetaN::evaluate_at(const JetValues& values) const {
    return evaluate([&](const JetVar& v) -> const double* {
        auto it = values.find(v);
        return it == values.end() ? nullptr : &it->second;
    });
}

std::map<JetVar, JetPoly> prolong_vector_field(const FunctionLibrary& lib,
                                               const Eigen::MatrixXd& w, int order) {
    const JetSpace& space = lib.space;
    const int p = space.p(), q = space.q(), r = lib.size();
    if (w.rows() != p + q || w.cols() != r)
        throw std::invalid_argument("coefficient matrix shape does not match library");
    auto contract = [&](const std::vector<JetPoly>& polys, int block) {
        JetPoly acc;
        for (int k = 0; k < r; ++k) acc += w(block, k) * polys[k];
        return acc;
    };
    std::map<JetVar, JetPoly> field;
    for (int i = 0; i < p; ++i)
        field[JetVar::indep(i)] = contract(lib.entries, i);
    for (int a = 0; a < q; ++a)
        field[JetVar::deriv(a)] = contract(lib.entries, p + a);
    std::vector<MultiIndex> js;
    MultiIndex scratch;
    multi_indices_up_to(p, order, scratch, js, 0);
    for (const auto& j : js) {
        for (int a = 0; a < q; ++a) {
            auto blocks = phi_coefficient(lib, a, j);
            JetPoly acc;
            for (int b = 0; b < p + q; ++b) acc += contract(blocks[b], b);
            field[JetVar::deriv(a, j)] = std::move(acc);
        }
    }
    return field;
}

}  // namespace liesym
