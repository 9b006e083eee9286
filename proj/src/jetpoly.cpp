#include "liesym/jetpoly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace liesym {

MultiIndex sorted_multi_index(MultiIndex j) {
    std::sort(j.begin(), j.end());
    return j;
}

int JetSpace::coord_index(const std::string& name) const {
    for (int i = 0; i < p(); ++i)
        if (coords[i] == name) return i;
    return -1;
}

int JetSpace::field_index(const std::string& name) const {
    for (int a = 0; a < q(); ++a)
        if (fields[a] == name) return a;
    return -1;
}

JetSpace make_space(std::vector<std::string> coords, std::vector<std::string> fields) {
    JetSpace s{std::move(coords), std::move(fields)};
    for (const auto& c : s.coords)
        if (c.empty()) throw std::invalid_argument("empty coordinate name");
    for (const auto& f : s.fields)
        if (f.empty()) throw std::invalid_argument("empty field name");
    return s;
}

JetVar JetVar::indep(int coord) {
    if (coord < 0) throw std::invalid_argument("negative coordinate index");
    return JetVar(true, coord, {});
}

JetVar JetVar::deriv(int field, MultiIndex j) {
    if (field < 0) throw std::invalid_argument("negative field index");
    return JetVar(false, field, sorted_multi_index(std::move(j)));
}

int JetVar::coord() const {
    if (!indep_) throw std::logic_error("coord() on a derivative coordinate");
    return idx_;
}

int JetVar::field() const {
    if (indep_) throw std::logic_error("field() on an independent variable");
    return idx_;
}

const MultiIndex& JetVar::index() const {
    if (indep_) throw std::logic_error("index() on an independent variable");
    return j_;
}

int JetVar::order() const { return indep_ ? 0 : static_cast<int>(j_.size()); }

JetVar JetVar::differentiated(int coord) const {
    if (indep_) throw std::logic_error("differentiated() on an independent variable");
    MultiIndex j = j_;
    j.push_back(coord);
    return deriv(idx_, std::move(j));
}

std::string JetVar::name(const JetSpace& space) const {
    if (indep_) {
        if (idx_ >= space.p()) throw std::out_of_range("coordinate index out of range");
        return space.coords[idx_];
    }
    if (idx_ >= space.q()) throw std::out_of_range("field index out of range");
    std::string s = space.fields[idx_];
    if (!j_.empty()) {
        s += "_";
        for (int c : j_) {
            if (c >= space.p()) throw std::out_of_range("coordinate index out of range");
            s += space.coords[c];
        }
    }
    return s;
}

JetVar JetVar::parse(const JetSpace& space, const std::string& name) {
    int ci = space.coord_index(name);
    if (ci >= 0) return indep(ci);
    int fi = space.field_index(name);
    if (fi >= 0) return deriv(fi);
    auto us = name.find('_');
    if (us != std::string::npos) {
        fi = space.field_index(name.substr(0, us));
        if (fi >= 0) {
            std::string sub = name.substr(us + 1);
            MultiIndex j;
            size_t pos = 0;
            while (pos < sub.size()) {
                // greedy match of a coordinate name
                int best = -1;
                size_t best_len = 0;
                for (int c = 0; c < space.p(); ++c) {
                    const auto& cn = space.coords[c];
                    if (cn.size() > best_len && sub.compare(pos, cn.size(), cn) == 0) {
                        best = c;
                        best_len = cn.size();
                    }
                }
                if (best < 0) throw std::invalid_argument("unknown jet coordinate: " + name);
                j.push_back(best);
                pos += best_len;
            }
            if (j.empty()) throw std::invalid_argument("unknown jet coordinate: " + name);
            return deriv(fi, std::move(j));
        }
    }
    throw std::invalid_argument("unknown jet coordinate: " + name);
}

std::strong_ordering JetVar::operator<=>(const JetVar& o) const {
    if (indep_ != o.indep_)
        return indep_ ? std::strong_ordering::less : std::strong_ordering::greater;
    if (indep_) return idx_ <=> o.idx_;
    if (auto c = idx_ <=> o.idx_; c != 0) return c;
    if (auto c = j_.size() <=> o.j_.size(); c != 0) return c;
    for (size_t k = 0; k < j_.size(); ++k)
        if (auto c = j_[k] <=> o.j_[k]; c != 0) return c;
    return std::strong_ordering::equal;
}

int Monomial::degree() const {
    int d = 0;
    for (const auto& [v, e] : exps) d += e;
    return d;
}

JetPoly::JetPoly(double c) {
    if (c != 0.0) terms_[ExpMap{}] = c;
}

JetPoly::JetPoly(const JetVar& v, int exponent) {
    if (exponent < 0) throw std::invalid_argument("negative exponent");
    if (exponent == 0) {
        terms_[ExpMap{}] = 1.0;
    } else {
        terms_[ExpMap{{v, exponent}}] = 1.0;
    }
}

int JetPoly::degree() const {
    int d = -1;
    for (const auto& [exps, c] : terms_) {
        int td = 0;
        for (const auto& [v, e] : exps) td += e;
        d = std::max(d, td);
    }
    return d;
}

void JetPoly::add_term(double coeff, ExpMap exps) {
    if (coeff == 0.0) return;
    for (auto it = exps.begin(); it != exps.end();) {
        if (it->second == 0)
            it = exps.erase(it);
        else if (it->second < 0)
            throw std::invalid_argument("negative exponent");
        else
            ++it;
    }
    auto [it, inserted] = terms_.try_emplace(std::move(exps), coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second == 0.0) terms_.erase(it);
    }
}

void JetPoly::prune() {
    for (auto it = terms_.begin(); it != terms_.end();)
        it = (it->second == 0.0) ? terms_.erase(it) : std::next(it);
}

JetPoly& JetPoly::operator+=(const JetPoly& o) {
    for (const auto& [exps, c] : o.terms_) add_term(c, exps);
    return *this;
}

JetPoly& JetPoly::operator-=(const JetPoly& o) {
    for (const auto& [exps, c] : o.terms_) add_term(-c, exps);
    return *this;
}

JetPoly& JetPoly::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [exps, c] : terms_) c *= s;
    prune();
    return *this;
}

JetPoly& JetPoly::operator*=(const JetPoly& o) {
    std::map<ExpMap, double> result;
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            ExpMap e = ea;
            for (const auto& [v, k] : eb) e[v] += k;
            auto [it, inserted] = result.try_emplace(std::move(e), ca * cb);
            if (!inserted) it->second += ca * cb;
        }
    }
    terms_ = std::move(result);
    prune();
    return *this;
}

bool JetPoly::operator==(const JetPoly& o) const { return terms_ == o.terms_; }

std::vector<Monomial> JetPoly::monomials() const {
    std::vector<Monomial> ms;
    ms.reserve(terms_.size());
    for (const auto& [exps, c] : terms_) ms.push_back(Monomial{c, exps});
    std::stable_sort(ms.begin(), ms.end(), [](const Monomial& a, const Monomial& b) {
        int da = a.degree(), db = b.degree();
        if (da != db) return da < db;
        return a.exps < b.exps;
    });
    return ms;
}

JetPoly total_derivative(const JetSpace& space, const JetPoly& poly, int coord) {
    if (coord < 0 || coord >= space.p())
        throw std::out_of_range("coordinate index out of range in total derivative");
    JetPoly result;
    for (const auto& [exps, coeff] : poly.terms()) {
        for (const auto& [var, e] : exps) {
            // differentiate this factor, keep the others
            ExpMap rest = exps;
            if (e == 1)
                rest.erase(var);
            else
                rest[var] = e - 1;
            if (var.is_indep()) {
                if (var.coord() != coord) continue;
                result.add_term(coeff * e, std::move(rest));
            } else {
                rest[var.differentiated(coord)] += 1;
                result.add_term(coeff * e, std::move(rest));
            }
        }
    }
    return result;
}

JetPoly total_derivative_multi(const JetSpace& space, const JetPoly& poly, const MultiIndex& j) {
    JetPoly result = poly;
    for (int c : j) result = total_derivative(space, result, c);
    return result;
}

double evaluate(const JetPoly& poly, const JetValues& values, const JetSpace& space) {
    return evaluate_with(poly, space, [&](const JetVar& v) -> const double* {
        auto it = values.find(v);
        return it == values.end() ? nullptr : &it->second;
    });
}

std::string format_real(double v) {
    double r = std::round(v);
    if (std::abs(v - r) < 1e-12 && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", r);
        return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string to_text(const JetPoly& poly, const JetSpace& space) {
    if (poly.is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const Monomial& m : poly.monomials()) {
        double c = m.coeff;
        if (first) {
            if (c < 0) out << "-";
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        first = false;
        double mag = std::abs(c);
        bool unit = std::abs(mag - 1.0) < 1e-15;
        if (!unit || m.exps.empty()) out << format_real(mag);
        bool need_star = !unit || m.exps.empty();
        for (const auto& [var, e] : m.exps) {
            if (need_star) out << "*";
            out << var.name(space);
            if (e > 1) out << "^" << e;
            need_star = true;
        }
    }
    return out.str();
}

namespace {

struct Lexer {
    const std::string& s;
    size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool eat(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    bool ident_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }
    std::string ident() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        if (pos == start) throw std::invalid_argument("expected identifier in: " + s);
        return s.substr(start, pos - start);
    }
    double number() {
        skip_ws();
        size_t consumed = 0;
        double v = std::stod(s.substr(pos), &consumed);
        if (consumed == 0) throw std::invalid_argument("expected number in: " + s);
        pos += consumed;
        return v;
    }
    int integer() {
        skip_ws();
        size_t consumed = 0;
        int v = std::stoi(s.substr(pos), &consumed);
        if (consumed == 0) throw std::invalid_argument("expected integer in: " + s);
        pos += consumed;
        return v;
    }
};

}  // namespace

JetPoly parse_poly(const JetSpace& space, const std::string& text) {
    Lexer lex{text};
    JetPoly poly;
    bool expect_term = true;
    double sign = 1.0;
    while (true) {
        char c = lex.peek();
        if (c == '\0') break;
        if (expect_term) {
            while (true) {
                if (lex.eat('-'))
                    sign = -sign;
                else if (lex.eat('+'))
                    ;
                else
                    break;
            }
            // term := [number] {'*' factor} | factor {'*' factor}
            double coeff = sign;
            ExpMap exps;
            bool saw_factor = false;
            while (true) {
                char f = lex.peek();
                if (std::isdigit(static_cast<unsigned char>(f)) || f == '.') {
                    coeff *= lex.number();
                    saw_factor = true;
                } else if (lex.ident_start(f)) {
                    JetVar v = JetVar::parse(space, lex.ident());
                    int e = 1;
                    if (lex.eat('^')) e = lex.integer();
                    if (e < 0) throw std::invalid_argument("negative exponent in: " + text);
                    exps[v] += e;
                    saw_factor = true;
                } else {
                    throw std::invalid_argument("unexpected character in: " + text);
                }
                if (!lex.eat('*')) break;
            }
            if (!saw_factor) throw std::invalid_argument("empty term in: " + text);
            poly.add_term(coeff, std::move(exps));
            expect_term = false;
            sign = 1.0;
        } else if (lex.eat('+')) {
            expect_term = true;
            sign = 1.0;
        } else if (lex.eat('-')) {
            expect_term = true;
            sign = -1.0;
        } else {
            throw std::invalid_argument("unexpected character in: " + text);
        }
    }
    if (expect_term && !poly.is_zero())
        throw std::invalid_argument("trailing operator in: " + text);
    // leading sign with no prior term, e.g. "-2*t*x"
    return poly;
}

}  // namespace liesym
