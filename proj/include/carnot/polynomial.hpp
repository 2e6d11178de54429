#pragma once

#include <cctype>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "carnot/errors.hpp"

namespace carnot {

/// A real multivariate polynomial in variables w1..wN, stored as a flat list
/// of monomials. Small and evaluation-oriented; no symbolic calculus.
class Polynomial {
public:
    struct Monomial {
        double coef;
        std::vector<int> exps;
    };

    Polynomial() = default;
    explicit Polynomial(int nvars) : nvars_(nvars) {}

    static Polynomial constant(int nvars, double c) {
        Polynomial p(nvars);
        if (c != 0.0) p.terms_.push_back({c, std::vector<int>(nvars, 0)});
        return p;
    }

    static Polynomial variable(int nvars, int index) {
        Polynomial p(nvars);
        std::vector<int> e(nvars, 0);
        e.at(index) = 1;
        p.terms_.push_back({1.0, std::move(e)});
        return p;
    }

    int nvars() const { return nvars_; }
    const std::vector<Monomial>& terms() const { return terms_; }
    bool is_constant() const {
        for (const auto& t : terms_)
            for (int e : t.exps)
                if (e) return false;
        return true;
    }

    double eval(const std::vector<double>& w) const {
        if (static_cast<int>(w.size()) != nvars_) throw semantic_error("polynomial arity mismatch");
        double s = 0;
        for (const auto& t : terms_) {
            double m = t.coef;
            for (int v = 0; v < nvars_; ++v)
                for (int e = 0; e < t.exps[v]; ++e) m *= w[v];
            s += m;
        }
        return s;
    }

    Polynomial operator+(const Polynomial& o) const {
        auto m = as_map();
        for (const auto& t : o.terms_) m[t.exps] += t.coef;
        return from_map(nvars_, m);
    }
    Polynomial operator-(const Polynomial& o) const {
        auto m = as_map();
        for (const auto& t : o.terms_) m[t.exps] -= t.coef;
        return from_map(nvars_, m);
    }
    Polynomial operator*(const Polynomial& o) const {
        std::map<std::vector<int>, double> m;
        for (const auto& a : terms_)
            for (const auto& b : o.terms_) {
                std::vector<int> e(nvars_);
                for (int v = 0; v < nvars_; ++v) e[v] = a.exps[v] + b.exps[v];
                m[e] += a.coef * b.coef;
            }
        return from_map(nvars_, m);
    }
    Polynomial scaled(double f) const {
        Polynomial p(nvars_);
        for (const auto& t : terms_)
            if (t.coef * f != 0.0) p.terms_.push_back({t.coef * f, t.exps});
        return p;
    }
    Polynomial pow(int e) const {
        if (e < 0) throw parse_error("negative exponent in polynomial");
        Polynomial r = constant(nvars_, 1.0);
        for (int i = 0; i < e; ++i) r = r * (*this);
        return r;
    }

    /// Parse an expression in +,-,*,/,^,(), decimal constants and variables
    /// w1..wN ('/' only by a constant; '^' only to a nonnegative integer).
    static Polynomial parse(const std::string& text, int nvars, char var_letter = 'w');

private:
    std::map<std::vector<int>, double> as_map() const {
        std::map<std::vector<int>, double> m;
        for (const auto& t : terms_) m[t.exps] += t.coef;
        return m;
    }
    static Polynomial from_map(int nvars, const std::map<std::vector<int>, double>& m) {
        Polynomial p(nvars);
        for (const auto& [e, c] : m)
            if (c != 0.0) p.terms_.push_back({c, e});
        return p;
    }

    int nvars_ = 0;
    std::vector<Monomial> terms_;
};

namespace detail {

class PolyParser {
public:
    PolyParser(const std::string& s, int nvars, char var_letter)
        : s_(s), nvars_(nvars), var_(var_letter) {}

    Polynomial run() {
        auto p = expr();
        skip_ws();
        if (pos_ != s_.size()) throw parse_error("unexpected trailing input in '" + s_ + "'");
        return p;
    }

private:
    Polynomial expr() {
        skip_ws();
        bool neg = false;
        if (peek() == '+' || peek() == '-') neg = (next() == '-');
        Polynomial p = term();
        if (neg) p = p.scaled(-1.0);
        for (;;) {
            skip_ws();
            const char c = peek();
            if (c == '+') {
                next();
                p = p + term();
            } else if (c == '-') {
                next();
                p = p - term();
            } else {
                return p;
            }
        }
    }

    Polynomial term() {
        Polynomial p = factor();
        for (;;) {
            skip_ws();
            const char c = peek();
            if (c == '*') {
                next();
                p = p * factor();
            } else if (c == '/') {
                next();
                Polynomial d = factor();
                if (!d.is_constant()) throw parse_error("division by a non-constant polynomial");
                const double dv = d.eval(std::vector<double>(nvars_, 0.0));
                if (dv == 0.0) throw parse_error("division by zero");
                p = p.scaled(1.0 / dv);
            } else {
                return p;
            }
        }
    }

    Polynomial factor() {
        Polynomial b = base();
        skip_ws();
        if (peek() == '^') {
            next();
            skip_ws();
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) throw parse_error("'^' needs a nonnegative integer exponent");
            b = b.pow(std::stoi(s_.substr(start, pos_ - start)));
        }
        return b;
    }

    Polynomial base() {
        skip_ws();
        const char c = peek();
        if (c == '(') {
            next();
            Polynomial p = expr();
            skip_ws();
            if (next() != ')') throw parse_error("missing ')' in '" + s_ + "'");
            return p;
        }
        if (c == '-') {
            next();
            return base().scaled(-1.0);
        }
        if (c == var_) {
            next();
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) throw parse_error("variable needs an index, e.g. w1");
            const int idx = std::stoi(s_.substr(start, pos_ - start));
            if (idx < 1 || idx > nvars_)
                throw parse_error("variable index out of range: " + std::to_string(idx));
            return Polynomial::variable(nvars_, idx - 1);
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                    s_[pos_] == 'e' || s_[pos_] == 'E' ||
                    ((s_[pos_] == '+' || s_[pos_] == '-') && pos_ > start &&
                     (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E'))))
                ++pos_;
            try {
                return Polynomial::constant(nvars_, std::stod(s_.substr(start, pos_ - start)));
            } catch (const std::exception&) {
                throw parse_error("bad numeric literal in '" + s_ + "'");
            }
        }
        throw parse_error("unexpected character '" + std::string(1, c) + "' in '" + s_ + "'");
    }

    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    char next() { return pos_ < s_.size() ? s_[pos_++] : '\0'; }
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    int nvars_;
    char var_;
};

} // namespace detail

inline Polynomial Polynomial::parse(const std::string& text, int nvars, char var_letter) {
    return detail::PolyParser(text, nvars, var_letter).run();
}

} // namespace carnot
