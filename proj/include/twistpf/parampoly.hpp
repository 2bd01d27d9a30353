#pragma once

// Sparse multivariate polynomials over Q in the registered parameter symbols.
// Terms are kept sorted in descending graded-reverse-lexicographic order with
// the symbol declaration order as the variable order; every routine preserves
// that normal form, so equality is plain term-by-term comparison and renders
// are canonical.

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"
#include "symbols.hpp"

namespace twistpf {

// Exponent vector indexed by symbol id, trailing zeros trimmed.
struct Mono {
    std::vector<std::uint32_t> e;

    static Mono one() { return Mono{}; }

    static Mono var(Symbol s, std::uint32_t k = 1) {
        Mono m;
        if (k > 0) {
            m.e.assign(s.id + 1, 0);
            m.e[s.id] = k;
        }
        return m;
    }

    void trim() {
        while (!e.empty() && e.back() == 0) e.pop_back();
    }

    bool is_one() const { return e.empty(); }

    long total_degree() const {
        long d = 0;
        for (auto x : e) d += x;
        return d;
    }

    std::uint32_t exponent(Symbol s) const { return s.id < e.size() ? e[s.id] : 0; }

    Mono operator*(const Mono& o) const {
        Mono r;
        r.e.resize(std::max(e.size(), o.e.size()), 0);
        for (std::size_t i = 0; i < e.size(); ++i) r.e[i] += e[i];
        for (std::size_t i = 0; i < o.e.size(); ++i) r.e[i] += o.e[i];
        return r;
    }

    bool divides(const Mono& o) const {
        if (e.size() > o.e.size()) {
            for (std::size_t i = o.e.size(); i < e.size(); ++i)
                if (e[i] != 0) return false;
        }
        for (std::size_t i = 0; i < std::min(e.size(), o.e.size()); ++i)
            if (e[i] > o.e[i]) return false;
        return true;
    }

    // Quotient o / this; caller guarantees divisibility.
    Mono divide_into(const Mono& o) const {
        Mono r = o;
        for (std::size_t i = 0; i < e.size(); ++i) r.e[i] -= e[i];
        r.trim();
        return r;
    }

    // Graded reverse lexicographic: higher total degree wins; on equal degree
    // the monomial whose exponent vector has the smaller entry at the last
    // differing position is the larger one.
    static int cmp(const Mono& a, const Mono& b) {
        long da = a.total_degree(), db = b.total_degree();
        if (da != db) return da < db ? -1 : 1;
        std::size_t n = std::max(a.e.size(), b.e.size());
        for (std::size_t i = n; i-- > 0;) {
            std::uint32_t xa = i < a.e.size() ? a.e[i] : 0;
            std::uint32_t xb = i < b.e.size() ? b.e[i] : 0;
            if (xa != xb) return xa < xb ? 1 : -1;
        }
        return 0;
    }

    friend bool operator==(const Mono& a, const Mono& b) { return cmp(a, b) == 0; }
    friend bool operator!=(const Mono& a, const Mono& b) { return cmp(a, b) != 0; }
};

class ParamPoly {
  public:
    using Term = std::pair<Mono, Rat>;

    ParamPoly() = default;

    /*implicit*/ ParamPoly(const Rat& c) {
        if (c != 0) terms_.emplace_back(Mono::one(), c);
    }
    /*implicit*/ ParamPoly(long c) : ParamPoly(Rat(c)) {}

    static ParamPoly variable(Symbol s) {
        ParamPoly p;
        p.terms_.emplace_back(Mono::var(s), Rat(1));
        return p;
    }

    static ParamPoly term(Mono m, const Rat& c) {
        ParamPoly p;
        if (c != 0) p.terms_.emplace_back(std::move(m), c);
        return p;
    }

    // Trusted constructor: ts must already be in canonical order with nonzero
    // coefficients and distinct monomials, as produced by terms().
    static ParamPoly from_sorted_terms(std::vector<Term> ts) {
        ParamPoly p;
        p.terms_ = std::move(ts);
        return p;
    }

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first.is_one()); }

    Rat constant_value() const {
        if (terms_.empty()) return Rat(0);
        if (!is_constant()) throw std::logic_error("constant_value on non-constant polynomial");
        return terms_[0].second;
    }

    bool is_one() const { return is_constant() && constant_value() == 1; }

    long total_degree() const {
        long d = -1;
        for (const auto& t : terms_) d = std::max(d, t.first.total_degree());
        return d;  // -1 for the zero polynomial
    }

    long degree_in(Symbol s) const {
        long d = -1;
        for (const auto& t : terms_) d = std::max<long>(d, t.first.exponent(s));
        return terms_.empty() ? -1 : d;
    }

    bool contains(Symbol s) const {
        for (const auto& t : terms_)
            if (t.first.exponent(s) > 0) return true;
        return false;
    }

    const Term& leading_term() const {
        if (terms_.empty()) throw std::logic_error("leading_term of zero polynomial");
        return terms_[0];
    }

    ParamPoly operator-() const {
        ParamPoly r = *this;
        for (auto& t : r.terms_) t.second = -t.second;
        return r;
    }

    ParamPoly operator+(const ParamPoly& o) const {
        ParamPoly r;
        r.terms_.reserve(terms_.size() + o.terms_.size());
        std::size_t i = 0, j = 0;
        while (i < terms_.size() && j < o.terms_.size()) {
            int c = Mono::cmp(terms_[i].first, o.terms_[j].first);
            if (c > 0) {
                r.terms_.push_back(terms_[i++]);
            } else if (c < 0) {
                r.terms_.push_back(o.terms_[j++]);
            } else {
                Rat s = terms_[i].second + o.terms_[j].second;
                if (s != 0) r.terms_.emplace_back(terms_[i].first, std::move(s));
                ++i, ++j;
            }
        }
        for (; i < terms_.size(); ++i) r.terms_.push_back(terms_[i]);
        for (; j < o.terms_.size(); ++j) r.terms_.push_back(o.terms_[j]);
        return r;
    }

    ParamPoly operator-(const ParamPoly& o) const { return *this + (-o); }

    ParamPoly operator*(const ParamPoly& o) const {
        if (is_zero() || o.is_zero()) return ParamPoly();
        if (o.terms_.size() == 1) return mul_term(o.terms_[0]);
        if (terms_.size() == 1) return o.mul_term(terms_[0]);
        auto desc = [](const Mono& a, const Mono& b) { return Mono::cmp(a, b) > 0; };
        std::map<Mono, Rat, decltype(desc)> acc(desc);
        for (const auto& ta : terms_)
            for (const auto& tb : o.terms_) {
                Mono m = ta.first * tb.first;
                auto it = acc.find(m);
                if (it == acc.end())
                    acc.emplace(std::move(m), ta.second * tb.second);
                else
                    it->second += ta.second * tb.second;
            }
        ParamPoly r;
        r.terms_.reserve(acc.size());
        for (auto& kv : acc)
            if (kv.second != 0) r.terms_.emplace_back(kv.first, std::move(kv.second));
        return r;
    }

    ParamPoly mul_term(const Term& t) const {
        if (t.second == 0) return ParamPoly();
        ParamPoly r;
        r.terms_.reserve(terms_.size());
        for (const auto& a : terms_) r.terms_.emplace_back(a.first * t.first, a.second * t.second);
        return r;  // multiplying by a fixed monomial preserves the term order
    }

    ParamPoly operator*(const Rat& c) const {
        if (c == 0) return ParamPoly();
        ParamPoly r = *this;
        for (auto& t : r.terms_) t.second *= c;
        return r;
    }

    ParamPoly& operator+=(const ParamPoly& o) { return *this = *this + o; }
    ParamPoly& operator-=(const ParamPoly& o) { return *this = *this - o; }
    ParamPoly& operator*=(const ParamPoly& o) { return *this = *this * o; }

    ParamPoly pow(unsigned long k) const {
        ParamPoly r(Rat(1)), b = *this;
        while (k) {
            if (k & 1) r = r * b;
            b = (k >>= 1) ? b * b : b;
        }
        return r;
    }

    ParamPoly derivative(Symbol s) const {
        ParamPoly r;
        for (const auto& t : terms_) {
            std::uint32_t k = t.first.exponent(s);
            if (k == 0) continue;
            Mono m = t.first;
            m.e[s.id] -= 1;
            m.trim();
            r += ParamPoly::term(std::move(m), t.second * Rat(k));
        }
        return r;
    }

    // Exact division by the leading-term algorithm.  Returns false when o does
    // not divide *this (first stuck leading term aborts the division).
    bool try_divide(const ParamPoly& o, ParamPoly& quotient) const {
        if (o.is_zero()) throw std::domain_error("division by zero polynomial");
        ParamPoly rem = *this, q;
        const Term& lt = o.leading_term();
        while (!rem.is_zero()) {
            const Term& lr = rem.leading_term();
            if (!lt.first.divides(lr.first)) return false;
            Term qt{lt.first.divide_into(lr.first), lr.second / lt.second};
            q += ParamPoly::term(qt.first, qt.second);
            rem -= o.mul_term(qt);
        }
        quotient = std::move(q);
        return true;
    }

    ParamPoly divexact(const ParamPoly& o) const {
        ParamPoly q;
        if (!try_divide(o, q)) throw std::domain_error("inexact polynomial division");
        return q;
    }

    // Rational content: the unique c > 0 (times the sign of the leading
    // coefficient) with *this == c * (integer-primitive polynomial whose
    // leading coefficient is positive).  Content of 0 is defined as 0.
    Rat rational_content() const {
        if (terms_.empty()) return Rat(0);
        Int num(0), den(1);
        for (const auto& t : terms_) {
            num = int_gcd(num, t.second.get_num());
            den = int_lcm(den, t.second.get_den());
        }
        Rat c(num, den);
        c.canonicalize();
        if (terms_[0].second < 0) c = -c;
        return c;
    }

    // Coefficients of powers of s: result[k] is the coefficient of s^k.
    std::vector<ParamPoly> coeffs_in(Symbol s) const {
        std::vector<ParamPoly> out;
        for (const auto& t : terms_) {
            std::uint32_t k = t.first.exponent(s);
            if (out.size() <= k) out.resize(k + 1);
            Mono m = t.first;
            if (k > 0) {
                m.e[s.id] = 0;
                m.trim();
            }
            out[k] += ParamPoly::term(std::move(m), t.second);
        }
        if (out.empty()) out.emplace_back();
        return out;
    }

    static ParamPoly from_coeffs_in(Symbol s, const std::vector<ParamPoly>& coeffs) {
        ParamPoly r;
        ParamPoly sk(Rat(1));
        const ParamPoly sv = ParamPoly::variable(s);
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            if (k > 0) sk *= sv;
            r += coeffs[k] * sk;
        }
        return r;
    }

    friend bool operator==(const ParamPoly& a, const ParamPoly& b) {
        if (a.terms_.size() != b.terms_.size()) return false;
        for (std::size_t i = 0; i < a.terms_.size(); ++i)
            if (a.terms_[i].second != b.terms_[i].second || a.terms_[i].first != b.terms_[i].first)
                return false;
        return true;
    }
    friend bool operator!=(const ParamPoly& a, const ParamPoly& b) { return !(a == b); }

    // Total order on polynomials (term-sequence lexicographic); used to sort
    // factor lists canonically.
    static int cmp(const ParamPoly& a, const ParamPoly& b) {
        std::size_t n = std::min(a.terms_.size(), b.terms_.size());
        for (std::size_t i = 0; i < n; ++i) {
            int c = Mono::cmp(a.terms_[i].first, b.terms_[i].first);
            if (c != 0) return c;
            if (a.terms_[i].second != b.terms_[i].second)
                return a.terms_[i].second < b.terms_[i].second ? -1 : 1;
        }
        if (a.terms_.size() != b.terms_.size()) return a.terms_.size() < b.terms_.size() ? -1 : 1;
        return 0;
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& t : terms_) {
            Rat c = t.second;
            if (first) {
                if (c < 0) {
                    os << "-";
                    c = -c;
                }
            } else {
                os << (c < 0 ? " - " : " + ");
                if (c < 0) c = -c;
            }
            first = false;
            bool unit_coeff = (c == 1) && !t.first.is_one();
            if (!unit_coeff) os << rat_to_string(c);
            bool need_star = !unit_coeff;
            for (std::size_t i = 0; i < t.first.e.size(); ++i) {
                if (t.first.e[i] == 0) continue;
                if (need_star) os << "*";
                os << sym_name(Symbol{static_cast<std::uint32_t>(i)});
                if (t.first.e[i] > 1) os << "^" << t.first.e[i];
                need_star = true;
            }
        }
        return os.str();
    }

  private:
    std::vector<Term> terms_;  // grevlex-descending, nonzero coefficients
};

inline ParamPoly operator*(const Rat& c, const ParamPoly& p) { return p * c; }

}  // namespace twistpf
