#pragma once

// Homogeneous polynomials in the edge variables x_1..x_n with ParamField
// coefficients.  Every value carries its number of variables and its degree;
// arithmetic enforces the degree bookkeeping (sums need matching degrees,
// products add degrees, edge derivatives lower the degree by one), which is
// exactly the invariant the reduction pipeline leans on.

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "paramfield.hpp"

namespace twistpf {

using EVec = std::vector<std::uint16_t>;

inline long evec_degree(const EVec& e) {
    long d = 0;
    for (auto x : e) d += x;
    return d;
}

// Graded reverse lexicographic on exponent vectors with the edge order fixed.
inline int evec_cmp(const EVec& a, const EVec& b) {
    long da = evec_degree(a), db = evec_degree(b);
    if (da != db) return da < db ? -1 : 1;
    for (std::size_t i = a.size(); i-- > 0;) {
        std::uint16_t xb = i < b.size() ? b[i] : 0;
        if (a[i] != xb) return a[i] < xb ? 1 : -1;
    }
    return 0;
}

// All exponent vectors of the given degree, grevlex-descending.  This is the
// fixed monomial enumeration used for solver columns and complement bases.
inline std::vector<EVec> enumerate_monomials(int nvars, long degree) {
    std::vector<EVec> out;
    EVec cur(nvars, 0);
    auto rec = [&](auto&& self, int var, long left) -> void {
        if (var == nvars - 1) {
            cur[var] = static_cast<std::uint16_t>(left);
            out.push_back(cur);
            return;
        }
        for (long k = left; k >= 0; --k) {
            cur[var] = static_cast<std::uint16_t>(k);
            self(self, var + 1, left - k);
        }
    };
    if (nvars == 0) {
        if (degree == 0) out.push_back(EVec{});
        return out;
    }
    rec(rec, 0, degree);
    std::sort(out.begin(), out.end(), [](const EVec& a, const EVec& b) { return evec_cmp(a, b) > 0; });
    return out;
}

class HomoPoly {
  public:
    using Term = std::pair<EVec, ParamField>;

    HomoPoly() : nvars_(0), degree_(0) {}
    HomoPoly(int nvars, long degree) : nvars_(nvars), degree_(degree) {}

    static HomoPoly monomial(int nvars, const EVec& e, ParamField c) {
        if (static_cast<int>(e.size()) != nvars) throw std::logic_error("monomial arity mismatch");
        HomoPoly p(nvars, evec_degree(e));
        if (!c.is_zero()) p.terms_.emplace_back(e, std::move(c));
        return p;
    }

    static HomoPoly one(int nvars) { return monomial(nvars, EVec(nvars, 0), ParamField(Rat(1))); }

    int nvars() const { return nvars_; }
    long degree() const { return degree_; }
    bool is_zero() const { return terms_.empty(); }
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }

    ParamField coefficient(const EVec& e) const {
        for (const auto& t : terms_)
            if (t.first == e) return t.second;
        return ParamField();
    }

    HomoPoly operator-() const {
        HomoPoly r = *this;
        for (auto& t : r.terms_) t.second = -t.second;
        return r;
    }

    HomoPoly operator+(const HomoPoly& o) const {
        check_compatible(o);
        HomoPoly r(nvars_ ? nvars_ : o.nvars_, is_zero() ? o.degree_ : degree_);
        r.terms_.reserve(terms_.size() + o.terms_.size());
        std::size_t i = 0, j = 0;
        while (i < terms_.size() && j < o.terms_.size()) {
            int c = evec_cmp(terms_[i].first, o.terms_[j].first);
            if (c > 0) {
                r.terms_.push_back(terms_[i++]);
            } else if (c < 0) {
                r.terms_.push_back(o.terms_[j++]);
            } else {
                ParamField s = terms_[i].second + o.terms_[j].second;
                if (!s.is_zero()) r.terms_.emplace_back(terms_[i].first, std::move(s));
                ++i, ++j;
            }
        }
        for (; i < terms_.size(); ++i) r.terms_.push_back(terms_[i]);
        for (; j < o.terms_.size(); ++j) r.terms_.push_back(o.terms_[j]);
        return r;
    }

    HomoPoly operator-(const HomoPoly& o) const { return *this + (-o); }

    HomoPoly operator*(const HomoPoly& o) const {
        if (nvars_ != o.nvars_ && !is_zero() && !o.is_zero())
            throw std::logic_error("arity mismatch in homogeneous product");
        int nv = nvars_ ? nvars_ : o.nvars_;
        HomoPoly r(nv, degree_ + o.degree_);
        if (is_zero() || o.is_zero()) return r;
        auto desc = [](const EVec& a, const EVec& b) { return evec_cmp(a, b) > 0; };
        std::map<EVec, ParamField, decltype(desc)> acc(desc);
        for (const auto& ta : terms_)
            for (const auto& tb : o.terms_) {
                EVec e(nv);
                for (int k = 0; k < nv; ++k) e[k] = static_cast<std::uint16_t>(ta.first[k] + tb.first[k]);
                auto it = acc.find(e);
                if (it == acc.end())
                    acc.emplace(std::move(e), ta.second * tb.second);
                else
                    it->second += ta.second * tb.second;
            }
        for (auto& kv : acc)
            if (!kv.second.is_zero()) r.terms_.emplace_back(kv.first, std::move(kv.second));
        return r;
    }

    HomoPoly scale(const ParamField& c) const {
        HomoPoly r(nvars_, degree_);
        if (c.is_zero()) return r;
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_) r.terms_.emplace_back(t.first, t.second * c);
        return r;
    }

    HomoPoly& operator+=(const HomoPoly& o) { return *this = *this + o; }
    HomoPoly& operator-=(const HomoPoly& o) { return *this = *this - o; }

    // d/dx_i: degree drops by one.
    HomoPoly dx(int i) const {
        HomoPoly r(nvars_, degree_ - 1);
        for (const auto& t : terms_) {
            if (t.first[i] == 0) continue;
            EVec e = t.first;
            e[i] -= 1;
            r.terms_.emplace_back(std::move(e), t.second * ParamField(Rat(t.first[i])));
        }
        // lowering an exponent preserves grevlex order within a fixed variable
        std::sort(r.terms_.begin(), r.terms_.end(),
                  [](const Term& a, const Term& b) { return evec_cmp(a.first, b.first) > 0; });
        return r;
    }

    // Derivative of the coefficients with respect to a parameter symbol.
    HomoPoly dparam(Symbol s) const {
        HomoPoly r(nvars_, degree_);
        for (const auto& t : terms_) {
            ParamField d = t.second.derivative(s);
            if (!d.is_zero()) r.terms_.emplace_back(t.first, std::move(d));
        }
        return r;
    }

    HomoPoly substitute_params(const std::map<Symbol, ParamField>& bindings) const {
        HomoPoly r(nvars_, degree_);
        for (const auto& t : terms_) {
            ParamField c = substitute(t.second, bindings);
            if (!c.is_zero()) r.terms_.emplace_back(t.first, std::move(c));
        }
        return r;
    }

    // Split f = x_i * quotient + remainder, the remainder collecting the terms
    // with no x_i.
    void divide_by_var(int i, HomoPoly& quotient, HomoPoly& remainder) const {
        quotient = HomoPoly(nvars_, degree_ - 1);
        remainder = HomoPoly(nvars_, degree_);
        for (const auto& t : terms_) {
            if (t.first[i] > 0) {
                EVec e = t.first;
                e[i] -= 1;
                quotient.terms_.emplace_back(std::move(e), t.second);
            } else {
                remainder.terms_.push_back(t);
            }
        }
        std::sort(quotient.terms_.begin(), quotient.terms_.end(),
                  [](const Term& a, const Term& b) { return evec_cmp(a.first, b.first) > 0; });
    }

    // Canonical single-divisor division: f = q*g + r where no step ever
    // cancels a term whose monomial the leading monomial of g fails to divide
    // (such terms are moved to r).  With a fixed monomial order this is
    // deterministic; when f is an exact multiple of g the remainder is zero.
    void divide_by(const HomoPoly& g, HomoPoly& q, HomoPoly& r) const {
        if (g.is_zero()) throw std::domain_error("division by zero polynomial");
        q = HomoPoly(nvars_, degree_ - g.degree_);
        r = HomoPoly(nvars_, degree_);
        HomoPoly work = *this;
        const Term& lt = g.terms_.front();
        while (!work.is_zero()) {
            const Term& lw = work.terms_.front();
            bool divisible = true;
            for (int k = 0; k < nvars_; ++k)
                if (lt.first[k] > lw.first[k]) {
                    divisible = false;
                    break;
                }
            if (divisible) {
                EVec e(nvars_);
                for (int k = 0; k < nvars_; ++k) e[k] = static_cast<std::uint16_t>(lw.first[k] - lt.first[k]);
                HomoPoly qt = HomoPoly::monomial(nvars_, e, lw.second / lt.second);
                q += qt;
                work -= qt * g;
            } else {
                r.terms_.push_back(lw);
                work.terms_.erase(work.terms_.begin());
            }
        }
        std::sort(r.terms_.begin(), r.terms_.end(),
                  [](const Term& a, const Term& b) { return evec_cmp(a.first, b.first) > 0; });
    }

    ParamField evaluate(const std::vector<ParamField>& values) const {
        if (static_cast<int>(values.size()) != nvars_) throw std::logic_error("evaluate arity mismatch");
        ParamField out;
        for (const auto& t : terms_) {
            ParamField v = t.second;
            for (int k = 0; k < nvars_; ++k)
                if (t.first[k] > 0) v *= values[k].pow(t.first[k]);
            out += v;
        }
        return out;
    }

    friend bool operator==(const HomoPoly& a, const HomoPoly& b) {
        if (a.is_zero() && b.is_zero()) return true;
        if (a.terms_.size() != b.terms_.size() || a.nvars_ != b.nvars_ || a.degree_ != b.degree_)
            return false;
        for (std::size_t i = 0; i < a.terms_.size(); ++i)
            if (a.terms_[i].first != b.terms_[i].first || a.terms_[i].second != b.terms_[i].second)
                return false;
        return true;
    }
    friend bool operator!=(const HomoPoly& a, const HomoPoly& b) { return !(a == b); }

    std::string render(const std::vector<std::string>& names) const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& t : terms_) {
            std::string mono;
            for (int k = 0; k < nvars_; ++k) {
                if (t.first[k] == 0) continue;
                if (!mono.empty()) mono += "*";
                mono += names[k];
                if (t.first[k] > 1) mono += "^" + std::to_string(t.first[k]);
            }
            const ParamField& c = t.second;
            bool simple = c.is_polynomial() && c.num().terms().size() == 1;
            std::string cs;
            bool negative = false;
            if (simple) {
                ParamPoly mag = c.num();
                if (mag.leading_term().second < 0) {
                    negative = true;
                    mag = -mag;
                }
                cs = mag.to_string();
                if (cs == "1" && !mono.empty()) cs.clear();
            } else {
                cs = "(" + c.to_string() + ")";
            }
            if (first) {
                if (negative) os << "-";
            } else {
                os << (negative ? " - " : " + ");
            }
            first = false;
            if (!cs.empty() && !mono.empty())
                os << cs << "*" << mono;
            else
                os << (mono.empty() ? (cs.empty() ? "1" : cs) : mono);
        }
        return os.str();
    }

    std::string to_string() const {
        std::vector<std::string> names;
        names.reserve(nvars_);
        for (int k = 0; k < nvars_; ++k) names.push_back("x" + std::to_string(k + 1));
        return render(names);
    }

  private:
    void check_compatible(const HomoPoly& o) const {
        if (is_zero() || o.is_zero()) return;
        if (nvars_ != o.nvars_) throw std::logic_error("arity mismatch in homogeneous sum");
        if (degree_ != o.degree_) throw std::logic_error("degree mismatch in homogeneous sum");
    }

    int nvars_;
    long degree_;
    std::vector<Term> terms_;  // grevlex-descending
};

// Sum_i C_i * dG/dx_i.
inline HomoPoly dot_grad(const std::vector<HomoPoly>& C, const HomoPoly& G) {
    HomoPoly out;
    for (std::size_t i = 0; i < C.size(); ++i) {
        if (C[i].is_zero()) continue;
        out += C[i] * G.dx(static_cast<int>(i));
    }
    return out;
}

// Sum_i dC_i/dx_i.
inline HomoPoly divergence(const std::vector<HomoPoly>& C) {
    HomoPoly out;
    for (std::size_t i = 0; i < C.size(); ++i) {
        if (C[i].is_zero()) continue;
        out += C[i].dx(static_cast<int>(i));
    }
    return out;
}

}  // namespace twistpf
