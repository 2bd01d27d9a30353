#pragma once

// ParamField: reduced fractions of ParamPoly.  The representation is
// canonical — numerator and denominator share no polynomial factor, the
// denominator is integer-primitive with positive leading coefficient (so a
// constant denominator is always exactly 1) — which makes equality, hashing
// into maps, and rendering deterministic.

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "paramgcd.hpp"
#include "parampoly.hpp"

namespace twistpf {

class ParamField {
  public:
    ParamField() : num_(), den_(Rat(1)) {}
    /*implicit*/ ParamField(const Rat& c) : num_(c), den_(Rat(1)) {}
    /*implicit*/ ParamField(long c) : num_(Rat(c)), den_(Rat(1)) {}
    /*implicit*/ ParamField(const ParamPoly& p) : num_(p), den_(Rat(1)) {}

    ParamField(ParamPoly num, ParamPoly den) : num_(std::move(num)), den_(std::move(den)) {
        reduce();
    }

    static ParamField variable(Symbol s) { return ParamField(ParamPoly::variable(s)); }

    const ParamPoly& num() const { return num_; }
    const ParamPoly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }
    bool is_polynomial() const { return den_.is_one(); }

    bool is_rational() const { return num_.is_constant() && den_.is_one(); }
    Rat rational_value() const {
        if (!is_rational()) throw std::logic_error("rational_value on non-constant field element");
        return num_.constant_value();
    }

    bool contains(Symbol s) const { return num_.contains(s) || den_.contains(s); }

    ParamField operator-() const {
        ParamField r = *this;
        r.num_ = -r.num_;
        return r;
    }

    ParamField operator+(const ParamField& o) const {
        if (is_zero()) return o;
        if (o.is_zero()) return *this;
        if (den_ == o.den_) return ParamField(num_ + o.num_, den_);
        return ParamField(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
    }
    ParamField operator-(const ParamField& o) const { return *this + (-o); }

    ParamField operator*(const ParamField& o) const {
        if (is_zero() || o.is_zero()) return ParamField();
        // cross-reduce before multiplying to keep intermediates small
        ParamPoly g1 = poly_gcd(num_, o.den_), g2 = poly_gcd(o.num_, den_);
        return ParamField(num_.divexact(g1) * o.num_.divexact(g2),
                          den_.divexact(g2) * o.den_.divexact(g1));
    }

    ParamField operator/(const ParamField& o) const {
        if (o.is_zero()) throw std::domain_error("division by zero field element");
        return *this * o.inverse();
    }

    ParamField inverse() const {
        if (is_zero()) throw std::domain_error("inverse of zero field element");
        return ParamField(den_, num_);
    }

    ParamField& operator+=(const ParamField& o) { return *this = *this + o; }
    ParamField& operator-=(const ParamField& o) { return *this = *this - o; }
    ParamField& operator*=(const ParamField& o) { return *this = *this * o; }
    ParamField& operator/=(const ParamField& o) { return *this = *this / o; }

    ParamField pow(long k) const {
        if (k < 0) return inverse().pow(-k);
        ParamField r(Rat(1)), b = *this;
        unsigned long e = static_cast<unsigned long>(k);
        while (e) {
            if (e & 1) r = r * b;
            b = (e >>= 1) ? b * b : b;
        }
        return r;
    }

    ParamField derivative(Symbol s) const {
        if (den_.is_one()) return ParamField(num_.derivative(s));
        return ParamField(num_.derivative(s) * den_ - num_ * den_.derivative(s), den_ * den_);
    }

    friend bool operator==(const ParamField& a, const ParamField& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const ParamField& a, const ParamField& b) { return !(a == b); }

    static int cmp(const ParamField& a, const ParamField& b) {
        int c = ParamPoly::cmp(a.num_, b.num_);
        if (c != 0) return c;
        return ParamPoly::cmp(a.den_, b.den_);
    }

    std::string to_string() const {
        if (den_.is_one()) return num_.to_string();
        std::ostringstream os;
        if (num_.terms().size() > 1)
            os << "(" << num_.to_string() << ")";
        else
            os << num_.to_string();
        os << "/(" << den_.to_string() << ")";
        return os.str();
    }

  private:
    void reduce() {
        if (den_.is_zero()) throw std::domain_error("zero denominator");
        if (num_.is_zero()) {
            den_ = ParamPoly(Rat(1));
            return;
        }
        ParamPoly g = poly_gcd(num_, den_);
        if (!g.is_one()) {
            num_ = num_.divexact(g);
            den_ = den_.divexact(g);
        }
        Rat c = den_.rational_content();
        if (c != 1) {
            Rat ic = Rat(1) / c;
            den_ = den_ * ic;
            num_ = num_ * ic;
        }
    }

    ParamPoly num_, den_;
};

inline ParamField operator*(const Rat& c, const ParamField& f) { return ParamField(c) * f; }

// Evaluate a polynomial under symbol bindings; unbound symbols stay symbolic.
inline ParamField substitute(const ParamPoly& p, const std::map<Symbol, ParamField>& bindings) {
    ParamField out;
    for (const auto& t : p.terms()) {
        ParamField term{ParamPoly(t.second)};
        for (std::size_t i = 0; i < t.first.e.size(); ++i) {
            if (t.first.e[i] == 0) continue;
            Symbol s{static_cast<std::uint32_t>(i)};
            auto it = bindings.find(s);
            ParamField base = (it != bindings.end()) ? it->second : ParamField::variable(s);
            term *= base.pow(t.first.e[i]);
        }
        out += term;
    }
    return out;
}

inline ParamField substitute(const ParamField& f, const std::map<Symbol, ParamField>& bindings) {
    ParamField d = substitute(f.den(), bindings);
    if (d.is_zero()) throw std::domain_error("substitution vanishes on a denominator");
    return substitute(f.num(), bindings) / d;
}

}  // namespace twistpf
