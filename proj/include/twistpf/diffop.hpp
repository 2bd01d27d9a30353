#pragma once

// Ordinary differential operators in one derivation d/dt with polynomial
// coefficients over the parameters.  Operators coming out of the driver are
// normalized to a canonical representative of their ray: coefficients share
// no polynomial content, are jointly integer-primitive, and the leading
// coefficient's leading term is positive.  Two operators agree up to a unit
// of the coefficient field exactly when their normal forms are equal.

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "paramfield.hpp"
#include "paramgcd.hpp"

namespace twistpf {

struct DiffOperator {
    Symbol t;                       // the derivation symbol
    std::vector<ParamPoly> coeffs;  // coeffs[k] multiplies (d/dt)^k; coeffs.back() != 0

    int order() const { return static_cast<int>(coeffs.size()) - 1; }
    const ParamPoly& leading() const { return coeffs.back(); }
};

inline DiffOperator normalize(DiffOperator op) {
    while (!op.coeffs.empty() && op.coeffs.back().is_zero()) op.coeffs.pop_back();
    if (op.coeffs.empty()) throw std::invalid_argument("cannot normalize the zero operator");
    ParamPoly g;
    for (const auto& c : op.coeffs) {
        if (c.is_zero()) continue;
        g = g.is_zero() ? primitive_part(c) : poly_gcd(g, c);
        if (g.is_one()) break;
    }
    if (!g.is_one())
        for (auto& c : op.coeffs)
            if (!c.is_zero()) c = c.divexact(g);
    // joint rational content, sign fixed by the leading coefficient
    Int num(0), den(1);
    for (const auto& c : op.coeffs)
        for (const auto& t : c.terms()) {
            num = int_gcd(num, t.second.get_num());
            den = int_lcm(den, t.second.get_den());
        }
    Rat content(num, den);
    content.canonicalize();
    if (op.coeffs.back().leading_term().second < 0) content = -content;
    if (content != 1) {
        Rat ic = Rat(1) / content;
        for (auto& c : op.coeffs) c = c * ic;
    }
    return op;
}

// Build an operator from field coefficients by clearing denominators, then
// normalize.
inline DiffOperator make_operator(Symbol t, const std::vector<ParamField>& coeffs) {
    ParamPoly d(Rat(1));
    for (const auto& c : coeffs)
        if (!c.is_zero()) d = poly_lcm(d, c.den());
    DiffOperator op;
    op.t = t;
    op.coeffs.reserve(coeffs.size());
    for (const auto& c : coeffs)
        op.coeffs.push_back(c.is_zero() ? ParamPoly() : c.num() * d.divexact(c.den()));
    return normalize(std::move(op));
}

inline bool equal_up_to_unit(const DiffOperator& a, const DiffOperator& b) {
    if (a.t != b.t) return false;
    DiffOperator na = normalize(a), nb = normalize(b);
    if (na.coeffs.size() != nb.coeffs.size()) return false;
    for (std::size_t k = 0; k < na.coeffs.size(); ++k)
        if (na.coeffs[k] != nb.coeffs[k]) return false;
    return true;
}

// Specialize parameters (never the derivation variable); zero leading
// coefficients after specialization drop the order.
inline DiffOperator specialize(const DiffOperator& op, const std::map<Symbol, ParamField>& bindings) {
    if (bindings.count(op.t))
        throw std::invalid_argument("cannot specialize the derivation variable of an operator");
    std::vector<ParamField> coeffs;
    coeffs.reserve(op.coeffs.size());
    for (const auto& c : op.coeffs) coeffs.push_back(substitute(c, bindings));
    while (!coeffs.empty() && coeffs.back().is_zero()) coeffs.pop_back();
    if (coeffs.empty()) throw std::invalid_argument("operator vanishes under this specialization");
    return make_operator(op.t, coeffs);
}

struct SingularFactor {
    ParamPoly factor;          // integer-primitive, positive leading coefficient
    int multiplicity = 1;
    bool eps_dependent = false;  // mentions a regulator (eps or kap)
};

struct SingularReport {
    std::vector<SingularFactor> factors;  // square-free factors of the leading coefficient
    ParamPoly unit_poly;                  // t-free cofactor
    Rat unit_scalar{1};                   // with unit_scalar * unit_poly * prod factors^mult = leading coeff
};

inline SingularReport singular_locus(const DiffOperator& op) {
    DiffOperator n = normalize(op);
    SquareFreeDecomposition dec = squarefree_wrt(n.leading(), n.t);
    SingularReport out;
    out.unit_poly = dec.unit_poly;
    out.unit_scalar = dec.unit_scalar;
    for (const auto& f : dec.factors) {
        SingularFactor sf;
        sf.factor = f.factor;
        sf.multiplicity = f.multiplicity;
        sf.eps_dependent = f.factor.contains(sym_eps()) || f.factor.contains(sym_kap());
        out.factors.push_back(std::move(sf));
    }
    std::sort(out.factors.begin(), out.factors.end(), [](const SingularFactor& x, const SingularFactor& y) {
        return ParamPoly::cmp(x.factor, y.factor) < 0;
    });
    return out;
}

// Canonical text: "f_n*Dt^n + ... + f_1*Dt + f_0" with each coefficient in
// parentheses when it has more than one term.
inline std::string render(const DiffOperator& op) {
    std::string dname = "D" + sym_name(op.t);
    std::ostringstream os;
    bool first = true;
    for (int k = op.order(); k >= 0; --k) {
        const ParamPoly& c = op.coeffs[k];
        if (c.is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        std::string cs = c.to_string();
        bool wrap = c.terms().size() > 1;
        if (k == 0) {
            os << (wrap ? "(" + cs + ")" : cs);
        } else {
            if (c.is_one())
                os << dname;
            else
                os << (wrap ? "(" + cs + ")" : cs) << "*" << dname;
            if (k > 1) os << "^" << k;
        }
    }
    if (first) os << "0";
    return os.str();
}

}  // namespace twistpf
