#pragma once

// Multivariate polynomial gcd over Q via the subresultant polynomial
// remainder sequence (recursing through the variables, contents first), plus
// Yun's square-free decomposition with respect to a chosen symbol.  These are
// the only nontrivial ring algorithms the reduction pipeline needs: content
// removal in the fraction-free solver, field normalization, and the singular
// locus factorization.

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "parampoly.hpp"

#ifdef TWISTPF_LINSOLVE_STATS
#include <atomic>
#include <chrono>
#endif

namespace twistpf {

#ifdef TWISTPF_LINSOLVE_STATS
struct GcdStats {
    static std::atomic<long long>& fast_calls() { static std::atomic<long long> v{0}; return v; }
    static std::atomic<long long>& fast_ns() { static std::atomic<long long> v{0}; return v; }
    static std::atomic<long long>& slow_calls() { static std::atomic<long long> v{0}; return v; }
    static std::atomic<long long>& slow_ns() { static std::atomic<long long> v{0}; return v; }
    static std::atomic<long long>& div_deg() { static std::atomic<long long> v{0}; return v; }
    static std::atomic<long long>& div_main_deg() { static std::atomic<long long> v{0}; return v; }
    static long long now_ns() {
        return std::chrono::duration_cast<std::chrono::nanoseconds>(
                   std::chrono::steady_clock::now().time_since_epoch())
            .count();
    }
};
#endif

// p divided by its rational content: integer-primitive, positive leading
// coefficient.  Zero maps to zero.
inline ParamPoly primitive_part(const ParamPoly& p) {
    if (p.is_zero()) return p;
    Rat c = p.rational_content();
    return p * (Rat(1) / c);
}

namespace detail {

inline std::uint32_t top_symbol_id(const ParamPoly& p) {
    std::uint32_t top = 0;
    bool found = false;
    for (const auto& t : p.terms())
        for (std::size_t i = t.first.e.size(); i-- > 0;) {
            if (t.first.e[i] != 0) {
                if (!found || i > top) top = static_cast<std::uint32_t>(i);
                found = true;
                break;  // exponents beyond the last nonzero are zero
            }
        }
    if (!found) throw std::logic_error("top_symbol_id of constant");
    return top;
}

// --- univariate view: dense coefficient vector over ParamPoly -------------

using UPoly = std::vector<ParamPoly>;  // index = power of the main variable

inline void utrim(UPoly& u) {
    while (!u.empty() && u.back().is_zero()) u.pop_back();
}

inline long udeg(const UPoly& u) { return static_cast<long>(u.size()) - 1; }

inline UPoly usub_scaled(const UPoly& a, const ParamPoly& ca, const UPoly& b, const ParamPoly& cb,
                         long shift) {
    // ca*a - cb*(x^shift * b)
    UPoly r(std::max(a.size(), b.size() + static_cast<std::size_t>(shift)));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * ca;
    for (std::size_t i = 0; i < b.size(); ++i) r[i + shift] -= b[i] * cb;
    utrim(r);
    return r;
}

// Pseudo-remainder prem(a, b) = lc(b)^(deg a - deg b + 1) * a  mod  b.
inline UPoly uprem(UPoly a, const UPoly& b) {
    const ParamPoly& d = b.back();
    long n = udeg(a) - udeg(b) + 1;
    while (!a.empty() && udeg(a) >= udeg(b)) {
        long shift = udeg(a) - udeg(b);
        a = usub_scaled(a, d, b, a.back(), shift);
        --n;
    }
    // account for early degree drops so the subresultant recurrence stays exact
    for (; n > 0; --n)
        for (auto& c : a) c *= d;
    return a;
}

inline UPoly udiv_scalar(const UPoly& a, const ParamPoly& s) {
    UPoly r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i].is_zero() ? ParamPoly() : a[i].divexact(s);
    return r;
}

// --- heuristic gcd: evaluate, recurse, lift balanced digits, verify --------

inline Int int_coeff_norm(const ParamPoly& p) {
    Int m(0);
    for (const auto& t : p.terms()) {
        Int x = t.second.get_num();
        if (x < 0) x = -x;
        if (x > m) m = x;
    }
    return m;
}

inline Int int_content(const ParamPoly& p) {
    Int g(0);
    for (const auto& t : p.terms()) g = int_gcd(g, t.second.get_num());
    return g;
}

// Substitute an integer for one symbol (Horner over the coefficient polys).
inline ParamPoly eval_at_int(const ParamPoly& p, Symbol v, const Int& xi) {
    std::vector<ParamPoly> cs = p.coeffs_in(v);
    ParamPoly acc;
    Rat x(xi);
    for (std::size_t i = cs.size(); i-- > 0;) {
        if (!acc.is_zero()) acc = acc * x;
        acc += cs[i];
    }
    return acc;
}

// Balanced base-xi digit expansion of an integer-coefficient polynomial:
// value = sum_k digits[k] xi^k with every coefficient in [-xi/2, xi/2].
// Fails when more than cap digits appear (the candidate would exceed the
// gcd's degree bound) or a coefficient is not an integer.
inline bool lift_digits(ParamPoly rest, const Int& xi, long cap, std::vector<ParamPoly>& digits) {
    digits.clear();
    while (!rest.is_zero()) {
        if (static_cast<long>(digits.size()) >= cap) return false;
        std::vector<ParamPoly::Term> dig, nxt;
        for (const auto& t : rest.terms()) {
            if (t.second.get_den() != 1) return false;
            Int c = t.second.get_num();
            Int d = c % xi;
            if (d < 0) d += xi;
            if (2 * d > xi) d -= xi;
            if (d != 0) dig.emplace_back(t.first, Rat(d));
            Int r = (c - d) / xi;
            if (r != 0) nxt.emplace_back(t.first, Rat(r));
        }
        digits.push_back(ParamPoly::from_sorted_terms(std::move(dig)));
        rest = ParamPoly::from_sorted_terms(std::move(nxt));
    }
    return true;
}

// Heuristic gcd over Z[symbols]: split off the integer contents (their gcd
// is exact), substitute a point larger than twice any remaining coefficient
// for the top variable, recurse on the images, read a primitive candidate
// back off as balanced base-xi digits, and accept only on verified exact
// division.  The inner results keep their integer content: those integers
// are the xi-adic digits of the level above, so only the exact igcd split
// here may remove them.  Failure (rare) returns nullopt and the caller
// falls back to the subresultant sequence.
inline std::optional<ParamPoly> heuristic_gcd(const ParamPoly& a, const ParamPoly& b,
                                              int depth = 0) {
    if (depth > 8) return std::nullopt;
    if (a.is_constant() || b.is_constant()) {
        const ParamPoly& c = a.is_constant() ? a : b;
        const ParamPoly& o = a.is_constant() ? b : a;
        Rat cv = c.constant_value();
        if (cv.get_den() != 1) return std::nullopt;
        return ParamPoly(Rat(int_gcd(cv.get_num(), int_content(o))));
    }

    Int ca = int_content(a), cb = int_content(b);
    Int cg = int_gcd(ca, cb);
    ParamPoly A = ca == 1 ? a : a * (Rat(1) / Rat(ca));
    ParamPoly B = cb == 1 ? b : b * (Rat(1) / Rat(cb));

    Symbol v{std::max(top_symbol_id(A), top_symbol_id(B))};
    const long cap = std::min(A.degree_in(v), B.degree_in(v)) + 1;
    Int na = int_coeff_norm(A), nb = int_coeff_norm(B);
    Int xi = 2 * (na < nb ? na : nb) + 2;
    if (xi < 4) xi = 4;

    for (int attempt = 0; attempt < 6; ++attempt) {
        ParamPoly ea = eval_at_int(A, v, xi), eb = eval_at_int(B, v, xi);
        if (!ea.is_zero() && !eb.is_zero()) {
            if (auto g0 = heuristic_gcd(ea, eb, depth + 1)) {
                std::vector<ParamPoly> digits;
                if (lift_digits(std::move(*g0), xi, cap, digits) && !digits.empty()) {
                    // A, B are integer-primitive, so their gcd is too: strip
                    // the lift's content (evaluation noise) before verifying.
                    ParamPoly G = primitive_part(ParamPoly::from_coeffs_in(v, digits));
                    ParamPoly q;
                    if (!G.is_zero() && A.try_divide(G, q) && B.try_divide(G, q))
                        return cg == 1 ? G : G * Rat(cg);
                }
            }
        }
        xi = xi * 73794 / 27011;  // odd growth keeps repeat evaluation points unlikely
    }
    return std::nullopt;
}

// Exact-division check tuned for content removal: when the divisor's leading
// coefficient in its top variable is constant, run synthetic division on the
// coefficient vectors (the coefficients are much smaller polynomials), else
// fall back to the generic routine.  Returns false iff g does not divide p.
inline bool try_divide_fast(const ParamPoly& p, const ParamPoly& g, ParamPoly& q) {
    if (p.is_zero()) {
        q = ParamPoly();
        return true;
    }
    if (g.is_constant()) {
        q = p * (Rat(1) / g.constant_value());
        return true;
    }
    if (g.terms().size() == 1) {
        // monomial divisor: exponent subtraction term by term
        const Mono& gm = g.terms()[0].first;
        const Rat ic = Rat(1) / g.terms()[0].second;
        std::vector<ParamPoly::Term> ts;
        ts.reserve(p.terms().size());
        for (const auto& t : p.terms()) {
            if (!gm.divides(t.first)) return false;
            ts.emplace_back(gm.divide_into(t.first), t.second * ic);
        }
        q = ParamPoly::from_sorted_terms(std::move(ts));
        return true;
    }
    Symbol v{top_symbol_id(g)};
    UPoly gc = g.coeffs_in(v);
    utrim(gc);
    const long d = udeg(gc);
    if (d < 1 || !gc[d].is_constant()) {
#ifdef TWISTPF_LINSOLVE_STATS
        GcdStats::slow_calls() += 1;
        long long t0 = GcdStats::now_ns();
        bool ok = p.try_divide(g, q);
        GcdStats::slow_ns() += GcdStats::now_ns() - t0;
        return ok;
#else
        return p.try_divide(g, q);
#endif
    }
#ifdef TWISTPF_LINSOLVE_STATS
    GcdStats::fast_calls() += 1;
    GcdStats::div_deg() += g.total_degree();
    GcdStats::div_main_deg() += d;
    long long t0 = GcdStats::now_ns();
#endif
    bool ok = [&]() {
        UPoly pc = p.coeffs_in(v);
        utrim(pc);
        const long pd = udeg(pc);
        if (pd < d) return false;
        const long m = pd - d;
        const Rat inv_lead = Rat(1) / gc[d].constant_value();
        UPoly Q(m + 1);
        for (long i = m; i >= 0; --i) {
            ParamPoly acc = pc[i + d];
            for (long k = i + 1; k <= std::min(m, i + d); ++k)
                if (!Q[k].is_zero() && !gc[i + d - k].is_zero()) acc -= Q[k] * gc[i + d - k];
            if (!acc.is_zero()) Q[i] = acc * inv_lead;
        }
        for (long r = 0; r < d; ++r) {
            ParamPoly acc;
            for (long k = 0; k <= std::min(m, r); ++k)
                if (!Q[k].is_zero() && !gc[r - k].is_zero()) acc += Q[k] * gc[r - k];
            if (acc != pc[r]) return false;
        }
        q = ParamPoly::from_coeffs_in(v, Q);
        return true;
    }();
#ifdef TWISTPF_LINSOLVE_STATS
    GcdStats::fast_ns() += GcdStats::now_ns() - t0;
#endif
    return ok;
}

}  // namespace detail

ParamPoly poly_gcd(const ParamPoly& a, const ParamPoly& b);

inline ParamPoly poly_gcd_list(const std::vector<ParamPoly>& ps) {
    ParamPoly g;
    for (const auto& p : ps) {
        if (p.is_zero()) continue;
        g = g.is_zero() ? primitive_part(p) : poly_gcd(g, p);
        if (g.is_one()) break;
    }
    return g.is_zero() ? ParamPoly(Rat(1)) : g;
}

inline ParamPoly poly_gcd(const ParamPoly& a0, const ParamPoly& b0) {
    if (a0.is_zero()) return b0.is_zero() ? ParamPoly(Rat(1)) : primitive_part(b0);
    if (b0.is_zero()) return primitive_part(a0);
    ParamPoly a = primitive_part(a0), b = primitive_part(b0);
    if (a == b) return a;
    if (a.is_constant() || b.is_constant()) return ParamPoly(Rat(1));

    // Monomial fast path (frequent in content chains).
    if (a.terms().size() == 1 && b.terms().size() == 1) {
        const Mono &ma = a.terms()[0].first, &mb = b.terms()[0].first;
        Mono g;
        g.e.resize(std::min(ma.e.size(), mb.e.size()));
        for (std::size_t i = 0; i < g.e.size(); ++i) g.e[i] = std::min(ma.e[i], mb.e[i]);
        g.trim();
        return ParamPoly::term(std::move(g), Rat(1));
    }

    // The evaluation-based heuristic almost always lands (it verifies by
    // exact division); the subresultant sequence below is the fallback.
    if (auto g = detail::heuristic_gcd(a, b)) return *g;

    std::uint32_t va = detail::top_symbol_id(a), vb = detail::top_symbol_id(b);
    Symbol v{std::max(va, vb)};

    detail::UPoly ua = a.coeffs_in(v), ub = b.coeffs_in(v);
    detail::utrim(ua);
    detail::utrim(ub);
    ParamPoly ca = poly_gcd_list(ua), cb = poly_gcd_list(ub);
    ParamPoly cont = poly_gcd(ca, cb);
    if (detail::udeg(ua) == 0 || detail::udeg(ub) == 0) return cont;

    detail::UPoly A = detail::udiv_scalar(ua, ca), B = detail::udiv_scalar(ub, cb);
    if (detail::udeg(A) < detail::udeg(B)) std::swap(A, B);

    // Subresultant PRS.
    ParamPoly g(Rat(1)), h(Rat(1));
    while (true) {
        long delta = detail::udeg(A) - detail::udeg(B);
        detail::UPoly R = detail::uprem(A, B);
        if (R.empty()) break;
        if (detail::udeg(R) == 0) return cont;  // coprime primitive parts
        A = std::move(B);
        ParamPoly divisor = g;
        for (long i = 0; i < delta; ++i) divisor *= h;
        B = detail::udiv_scalar(R, divisor);
        g = A.back();
        if (delta > 0) {
            ParamPoly gd = g;
            for (long i = 1; i < delta; ++i) gd *= g;
            ParamPoly hd(Rat(1));
            for (long i = 1; i < delta; ++i) hd *= h;
            h = delta == 1 ? gd : gd.divexact(hd);
        }
    }
    // B is the last nonzero remainder: its primitive part is the gcd of the
    // primitive parts.
    ParamPoly bc = poly_gcd_list(B);
    detail::UPoly P = detail::udiv_scalar(B, bc);
    ParamPoly result = cont * primitive_part(ParamPoly::from_coeffs_in(v, P));
    return primitive_part(result);
}

inline ParamPoly poly_lcm(const ParamPoly& a, const ParamPoly& b) {
    if (a.is_zero() || b.is_zero()) return ParamPoly();
    return primitive_part(a.divexact(poly_gcd(a, b)) * b);
}

// --- Yun square-free decomposition with respect to one symbol --------------

struct SquareFreeFactor {
    ParamPoly factor;  // integer-primitive, positive leading coefficient, degree >= 1 in the symbol
    int multiplicity = 1;
};

struct SquareFreeDecomposition {
    std::vector<SquareFreeFactor> factors;
    ParamPoly unit_poly;  // symbol-free cofactor (may be non-constant in other symbols)
    Rat unit_scalar{1};   // rational cofactor; f == unit_scalar * unit_poly * prod(factor^mult)
};

inline SquareFreeDecomposition squarefree_wrt(const ParamPoly& f, Symbol t) {
    if (f.is_zero()) throw std::domain_error("square-free decomposition of zero");
    SquareFreeDecomposition out;
    if (f.degree_in(t) <= 0) {
        out.unit_scalar = f.rational_content();
        out.unit_poly = primitive_part(f);
        return out;
    }
    detail::UPoly cs = f.coeffs_in(t);
    ParamPoly cont = poly_gcd_list(cs);
    ParamPoly P = primitive_part(f.divexact(cont));

    ParamPoly Pp = P.derivative(t);
    ParamPoly g = poly_gcd(P, Pp);
    if (g.degree_in(t) <= 0) {
        out.factors.push_back({P, 1});
    } else {
        ParamPoly w = P.divexact(g), y = Pp.divexact(g);
        int i = 1;
        while (true) {
            ParamPoly z = y - w.derivative(t);
            if (z.is_zero()) {
                if (w.degree_in(t) >= 1) out.factors.push_back({primitive_part(w), i});
                break;
            }
            ParamPoly gi = poly_gcd(w, z);
            if (gi.degree_in(t) >= 1) out.factors.push_back({primitive_part(gi), i});
            w = w.divexact(gi);
            y = z.divexact(gi);
            ++i;
            if (w.degree_in(t) <= 0) break;
        }
    }
    ParamPoly prod(Rat(1));
    for (const auto& sf : out.factors)
        for (int k = 0; k < sf.multiplicity; ++k) prod *= sf.factor;
    ParamPoly unit = f.divexact(prod);
    out.unit_scalar = unit.rational_content();
    out.unit_poly = primitive_part(unit);
    return out;
}

}  // namespace twistpf
