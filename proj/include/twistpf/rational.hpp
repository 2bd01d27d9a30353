#pragma once

// Exact arbitrary-precision scalars.  GMP's C++ bindings supply the bignum
// arithmetic; everything downstream (polynomials, fields, the solver) works
// over these, so no floating point appears anywhere in the pipeline.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace twistpf {

using Int = mpz_class;
using Rat = mpq_class;

inline Int int_gcd(const Int& a, const Int& b) {
    Int r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Int int_lcm(const Int& a, const Int& b) {
    Int r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Rat rat_of(long num, long den = 1) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// Nonnegative integer powers only; exponentiation by a negative amount is the
// caller's job (invert first).
inline Rat rat_pow(const Rat& base, unsigned long e) {
    Rat r;
    mpz_pow_ui(r.get_num_mpz_t(), base.get_num().get_mpz_t(), e);
    mpz_pow_ui(r.get_den_mpz_t(), base.get_den().get_mpz_t(), e);
    return r;  // base was canonical, so num^e/den^e already is
}

inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

inline Rat rat_parse(const std::string& s) {
    Rat r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
    r.canonicalize();
    return r;
}

}  // namespace twistpf
