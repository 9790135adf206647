#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <string>

#include "rational.hpp"

namespace serre {

/// Decimal digits carried by every high-precision real.
inline constexpr unsigned kRealDigits = 64;

/// Fixed-precision MPFR float; fixed precision keeps results independent of any global default.
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<kRealDigits>,
                                           boost::multiprecision::et_off>;

/// Smallest tolerance that still leaves 30 guard digits inside a Real.
inline constexpr double kMinTolerance = 1e-34;

inline Real to_real(const Integer& z) {
    Real r;
    mpfr_set_z(r.backend().data(), z.get_mpz_t(), MPFR_RNDN);
    return r;
}

inline Real to_real(const Rational& q) {
    Real r;
    mpfr_set_q(r.backend().data(), q.get_mpq_t(), MPFR_RNDN);
    return r;
}

inline Real pi_real() { return boost::math::constants::pi<Real>(); }

/// Unit roundoff of a Real.
inline double real_epsilon() { return std::numeric_limits<Real>::epsilon().convert_to<double>(); }

/// Scientific decimal with `digits` significant digits.
inline std::string to_decimal_string(const Real& x, int digits = 40) {
    return x.str(digits, std::ios_base::scientific);
}

}  // namespace serre
