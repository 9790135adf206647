#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace serre {

using Integer = mpz_class;
/// Exact rational; GMP keeps it canonical (den > 0, gcd(num, den) = 1) after every operation.
using Rational = mpq_class;

inline Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
    return make_rational(Integer(static_cast<long>(num)), Integer(static_cast<long>(den)));
}

/// Always "num/den", including den == 1, so the text form is unambiguous.
inline std::string to_fraction_string(const Rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

/// Short form: "num" when integral, "num/den" otherwise.
inline std::string to_display_string(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return to_fraction_string(r);
}

inline Integer parse_integer(std::string_view text) {
    std::string s(text);
    if (!s.empty() && s.front() == '+') s.erase(0, 1);
    if (s.empty()) throw DomainError("empty integer literal");
    Integer z;
    if (z.set_str(s, 10) != 0) throw DomainError("malformed integer literal '" + std::string(text) + "'");
    return z;
}

/// Accepts "a", "a/b" with optional sign.
inline Rational parse_rational(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_integer(text));
    return make_rational(parse_integer(text.substr(0, slash)), parse_integer(text.substr(slash + 1)));
}

inline double to_double(const Rational& r) { return r.get_d(); }

inline Integer pow_integer(const Integer& base, unsigned long exp) {
    Integer out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exp);
    return out;
}

inline Integer pow_integer(std::int64_t base, unsigned long exp) {
    return pow_integer(Integer(static_cast<long>(base)), exp);
}

inline int sign(const Rational& r) { return sgn(r); }
inline int sign(const Integer& z) { return sgn(z); }

}  // namespace serre
