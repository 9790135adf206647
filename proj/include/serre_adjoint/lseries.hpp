#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "arithmetic.hpp"
#include "errors.hpp"
#include "forms.hpp"
#include "qseries.hpp"
#include "rational.hpp"
#include "real.hpp"

namespace serre {

enum class BoundKind { proven, heuristic };

inline const char* to_string(BoundKind kind) { return kind == BoundKind::proven ? "proven" : "heuristic"; }

/// Numeric L_{f,m}(s) = sum_{n>=1} a(n+m) sigma(n) / (n+m)^s with a dominating error bound.
struct ShiftedLValue {
    std::int64_t m = 0;
    double s = 0.0;
    Real value = 0;
    double error_bound = 0.0;
    std::size_t horizon = 0;  ///< largest n summed
    std::optional<Rational> exact;
    BoundKind bound_kind = BoundKind::heuristic;
};

/// Majorant for the tail of L_{f,m}(s).
///
/// With |a(N)| <= C d(N) N^e (e = (w-1)/2), d(N) <= C_delta N^delta and
/// sigma(n) <= n (1 + ln n) <= N (1 + ln N), every term with index N = n + m is at most
/// C C_delta N^{-p} (1 + ln N) where p = s - e - delta - 1.  That function is decreasing,
/// so the terms past N = X sum to at most the integral from X to infinity.
struct TailMajorant {
    double coefficient_constant = 0.0;
    BoundKind kind = BoundKind::heuristic;
    double delta = 0.5;
    double divisor_constant = 2.0;
    double decay = 2.0;  ///< p

    double tail_from(double x) const {
        if (coefficient_constant == 0.0) return 0.0;
        const double q = decay - 1.0;
        return coefficient_constant * divisor_constant * std::pow(x, -q) * ((1.0 + std::log(x)) / q + 1.0 / (q * q));
    }
};

namespace detail {

inline void check_shifted_L_inputs(const QExpansion& f, int k, std::int64_t m, double s, double tol) {
    if (f.weight() != k + 2)
        throw DomainError("shifted_L: form has weight " + std::to_string(f.weight()) + ", expected k+2 = " +
                          std::to_string(k + 2));
    if (!f.is_cusp()) throw DomainError("shifted_L: form is not flagged as a cusp form");
    if (k < 4) throw DivergentRegime("shifted_L: k < 4 is outside the region of absolute convergence at s = k+1");
    if (m < 1) throw DomainError("shifted_L: shift m must be positive");
    if (!(s > (k + 5) / 2.0))
        throw DivergentRegime("shifted_L: s must exceed (k+5)/2 = " + std::to_string((k + 5) / 2.0));
    if (!(tol >= kMinTolerance)) throw DomainError("shifted_L: tolerance must be >= 1e-34");
}

/// Largest |a(n)| / (d(n) n^e) over the known coefficients.
inline double empirical_coefficient_constant(const QExpansion& f) {
    const double e = (f.weight() - 1) / 2.0;
    const auto divisors = divisor_count_table(f.prec());
    double c = 0.0;
    for (std::size_t n = 1; n < f.prec(); ++n) {
        const auto& a = f.coeffs()[n];
        if (a == 0) continue;
        const double ratio = std::abs(to_double(a)) / (divisors[n] * std::pow(static_cast<double>(n), e));
        c = std::max(c, ratio);
    }
    return c;
}

/// Smallest H >= 0 with tail_from(H + m) <= target.
inline std::size_t horizon_for(const TailMajorant& t, std::int64_t m, double target) {
    if (t.coefficient_constant == 0.0) return 0;
    auto ok = [&](std::size_t h) { return t.tail_from(static_cast<double>(h) + static_cast<double>(m)) <= target; };
    if (ok(0)) return 0;
    std::size_t hi = 1;
    while (!ok(hi)) {
        if (hi > (std::size_t{1} << 40)) throw PrecisionExhausted("shifted_L: tail bound does not reach tolerance");
        hi *= 2;
    }
    std::size_t lo = hi / 2;
    while (lo + 1 < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

inline bool is_integer_exponent(double s) { return s == std::floor(s) && s > 0 && s < 4096; }

}  // namespace detail

/// Chooses the divisor-bound exponent that gives the shortest horizon for this tolerance.
inline TailMajorant tail_majorant(const QExpansion& f, int k, double s, std::int64_t m, double tol) {
    TailMajorant best;
    if (f.proven_bound()) {
        best.coefficient_constant = *f.proven_bound();
        best.kind = BoundKind::proven;
    } else {
        best.coefficient_constant = detail::empirical_coefficient_constant(f);
        best.kind = BoundKind::heuristic;
    }
    const double e = (k + 1) / 2.0;
    constexpr std::array<double, 8> deltas{1.0 / 2, 1.0 / 3, 1.0 / 4, 1.0 / 5, 1.0 / 6, 1.0 / 8, 1.0 / 10, 1.0 / 12};
    std::optional<std::size_t> best_h;
    for (double delta : deltas) {
        TailMajorant t = best;
        t.delta = delta;
        t.divisor_constant = divisor_bound_constant(delta);
        t.decay = s - e - delta - 1.0;
        if (t.decay <= 1.0 + 1e-9) continue;
        std::size_t h = 0;
        try {
            h = detail::horizon_for(t, m, tol / 2);
        } catch (const PrecisionExhausted&) {
            continue;
        }
        if (!best_h || h < *best_h) {
            best_h = h;
            best = t;
        }
    }
    if (!best_h)
        throw PrecisionExhausted("shifted_L: s is too close to the convergence abscissa for an explicit tail bound");
    return best;
}

/// Horizon the sum needs and the coefficient count that requires.
inline std::size_t required_precision(const QExpansion& f, int k, std::int64_t m, double s, double tol) {
    detail::check_shifted_L_inputs(f, k, m, s, tol);
    const auto t = tail_majorant(f, k, s, m, tol);
    return detail::horizon_for(t, m, tol / 2) + static_cast<std::size_t>(m) + 1;
}

inline bool is_delta(const QExpansion& f) {
    if (f.weight() != 12 || !f.is_cusp()) return false;
    const auto t = tau_table(f.prec());
    for (std::size_t n = 0; n < f.prec(); ++n)
        if (f.coeffs()[n] != (*t)[n]) return false;
    return true;
}

/// L_{Delta,m}(11) = -(m - 5/6) tau(m) / (20 m^11), exact.
inline Rational exact_L_delta(std::int64_t m) {
    if (m < 1) throw DomainError("exact_L_delta: m must be positive");
    const Rational lead = Rational(static_cast<long>(m)) - make_rational(5, 6);
    return -lead * Rational(ramanujan_tau(m)) / Rational(20 * pow_integer(m, 11));
}

/// Sum in ascending n with a tail bound below tol/2 plus rounding.
inline ShiftedLValue shifted_L(const QExpansion& f, int k, std::int64_t m, double s, double tol) {
    detail::check_shifted_L_inputs(f, k, m, s, tol);
    const auto tail = tail_majorant(f, k, s, m, tol);
    const std::size_t horizon = detail::horizon_for(tail, m, tol / 2);
    const std::size_t need = horizon + static_cast<std::size_t>(m) + 1;
    if (f.prec() < need)
        throw PrecisionExhausted("shifted_L: horizon " + std::to_string(horizon) + " needs precision " +
                                 std::to_string(need) + ", form has " + std::to_string(f.prec()));

    const auto sig = sigma1_table(horizon + 1);
    const bool integer_s = detail::is_integer_exponent(s);
    const Real s_real = s;
    Real sum = 0;
    double abs_sum = 0.0;
    for (std::size_t n = 1; n <= horizon; ++n) {
        const auto& a = f.coeffs()[n + static_cast<std::size_t>(m)];
        if (a == 0) continue;
        const std::int64_t big_n = static_cast<std::int64_t>(n) + m;
        Real numerator = to_real(a) * Real(sig[n]);
        Real term = integer_s ? numerator / to_real(pow_integer(big_n, static_cast<unsigned long>(s)))
                              : numerator / boost::multiprecision::pow(Real(big_n), s_real);
        abs_sum += std::abs(term.convert_to<double>());
        sum += term;
    }

    ShiftedLValue out;
    out.m = m;
    out.s = s;
    out.value = sum;
    out.horizon = horizon;
    out.bound_kind = tail.kind;
    const double rounding = (static_cast<double>(horizon) + 8.0) * 4.0 * real_epsilon() * abs_sum;
    out.error_bound = tail.tail_from(static_cast<double>(horizon) + static_cast<double>(m)) + rounding;
    if (k == 10 && s == 11.0 && is_delta(f)) out.exact = exact_L_delta(m);
    return out;
}

using FormBuilder = std::function<QExpansion(std::size_t)>;

/// shifted_L on a form rebuilt at whatever precision the horizon turns out to need.
inline ShiftedLValue shifted_L_auto(const FormBuilder& build, int k, std::int64_t m, double s, double tol,
                                    std::size_t initial_prec = kDefaultPrecision) {
    QExpansion f = build(initial_prec);
    for (int round = 0; round < 6; ++round) {
        const std::size_t need = required_precision(f, k, m, s, tol);
        if (need <= f.prec()) return shifted_L(f, k, m, s, tol);
        f = build(need + need / 8);
    }
    return shifted_L(f, k, m, s, tol);
}

inline ShiftedLValue shifted_L_delta(std::int64_t m, double tol) {
    return shifted_L_auto([](std::size_t p) { return delta(p); }, 10, m, 11.0, tol);
}

// ---------------------------------------------------------------------------
// Scans over m for f = Delta, k = 10, s = 11.

struct BoundScanRow {
    std::int64_t m = 0;
    Integer tau;
    Rational l_value;
    double scaled = 0.0;  ///< m^{4.5} |L_{Delta,m}(11)|
    Rational limit;       ///< d(m) / 20
    bool pass = true;
};

struct BoundScanReport {
    std::vector<BoundScanRow> rows;
    std::optional<std::int64_t> first_violation;
    bool passed() const { return !first_violation.has_value(); }
};

/// m^{4.5} |L_{Delta,m}(11)| <= d(m)/20, decided exactly as m^9 L^2 <= (d(m)/20)^2.
inline BoundScanReport bound_scan(std::int64_t m_max) {
    if (m_max < 1) throw DomainError("bound_scan: m_max must be >= 1");
    BoundScanReport report;
    report.rows.reserve(static_cast<std::size_t>(m_max));
    for (std::int64_t m = 1; m <= m_max; ++m) {
        BoundScanRow row;
        row.m = m;
        row.tau = ramanujan_tau(m);
        row.l_value = exact_L_delta(m);
        row.limit = make_rational(static_cast<std::int64_t>(divisor_count(m)), 20);
        row.scaled = std::pow(static_cast<double>(m), 4.5) * std::abs(to_double(row.l_value));
        const Rational lhs = Rational(pow_integer(m, 9)) * row.l_value * row.l_value;
        row.pass = lhs <= row.limit * row.limit;
        if (!row.pass && !report.first_violation) report.first_violation = m;
        report.rows.push_back(std::move(row));
    }
    return report;
}

struct SignScanRow {
    std::int64_t m = 0;
    int tau_sign = 0;
    int l_sign = 0;
    bool consistent = true;
};

struct SignScanReport {
    std::vector<SignScanRow> rows;
    std::vector<std::int64_t> tau_sign_changes;  ///< m with sign(tau(m)) != sign of the previous nonzero tau
    std::vector<std::int64_t> l_sign_changes;
    std::optional<std::int64_t> first_violation;
    bool passed() const { return !first_violation.has_value(); }
};

inline SignScanReport sign_scan(std::int64_t m_max) {
    if (m_max < 1) throw DomainError("sign_scan: m_max must be >= 1");
    SignScanReport report;
    int prev_tau = 0, prev_l = 0;
    for (std::int64_t m = 1; m <= m_max; ++m) {
        SignScanRow row;
        row.m = m;
        row.tau_sign = sign(ramanujan_tau(m));
        row.l_sign = sign(exact_L_delta(m));
        row.consistent = row.tau_sign == 0 || row.l_sign == -row.tau_sign;
        if (!row.consistent && !report.first_violation) report.first_violation = m;
        if (row.tau_sign != 0) {
            if (prev_tau != 0 && row.tau_sign != prev_tau) report.tau_sign_changes.push_back(m);
            prev_tau = row.tau_sign;
        }
        if (row.l_sign != 0) {
            if (prev_l != 0 && row.l_sign != prev_l) report.l_sign_changes.push_back(m);
            prev_l = row.l_sign;
        }
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace serre
