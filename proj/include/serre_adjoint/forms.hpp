#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "arithmetic.hpp"
#include "errors.hpp"
#include "qseries.hpp"
#include "rational.hpp"

namespace serre {

/// Normalized Eisenstein series E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n; E_2 is flagged quasimodular.
inline QExpansion eisenstein(int k, std::size_t prec = kDefaultPrecision) {
    if (k < 2 || k % 2 != 0) throw DomainError("eisenstein: k must be even and >= 2");
    if (prec == 0) throw DomainError("eisenstein: precision must be positive");
    const Rational scale = Rational(-2 * k) / bernoulli(k);
    const auto sig = sigma_table(static_cast<unsigned>(k - 1), prec);
    std::vector<Rational> c(prec);
    c[0] = 1;
    for (std::size_t n = 1; n < prec; ++n) c[n] = scale * sig[n];
    return QExpansion(std::move(c), k, 1, false, k == 2);
}

namespace detail {

/// prod_{n>=1} (1 - q^{d n}) to `prec` terms via the pentagonal number theorem.
inline std::vector<Integer> euler_product(std::size_t prec, std::int64_t d = 1) {
    std::vector<Integer> out(prec, 0);
    out[0] = 1;
    for (std::int64_t j = 1;; ++j) {
        const std::int64_t e1 = d * (j * (3 * j - 1) / 2);
        const std::int64_t e2 = d * (j * (3 * j + 1) / 2);
        if (e1 >= static_cast<std::int64_t>(prec)) break;
        const int s = (j % 2 == 0) ? 1 : -1;
        out[static_cast<std::size_t>(e1)] += s;
        if (e2 < static_cast<std::int64_t>(prec)) out[static_cast<std::size_t>(e2)] += s;
    }
    return out;
}

/// h^r for an integral series with h[0] = 1, by the power recurrence
/// i*g[i] = sum_{j=1..i} ((r+1) j - i) h[j] g[i-j]; cost is O(prec * nnz(h)).
inline std::vector<Integer> series_power(const std::vector<Integer>& h, std::int64_t r) {
    const std::size_t prec = h.size();
    std::vector<Integer> g(prec, 0);
    if (prec == 0) return g;
    if (h[0] != 1) throw DomainError("series_power: constant term must be 1");
    std::vector<std::size_t> nz;
    for (std::size_t j = 1; j < prec; ++j)
        if (h[j] != 0) nz.push_back(j);
    g[0] = 1;
    Integer acc, weight;
    for (std::size_t i = 1; i < prec; ++i) {
        acc = 0;
        for (std::size_t j : nz) {
            if (j > i) break;
            weight = (r + 1) * static_cast<long>(j) - static_cast<long>(i);
            weight *= h[j];
            mpz_addmul(acc.get_mpz_t(), weight.get_mpz_t(), g[i - j].get_mpz_t());
        }
        mpz_divexact_ui(g[i].get_mpz_t(), acc.get_mpz_t(), static_cast<unsigned long>(i));
    }
    return g;
}

inline std::vector<Rational> to_rationals(const std::vector<Integer>& v) {
    return std::vector<Rational>(v.begin(), v.end());
}

struct TauCache {
    std::mutex mutex;
    std::shared_ptr<const std::vector<Integer>> table = std::make_shared<const std::vector<Integer>>();
};

inline TauCache& tau_cache() {
    static TauCache cache;
    return cache;
}

}  // namespace detail

struct EtaFactor {
    std::int64_t d;
    std::int64_t r;
    friend bool operator==(const EtaFactor&, const EtaFactor&) = default;
};

/// q^{(sum d r_d)/24} prod_d prod_n (1 - q^{dn})^{r_d}.
///
/// The level is reported as lcm of the d's; no modularity conditions beyond an integral
/// leading exponent and an integral weight are checked.
inline QExpansion eta_quotient(const std::vector<EtaFactor>& factors, std::size_t prec = kDefaultPrecision) {
    if (prec == 0) throw DomainError("eta_quotient: precision must be positive");
    std::int64_t order24 = 0, exponent_sum = 0, level = 1;
    for (const auto& [d, r] : factors) {
        if (d < 1) throw DomainError("eta_quotient: divisors must be positive");
        order24 += d * r;
        exponent_sum += r;
        level = std::lcm(level, d);
    }
    if (order24 % 24 != 0) throw DomainError("eta_quotient: fractional leading exponent (sum d*r_d not divisible by 24)");
    if (order24 < 0) throw DomainError("eta_quotient: negative leading exponent is not a q-expansion");
    if (exponent_sum % 2 != 0) throw DomainError("eta_quotient: half-integral weight is not supported");
    const auto shift = static_cast<std::size_t>(order24 / 24);

    std::vector<Rational> c(prec, Rational(0));
    if (shift < prec) {
        const std::size_t body = prec - shift;
        std::vector<Integer> acc(body, 0);
        acc[0] = 1;
        for (const auto& [d, r] : factors) {
            if (r == 0) continue;
            const auto power = detail::series_power(detail::euler_product(body, d), r);
            QExpansion a(detail::to_rationals(acc), 0, 1), b(detail::to_rationals(power), 0, 1);
            const auto prod = qs_mul(a, b);
            for (std::size_t n = 0; n < body; ++n) acc[n] = prod.coeffs()[n].get_num();
        }
        for (std::size_t n = 0; n < body; ++n) c[n + shift] = acc[n];
    }
    return QExpansion(std::move(c), static_cast<int>(exponent_sum / 2), level, shift > 0);
}

/// tau(0..limit-1) (tau(0) = 0), memoized; grown geometrically and shared read-only.
inline std::shared_ptr<const std::vector<Integer>> tau_table(std::size_t limit) {
    auto& cache = detail::tau_cache();
    std::lock_guard lock(cache.mutex);
    if (cache.table->size() < limit) {
        const std::size_t target = std::max<std::size_t>({limit, 2 * cache.table->size(), 64});
        auto power = detail::series_power(detail::euler_product(target - 1), 24);
        std::vector<Integer> t(target, 0);
        for (std::size_t n = 1; n < target; ++n) t[n] = std::move(power[n - 1]);
        cache.table = std::make_shared<const std::vector<Integer>>(std::move(t));
    }
    return cache.table;
}

inline Integer ramanujan_tau(std::int64_t n) {
    if (n < 1) throw DomainError("ramanujan_tau: n must be positive");
    return (*tau_table(static_cast<std::size_t>(n) + 1))[static_cast<std::size_t>(n)];
}

/// Delta = q prod (1 - q^n)^24, read from the memoized tau table.
/// Deligne's bound |tau(n)| <= d(n) n^{11/2} is recorded as a proven coefficient bound.
inline QExpansion delta(std::size_t prec = kDefaultPrecision) {
    if (prec == 0) throw DomainError("delta: precision must be positive");
    const auto t = tau_table(prec);
    std::vector<Rational> c(t->begin(), t->begin() + static_cast<std::ptrdiff_t>(prec));
    return QExpansion(std::move(c), 12, 1, true).with_proven_bound(1.0);
}

/// (E_4^3 - E_6^2)/1728: quadratic-time second construction of Delta, kept as a cross-check.
inline QExpansion delta_from_eisenstein(std::size_t prec = kDefaultPrecision) {
    const auto e4 = eisenstein(4, prec);
    const auto e6 = eisenstein(6, prec);
    const auto d = make_rational(1, 1728) * (e4 * e4 * e4 - e6 * e6);
    return d.with_metadata(12, 1, true, false);
}

/// X_2 = 2 V_2 E_2 - E_2, the holomorphic weight-2 form on Gamma_0(2).
inline QExpansion level2_weight2(std::size_t prec = kDefaultPrecision) {
    const auto e2 = eisenstein(2, prec);
    const auto x2 = Rational(2) * qs_v_expand(e2, 2) - e2;
    return x2.with_metadata(2, 2, false, false);
}

/// eta(z)^8 eta(2z)^8, the generator of S_8(Gamma_0(2)).
inline QExpansion delta_8_2(std::size_t prec = kDefaultPrecision) { return eta_quotient({{1, 8}, {2, 8}}, prec); }

/// Normalized generator of S_10(Gamma_0(2)) built as Delta_{8,2} * X_2.
inline QExpansion delta_10_2(std::size_t prec = kDefaultPrecision) {
    auto f = delta_8_2(prec) * level2_weight2(prec);
    const auto lead = f.leading_index();
    if (prec > 1 && (!lead || *lead != 1)) throw ComputationError("delta_10_2: unexpected leading term");
    if (prec > 1 && f.coeffs()[1] != 1) f = qs_scale(1 / f.coeffs()[1], f);
    // Newform of level 2 (S_10(1) = 0), so Deligne applies with constant 1.
    return f.with_metadata(10, 2, true, false).with_proven_bound(1.0);
}

/// theta_k f = D f - (k/12) E_2 f, to f.prec terms.
inline QExpansion serre_derivative(const QExpansion& f, int k) {
    if (f.weight() != k)
        throw DomainError("serre_derivative: form has weight " + std::to_string(f.weight()) + ", operator weight " +
                          std::to_string(k));
    const auto e2 = eisenstein(2, f.prec());
    auto out = qs_derive(f) - make_rational(k, 12) * (e2 * f);
    return out.with_metadata(k + 2, f.level(), f.is_cusp(), f.is_quasimodular());
}

struct DeligneReport {
    int weight = 0;
    std::size_t n_max = 0;
    double max_ratio = 0.0;  ///< max |a(n)| / (d(n) n^{(k-1)/2})
    std::size_t argmax = 0;
    std::optional<std::size_t> first_violation;
    bool passed() const { return !first_violation.has_value(); }
};

/// Checks |a(n)| <= d(n) n^{(k-1)/2} for 1 <= n <= n_max, exactly (squared, in integers).
inline DeligneReport deligne_check(const QExpansion& f, int k_ambient, std::size_t n_max) {
    if (!f.is_cusp()) throw DomainError("deligne_check: form is not flagged as a cusp form");
    if (f.weight() != k_ambient) throw DomainError("deligne_check: weight mismatch");
    if (f.prec() <= n_max)
        throw PrecisionExhausted("deligne_check: need coefficients up to q^" + std::to_string(n_max) + ", have prec " +
                                 std::to_string(f.prec()));
    if (!f.has_integral_coeffs()) throw DomainError("deligne_check: coefficients must be integral");
    DeligneReport report;
    report.weight = k_ambient;
    report.n_max = n_max;
    const auto divisors = divisor_count_table(n_max + 1);
    const double half = (k_ambient - 1) / 2.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        const Integer& a = f.coeffs()[n].get_num();
        if (a == 0) continue;
        const Integer d = static_cast<unsigned long>(divisors[n]);
        const Integer lhs = a * a;
        const Integer rhs = d * d * pow_integer(static_cast<std::int64_t>(n), static_cast<unsigned long>(k_ambient - 1));
        const double ratio = std::abs(a.get_d()) / (divisors[n] * std::pow(static_cast<double>(n), half));
        if (ratio > report.max_ratio) {
            report.max_ratio = ratio;
            report.argmax = n;
        }
        if (lhs > rhs && !report.first_violation) report.first_violation = n;
    }
    return report;
}

}  // namespace serre
