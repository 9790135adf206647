#pragma once

#include <cmath>
#include <cstdint>
#include <mutex>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace serre {

/// sigma_r(n) = sum of d^r over the divisors d of n.
inline Integer sigma_power(unsigned r, std::int64_t n) {
    if (n <= 0) throw DomainError("sigma_power: n must be positive");
    Integer total = 0;
    for (std::int64_t d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        total += pow_integer(d, r);
        if (d != n / d) total += pow_integer(n / d, r);
    }
    return total;
}

inline std::uint64_t divisor_count(std::int64_t n) {
    if (n <= 0) throw DomainError("divisor_count: n must be positive");
    std::uint64_t count = 0;
    for (std::int64_t d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        count += (d == n / d) ? 1 : 2;
    }
    return count;
}

/// sigma_r(n) for 0 <= n < limit by sieving; entry 0 is 0.
inline std::vector<Integer> sigma_table(unsigned r, std::size_t limit) {
    std::vector<Integer> table(limit, 0);
    for (std::size_t d = 1; d < limit; ++d) {
        const Integer term = pow_integer(static_cast<std::int64_t>(d), r);
        for (std::size_t n = d; n < limit; n += d) table[n] += term;
    }
    return table;
}

/// sigma_1(n) for 0 <= n < limit as machine integers (exact for limit well below 2^40).
inline std::vector<std::uint64_t> sigma1_table(std::size_t limit) {
    std::vector<std::uint64_t> table(limit, 0);
    for (std::size_t d = 1; d < limit; ++d)
        for (std::size_t n = d; n < limit; n += d) table[n] += d;
    return table;
}

inline std::vector<std::uint32_t> divisor_count_table(std::size_t limit) {
    std::vector<std::uint32_t> table(limit, 0);
    for (std::size_t d = 1; d < limit; ++d)
        for (std::size_t n = d; n < limit; n += d) ++table[n];
    return table;
}

namespace detail {

struct BernoulliCache {
    std::mutex mutex;
    std::vector<Rational> values{Rational(1)};  // B_0, B_1 = -1/2, B_2, ...
};

inline BernoulliCache& bernoulli_cache() {
    static BernoulliCache cache;
    return cache;
}

inline Integer binomial(unsigned long n, unsigned long k) {
    Integer out;
    mpz_bin_uiui(out.get_mpz_t(), n, k);
    return out;
}

}  // namespace detail

/// Exact B_k for even k >= 2 from sum_{j=0}^{k} C(k+1, j) B_j = 0.
inline Rational bernoulli(int k) {
    if (k < 2 || k % 2 != 0) throw DomainError("bernoulli: k must be even and >= 2");
    auto& cache = detail::bernoulli_cache();
    std::lock_guard lock(cache.mutex);
    auto& b = cache.values;
    for (std::size_t n = b.size(); n <= static_cast<std::size_t>(k); ++n) {
        Rational acc = 0;
        for (std::size_t j = 0; j < n; ++j) acc += Rational(detail::binomial(n + 1, j)) * b[j];
        b.push_back(-acc / Rational(static_cast<long>(n + 1)));
    }
    return b[static_cast<std::size_t>(k)];
}

/// Smallest C with d(n) <= C * n^delta for every n >= 1.
///
/// d(n)/n^delta is multiplicative, and its prime-power factor (a+1)/p^(a*delta) never
/// exceeds 1 once p >= 2^(1/delta), so C is a finite product over the small primes.
inline double divisor_bound_constant(double delta) {
    if (!(delta > 0.0) || delta > 1.0) throw DomainError("divisor_bound_constant: delta must lie in (0, 1]");
    const auto limit = static_cast<std::int64_t>(std::ceil(std::pow(2.0, 1.0 / delta)));
    std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
    double log_c = 0.0;
    for (std::int64_t p = 2; p <= limit; ++p) {
        if (composite[static_cast<std::size_t>(p)]) continue;
        for (std::int64_t q = p * p; q <= limit; q += p) composite[static_cast<std::size_t>(q)] = true;
        const double lp = delta * std::log(static_cast<double>(p));
        // log((a+1)) - a*lp is concave in a: walk up to the peak.
        double best = 0.0;
        for (int a = 1;; ++a) {
            const double v = std::log(a + 1.0) - a * lp;
            if (v <= best) break;
            best = v;
        }
        log_c += best;
    }
    return std::exp(log_c) * (1.0 + 1e-12);
}

}  // namespace serre
