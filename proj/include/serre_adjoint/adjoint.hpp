#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "forms.hpp"
#include "lseries.hpp"
#include "qseries.hpp"
#include "rational.hpp"
#include "real.hpp"

namespace serre {

/// Index of Gamma_0(N) in SL_2(Z): N prod_{p | N} (1 + 1/p).
inline std::int64_t index_mu(std::int64_t level) {
    if (level < 1) throw DomainError("index_mu: level must be positive");
    std::int64_t mu = level, n = level;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        mu = mu / p * (p + 1);
        while (n % p == 0) n /= p;
    }
    if (n > 1) mu = mu / n * (n + 1);
    return mu;
}

/// (1/mu) k (k-1) m^{k-1} / 16: the positive adjoint prefactor times pi^2.
inline Rational adjoint_prefactor_times_pi2(int k, std::int64_t mu, std::int64_t m) {
    return Rational(static_cast<long>(k) * (k - 1) * pow_integer(m, static_cast<unsigned long>(k - 1))) /
           Rational(16 * mu);
}

struct AdjointCoefficient {
    std::int64_t m = 0;
    Real value = 0;
    double error_bound = 0.0;
    /// c(m) * pi^2, exact, when the L-value has a closed form.
    std::optional<Rational> exact_times_pi2;
    ShiftedLValue l_value;
};

struct AdjointCoeffs {
    int k = 0;
    std::int64_t level = 1;
    std::int64_t mu = 1;
    std::vector<AdjointCoefficient> coeffs;
};

/// m-th coefficient of theta_k^* f for f in S_{k+2}(Gamma_0(N)):
///   c(m) = (1/mu) k(k-1) m^{k-1} / (4 pi)^2 * [ (m - k/12) a(m) / m^{k+1} + 2k L_{f,m}(k+1) ].
inline AdjointCoefficient adjoint_coeff(const QExpansion& f, int k, std::int64_t level, std::int64_t m, double tol) {
    if (f.weight() != k + 2) throw DomainError("adjoint_coeff: form must have weight k+2");
    if (level < 1 || level % f.level() != 0)
        throw DomainError("adjoint_coeff: form level " + std::to_string(f.level()) + " does not divide " +
                          std::to_string(level));
    const std::int64_t mu = index_mu(level);
    AdjointCoefficient out;
    out.m = m;
    out.l_value = shifted_L(f, k, m, static_cast<double>(k + 1), tol);

    const Rational lead = (Rational(static_cast<long>(m)) - make_rational(k, 12)) * f[static_cast<std::size_t>(m)] /
                          Rational(pow_integer(m, static_cast<unsigned long>(k + 1)));
    const Rational pre_pi2 = adjoint_prefactor_times_pi2(k, mu, m);
    const Real pi = pi_real();
    const Real prefactor = to_real(pre_pi2) / (pi * pi);
    out.value = prefactor * (to_real(lead) + Real(2 * k) * out.l_value.value);
    const double pre_d = prefactor.convert_to<double>();
    out.error_bound = pre_d * 2.0 * k * out.l_value.error_bound +
                      16.0 * real_epsilon() * std::abs(pre_d) * (std::abs(to_double(lead)) + 2.0 * k * std::abs(out.l_value.value.convert_to<double>()));
    if (out.l_value.exact) out.exact_times_pi2 = pre_pi2 * (lead + Rational(2 * k) * *out.l_value.exact);
    return out;
}

inline AdjointCoeffs adjoint_qexp(const QExpansion& f, int k, std::int64_t level, std::int64_t m_max, double tol) {
    AdjointCoeffs out;
    out.k = k;
    out.level = level;
    out.mu = index_mu(level);
    for (std::int64_t m = 1; m <= m_max; ++m) out.coeffs.push_back(adjoint_coeff(f, k, level, m, tol));
    return out;
}

/// adjoint_qexp on a form built at the precision the largest shift needs.
inline AdjointCoeffs adjoint_qexp_auto(const FormBuilder& build, int k, std::int64_t level, std::int64_t m_max,
                                       double tol) {
    QExpansion f = build(kDefaultPrecision);
    if (m_max >= 1) {
        for (int round = 0; round < 6; ++round) {
            std::size_t need = 0;
            for (std::int64_t m : {std::int64_t{1}, m_max})
                need = std::max(need, required_precision(f, k, m, static_cast<double>(k + 1), tol));
            if (need <= f.prec()) break;
            f = build(need + need / 8);
        }
    }
    return adjoint_qexp(f, k, level, m_max, tol);
}

struct TauEstimate {
    std::int64_t m = 0;
    Real value = 0;
    double error_bound = 0.0;
};

/// tau(m) = -20 m^11 / (m - 5/6) * L_{Delta,m}(11), from the numeric L-value.
inline TauEstimate tau_from_L(std::int64_t m, double tol) {
    const auto l = shifted_L_delta(m, tol);
    const Real factor = to_real(Rational(-20 * pow_integer(m, 11)) /
                                (Rational(static_cast<long>(m)) - make_rational(5, 6)));
    TauEstimate out;
    out.m = m;
    out.value = factor * l.value;
    out.error_bound = std::abs(factor.convert_to<double>()) * l.error_bound;
    return out;
}

/// ||Delta||^2 / ||Delta_{10,2}||^2 with its estimated error.
struct NormRatio {
    double value = 0.0;
    double est_error = 0.0;
};

inline ShiftedLValue shifted_L_v2delta(std::int64_t m, double tol) {
    return shifted_L_auto([](std::size_t p) { return qs_v_expand(delta(p), 2); }, 10, m, 11.0, tol);
}

struct BetaRow {
    std::int64_t m = 0;
    Integer expected;          ///< tau_{10,2}(m)
    double predicted = 0.0;
    double predicted_error = 0.0;
    double relative_deviation = 0.0;
    bool pass = false;
};

struct BetaReport {
    std::vector<BetaRow> rows;
    double relative_tolerance = 0.01;
    bool passed() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return !rows.empty();
    }
    /// Mean of predicted / expected over the rows.
    double mean_scale() const {
        double s = 0.0;
        for (const auto& r : rows) s += r.predicted / r.expected.get_d();
        return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
    }
};

/// Recovers tau_{10,2}(m) from L_{V_2 Delta, m}(11) and the norm ratio:
///   odd m:  (3840 m^9 / pi^2) (||Delta_{10,2}||^2 / ||Delta||^2) L_{V_2 Delta,m}(11)
///   even m: (15 m^9 / (8 beta pi^2)) [ (m - 5/6) tau(m/2) / m^11 + 20 L_{V_2 Delta,m}(11) ],
///           beta = (5/2^9) ||Delta||^2 / ||Delta_{10,2}||^2.
inline BetaReport beta_relation_check(const std::vector<std::int64_t>& ms, double tol, const NormRatio& ratio,
                                      double relative_tolerance = 0.01) {
    if (!(ratio.value > 0.0)) throw DomainError("beta_relation_check: norm ratio must be positive");
    std::int64_t m_max = 1;
    for (auto m : ms) {
        if (m < 1) throw DomainError("beta_relation_check: m must be positive");
        m_max = std::max(m_max, m);
    }
    const auto d10 = delta_10_2(static_cast<std::size_t>(m_max) + 1);
    const double pi2 = M_PI * M_PI;
    BetaReport report;
    report.relative_tolerance = relative_tolerance;
    for (auto m : ms) {
        const auto l = shifted_L_v2delta(m, tol);
        const double md = static_cast<double>(m);
        const double l_val = l.value.convert_to<double>();
        BetaRow row;
        row.m = m;
        row.expected = d10[static_cast<std::size_t>(m)].get_num();
        double coefficient = 0.0;  // multiplies L
        if (m % 2 == 1) {
            coefficient = 3840.0 * std::pow(md, 9) / pi2 / ratio.value;
            row.predicted = coefficient * l_val;
        } else {
            const double beta = 5.0 / 512.0 * ratio.value;
            const double outer = 15.0 * std::pow(md, 9) / (8.0 * beta * pi2);
            const double lead = (md - 5.0 / 6.0) / std::pow(md, 11) * ramanujan_tau(m / 2).get_d();
            coefficient = outer * 20.0;
            row.predicted = outer * (lead + 20.0 * l_val);
        }
        row.predicted_error =
            std::abs(coefficient) * l.error_bound + std::abs(row.predicted) * ratio.est_error / ratio.value;
        const double expected = row.expected.get_d();
        row.relative_deviation = std::abs(row.predicted - expected) / std::abs(expected);
        row.pass = std::abs(row.predicted - expected) <= relative_tolerance * std::abs(expected) + row.predicted_error;
        report.rows.push_back(row);
    }
    return report;
}

inline BetaReport beta_relation_check(std::int64_t m_max, double tol, const NormRatio& ratio,
                                      double relative_tolerance = 0.01) {
    std::vector<std::int64_t> ms;
    for (std::int64_t m = 1; m <= m_max; ++m) ms.push_back(m);
    return beta_relation_check(ms, tol, ratio, relative_tolerance);
}

}  // namespace serre
