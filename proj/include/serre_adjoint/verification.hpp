#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "adjoint.hpp"
#include "errors.hpp"
#include "form_spec.hpp"
#include "forms.hpp"
#include "lseries.hpp"
#include "petersson.hpp"
#include "qseries.hpp"
#include "rational.hpp"
#include "spaces.hpp"

namespace serre {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;
};

/// Output of one in-process CLI run: exit status and captured stdout.
using CliRunner = std::function<std::pair<int, std::string>(const std::vector<std::string>&)>;

/// Shared state across criteria: quadrature results are computed once.
class VerificationContext {
public:
    QuadratureOptions quadrature{};
    double l_tolerance = 1e-10;
    double tau2_tolerance = 1e-14;
    std::uint64_t seed = 20240611;
    CliRunner cli;

    const PeterssonEstimate& delta_norm_level1() {
        if (!delta1_) delta1_ = petersson_inner(recipes::delta(), recipes::delta(), 12, 1, quadrature);
        return *delta1_;
    }
    const PeterssonEstimate& delta_norm_level2() {
        if (!delta2_) delta2_ = petersson_inner(recipes::delta(), recipes::delta(), 12, 2, quadrature);
        return *delta2_;
    }
    const PeterssonEstimate& delta_v2delta() {
        if (!cross_) cross_ = petersson_inner(recipes::delta(), recipes::v2delta(), 12, 2, quadrature);
        return *cross_;
    }
    const PeterssonEstimate& v2delta_norm() {
        if (!v2_) v2_ = petersson_inner(recipes::v2delta(), recipes::v2delta(), 12, 2, quadrature);
        return *v2_;
    }
    const PeterssonEstimate& delta_10_2_norm() {
        if (!d10_) d10_ = petersson_inner(recipes::delta_10_2(), recipes::delta_10_2(), 10, 2, quadrature);
        return *d10_;
    }
    /// ||Delta||^2 / ||Delta_{10,2}||^2.
    NormRatio norm_ratio() {
        const auto& a = delta_norm_level1();
        const auto& b = delta_10_2_norm();
        NormRatio r;
        r.value = a.value.real() / b.value.real();
        r.est_error = r.value * (a.est_error / a.value.real() + b.est_error / b.value.real());
        return r;
    }

private:
    std::optional<PeterssonEstimate> delta1_, delta2_, cross_, v2_, d10_;
};

namespace detail {

inline std::string fmt(double x, int digits = 10) {
    std::ostringstream s;
    s << std::setprecision(digits) << x;
    return s.str();
}

inline std::string join_coords(const std::vector<Rational>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + to_fraction_string(v[i]);
    return out;
}

inline bool relative_close(double value, double expected, double rel) {
    return std::abs(value - expected) <= rel * std::abs(expected);
}

inline CriterionResult criterion_decomposition(VerificationContext&) {
    CriterionResult r{1, "theta_10 Delta_10,2 = (1/6) Delta + (128/3) V_2 Delta, exact at precision 200", false, "", 0, 1};
    const auto f = serre_derivative(delta_10_2(200), 10);
    const auto coords = decompose(f, space_basis(12, 2, 200));
    r.passed = coords == std::vector<Rational>{make_rational(1, 6), make_rational(128, 3)};
    r.detail = "coordinates (" + join_coords(coords) + ")";
    return r;
}

inline CriterionResult criterion_delta_annihilated(VerificationContext&) {
    CriterionResult r{2, "theta_12 Delta = 0 on 500 coefficients", false, "", 0, 1};
    const auto f = serre_derivative(delta(500), 12);
    std::size_t nonzero = 0;
    for (std::size_t n = 0; n < f.prec(); ++n)
        if (f[n] != 0) ++nonzero;
    r.passed = f.prec() == 500 && nonzero == 0;
    r.detail = std::to_string(f.prec()) + " coefficients, " + std::to_string(nonzero) + " nonzero";
    return r;
}

inline CriterionResult criterion_l_identity(VerificationContext& ctx) {
    CriterionResult r{3, "L_{Delta,m}(11) = -(m - 5/6) tau(m) / (20 m^11) for m <= 100 within 1e-10", false, "", 0, 30};
    const double tol = ctx.l_tolerance;
    std::size_t need = 0;
    auto f = delta(kDefaultPrecision);
    for (std::int64_t m = 1; m <= 100; ++m) need = std::max(need, required_precision(f, 10, m, 11.0, tol));
    if (need > f.prec()) f = delta(need);
    double worst = 0.0;
    std::int64_t worst_m = 0;
    bool ok = true;
    Real l1 = 0;
    for (std::int64_t m = 1; m <= 100; ++m) {
        const auto l = shifted_L(f, 10, m, 11.0, tol);
        const double dev = boost::multiprecision::abs(l.value - to_real(exact_L_delta(m))).convert_to<double>();
        if (m == 1) l1 = l.value;
        if (dev > worst) {
            worst = dev;
            worst_m = m;
        }
        if (!(dev <= 1e-10) || !l.exact || *l.exact != exact_L_delta(m)) ok = false;
    }
    const bool first = exact_L_delta(1) == make_rational(-1, 120);
    r.passed = ok && first;
    r.detail = "max |numeric - exact| = " + fmt(worst, 3) + " at m=" + std::to_string(worst_m) +
               "; L_{Delta,1}(11) = " + to_decimal_string(l1, 16) + " vs -1/120";
    return r;
}

inline CriterionResult criterion_adjoint_vanishing(VerificationContext& ctx) {
    CriterionResult r{4, "theta_10^* Delta = 0: |c(m)| <= error bound and exact c(m) = 0 for m <= 20", false, "", 0, 30};
    const auto coeffs = adjoint_qexp_auto([](std::size_t p) { return delta(p); }, 10, 1, 20, ctx.l_tolerance);
    bool numeric = true, exact = true;
    double worst = 0.0;
    for (const auto& c : coeffs.coeffs) {
        const double v = std::abs(c.value.convert_to<double>());
        worst = std::max(worst, v / c.error_bound);
        if (!(v <= c.error_bound)) numeric = false;
        if (!c.exact_times_pi2 || *c.exact_times_pi2 != 0) exact = false;
    }
    r.passed = numeric && exact && coeffs.coeffs.size() == 20;
    r.detail = "max |c(m)|/bound = " + fmt(worst, 3) + (exact ? "; exact path zero for all m" : "; exact path nonzero");
    return r;
}

inline CriterionResult criterion_petersson_ratios(VerificationContext& ctx) {
    CriterionResult r{5, "<Delta, V_2 Delta>/||Delta||^2 = -1/256 and ||V_2 Delta||^2/||Delta||^2 = 2^-12 within 0.5%",
                      false, "", 0, 300};
    const double base = ctx.delta_norm_level2().value.real();
    const double cross = ctx.delta_v2delta().value.real() / base;
    const double norm = ctx.v2delta_norm().value.real() / base;
    const double e_cross = -1.0 / 256.0, e_norm = std::ldexp(1.0, -12);
    r.passed = relative_close(cross, e_cross, 0.005) && relative_close(norm, e_norm, 0.005);
    r.detail = "cross = " + fmt(cross) + " (rel dev " + fmt(std::abs(cross / e_cross - 1), 2) + "), norm = " +
               fmt(norm) + " (rel dev " + fmt(std::abs(norm / e_norm - 1), 2) + ")";
    return r;
}

inline CriterionResult criterion_tau2_round_trip(VerificationContext& ctx) {
    CriterionResult r{6, "tau_{10,2}(m) from (3840 m^9/pi^2)(||Delta_10,2||^2/||Delta||^2) L_{V_2 Delta,m}(11), odd m <= 9, 1%",
                      false, "", 0, 300};
    const auto ratio = ctx.norm_ratio();
    const auto report = beta_relation_check({1, 3, 5, 7, 9}, ctx.tau2_tolerance, ratio, 0.01);
    r.passed = report.passed();
    std::string rows;
    for (const auto& row : report.rows)
        rows += " m=" + std::to_string(row.m) + ":" + fmt(row.predicted, 8) + "/" + row.expected.get_str();
    r.detail = "norm ratio " + fmt(ratio.value, 12) + "; predicted/expected mean " + fmt(report.mean_scale(), 8) + ";" +
               rows;
    return r;
}

inline CriterionResult criterion_asymptotic_bound(VerificationContext&) {
    CriterionResult r{7, "m^4.5 |L_{Delta,m}(11)| <= d(m)/20 for m <= 300", false, "", 0, 60};
    const auto report = bound_scan(300);
    double worst = 0.0;
    std::int64_t at = 0;
    for (const auto& row : report.rows) {
        const double q = row.scaled / to_double(row.limit);
        if (q > worst) {
            worst = q;
            at = row.m;
        }
    }
    r.passed = report.passed() && report.rows.size() == 300;
    r.detail = "max ratio to d(m)/20 = " + fmt(worst, 6) + " at m=" + std::to_string(at) +
               (report.first_violation ? "; first violation m=" + std::to_string(*report.first_violation) : "");
    return r;
}

inline CriterionResult criterion_sign(VerificationContext&) {
    CriterionResult r{8, "sign L_{Delta,m}(11) = -sign tau(m) for m <= 1000", false, "", 0, 60};
    const auto report = sign_scan(1000);
    r.passed = report.passed() && report.rows.size() == 1000;
    r.detail = std::to_string(report.tau_sign_changes.size()) + " sign changes of tau, " +
               std::to_string(report.l_sign_changes.size()) + " of L" +
               (report.first_violation ? "; first violation m=" + std::to_string(*report.first_violation) : "");
    return r;
}

inline CriterionResult criterion_deligne(VerificationContext&) {
    CriterionResult r{9, "|tau(n)| <= d(n) n^5.5 (n <= 5000), |tau_{10,2}(n)| <= d(n) n^4.5 (n <= 2000)", false, "", 0, 60};
    const auto a = deligne_check(delta(5001), 12, 5000);
    const auto b = deligne_check(delta_10_2(2001), 10, 2000);
    r.passed = a.passed() && b.passed();
    r.detail = "Delta max ratio " + fmt(a.max_ratio, 6) + " at n=" + std::to_string(a.argmax) +
               "; Delta_10,2 max ratio " + fmt(b.max_ratio, 6) + " at n=" + std::to_string(b.argmax);
    return r;
}

inline CriterionResult criterion_beta(VerificationContext& ctx) {
    CriterionResult r{10, "c(m)/tau_{10,2}(m) for theta_10^* V_2 Delta constant for m <= 10 and = (5/2^9) norm ratio within 1%",
                      false, "", 0, 300};
    const auto ratio = ctx.norm_ratio();
    const double beta = 5.0 / 512.0 * ratio.value;
    const auto coeffs = adjoint_qexp_auto([](std::size_t p) { return qs_v_expand(delta(p), 2); }, 10, 2, 10,
                                          ctx.tau2_tolerance);
    const auto d10 = delta_10_2(12);
    std::vector<double> q, qerr;
    bool constant = true;
    for (const auto& c : coeffs.coeffs) {
        const double t = to_double(d10[static_cast<std::size_t>(c.m)]);
        const double v = c.value.convert_to<double>();
        if (t == 0.0) {
            if (!(std::abs(v) <= c.error_bound)) constant = false;
            continue;
        }
        q.push_back(v / t);
        qerr.push_back(c.error_bound / std::abs(t) + 1e-14 * std::abs(v / t));
    }
    double mean = 0.0;
    for (double x : q) mean += x;
    mean /= static_cast<double>(q.size());
    double spread = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        spread = std::max(spread, std::abs(q[i] - q.front()));
        if (std::abs(q[i] - q.front()) > qerr[i] + qerr.front()) constant = false;
    }
    const bool matches = relative_close(mean, beta, 0.01);
    r.passed = constant && matches;
    r.detail = std::string(constant ? "constant" : "not constant") + " (spread " + fmt(spread, 3) + "); c/tau = " +
               fmt(mean, 10) + ", (5/2^9) ratio = " + fmt(beta, 10) + ", quotient " + fmt(mean / beta, 8);
    return r;
}

inline QExpansion random_series(std::mt19937_64& rng, std::size_t prec) {
    std::uniform_int_distribution<int> num(-50, 50), den(1, 9);
    std::vector<Rational> c(prec);
    for (auto& x : c) x = make_rational(num(rng), den(rng));
    return QExpansion(std::move(c), 0, 1);
}

inline std::string ring_laws(std::mt19937_64& rng, int trials) {
    for (int t = 0; t < trials; ++t) {
        const auto a = random_series(rng, 40), b = random_series(rng, 40), c = random_series(rng, 40);
        if (!same_coefficients(a * b, b * a)) return "commutativity";
        if (!same_coefficients((a * b) * c, a * (b * c))) return "associativity";
        if (!same_coefficients(a * (b + c), a * b + a * c)) return "distributivity";
        if (!same_coefficients(qs_derive(a * b), qs_derive(a) * b + a * qs_derive(b))) return "Leibniz rule";
        for (std::int64_t s : {2, 3}) {
            if (!same_coefficients(qs_v_expand(a * b, s), qs_v_expand(a, s) * qs_v_expand(b, s)))
                return "V_t multiplicativity";
            if (!same_coefficients(qs_v_expand(qs_v_expand(a, s), 2), qs_v_expand(a, 2 * s))) return "V_s V_t = V_st";
            if (!same_coefficients(qs_derive(qs_v_expand(a, s)), make_rational(s) * qs_v_expand(qs_derive(a), s)))
                return "D V_t = t V_t D";
        }
    }
    return {};
}

/// max relative |Phi(gamma z) - Phi(z)| over random z for gamma in {T, (1 0; 2 1)}.
inline double phi_invariance(std::mt19937_64& rng, int points) {
    std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(0.35, 2.0);
    const std::vector<std::pair<FormSpec, FormSpec>> pairs{{recipes::delta_10_2(), recipes::delta_10_2()},
                                                           {recipes::delta(), recipes::v2delta()}};
    const std::vector<Mat2> gens{Mat2{1, 1, 0, 1}, Mat2{1, 0, 2, 1}};
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const ComplexPoint z(ux(rng), uy(rng));
        for (const auto& [f, g] : pairs) {
            const int k = f.weight();
            const Complex base = phi_invariant(f, g, k, z);
            for (const auto& gamma : gens) {
                const Complex moved = phi_invariant(f, g, k, ComplexPoint(gamma.apply(z.z())));
                const double scale = std::max({std::abs(base), std::abs(moved), 1e-300});
                worst = std::max(worst, std::abs(moved - base) / scale);
            }
        }
    }
    return worst;
}

inline CriterionResult criterion_properties(VerificationContext& ctx) {
    CriterionResult r{11, "ring/Leibniz/V laws, Phi invariance, level consistency of ||Delta||^2, CLI determinism", false,
                      "", 0, 120};
    std::mt19937_64 rng(ctx.seed);
    std::vector<std::string> parts;
    bool ok = true;

    const auto law = ring_laws(rng, 25);
    if (!law.empty()) ok = false;
    parts.push_back(law.empty() ? "laws ok" : "law failed: " + law);

    const double phi = phi_invariance(rng, 100);
    if (!(phi <= 1e-9)) ok = false;
    parts.push_back("Phi max rel dev " + fmt(phi, 3));

    const auto& n1 = ctx.delta_norm_level1();
    const auto& n2 = ctx.delta_norm_level2();
    const double gap = std::abs(n1.value.real() - n2.value.real());
    if (!(gap <= n1.est_error + n2.est_error)) ok = false;
    parts.push_back("||Delta||^2 N=1 " + fmt(n1.value.real(), 12) + " vs N=2 " + fmt(n2.value.real(), 12) + " (gap " +
                    fmt(gap, 2) + ", allowed " + fmt(n1.est_error + n2.est_error, 2) + ")");

    if (ctx.cli) {
        const std::vector<std::vector<std::string>> runs{
            {"qexp", "--form", "delta_10_2", "--prec", "30", "--output", "json"},
            {"lvalue", "--form", "delta", "--m", "7", "--s", "11", "--tol", "1e-12"},
            {"adjoint", "--form", "v2delta", "--k", "10", "--level", "2", "--mmax", "4", "--tol", "1e-10"},
            {"scan", "--kind", "sign", "--mmax", "50", "--output", "csv"},
            {"petersson", "--f", "delta", "--g", "v2delta", "--k", "12", "--level", "2", "--nodes", "32"}};
        bool same = true;
        for (const auto& args : runs) {
            const auto a = ctx.cli(args), b = ctx.cli(args);
            if (a.first != 0 || a != b || a.second.empty()) same = false;
        }
        if (!same) ok = false;
        parts.push_back(same ? "CLI output byte-identical across runs" : "CLI output differs between runs");
    } else {
        ok = false;
        parts.push_back("no CLI runner supplied");
    }
    r.passed = ok;
    for (std::size_t i = 0; i < parts.size(); ++i) r.detail += (i ? "; " : "") + parts[i];
    return r;
}

}  // namespace detail

inline constexpr int kCriterionCount = 11;

/// Runs one criterion, converting library errors into a FAIL with the message.
inline CriterionResult run_criterion(int id, VerificationContext& ctx) {
    using Fn = CriterionResult (*)(VerificationContext&);
    static constexpr Fn table[kCriterionCount] = {
        detail::criterion_decomposition,   detail::criterion_delta_annihilated, detail::criterion_l_identity,
        detail::criterion_adjoint_vanishing, detail::criterion_petersson_ratios, detail::criterion_tau2_round_trip,
        detail::criterion_asymptotic_bound, detail::criterion_sign,              detail::criterion_deligne,
        detail::criterion_beta,             detail::criterion_properties};
    if (id < 1 || id > kCriterionCount) throw DomainError("run_criterion: criterion id must be in 1..11");
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        r = table[id - 1](ctx);
    } catch (const Error& e) {
        r.id = id;
        r.passed = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.budget_seconds > 0 && r.seconds > r.budget_seconds) {
        r.passed = false;
        r.detail += "; exceeded runtime budget";
    }
    return r;
}

inline std::vector<CriterionResult> run_all_criteria(VerificationContext& ctx, const std::vector<int>& ids = {}) {
    std::vector<CriterionResult> out;
    if (ids.empty()) {
        for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id, ctx));
    } else {
        for (int id : ids) out.push_back(run_criterion(id, ctx));
    }
    return out;
}

}  // namespace serre
