#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "adjoint.hpp"
#include "errors.hpp"
#include "evaluation.hpp"
#include "form_spec.hpp"

namespace serre {

struct GaussLegendreRule {
    std::vector<double> nodes;  ///< on [-1, 1], ascending
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule by Newton iteration on P_n.
inline GaussLegendreRule gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: need at least one node");
    GaussLegendreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged root
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        if (n == 1) p0 = 1.0;
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = -x;
        rule.nodes[hi] = x;
        rule.weights[lo] = w;
        rule.weights[hi] = w;
    }
    return rule;
}

struct QuadratureOptions {
    int nodes = 64;          ///< Gauss-Legendre nodes per dimension
    double y_cutoff = 6.0;   ///< truncation height of the fundamental domain
    double eval_tol = 1e-16;
};

struct PeterssonEstimate {
    Complex value;
    double est_error = 0.0;     ///< |I_n - I_{n/2}| + cutoff tail + roundoff floor
    double cutoff_tail = 0.0;
    int nodes = 0;
    double y_cutoff = 0.0;
    std::int64_t level = 1;
    std::int64_t mu = 1;
};

/// Right coset representatives of Gamma_0(N) in SL_2(Z), N in {1, 2}.
inline std::vector<Mat2> coset_representatives(std::int64_t level) {
    if (level == 1) return {Mat2{}};
    if (level == 2) return {Mat2{}, Mat2{0, -1, 1, 0}, Mat2{0, -1, 1, 1}};
    throw UnsupportedSpace("Petersson quadrature supports Gamma_0(1) and Gamma_0(2) only");
}

/// f(z) conj(g(z)) y^k.
inline Complex phi_invariant(const FormSpec& f, const FormSpec& g, int k, const ComplexPoint& z, double tol = 1e-16) {
    const Complex fv = form_eval(f, z, tol);
    const Complex gv = (f == g) ? fv : form_eval(g, z, tol);
    return fv * std::conj(gv) * std::pow(z.y(), k);
}

namespace detail {

struct RawIntegral {
    Complex value;
    double abs_value = 0.0;
    double top_edge = 0.0;  ///< x-integral of |integrand| along y = y_cutoff
};

/// sum over cosets of the integral of Phi(gamma_j z) y^-2 over the truncated standard domain.
inline RawIntegral integrate_domain(const FormSpec& f, const FormSpec& g, int k, const std::vector<Mat2>& cosets,
                                    int nodes, double y_cutoff, double tol) {
    const auto rule = gauss_legendre(nodes);
    RawIntegral out;
    for (std::size_t ix = 0; ix < rule.nodes.size(); ++ix) {
        const double x = 0.5 * rule.nodes[ix];
        const double wx = 0.5 * rule.weights[ix];
        const double y_lo = std::sqrt(1.0 - x * x);
        const double half = 0.5 * (y_cutoff - y_lo);
        Complex column = 0.0;
        double column_abs = 0.0;
        for (std::size_t iy = 0; iy < rule.nodes.size(); ++iy) {
            const double y = y_lo + half * (rule.nodes[iy] + 1.0);
            const double w = wx * half * rule.weights[iy] / (y * y);
            for (const auto& gamma : cosets) {
                const Complex v = phi_invariant(f, g, k, ComplexPoint(gamma.apply({x, y})), tol);
                column += w * v;
                column_abs += w * std::abs(v);
            }
        }
        out.value += column;
        out.abs_value += column_abs;
        double edge = 0.0;
        for (const auto& gamma : cosets)
            edge += std::abs(phi_invariant(f, g, k, ComplexPoint(gamma.apply({x, y_cutoff})), tol));
        out.top_edge += wx * edge / (y_cutoff * y_cutoff);
    }
    return out;
}

}  // namespace detail

/// <f, g> = (1/mu) sum_j integral over F of f conj(g) y^k dx dy / y^2 at gamma_j z.
///
/// Tensor Gauss-Legendre on {|x| <= 1/2, sqrt(1-x^2) <= y <= Y}.  The error estimate is the
/// change from n/2 to n nodes, plus a cutoff tail that assumes decay no slower than e^{-pi y}
/// (cusp width <= 2 with one cusp form among f, g).
inline PeterssonEstimate petersson_inner(const FormSpec& f, const FormSpec& g, int k, std::int64_t level,
                                         const QuadratureOptions& opts = {}) {
    if (f.weight() != k || g.weight() != k) throw DomainError("petersson_inner: both forms must have weight k");
    if (level % f.level() != 0 || level % g.level() != 0)
        throw DomainError("petersson_inner: form level does not divide the group level");
    if (!f.is_cusp() && !g.is_cusp()) throw DomainError("petersson_inner: at least one form must be a cusp form");
    if (opts.nodes < 16) throw DomainError("petersson_inner: need at least 16 nodes per dimension");
    if (!(opts.y_cutoff > 1.0)) throw DomainError("petersson_inner: y_cutoff must exceed 1");
    const auto cosets = coset_representatives(level);
    const auto mu = static_cast<double>(cosets.size());

    const auto full = detail::integrate_domain(f, g, k, cosets, opts.nodes, opts.y_cutoff, opts.eval_tol);
    const auto half = detail::integrate_domain(f, g, k, cosets, opts.nodes / 2, opts.y_cutoff, opts.eval_tol);
    const auto quarter = detail::integrate_domain(f, g, k, cosets, opts.nodes / 4, opts.y_cutoff, opts.eval_tol);

    const double floor = 1e-13 * full.abs_value;
    const double diff = std::abs(full.value - half.value);
    const double prev = std::abs(half.value - quarter.value);
    if (diff > floor && diff > 0.5 * prev)
        throw QuadratureNotConverged("petersson_inner: node doubling from " + std::to_string(opts.nodes / 2) + " to " +
                                     std::to_string(opts.nodes) + " nodes did not halve the change");

    const double decay = std::max(M_PI - std::max(0, k - 2) / opts.y_cutoff, 0.5);
    PeterssonEstimate est;
    est.value = full.value / mu;
    est.cutoff_tail = full.top_edge / decay / mu;
    est.est_error = (diff + floor) / mu + est.cutoff_tail;
    est.nodes = opts.nodes;
    est.y_cutoff = opts.y_cutoff;
    est.level = level;
    est.mu = static_cast<std::int64_t>(cosets.size());
    return est;
}

/// ||Delta||^2 (on Gamma_0(1)) over ||Delta_{10,2}||^2 (on Gamma_0(2)), both 1/mu-normalized.
inline NormRatio norm_ratio_10_2(const QuadratureOptions& opts = {}) {
    const auto nd = petersson_inner(recipes::delta(), recipes::delta(), 12, 1, opts);
    const auto n10 = petersson_inner(recipes::delta_10_2(), recipes::delta_10_2(), 10, 2, opts);
    NormRatio r;
    r.value = nd.value.real() / n10.value.real();
    r.est_error = r.value * (nd.est_error / nd.value.real() + n10.est_error / n10.value.real());
    return r;
}

}  // namespace serre
