#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "arithmetic.hpp"
#include "errors.hpp"
#include "form_spec.hpp"
#include "rational.hpp"

namespace serre {

using Complex = std::complex<double>;

/// z = x + iy in the upper half-plane.
class ComplexPoint {
public:
    ComplexPoint(double x, double y) : x_(x), y_(y) {
        if (!(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
            throw DomainError("ComplexPoint: imaginary part must be positive and finite");
    }
    explicit ComplexPoint(Complex z) : ComplexPoint(z.real(), z.imag()) {}

    double x() const noexcept { return x_; }
    double y() const noexcept { return y_; }
    Complex z() const noexcept { return {x_, y_}; }

private:
    double x_;
    double y_;
};

/// Integer 2x2 matrix acting by Moebius transformations.
struct Mat2 {
    std::int64_t a = 1, b = 0, c = 0, d = 1;

    Complex apply(Complex z) const {
        return (static_cast<double>(a) * z + static_cast<double>(b)) / (static_cast<double>(c) * z + static_cast<double>(d));
    }
    Complex automorphy(Complex z) const { return static_cast<double>(c) * z + static_cast<double>(d); }

    friend Mat2 operator*(const Mat2& l, const Mat2& r) {
        return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
    }
};

/// Below this height the q-series are not used; points are first moved up by T/S words.
inline constexpr double kSeriesMinHeight = 0.5;

struct ReductionStep {
    enum class Kind { translate, invert } kind;
    std::int64_t shift = 0;  ///< z -> z - shift (translate)
    Complex after;           ///< point after the step
};

struct Reduction {
    Complex z;   ///< reduced point, Im z >= y_min
    Mat2 gamma;  ///< reduced = gamma * original
    std::vector<ReductionStep> steps;
};

/// Moves z to |Re z| <= 1/2, Im z >= y_min using translations and z -> -1/z.
inline Reduction reduce_point(Complex z, double y_min = kSeriesMinHeight) {
    if (!(z.imag() > 0.0)) throw DomainError("reduce_point: point is not in the upper half-plane");
    Reduction r{z, Mat2{}, {}};
    for (int guard = 0; guard < 4096; ++guard) {
        const auto n = static_cast<std::int64_t>(std::llround(r.z.real()));
        if (n != 0) {
            r.z -= static_cast<double>(n);
            r.gamma = Mat2{1, -n, 0, 1} * r.gamma;
            r.steps.push_back({ReductionStep::Kind::translate, n, r.z});
        }
        if (r.z.imag() >= y_min) return r;
        // |Re z| <= 1/2 and Im z < 1/2 give |z| < 1, so inversion strictly raises Im z.
        r.z = -1.0 / r.z;
        r.gamma = Mat2{0, -1, 1, 0} * r.gamma;
        r.steps.push_back({ReductionStep::Kind::invert, 0, r.z});
    }
    throw ComputationError("reduce_point: reduction did not terminate");
}

namespace detail {

inline Complex q_power(Complex z, double exponent) {
    return std::exp(Complex(0.0, 2.0 * M_PI * exponent) * z);
}

inline Complex eta_series(Complex z, double tol) {
    Complex sum = 1.0;
    for (std::int64_t j = 1;; ++j) {
        const Complex t1 = q_power(z, static_cast<double>(j * (3 * j - 1) / 2));
        const Complex t2 = q_power(z, static_cast<double>(j * (3 * j + 1) / 2));
        sum += (j % 2 == 0 ? 1.0 : -1.0) * (t1 + t2);
        if (std::abs(t1) < tol) break;
    }
    return q_power(z, 1.0 / 24.0) * sum;
}

/// 1 - (2k/B_k) sum sigma_{k-1}(n) q^n, summed until the terms fall below tol.
inline Complex eisenstein_series(int k, Complex z, double tol) {
    const double scale = -2.0 * k / to_double(bernoulli(k));
    const Complex q = q_power(z, 1.0);
    Complex sum = 1.0, qn = 1.0;
    for (std::int64_t n = 1; n < 100000; ++n) {
        qn *= q;
        double sigma = 0.0;
        for (std::int64_t d = 1; d <= n; ++d)
            if (n % d == 0) sigma += std::pow(static_cast<double>(d), k - 1);
        const Complex term = scale * sigma * qn;
        sum += term;
        if (std::abs(term) < tol * std::max(1.0, std::abs(sum)) && std::abs(qn) * std::pow(n, k) < tol) break;
    }
    return sum;
}

}  // namespace detail

/// Dedekind eta, tracking eta(z+1) = e^{i pi/12} eta(z) and eta(-1/z) = sqrt(-iz) eta(z).
inline Complex eta_eval(const ComplexPoint& p, double tol = 1e-16) {
    const auto r = reduce_point(p.z());
    Complex multiplier = 1.0;
    for (const auto& step : r.steps) {
        if (step.kind == ReductionStep::Kind::translate)
            multiplier *= std::exp(Complex(0.0, M_PI * static_cast<double>(step.shift) / 12.0));
        else
            multiplier *= std::sqrt(Complex(0.0, -1.0) * step.after);
    }
    return multiplier * detail::eta_series(r.z, tol);
}

/// E_2 via its series above y_min and E_2(-1/z) = z^2 E_2(z) - 6iz/pi below.
inline Complex e2_eval(const ComplexPoint& p, double tol = 1e-16) {
    const auto r = reduce_point(p.z());
    Complex value = detail::eisenstein_series(2, r.z, tol);
    for (auto it = r.steps.rbegin(); it != r.steps.rend(); ++it) {
        if (it->kind == ReductionStep::Kind::invert) {
            const Complex w = it->after;
            value = w * w * value - Complex(0.0, 6.0 / M_PI) * w;
        }
    }
    return value;
}

/// E_k for even k >= 4 using E_k(gamma z) = (cz+d)^k E_k(z).
inline Complex eisenstein_eval(int k, const ComplexPoint& p, double tol = 1e-16) {
    if (k == 2) return e2_eval(p, tol);
    if (k < 4 || k % 2 != 0) throw DomainError("eisenstein_eval: k must be even and >= 2");
    const auto r = reduce_point(p.z());
    return detail::eisenstein_series(k, r.z, tol) / std::pow(r.gamma.automorphy(p.z()), k);
}

/// Value of a recipe at z. Serre-derivative recipes need derivatives and are rejected.
inline Complex form_eval(const FormSpec& spec, const ComplexPoint& p, double tol = 1e-16) {
    switch (spec.kind()) {
        case FormSpec::Kind::eisenstein: return eisenstein_eval(static_cast<int>(spec.param()), p, tol);
        case FormSpec::Kind::eta_quotient: {
            Complex v = 1.0;
            for (const auto& [d, r] : spec.eta_factors())
                v *= std::pow(eta_eval(ComplexPoint(p.z() * static_cast<double>(d)), tol), static_cast<int>(r));
            return v;
        }
        case FormSpec::Kind::product: {
            Complex v = 1.0;
            for (const auto& c : spec.children()) v *= form_eval(c, p, tol);
            return v;
        }
        case FormSpec::Kind::scaled:
            return to_double(spec.scalars().front()) * form_eval(spec.children().front(), p, tol);
        case FormSpec::Kind::v_shift:
            return form_eval(spec.children().front(), ComplexPoint(p.z() * static_cast<double>(spec.param())), tol);
        case FormSpec::Kind::linear_combination: {
            Complex v = 0.0;
            for (std::size_t i = 0; i < spec.children().size(); ++i)
                v += to_double(spec.scalars()[i]) * form_eval(spec.children()[i], p, tol);
            return v;
        }
        case FormSpec::Kind::serre:
            throw DomainError("form_eval: Serre-derivative recipes cannot be evaluated pointwise");
    }
    throw DomainError("form_eval: unknown recipe kind");
}

}  // namespace serre
