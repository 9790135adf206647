#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "forms.hpp"
#include "qseries.hpp"
#include "rational.hpp"

namespace serre {

/// Echelon basis of a cusp-form space: leading exponents strictly increase.
struct SpaceBasis {
    int weight = 0;
    std::int64_t level = 1;
    std::size_t dim = 0;
    std::vector<QExpansion> basis;

    std::vector<std::size_t> pivots() const {
        std::vector<std::size_t> out;
        for (const auto& b : basis) out.push_back(*b.leading_index());
        return out;
    }
};

/// Coefficients beyond the pivots that decompose() must also reproduce.
inline constexpr std::size_t kDecomposeGuard = 10;

inline bool is_supported_space(int k, std::int64_t level) {
    return (k == 12 && level == 1) || (k == 10 && level == 2) || (k == 12 && level == 2) || (k == 14 && level == 1);
}

/// S_12(1) = [Delta], S_10(2) = [Delta_{10,2}], S_12(2) = [Delta, V_2 Delta], S_14(1) = [].
inline SpaceBasis space_basis(int k, std::int64_t level, std::size_t prec = kDefaultPrecision) {
    SpaceBasis s;
    s.weight = k;
    s.level = level;
    if (k == 12 && level == 1) {
        s.basis = {delta(prec)};
    } else if (k == 10 && level == 2) {
        s.basis = {delta_10_2(prec)};
    } else if (k == 12 && level == 2) {
        s.basis = {delta(prec).with_metadata(12, 2, true, false), qs_v_expand(delta(prec), 2)};
    } else if (k == 14 && level == 1) {
        s.basis = {};
    } else {
        throw UnsupportedSpace("space_basis: S_" + std::to_string(k) + "(" + std::to_string(level) +
                               ") is not one of S_12(1), S_10(2), S_12(2), S_14(1)");
    }
    s.dim = s.basis.size();
    return s;
}

/// Exact coordinates of f in the basis, verified on every available coefficient.
inline std::vector<Rational> decompose(const QExpansion& f, const SpaceBasis& space) {
    if (f.weight() != space.weight)
        throw DomainError("decompose: form has weight " + std::to_string(f.weight()) + ", space has weight " +
                          std::to_string(space.weight));
    if (space.level % f.level() != 0)
        throw DomainError("decompose: form level " + std::to_string(f.level()) + " does not divide space level " +
                          std::to_string(space.level));
    const auto pivots = space.pivots();
    const std::size_t last_pivot = pivots.empty() ? 0 : pivots.back();
    const std::size_t need = std::max(space.dim + kDecomposeGuard, last_pivot + 1 + kDecomposeGuard);
    if (f.prec() < need)
        throw PrecisionExhausted("decompose: insufficient precision " + std::to_string(f.prec()) + " < " +
                                 std::to_string(need));
    for (const auto& b : space.basis)
        if (b.prec() < f.prec()) throw PrecisionExhausted("decompose: basis precision is below the form's");

    std::vector<Rational> coords;
    QExpansion residual = f.truncated(f.prec()).with_metadata(space.weight, space.level, f.is_cusp(), f.is_quasimodular());
    for (std::size_t i = 0; i < space.dim; ++i) {
        const QExpansion b = space.basis[i].truncated(f.prec());
        const Rational c = residual[pivots[i]] / b[pivots[i]];
        coords.push_back(c);
        if (c != 0) residual = qs_sub(residual, qs_scale(c, b.with_metadata(space.weight, space.level, true, false)));
    }
    for (std::size_t n = 0; n < residual.prec(); ++n)
        if (residual[n] != 0)
            throw NotInSpace("decompose: coefficient of q^" + std::to_string(n) + " is not reproduced by the basis");
    return coords;
}

inline std::vector<Rational> decompose(const QExpansion& f, int k, std::int64_t level) {
    return decompose(f, space_basis(k, level, f.prec()));
}

/// sum c_i basis_i.
inline QExpansion reconstruct(const std::vector<Rational>& coords, const SpaceBasis& space, std::size_t prec) {
    if (coords.size() != space.dim) throw DomainError("reconstruct: coordinate count does not match dimension");
    QExpansion out = QExpansion::zero(prec, space.weight, space.level).with_metadata(space.weight, space.level, true, false);
    for (std::size_t i = 0; i < space.dim; ++i)
        out = qs_add(out, qs_scale(coords[i], space.basis[i].truncated(prec).with_metadata(space.weight, space.level,
                                                                                         true, false)));
    return out;
}

}  // namespace serre
