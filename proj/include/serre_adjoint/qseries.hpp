#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "rational.hpp"

namespace serre {

/// Default number of known coefficients for formal computations.
inline constexpr std::size_t kDefaultPrecision = 512;

/// Truncated q-expansion sum_{n < prec} a(n) q^n with exact rational coefficients.
///
/// Values are immutable once built. `proven_bound` optionally records a constant C with
/// |a(n)| <= C * d(n) * n^((weight-1)/2) for every n, including the unknown ones; it is
/// carried through the linear operations and V_t and dropped by anything else.
class QExpansion {
public:
    QExpansion(std::vector<Rational> coeffs, int weight, std::int64_t level, bool cusp = false,
               bool quasimodular = false)
        : coeffs_(std::move(coeffs)), weight_(weight), level_(level), cusp_(cusp), quasimodular_(quasimodular) {
        if (coeffs_.empty()) throw DomainError("QExpansion: precision must be positive");
        if (level_ < 1) throw DomainError("QExpansion: level must be positive");
        if (cusp_ && coeffs_[0] != 0) throw DomainError("QExpansion: cusp form with nonzero constant term");
    }

    static QExpansion zero(std::size_t prec, int weight, std::int64_t level) {
        return QExpansion(std::vector<Rational>(prec, Rational(0)), weight, level, /*cusp=*/true);
    }

    static QExpansion constant(const Rational& c, std::size_t prec, int weight = 0, std::int64_t level = 1) {
        std::vector<Rational> v(prec, Rational(0));
        v[0] = c;
        return QExpansion(std::move(v), weight, level, c == 0);
    }

    std::size_t prec() const noexcept { return coeffs_.size(); }
    const std::vector<Rational>& coeffs() const noexcept { return coeffs_; }
    int weight() const noexcept { return weight_; }
    std::int64_t level() const noexcept { return level_; }
    bool is_cusp() const noexcept { return cusp_; }
    bool is_quasimodular() const noexcept { return quasimodular_; }
    const std::optional<double>& proven_bound() const noexcept { return proven_bound_; }

    const Rational& operator[](std::size_t n) const {
        if (n >= coeffs_.size())
            throw PrecisionExhausted("coefficient q^" + std::to_string(n) + " is beyond precision " +
                                     std::to_string(coeffs_.size()));
        return coeffs_[n];
    }

    bool is_zero() const {
        return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& c) { return c == 0; });
    }

    bool has_integral_coeffs() const {
        return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& c) { return c.get_den() == 1; });
    }

    /// Index of the first nonzero coefficient, if any.
    std::optional<std::size_t> leading_index() const {
        for (std::size_t n = 0; n < coeffs_.size(); ++n)
            if (coeffs_[n] != 0) return n;
        return std::nullopt;
    }

    QExpansion truncated(std::size_t prec) const {
        if (prec == 0) throw DomainError("QExpansion: precision must be positive");
        QExpansion out = *this;
        out.coeffs_.resize(std::min(prec, coeffs_.size()));
        return out;
    }

    QExpansion with_proven_bound(std::optional<double> c) const {
        QExpansion out = *this;
        out.proven_bound_ = c;
        return out;
    }

    QExpansion with_metadata(int weight, std::int64_t level, bool cusp, bool quasimodular) const {
        QExpansion out(coeffs_, weight, level, cusp, quasimodular);
        out.proven_bound_ = proven_bound_;
        return out;
    }

    /// Coefficients and metadata (the proven bound is an annotation, not part of the value).
    friend bool operator==(const QExpansion& a, const QExpansion& b) {
        return a.weight_ == b.weight_ && a.level_ == b.level_ && a.cusp_ == b.cusp_ &&
               a.quasimodular_ == b.quasimodular_ && a.coeffs_ == b.coeffs_;
    }

private:
    std::vector<Rational> coeffs_;
    int weight_;
    std::int64_t level_;
    bool cusp_;
    bool quasimodular_;
    std::optional<double> proven_bound_;
};

/// True when the two expansions agree on every coefficient both of them know.
inline bool same_coefficients(const QExpansion& f, const QExpansion& g) {
    const std::size_t p = std::min(f.prec(), g.prec());
    for (std::size_t n = 0; n < p; ++n)
        if (f.coeffs()[n] != g.coeffs()[n]) return false;
    return true;
}

namespace detail {

inline std::int64_t lcm_level(std::int64_t a, std::int64_t b) { return std::lcm(a, b); }

inline std::optional<double> sum_bounds(const std::optional<double>& a, const std::optional<double>& b) {
    if (a && b) return *a + *b;
    return std::nullopt;
}

/// Scales a rational vector by the lcm of its denominators so it becomes integral.
inline std::pair<std::vector<Integer>, Integer> clear_denominators(const std::vector<Rational>& v, std::size_t n) {
    Integer common = 1;
    for (std::size_t i = 0; i < n; ++i) mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), v[i].get_den_mpz_t());
    std::vector<Integer> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Integer factor;
        mpz_divexact(factor.get_mpz_t(), common.get_mpz_t(), v[i].get_den_mpz_t());
        out[i] = v[i].get_num() * factor;
    }
    return {std::move(out), common};
}

}  // namespace detail

inline QExpansion qs_add(const QExpansion& f, const QExpansion& g) {
    if (f.weight() != g.weight())
        throw DomainError("qs_add: weight mismatch (" + std::to_string(f.weight()) + " vs " +
                          std::to_string(g.weight()) + ")");
    const std::size_t p = std::min(f.prec(), g.prec());
    std::vector<Rational> c(p);
    for (std::size_t n = 0; n < p; ++n) c[n] = f.coeffs()[n] + g.coeffs()[n];
    QExpansion out(std::move(c), f.weight(), detail::lcm_level(f.level(), g.level()), f.is_cusp() && g.is_cusp(),
                   f.is_quasimodular() || g.is_quasimodular());
    return out.with_proven_bound(detail::sum_bounds(f.proven_bound(), g.proven_bound()));
}

inline QExpansion qs_scale(const Rational& a, const QExpansion& f) {
    std::vector<Rational> c(f.prec());
    for (std::size_t n = 0; n < f.prec(); ++n) c[n] = a * f.coeffs()[n];
    QExpansion out(std::move(c), f.weight(), f.level(), f.is_cusp(), f.is_quasimodular());
    if (f.proven_bound()) return out.with_proven_bound(*f.proven_bound() * std::abs(to_double(a)) * (1.0 + 1e-15));
    return out;
}

inline QExpansion qs_sub(const QExpansion& f, const QExpansion& g) { return qs_add(f, qs_scale(Rational(-1), g)); }

/// Cauchy product truncated to the smaller precision.
///
/// Both operands are brought to integer vectors over a common denominator so the inner
/// loop is a plain GMP multiply-accumulate that skips zero coefficients.
inline QExpansion qs_mul(const QExpansion& f, const QExpansion& g) {
    const std::size_t p = std::min(f.prec(), g.prec());
    auto [a, da] = detail::clear_denominators(f.coeffs(), p);
    auto [b, db] = detail::clear_denominators(g.coeffs(), p);
    std::vector<std::size_t> nz_b;
    for (std::size_t j = 0; j < p; ++j)
        if (b[j] != 0) nz_b.push_back(j);
    std::vector<Integer> acc(p, 0);
    for (std::size_t i = 0; i < p; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j : nz_b) {
            if (i + j >= p) break;
            mpz_addmul(acc[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
        }
    }
    const Integer den = da * db;
    std::vector<Rational> c(p);
    for (std::size_t n = 0; n < p; ++n) c[n] = make_rational(acc[n], den);
    return QExpansion(std::move(c), f.weight() + g.weight(), detail::lcm_level(f.level(), g.level()),
                      f.is_cusp() || g.is_cusp(), f.is_quasimodular() || g.is_quasimodular());
}

/// D = q d/dq; the result is only quasimodular.
inline QExpansion qs_derive(const QExpansion& f) {
    std::vector<Rational> c(f.prec());
    for (std::size_t n = 0; n < f.prec(); ++n) c[n] = Rational(static_cast<long>(n)) * f.coeffs()[n];
    return QExpansion(std::move(c), f.weight() + 2, f.level(), f.is_cusp(), /*quasimodular=*/true);
}

/// V_t f(z) = f(tz). Keeps prec = f.prec so nothing past the known range is reported.
inline QExpansion qs_v_expand(const QExpansion& f, std::int64_t t) {
    if (t < 1) throw DomainError("qs_v_expand: t must be >= 1");
    std::vector<Rational> c(f.prec(), Rational(0));
    const auto step = static_cast<std::size_t>(t);
    for (std::size_t n = 0; n * step < f.prec(); ++n) c[n * step] = f.coeffs()[n];
    QExpansion out(std::move(c), f.weight(), f.level() * t, f.is_cusp(), f.is_quasimodular());
    return out.with_proven_bound(f.proven_bound());
}

inline QExpansion operator+(const QExpansion& f, const QExpansion& g) { return qs_add(f, g); }
inline QExpansion operator-(const QExpansion& f, const QExpansion& g) { return qs_sub(f, g); }
inline QExpansion operator*(const QExpansion& f, const QExpansion& g) { return qs_mul(f, g); }
inline QExpansion operator*(const Rational& a, const QExpansion& f) { return qs_scale(a, f); }

// ---------------------------------------------------------------------------
// Serialization

/// Line-oriented form: a "# weight .. level .. prec .. cusp .. quasimodular .." header,
/// then one "n num/den" line per coefficient.
inline std::string to_text(const QExpansion& f) {
    std::ostringstream out;
    out << "# weight " << f.weight() << " level " << f.level() << " prec " << f.prec() << " cusp "
        << (f.is_cusp() ? 1 : 0) << " quasimodular " << (f.is_quasimodular() ? 1 : 0) << '\n';
    for (std::size_t n = 0; n < f.prec(); ++n) out << n << ' ' << to_fraction_string(f.coeffs()[n]) << '\n';
    return out.str();
}

inline QExpansion from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int weight = 0;
    std::int64_t level = 1;
    std::size_t prec = 0;
    int cusp = 0, quasi = 0;
    bool have_header = false;
    std::vector<Rational> coeffs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream h(line.substr(1));
            std::string key;
            while (h >> key) {
                if (key == "weight") h >> weight;
                else if (key == "level") h >> level;
                else if (key == "prec") h >> prec;
                else if (key == "cusp") h >> cusp;
                else if (key == "quasimodular") h >> quasi;
                else throw DomainError("from_text: unknown header key '" + key + "'");
            }
            have_header = true;
            continue;
        }
        std::istringstream row(line);
        std::size_t n = 0;
        std::string value;
        if (!(row >> n >> value)) throw DomainError("from_text: malformed line '" + line + "'");
        if (n != coeffs.size()) throw DomainError("from_text: coefficient indices must be consecutive from 0");
        coeffs.push_back(parse_rational(value));
    }
    if (!have_header) throw DomainError("from_text: missing header line");
    if (prec != coeffs.size()) throw DomainError("from_text: header prec does not match coefficient count");
    return QExpansion(std::move(coeffs), weight, level, cusp != 0, quasi != 0);
}

/// {weight, level, prec, cusp, quasimodular, coeffs: [[num, den], ...]}; integers are
/// decimal strings because they routinely exceed 64 bits.
inline nlohmann::json to_json(const QExpansion& f) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& c : f.coeffs()) coeffs.push_back({c.get_num().get_str(), c.get_den().get_str()});
    return {{"weight", f.weight()},   {"level", f.level()},
            {"prec", f.prec()},       {"cusp", f.is_cusp()},
            {"quasimodular", f.is_quasimodular()}, {"coeffs", std::move(coeffs)}};
}

inline QExpansion qexpansion_from_json(const nlohmann::json& j) {
    try {
        std::vector<Rational> coeffs;
        for (const auto& pair : j.at("coeffs")) {
            if (!pair.is_array() || pair.size() != 2) throw DomainError("coefficient must be [num, den]");
            auto part = [](const nlohmann::json& v) {
                return v.is_string() ? parse_integer(v.get<std::string>()) : Integer(v.get<long>());
            };
            coeffs.push_back(make_rational(part(pair[0]), part(pair[1])));
        }
        if (j.at("prec").get<std::size_t>() != coeffs.size())
            throw DomainError("prec does not match coefficient count");
        return QExpansion(std::move(coeffs), j.at("weight").get<int>(), j.at("level").get<std::int64_t>(),
                          j.value("cusp", false), j.value("quasimodular", false));
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("qexpansion_from_json: ") + e.what());
    }
}

}  // namespace serre
