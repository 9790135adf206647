#pragma once

#include <cctype>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "forms.hpp"
#include "qseries.hpp"
#include "rational.hpp"

namespace serre {

/// Symbolic recipe for a modular form, usable both for q-expansion and for point evaluation.
class FormSpec {
public:
    enum class Kind { eisenstein, eta_quotient, product, scaled, v_shift, linear_combination, serre };

    static FormSpec eisenstein(int k) {
        if (k < 2 || k % 2 != 0) throw DomainError("FormSpec::eisenstein: k must be even and >= 2");
        FormSpec s(Kind::eisenstein);
        s.param_ = k;
        s.weight_ = k;
        s.e2_defect_ = (k == 2) ? Rational(1) : Rational(0);
        return s;
    }

    static FormSpec eta_quotient(std::vector<EtaFactor> factors) {
        FormSpec s(Kind::eta_quotient);
        std::int64_t order24 = 0, sum = 0;
        for (const auto& [d, r] : factors) {
            if (d < 1) throw DomainError("FormSpec::eta_quotient: divisors must be positive");
            order24 += d * r;
            sum += r;
            s.level_ = std::lcm(s.level_, d);
        }
        if (order24 % 24 != 0) throw DomainError("FormSpec::eta_quotient: fractional leading exponent");
        if (order24 < 0) throw DomainError("FormSpec::eta_quotient: negative leading exponent");
        if (sum % 2 != 0) throw DomainError("FormSpec::eta_quotient: half-integral weight is not supported");
        s.weight_ = static_cast<int>(sum / 2);
        s.cusp_ = order24 > 0;
        s.eta_ = std::move(factors);
        return s;
    }

    static FormSpec product(std::vector<FormSpec> factors) {
        if (factors.empty()) throw DomainError("FormSpec::product: needs at least one factor");
        FormSpec s(Kind::product);
        s.weight_ = 0;
        for (const auto& f : factors) {
            s.weight_ += f.weight_;
            s.level_ = std::lcm(s.level_, f.level_);
            s.cusp_ = s.cusp_ || f.cusp_;
            if (f.is_quasimodular()) s.untracked_quasi_ = true;
        }
        s.children_ = std::move(factors);
        return s;
    }

    static FormSpec scaled(const Rational& c, FormSpec form) {
        FormSpec s(Kind::scaled);
        s.weight_ = form.weight_;
        s.level_ = form.level_;
        s.cusp_ = form.cusp_;
        s.e2_defect_ = c * form.e2_defect_;
        s.untracked_quasi_ = form.untracked_quasi_;
        s.scalars_ = {c};
        s.children_ = {std::move(form)};
        return s;
    }

    static FormSpec v_shift(std::int64_t t, FormSpec form) {
        if (t < 1) throw DomainError("FormSpec::v_shift: t must be >= 1");
        FormSpec s(Kind::v_shift);
        s.param_ = t;
        s.weight_ = form.weight_;
        s.level_ = form.level_ * t;
        s.cusp_ = form.cusp_;
        // E_2(tz) has completion E_2(tz) - 3/(pi t y): the correction scales by 1/t.
        s.e2_defect_ = form.e2_defect_ / Rational(static_cast<long>(t));
        s.untracked_quasi_ = form.untracked_quasi_;
        s.children_ = {std::move(form)};
        return s;
    }

    static FormSpec linear_combination(std::vector<std::pair<Rational, FormSpec>> terms) {
        if (terms.empty()) throw DomainError("FormSpec::linear_combination: needs at least one term");
        FormSpec s(Kind::linear_combination);
        s.weight_ = terms.front().second.weight_;
        s.cusp_ = true;
        s.e2_defect_ = 0;
        for (auto& [c, f] : terms) {
            if (f.weight_ != s.weight_) throw DomainError("FormSpec::linear_combination: weight mismatch");
            s.level_ = std::lcm(s.level_, f.level_);
            s.cusp_ = s.cusp_ && (f.cusp_ || c == 0);
            s.e2_defect_ += c * f.e2_defect_;
            s.untracked_quasi_ = s.untracked_quasi_ || f.untracked_quasi_;
            s.scalars_.push_back(c);
            s.children_.push_back(std::move(f));
        }
        return s;
    }

    static FormSpec serre(FormSpec form, int k) {
        if (form.weight_ != k)
            throw DomainError("FormSpec::serre: operator weight " + std::to_string(k) + " does not match form weight " +
                              std::to_string(form.weight_));
        FormSpec s(Kind::serre);
        s.param_ = k;
        s.weight_ = k + 2;
        s.level_ = form.level_;
        s.cusp_ = form.cusp_;
        s.untracked_quasi_ = form.is_quasimodular();
        s.children_ = {std::move(form)};
        return s;
    }

    Kind kind() const noexcept { return kind_; }
    int weight() const noexcept { return weight_; }
    std::int64_t level() const noexcept { return level_; }
    bool is_cusp() const noexcept { return cusp_; }
    bool is_quasimodular() const { return untracked_quasi_ || e2_defect_ != 0; }

    /// k for eisenstein/serre, t for v_shift.
    std::int64_t param() const noexcept { return param_; }
    const std::vector<EtaFactor>& eta_factors() const noexcept { return eta_; }
    const std::vector<FormSpec>& children() const noexcept { return children_; }
    const std::vector<Rational>& scalars() const noexcept { return scalars_; }

    friend bool operator==(const FormSpec& a, const FormSpec& b) {
        return a.kind_ == b.kind_ && a.param_ == b.param_ && a.eta_ == b.eta_ && a.scalars_ == b.scalars_ &&
               a.children_ == b.children_;
    }

private:
    explicit FormSpec(Kind kind) : kind_(kind) {}

    Kind kind_;
    std::int64_t param_ = 0;
    std::vector<EtaFactor> eta_;
    std::vector<Rational> scalars_;
    std::vector<FormSpec> children_;
    int weight_ = 0;
    std::int64_t level_ = 1;
    bool cusp_ = false;
    Rational e2_defect_ = 0;        ///< coefficient of the E_2 non-modular correction
    bool untracked_quasi_ = false;  ///< quasimodular in a way the defect does not capture
};

namespace recipes {

inline FormSpec delta() { return FormSpec::eta_quotient({{1, 24}}); }
inline FormSpec delta_8_2() { return FormSpec::eta_quotient({{1, 8}, {2, 8}}); }
inline FormSpec x2() {
    return FormSpec::linear_combination(
        {{Rational(2), FormSpec::v_shift(2, FormSpec::eisenstein(2))}, {Rational(-1), FormSpec::eisenstein(2)}});
}
inline FormSpec delta_10_2() { return FormSpec::product({delta_8_2(), x2()}); }
inline FormSpec v2delta() { return FormSpec::v_shift(2, delta()); }

}  // namespace recipes

/// q-expansion of a recipe; the named forms go through their dedicated constructors.
inline QExpansion expand(const FormSpec& spec, std::size_t prec = kDefaultPrecision) {
    if (spec == recipes::delta()) return delta(prec);
    if (spec == recipes::delta_10_2()) return delta_10_2(prec);
    if (spec == recipes::x2()) return level2_weight2(prec);
    QExpansion out = [&]() -> QExpansion {
        switch (spec.kind()) {
            case FormSpec::Kind::eisenstein: return serre::eisenstein(static_cast<int>(spec.param()), prec);
            case FormSpec::Kind::eta_quotient: return serre::eta_quotient(spec.eta_factors(), prec);
            case FormSpec::Kind::product: {
                QExpansion acc = expand(spec.children().front(), prec);
                for (std::size_t i = 1; i < spec.children().size(); ++i) acc = acc * expand(spec.children()[i], prec);
                return acc;
            }
            case FormSpec::Kind::scaled: return qs_scale(spec.scalars().front(), expand(spec.children().front(), prec));
            case FormSpec::Kind::v_shift: return qs_v_expand(expand(spec.children().front(), prec), spec.param());
            case FormSpec::Kind::linear_combination: {
                QExpansion acc = qs_scale(spec.scalars().front(), expand(spec.children().front(), prec));
                for (std::size_t i = 1; i < spec.children().size(); ++i)
                    acc = acc + qs_scale(spec.scalars()[i], expand(spec.children()[i], prec));
                return acc;
            }
            case FormSpec::Kind::serre:
                return serre_derivative(expand(spec.children().front(), prec), static_cast<int>(spec.param()));
        }
        throw DomainError("expand: unknown recipe kind");
    }();
    if (spec.is_cusp() && prec > 0 && out.coeffs()[0] != 0)
        throw ComputationError("expand: recipe flagged cusp but constant term is nonzero");
    return out.with_metadata(spec.weight(), spec.level(), spec.is_cusp(), spec.is_quasimodular());
}

// ---------------------------------------------------------------------------
// JSON recipe

inline const char* kind_name(FormSpec::Kind kind) {
    switch (kind) {
        case FormSpec::Kind::eisenstein: return "eisenstein";
        case FormSpec::Kind::eta_quotient: return "eta_quotient";
        case FormSpec::Kind::product: return "product";
        case FormSpec::Kind::scaled: return "scaled";
        case FormSpec::Kind::v_shift: return "v_shift";
        case FormSpec::Kind::linear_combination: return "linear_combination";
        case FormSpec::Kind::serre: return "serre";
    }
    return "?";
}

inline nlohmann::json to_json(const FormSpec& spec) {
    nlohmann::json j = {{"kind", kind_name(spec.kind())},
                        {"weight", spec.weight()},
                        {"level", spec.level()},
                        {"is_cusp", spec.is_cusp()}};
    switch (spec.kind()) {
        case FormSpec::Kind::eisenstein: j["k"] = spec.param(); break;
        case FormSpec::Kind::eta_quotient: {
            auto arr = nlohmann::json::array();
            for (const auto& f : spec.eta_factors()) arr.push_back({f.d, f.r});
            j["factors"] = arr;
            break;
        }
        case FormSpec::Kind::product: {
            auto arr = nlohmann::json::array();
            for (const auto& c : spec.children()) arr.push_back(to_json(c));
            j["factors"] = arr;
            break;
        }
        case FormSpec::Kind::scaled:
            j["scalar"] = to_display_string(spec.scalars().front());
            j["form"] = to_json(spec.children().front());
            break;
        case FormSpec::Kind::v_shift:
            j["t"] = spec.param();
            j["form"] = to_json(spec.children().front());
            break;
        case FormSpec::Kind::linear_combination: {
            auto arr = nlohmann::json::array();
            for (std::size_t i = 0; i < spec.children().size(); ++i)
                arr.push_back({to_display_string(spec.scalars()[i]), to_json(spec.children()[i])});
            j["terms"] = arr;
            break;
        }
        case FormSpec::Kind::serre:
            j["k"] = spec.param();
            j["form"] = to_json(spec.children().front());
            break;
    }
    return j;
}

inline FormSpec form_spec_from_json(const nlohmann::json& j) {
    try {
        const auto kind = j.at("kind").get<std::string>();
        auto scalar = [](const nlohmann::json& v) {
            return v.is_string() ? parse_rational(v.get<std::string>()) : Rational(v.get<long>());
        };
        FormSpec out = [&]() {
            if (kind == "eisenstein") return FormSpec::eisenstein(j.at("k").get<int>());
            if (kind == "eta_quotient") {
                std::vector<EtaFactor> f;
                for (const auto& p : j.at("factors")) f.push_back({p.at(0).get<std::int64_t>(), p.at(1).get<std::int64_t>()});
                return FormSpec::eta_quotient(std::move(f));
            }
            if (kind == "product") {
                std::vector<FormSpec> f;
                for (const auto& c : j.at("factors")) f.push_back(form_spec_from_json(c));
                return FormSpec::product(std::move(f));
            }
            if (kind == "scaled") return FormSpec::scaled(scalar(j.at("scalar")), form_spec_from_json(j.at("form")));
            if (kind == "v_shift") return FormSpec::v_shift(j.at("t").get<std::int64_t>(), form_spec_from_json(j.at("form")));
            if (kind == "linear_combination") {
                std::vector<std::pair<Rational, FormSpec>> terms;
                for (const auto& t : j.at("terms")) terms.emplace_back(scalar(t.at(0)), form_spec_from_json(t.at(1)));
                return FormSpec::linear_combination(std::move(terms));
            }
            if (kind == "serre") return FormSpec::serre(form_spec_from_json(j.at("form")), j.at("k").get<int>());
            throw DomainError("unknown recipe kind '" + kind + "'");
        }();
        if (j.contains("weight") && j["weight"].get<int>() != out.weight())
            throw DomainError("recipe weight does not match its construction");
        if (j.contains("level") && j["level"].get<std::int64_t>() != out.level())
            throw DomainError("recipe level does not match its construction");
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("form_spec_from_json: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Expression language:
//   delta | delta_8_2 | delta_10_2 | v2delta | x2 | e2
//   eisenstein(k) | v(t, F) | serre(F, k) | scale(c, F) | add(F, G, ...) | mul(F, G, ...)
//   eta(d:r, d:r, ...)

namespace detail {

class ExpressionParser {
public:
    explicit ExpressionParser(std::string_view text) : text_(text) {}

    FormSpec parse() {
        FormSpec f = form();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw DomainError("form expression '" + std::string(text_) + "': " + what + " at offset " +
                          std::to_string(pos_));
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    std::string identifier() {
        skip_space();
        const auto start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        if (start == pos_) fail("expected a form name");
        return std::string(text_.substr(start, pos_ - start));
    }

    std::string number_token() {
        skip_space();
        const auto start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-' || text_[pos_] == '+' ||
                text_[pos_] == '/'))
            ++pos_;
        if (start == pos_) fail("expected a number");
        return std::string(text_.substr(start, pos_ - start));
    }

    std::int64_t integer() {
        const auto tok = number_token();
        try {
            std::size_t used = 0;
            const auto v = std::stoll(tok, &used);
            if (used != tok.size()) fail("expected an integer");
            return v;
        } catch (const std::logic_error&) {
            fail("expected an integer");
        }
    }

    FormSpec form() {
        const auto name = identifier();
        if (name == "delta") return recipes::delta();
        if (name == "delta_8_2") return recipes::delta_8_2();
        if (name == "delta_10_2") return recipes::delta_10_2();
        if (name == "v2delta") return recipes::v2delta();
        if (name == "x2") return recipes::x2();
        if (name == "e2") return FormSpec::eisenstein(2);
        expect('(');
        FormSpec out = [&]() {
            if (name == "eisenstein") return FormSpec::eisenstein(static_cast<int>(integer()));
            if (name == "v") {
                const auto t = integer();
                expect(',');
                return FormSpec::v_shift(t, form());
            }
            if (name == "serre") {
                auto f = form();
                expect(',');
                return FormSpec::serre(std::move(f), static_cast<int>(integer()));
            }
            if (name == "scale") {
                const auto c = parse_rational(number_token());
                expect(',');
                return FormSpec::scaled(c, form());
            }
            if (name == "add" || name == "mul") {
                std::vector<FormSpec> parts{form()};
                while (accept(',')) parts.push_back(form());
                if (name == "mul") return FormSpec::product(std::move(parts));
                std::vector<std::pair<Rational, FormSpec>> terms;
                for (auto& p : parts) terms.emplace_back(Rational(1), std::move(p));
                return FormSpec::linear_combination(std::move(terms));
            }
            if (name == "eta") {
                std::vector<EtaFactor> factors;
                do {
                    const auto d = integer();
                    expect(':');
                    factors.push_back({d, integer()});
                } while (accept(','));
                return FormSpec::eta_quotient(std::move(factors));
            }
            fail("unknown form '" + name + "'");
        }();
        expect(')');
        return out;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline FormSpec parse_form(std::string_view text) { return detail::ExpressionParser(text).parse(); }

}  // namespace serre
