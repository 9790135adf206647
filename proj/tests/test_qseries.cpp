#include <gtest/gtest.h>

#include <random>

#include "serre_adjoint/forms.hpp"
#include "serre_adjoint/qseries.hpp"

using namespace serre;

namespace {

QExpansion series(std::initializer_list<int> c, int weight = 0) {
    std::vector<Rational> v;
    for (int x : c) v.emplace_back(x);
    return QExpansion(std::move(v), weight, 1);
}

QExpansion random_series(std::mt19937_64& rng, std::size_t prec) {
    std::uniform_int_distribution<int> num(-30, 30), den(1, 7);
    std::vector<Rational> v(prec);
    for (auto& x : v) x = make_rational(num(rng), den(rng));
    return QExpansion(std::move(v), 0, 1);
}

}  // namespace

TEST(QExpansion, Invariants) {
    EXPECT_THROW(QExpansion({}, 0, 1), DomainError);
    EXPECT_THROW(QExpansion({Rational(1)}, 0, 0), DomainError);
    EXPECT_THROW(QExpansion({Rational(1), Rational(2)}, 12, 1, true), DomainError);
    EXPECT_THROW(series({1, 2})[2], PrecisionExhausted);
}

TEST(QExpansion, Addition) {
    EXPECT_TRUE(same_coefficients(series({1, 1, 0}) + series({1, -1, 0}), series({2, 0, 0})));
    const auto e4 = eisenstein(4, 30);
    EXPECT_TRUE(same_coefficients(e4 + QExpansion::zero(30, 4, 1), e4));
    EXPECT_TRUE((e4 + make_rational(-1) * e4).is_zero());
    EXPECT_THROW(eisenstein(4, 10) + eisenstein(6, 10), DomainError);
}

TEST(QExpansion, PrecisionIsMinimumOfOperands) {
    const auto a = series({1, 2, 3, 4, 5}), b = series({1, 1, 1});
    EXPECT_EQ((a + b).prec(), 3u);
    EXPECT_EQ((a * b).prec(), 3u);
}

TEST(QExpansion, Multiplication) {
    EXPECT_TRUE(same_coefficients(series({1, 1, 0, 0}) * series({1, -1, 0, 0}), series({1, 0, -1, 0})));
    EXPECT_TRUE(same_coefficients(series({0, 1, 0, 0}) * series({0, 1, 0, 0}), series({0, 0, 1, 0})));
    const auto p = delta_8_2(10) * level2_weight2(10);
    EXPECT_EQ(p[2], 16);
}

TEST(QExpansion, MetadataPropagation) {
    const auto p = delta_8_2(10) * level2_weight2(10);
    EXPECT_EQ(p.weight(), 10);
    EXPECT_EQ(p.level(), 2);
    EXPECT_TRUE(p.is_cusp());
    EXPECT_EQ((delta(10) + qs_v_expand(delta(10), 2)).level(), 2);
}

TEST(QExpansion, Derivative) {
    EXPECT_TRUE(qs_derive(QExpansion::constant(Rational(1), 8)).is_zero());
    EXPECT_TRUE(same_coefficients(qs_derive(series({0, 1, 0})), series({0, 1, 0})));
    EXPECT_EQ(qs_derive(delta(10))[2], -48);
    EXPECT_TRUE(qs_derive(delta(10)).is_quasimodular());
}

TEST(QExpansion, VOperator) {
    const auto d = delta(20);
    EXPECT_TRUE(same_coefficients(qs_v_expand(d, 1), d));
    const auto v = qs_v_expand(d, 2);
    EXPECT_EQ(v[2], 1);
    EXPECT_EQ(v[3], 0);
    EXPECT_EQ(v[4], -24);
    EXPECT_EQ(v.prec(), 20u);
    EXPECT_THROW(qs_v_expand(d, 0), DomainError);
}

TEST(QExpansionProperties, RingLeibnizAndV) {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
        const auto f = random_series(rng, 30), g = random_series(rng, 30), h = random_series(rng, 30);
        EXPECT_TRUE(same_coefficients((f + g) * h, f * h + g * h));
        EXPECT_TRUE(same_coefficients(f * g, g * f));
        EXPECT_TRUE(same_coefficients(qs_derive(f * g), qs_derive(f) * g + f * qs_derive(g)));
        EXPECT_TRUE(same_coefficients(qs_v_expand(f * g, 3), qs_v_expand(f, 3) * qs_v_expand(g, 3)));
        EXPECT_TRUE(same_coefficients(qs_v_expand(qs_v_expand(f, 2), 3), qs_v_expand(f, 6)));
        EXPECT_TRUE(same_coefficients(qs_derive(qs_v_expand(f, 2)), make_rational(2) * qs_v_expand(qs_derive(f), 2)));
    }
}

TEST(Serialization, TextRoundTrip) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 10; ++t) {
        const auto f = random_series(rng, 25);
        EXPECT_EQ(from_text(to_text(f)), f);
    }
    const auto d = delta_10_2(40);
    EXPECT_EQ(from_text(to_text(d)), d);
}

TEST(Serialization, JsonRoundTrip) {
    const auto d = serre_derivative(delta_10_2(40), 10);
    EXPECT_EQ(qexpansion_from_json(to_json(d)), d);
    const auto big = delta(400);
    EXPECT_EQ(qexpansion_from_json(nlohmann::json::parse(to_json(big).dump())), big);
}

TEST(Serialization, Rejects) {
    EXPECT_THROW(from_text("0 1/1\n"), DomainError);
    EXPECT_THROW(from_text("# weight 0 level 1 prec 2 cusp 0 quasimodular 0\n0 1\n2 3\n"), DomainError);
    EXPECT_THROW(from_text("# weight 0 level 1 prec 3 cusp 0 quasimodular 0\n0 1\n"), DomainError);
    EXPECT_THROW(qexpansion_from_json(nlohmann::json{{"weight", 0}}), DomainError);
}
