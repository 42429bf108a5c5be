#include <gtest/gtest.h>

#include <random>

#include "chainlab/series.hpp"

using namespace chainlab;

namespace {

WeightedSeries random_series(std::mt19937& rng, int max_deg) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> e(0, max_deg);
    WeightedSeries s;
    for (int i = 0; i < 8; ++i) s.add_term({e(rng) / 2, e(rng), e(rng)}, {u(rng), u(rng)});
    return s;
}

} // namespace

TEST(Series, MonomialProduct) {
    const auto z = WeightedSeries::monomial({0, 1, 0});
    const auto zb = WeightedSeries::monomial({0, 0, 1});
    const auto p = z * zb;
    EXPECT_EQ(p.size(), 1u);
    EXPECT_EQ(p.coeff({0, 1, 1}), cplx(1.0));
}

TEST(Series, ProductKeptAtTruncationBoundary) {
    const double a = 0.7;
    const WeightedSeries abs2({{{0, 1, 1}, 1.0}}, 6);
    const WeightedSeries quartic({{{0, 1, 3}, a}, {{0, 3, 1}, a}}, 6);
    const auto p = abs2 * quartic; // 2a |z|^4 Re z^2 in weighted degree 6
    EXPECT_EQ(p.truncation_order(), 6);
    EXPECT_EQ(p.coeff({0, 2, 4}), cplx(a));
    EXPECT_EQ(p.coeff({0, 4, 2}), cplx(a));
}

TEST(Series, ProductAboveTruncationVanishes) {
    const WeightedSeries a({{{0, 3, 0}, 1.0}}, 6);
    const WeightedSeries b({{{0, 0, 4}, 1.0}}, 6);
    EXPECT_TRUE((a * b).empty());
}

TEST(Series, ConstructorDropsHighWeight) {
    const WeightedSeries s({{{1, 2, 2}, 1.0}, {{0, 1, 1}, 2.0}}, 5);
    EXPECT_EQ(s.size(), 1u);
    EXPECT_LE(s.max_weight(), 5);
}

TEST(Series, DiffOfAbsSquare) {
    const WeightedSeries abs2({{{0, 1, 1}, 1.0}});
    const auto d = abs2.diff(SeriesVar::z2);
    EXPECT_EQ(d.size(), 1u);
    EXPECT_EQ(d.coeff({0, 0, 1}), cplx(1.0));
}

TEST(Series, LeviCoefficientOfModel) {
    const double a = 0.3;
    const WeightedSeries q({{{0, 1, 1}, 1.0}, {{0, 2, 4}, a}, {{0, 4, 2}, a}});
    const auto d = q.diff(SeriesVar::z2).diff(SeriesVar::zb2);
    const WeightedSeries expect({{{0, 0, 0}, 1.0}, {{0, 1, 3}, 8 * a}, {{0, 3, 1}, 8 * a}});
    EXPECT_LT(d.distance(expect), 1e-15);
}

TEST(Series, DiffOfConstantIsZero) {
    EXPECT_TRUE(WeightedSeries::constant(3.0).diff(SeriesVar::y1).empty());
}

TEST(Series, DiffLowersTruncationByWeight) {
    const WeightedSeries s({{{1, 1, 1}, 1.0}}, 6);
    EXPECT_EQ(s.diff(SeriesVar::y1).truncation_order(), 4);
    EXPECT_EQ(s.diff(SeriesVar::zb2).truncation_order(), 5);
}

TEST(Series, AnisotropicScaleExamples) {
    EXPECT_DOUBLE_EQ(WeightedSeries::monomial({0, 2, 1}).anisotropic_scale(2.0).coeff({0, 2, 1}).real(), 8.0);
    EXPECT_DOUBLE_EQ(WeightedSeries::monomial({1, 0, 0}).anisotropic_scale(0.5).coeff({1, 0, 0}).real(), 0.25);
    EXPECT_DOUBLE_EQ(WeightedSeries::constant(4.0).anisotropic_scale(3.0).coeff({}).real(), 4.0);
    EXPECT_THROW(WeightedSeries::constant(1.0).anisotropic_scale(0.0), std::invalid_argument);
}

TEST(Series, RealValuedFlag) {
    const WeightedSeries real_s({{{0, 2, 1}, {1.0, 2.0}}, {{0, 1, 2}, {1.0, -2.0}}});
    const WeightedSeries not_real({{{0, 2, 1}, {1.0, 2.0}}});
    EXPECT_TRUE(real_s.is_real());
    EXPECT_FALSE(not_real.is_real());
    EXPECT_NEAR(real_s(0.3, {0.2, -0.7}).imag(), 0.0, 1e-15);
}

TEST(Series, NegativeExponentRejected) {
    WeightedSeries s;
    EXPECT_THROW(s.add_term({0, -1, 0}, 1.0), std::invalid_argument);
}

TEST(SeriesProperty, MixedPartialsCommute) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto f = random_series(rng, 5);
        const auto a = f.diff(SeriesVar::z2).diff(SeriesVar::zb2);
        const auto b = f.diff(SeriesVar::zb2).diff(SeriesVar::z2);
        EXPECT_LT(a.distance(b), 1e-14);
    }
}

TEST(SeriesProperty, ScalingMatchesScaledEvaluation) {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto f = random_series(rng, 4);
        const double y = u(rng);
        const cplx z(u(rng), u(rng));
        for (double d : {0.5, 2.0}) {
            const cplx lhs = f.anisotropic_scale(d)(y, z);
            const cplx rhs = f(d * d * y, d * z);
            EXPECT_LT(std::abs(lhs - rhs), 1e-11 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST(SeriesProperty, ProductEvaluatesToProductOfValues) {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const auto f = random_series(rng, 3), g = random_series(rng, 3);
        const double y = u(rng);
        const cplx z(u(rng), u(rng));
        EXPECT_LT(std::abs((f * g)(y, z) - f(y, z) * g(y, z)), 1e-12);
        EXPECT_LT(std::abs((f + g)(y, z) - f(y, z) - g(y, z)), 1e-13);
    }
}

TEST(SeriesProperty, ConjugateSeriesEvaluatesToConjugate) {
    std::mt19937 rng(14);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const auto f = random_series(rng, 4);
        const double y = u(rng);
        const cplx z(u(rng), u(rng));
        EXPECT_LT(std::abs(f.conjugate()(y, z) - std::conj(f(y, z))), 1e-13);
        EXPECT_TRUE((f + f.conjugate()).is_real(1e-15));
    }
}
