#include <gtest/gtest.h>

#include <random>

#include "chainlab/jet.hpp"

using namespace chainlab;

using J3 = Jet<double, 3>;
using C3 = Jet<std::complex<double>, 3>;

namespace {

template <typename T>
T composite(const T& x, const T& y, const T& z) {
    using std::cos;
    using std::exp;
    using std::sin;
    using std::sqrt;
    return sin(x * y) + exp(z / (1.0 + x * x)) * sqrt(2.0 + y * y) - cos(z) * x / (3.0 + y);
}

} // namespace

TEST(Jet, ProductRule) {
    const auto x = J3::variable(2.0, 0);
    const auto y = J3::variable(3.0, 1);
    const auto f = x * y;
    EXPECT_DOUBLE_EQ(f.value, 6.0);
    EXPECT_DOUBLE_EQ(f.d[0], 3.0);
    EXPECT_DOUBLE_EQ(f.d[1], 2.0);
    EXPECT_DOUBLE_EQ(f.d[2], 0.0);
}

TEST(Jet, QuotientRule) {
    const auto x = J3::variable(2.0, 0);
    const auto f = 1.0 / x;
    EXPECT_DOUBLE_EQ(f.d[0], -0.25);
}

TEST(Jet, ComplexJetRealAndConjugate) {
    const auto x = C3::variable({1.0, 0.0}, 0);
    const auto y = C3::variable({2.0, 0.0}, 1);
    const C3 z = x + y * std::complex<double>(0, 1);
    const auto n = real(z * conj(z)); // x^2 + y^2
    EXPECT_DOUBLE_EQ(n.value, 5.0);
    EXPECT_DOUBLE_EQ(n.d[0], 2.0);
    EXPECT_DOUBLE_EQ(n.d[1], 4.0);
    EXPECT_DOUBLE_EQ(imag(z).d[1], 1.0);
}

TEST(JetProperty, MatchesCentralDifferences) {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::array<double, 3> p{u(rng), u(rng), u(rng)};
        const J3 f = composite(J3::variable(p[0], 0), J3::variable(p[1], 1), J3::variable(p[2], 2));
        EXPECT_NEAR(f.value, composite(p[0], p[1], p[2]), 1e-14);
        for (std::size_t i = 0; i < 3; ++i) {
            const double h = 1e-5;
            auto a = p, b = p;
            a[i] += h;
            b[i] -= h;
            const double fd = (composite(a[0], a[1], a[2]) - composite(b[0], b[1], b[2])) / (2 * h);
            EXPECT_LE(std::abs(f.d[i] - fd), 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST(JetProperty, PowMatchesRepeatedProduct) {
    const auto x = J3::variable(1.7, 0);
    const auto a = pow(x, 3.0);
    const auto b = x * x * x;
    EXPECT_NEAR(a.value, b.value, 1e-13);
    EXPECT_NEAR(a.d[0], b.d[0], 1e-12);
}
