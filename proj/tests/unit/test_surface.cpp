#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "chainlab/fit.hpp"
#include "chainlab/surface.hpp"

using namespace chainlab;

namespace {

constexpr RhoIndex kZ1{1, 0, 0, 0}, kZ2{0, 0, 1, 0}, kZ2Zb2{0, 0, 1, 1};

Hypersurface perturbed(double a) {
    // eta = |z2|^6, delta = 2 Re(z2^4 zb2^3): real, weights 6 and 7.
    WeightedSeries eta({{{0, 3, 3}, 0.4}});
    WeightedSeries delta({{{0, 4, 3}, {0.3, 0.1}}, {{0, 3, 4}, {0.3, -0.1}}});
    return Hypersurface(a, eta, delta);
}

AmbientPoint random_ambient(std::mt19937& rng, double r = 0.4) {
    std::uniform_real_distribution<double> u(-r, r);
    return {u(rng), u(rng), {u(rng), u(rng)}};
}

SurfacePoint random_surface(std::mt19937& rng, double r = 0.4) {
    std::uniform_real_distribution<double> u(-r, r);
    return {u(rng), {u(rng), u(rng)}};
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

} // namespace

TEST(Surface, SpherePartials) {
    const auto m = Hypersurface::sphere();
    const cplx z(0.3, -0.2);
    const auto p = m.lift({0.1, z});
    EXPECT_EQ(m.rho_partial(p, kZ1), cplx(1.0));
    EXPECT_LT(std::abs(m.rho_partial(p, kZ2) + std::conj(z)), 1e-15);
    EXPECT_EQ(m.rho_partial(p, kZ2Zb2), cplx(-1.0));
}

TEST(Surface, ModelLeviCoefficient) {
    const double a = 0.5;
    const Hypersurface m(a);
    const cplx z(0.25, 0.15), zb = std::conj(z);
    const cplx expect = -(1.0 + 8 * a * z * z * z * zb + 8 * a * z * zb * zb * zb);
    EXPECT_LT(std::abs(m.rho_partial(m.lift({0.0, z}), kZ2Zb2) - expect), 1e-14);
}

TEST(Surface, RhoVanishesOnSurface) {
    std::mt19937 rng(31);
    const auto m = perturbed(0.5);
    for (int i = 0; i < 20; ++i) EXPECT_LT(std::abs(m.rho_partial(m.lift(random_surface(rng)), {0, 0, 0, 0})), 1e-15);
}

TEST(Surface, RejectsHighOrderIndex) {
    const auto m = Hypersurface::sphere();
    EXPECT_THROW(m.rho_partial({}, {1, 1, 1, 2}), std::invalid_argument);
    EXPECT_THROW(m.rho_partial({}, {-1, 0, 0, 0}), std::invalid_argument);
    EXPECT_NO_THROW(m.rho_partial({}, {1, 1, 1, 1}));
}

TEST(Surface, RejectsLowOrderPerturbation) {
    EXPECT_THROW(Hypersurface(0.1, WeightedSeries({{{0, 2, 2}, 1.0}})), std::invalid_argument);
    EXPECT_THROW(Hypersurface(0.1, WeightedSeries{}, WeightedSeries({{{0, 3, 3}, 1.0}})), std::invalid_argument);
    EXPECT_THROW(Hypersurface(0.1, WeightedSeries{}, WeightedSeries({{{1, 3, 2}, 1.0}, {{1, 2, 3}, 1.0}})), std::invalid_argument);
    EXPECT_THROW(Hypersurface(0.1, WeightedSeries{}, WeightedSeries({{{0, 4, 3}, {0.0, 1.0}}})), std::invalid_argument);
    EXPECT_THROW(Hypersurface(std::nan("")), std::invalid_argument);
}

TEST(Surface, ConjugationSymmetry) {
    std::mt19937 rng(32);
    const auto m = perturbed(0.5);
    std::uniform_int_distribution<int> e(0, 1);
    for (int i = 0; i < 30; ++i) {
        const auto p = random_ambient(rng);
        const RhoIndex idx{e(rng), e(rng), e(rng), e(rng)};
        const RhoIndex mirror{idx[1], idx[0], idx[3], idx[2]};
        EXPECT_LT(std::abs(m.rho_partial(p, idx) - std::conj(m.rho_partial(p, mirror))), 1e-13);
    }
}

TEST(Surface, RigidPartialsIndependentOfY1) {
    std::mt19937 rng(33);
    const Hypersurface m(0.5);
    for (int i = 0; i < 20; ++i) {
        auto p = random_ambient(rng);
        auto q = p;
        q.y1 += 0.3;
        for (const RhoIndex& idx : {kZ1, kZ2, kZ2Zb2, RhoIndex{1, 1, 0, 0}, RhoIndex{0, 0, 2, 2}})
            EXPECT_LT(std::abs(m.rho_partial(p, idx) - m.rho_partial(q, idx)), 1e-14);
    }
}

TEST(MongeAmpere, SphereIsOne) {
    std::mt19937 rng(34);
    const auto m = Hypersurface::sphere();
    for (int i = 0; i < 10; ++i) EXPECT_LT(std::abs(m.monge_ampere(random_ambient(rng)) - 1.0), 1e-14);
}

TEST(MongeAmpere, RigidEqualsLeviCoefficient) {
    std::mt19937 rng(35);
    const Hypersurface m(0.5);
    const auto q = m.graph().diff(SeriesVar::z2).diff(SeriesVar::zb2);
    EXPECT_LT(std::abs(m.monge_ampere({}) - 1.0), 1e-15);
    for (int i = 0; i < 20; ++i) {
        const auto p = random_ambient(rng);
        EXPECT_LT(rel(m.monge_ampere(p), q(p.y1, p.z2)), 1e-13);
    }
}

TEST(MongeAmpere, MatchesNumericDeterminant) {
    std::mt19937 rng(36);
    const auto m = perturbed(0.5);
    for (int i = 0; i < 10; ++i) {
        const auto p = random_ambient(rng);
        const auto d = [&](int a, int b, int c, int e) { return m.rho_partial(p, {a, b, c, e}); };
        Eigen::Matrix3cd h;
        h << d(0, 0, 0, 0), d(0, 1, 0, 0), d(0, 0, 0, 1),
             d(1, 0, 0, 0), d(1, 1, 0, 0), d(1, 0, 0, 1),
             d(0, 0, 1, 0), d(0, 1, 1, 0), d(0, 0, 1, 1);
        EXPECT_LT(rel(m.monge_ampere(p), h.determinant()), 1e-13);
    }
}

TEST(MongeAmpere, RealOnSurface) {
    std::mt19937 rng(37);
    for (const auto& m : {Hypersurface(0.5), perturbed(-0.3)})
        for (int i = 0; i < 20; ++i) EXPECT_LT(std::abs(m.monge_ampere(m.lift(random_surface(rng))).imag()), 1e-12);
}

TEST(MongeAmpere, LocalExpansionAgrees) {
    std::mt19937 rng(38);
    const auto m = perturbed(0.5);
    for (int i = 0; i < 10; ++i) {
        const auto p = random_ambient(rng);
        const auto r = m.expand_rho(p, 4);
        EXPECT_LT(std::abs(r.value() - m.rho()(p)), 1e-14);
        EXPECT_LT(std::abs(r.partial({1, 1, 1, 1}) - m.rho_partial(p, {1, 1, 1, 1})), 1e-12);
        EXPECT_LT(rel(monge_ampere(r).value(), m.monge_ampere(p)), 1e-13);
    }
}

TEST(ApproximateSolutions, SphereIsUnchanged) {
    const auto sols = approx_ma_solutions(std::make_shared<const Hypersurface>(Hypersurface::sphere()));
    const AmbientPoint p{0.2, -0.1, {0.3, 0.1}};
    const auto v = sols.evaluate(p);
    EXPECT_LT(std::abs(v.rho1 - v.rho), 1e-14);
    EXPECT_LT(std::abs(v.rho2 - v.rho), 1e-14);
    EXPECT_LT(std::abs(v.j_rho2 - 1.0), 1e-14);
}

TEST(ApproximateSolutions, ImprovementOrders) {
    // Along x1 from a point of M, rho = 2 eps. The first correction removes
    // the O(1) error of J and the second the O(rho) error.
    const auto m = std::make_shared<const Hypersurface>(0.5);
    const auto sols = approx_ma_solutions(m);
    const auto base = m->lift({0.1, {0.3, 0.2}});
    std::vector<double> eps, e1, e2;
    for (int k = 0; k < 5; ++k) {
        const double e = 0.02 * std::pow(0.5, k);
        auto p = base;
        p.x1 += e;
        const auto v = sols.evaluate(p);
        eps.push_back(e);
        e1.push_back(std::abs(v.j_rho1 - 1.0));
        e2.push_back(std::abs(v.j_rho2 - 1.0));
    }
    EXPECT_NEAR(loglog_fit(eps, e1).slope, 1.0, 0.1);
    EXPECT_NEAR(loglog_fit(eps, e2).slope, 2.0, 0.1);
}

TEST(ApproximateSolutions, RejectsNonPositiveJ) {
    // Q_zzb = 1 + 16 a |z|^2 Re z^2 turns negative for large a.
    const auto m = std::make_shared<const Hypersurface>(-50.0);
    EXPECT_THROW(approx_ma_solutions(m).evaluate(m->lift({0.0, {0.4, 0.0}})), NumericalError);
}
