#include <gtest/gtest.h>

#include "chainlab/moments.hpp"

using namespace chainlab;

namespace {

SurfaceCurve unit_circle(std::size_t n) {
    std::vector<cplx> z(n), dz(n);
    for (std::size_t j = 0; j < n; ++j) {
        z[j] = std::polar(1.0, kTwoPi * static_cast<double>(j) / static_cast<double>(n));
        dz[j] = cplx(0, 1) * z[j];
    }
    return SurfaceCurve(z, dz, std::vector<double>(n, 0.0), std::vector<double>(n, 0.5), kTwoPi, 1.0);
}

std::vector<cplx> on(const SurfaceCurve& c, const std::function<cplx(cplx)>& f) {
    std::vector<cplx> v;
    for (const cplx& z : c.z2()) v.push_back(f(z));
    return v;
}

FamilyMember chain(std::shared_ptr<const Hypersurface> m, double s) {
    ScanOptions o;
    o.integration.rtol = o.integration.atol = 1e-13;
    auto mem = run_family_member(HamiltonianKind::full(std::move(m)), {}, s, o);
    if (!mem.ok()) throw std::runtime_error(mem.error);
    return mem;
}

} // namespace

TEST(ContourMoment, UnitCircleExamples) {
    const auto c = unit_circle(64);
    const cplx two_pi_i(0, kTwoPi);
    for (int m = 0; m < 5; ++m) EXPECT_LT(std::abs(contour_moment(c, on(c, [](cplx) { return 1.0; }), m)), 1e-14);
    EXPECT_LT(std::abs(contour_moment(c, on(c, [](cplx z) { return std::conj(z); }), 0) - two_pi_i), 1e-13);
    EXPECT_LT(std::abs(contour_moment(c, on(c, [](cplx z) { return std::conj(z * z); }), 1) - two_pi_i), 1e-13);
}

TEST(ContourMoment, SpectralAccuracy) {
    // oint exp(1/z) dz = 2 pi i; the trapezoid error decays like 1/N!.
    std::vector<double> err;
    for (std::size_t n : {8u, 16u, 32u, 64u, 128u}) {
        const auto c = unit_circle(n);
        err.push_back(std::abs(contour_moment(c, on(c, [](cplx z) { return std::exp(std::conj(z)); }), 0) -
                               cplx(0, kTwoPi)));
    }
    EXPECT_LT(err[1], 1e-6 * err[0]);
    EXPECT_LT(err[2], 1e-13);
    EXPECT_LT(err[3], 1e-13);
    EXPECT_LT(err[4], 1e-13);
}

TEST(ContourMoment, Preconditions) {
    const auto c = unit_circle(16);
    EXPECT_THROW(contour_moment(c, std::vector<cplx>(8), 0), std::invalid_argument);
    EXPECT_THROW(contour_moment(c, std::vector<cplx>(16), -1), std::invalid_argument);
    EXPECT_THROW(unit_circle(12), std::invalid_argument);
    EXPECT_EQ(unit_circle(32).winding_number(), 1);
}

TEST(Stationarity, SphereKernelsOnUnitCircle) {
    const auto c = unit_circle(32);
    const auto k = stationarity_integrands(Hypersurface::sphere(), c);
    for (std::size_t j = 0; j < c.size(); ++j) {
        EXPECT_LT(std::abs(k.g[j] - c.z2()[j]), 1e-15);
        EXPECT_LT(std::abs(k.h[j] + 1.0), 1e-15);
    }
}

TEST(Stationarity, OffSurfaceRejected) {
    EXPECT_THROW(stationarity_integrands(Hypersurface(0.5), unit_circle(32)), std::invalid_argument);
}

TEST(Stationarity, SphereChainIsStationary) {
    const auto m = std::make_shared<const Hypersurface>(0.0);
    for (double s : {0.05, 0.1, 0.2}) {
        const auto c = SurfaceCurve::from_member(*m, chain(m, s), 512);
        const auto rep = stationarity_residual(*m, c);
        EXPECT_LE(rep.residual, 1e-8);
        EXPECT_GT(rep.c_min, 0.0);
        EXPECT_EQ(rep.gamma[0], cplx(1.0));
        EXPECT_EQ(rep.gamma.size(), 9u);
    }
}

TEST(Stationarity, ModelChainIsObstructed) {
    const auto sph = std::make_shared<const Hypersurface>(0.0);
    const auto mod = std::make_shared<const Hypersurface>(0.5);
    const double base = stationarity_residual(*sph, SurfaceCurve::from_member(*sph, chain(sph, 0.1), 512)).residual;
    const auto rep = stationarity_residual(*mod, SurfaceCurve::from_member(*mod, chain(mod, 0.1), 512));
    EXPECT_GT(rep.residual, 10.0 * base);
    EXPECT_EQ(rep.gamma[0], cplx(1.0));
}

TEST(Stationarity, MoreModesNeverHurt) {
    const auto mod = std::make_shared<const Hypersurface>(0.5);
    const auto c = SurfaceCurve::from_member(*mod, chain(mod, 0.1), 512);
    double prev = std::numeric_limits<double>::infinity();
    for (int k : {4, 6, 8, 10}) {
        const double r = stationarity_residual(*mod, c, {k, 16}).residual;
        EXPECT_LE(r, prev * (1 + 1e-9));
        prev = r;
    }
}

TEST(Stationarity, Preconditions) {
    const auto c = unit_circle(64);
    const auto sph = Hypersurface::sphere();
    EXPECT_THROW(stationarity_residual(sph, c, {3, 16}), std::invalid_argument);
    EXPECT_THROW(stationarity_residual(sph, c, {8, 9}), std::invalid_argument);
    EXPECT_THROW(stationarity_residual(sph, c, {8, 16}), std::invalid_argument); // N < 8 (K + M)
}

TEST(Stationarity, ScaledMomentsMatchRawMoments) {
    const auto mod = std::make_shared<const Hypersurface>(0.5);
    const auto c = SurfaceCurve::from_member(*mod, chain(mod, 0.1), 256);
    const double s = c.s();
    const auto ker = stationarity_integrands(*mod, c);
    std::vector<cplx> zh, dzh, gk, hk;
    for (std::size_t j = 0; j < c.size(); ++j) {
        zh.push_back(c.z2()[j] / s);
        dzh.push_back(c.dz2()[j] / s);
        gk.push_back(ker.g[j] / s);
        hk.push_back(ker.h[j] / (s * s));
    }
    const std::vector<double> w(c.size(), 1.0);
    const auto mg = detail::scaled_moments(zh, dzh, gk, w, c.dt(), 6);
    const auto mh = detail::scaled_moments(zh, dzh, hk, w, c.dt(), 6);
    for (int m = 0; m <= 6; ++m) {
        const cplx rg = contour_moment(c, ker.g, m) / (kTwoPi * std::pow(s, m + 2));
        const cplx rh = contour_moment(c, ker.h, m) / (kTwoPi * std::pow(s, m + 3));
        EXPECT_LT(std::abs(mg[static_cast<std::size_t>(m)] - rg), 1e-12 * std::max(1.0, std::abs(rg)));
        EXPECT_LT(std::abs(mh[static_cast<std::size_t>(m)] - rh), 1e-12 * std::max(1.0, std::abs(rh)));
    }
}

TEST(Stationarity, ReducedFormAgrees) {
    const auto mod = std::make_shared<const Hypersurface>(0.5);
    const auto c = SurfaceCurve::from_member(*mod, chain(mod, 0.1), 512);
    const auto rep = stationarity_residual(*mod, c);
    const auto mult = multiplier_samples(rep, c.size());
    const auto ker = stationarity_integrands(*mod, c);
    std::vector<cplx> cg(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) cg[j] = mult[j] * ker.g[j];
    const double s = c.s();
    for (int j = 1; j <= 6; ++j) {
        const cplx direct = contour_moment(c, cg, j - 1) / std::pow(s, j + 1);
        EXPECT_LT(std::abs(reduced_g_moment(*mod, c, mult, j) - direct), 1e-10);
    }
}

TEST(Stationarity, MultiplierIsReal) {
    StationarityReport rep;
    rep.gamma = {1.0, {0.1, 0.2}, {0.0, -0.05}};
    const auto c = multiplier_samples(rep, 16);
    std::vector<double> cc(c.begin(), c.end());
    const auto f = fourier_coeffs(cc);
    EXPECT_NEAR(std::abs(f.coeff(0) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(f.coeff(1) - rep.gamma[1]), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(f.coeff(-1) - std::conj(rep.gamma[1])), 0.0, 1e-14);
}

TEST(Obstruction, NeedsFivePoints) {
    EXPECT_THROW(obstruction_scan(0.5, {0.05, 0.1, 0.15}), std::invalid_argument);
}

TEST(SphereDisc, AttachedAndStationary) {
    const auto rep = verify_sphere_disc();
    EXPECT_TRUE(rep.passed);
    EXPECT_LE(rep.attachment_error, 1e-12);
    EXPECT_LE(rep.g_moment_max, 1e-12);
    EXPECT_LE(rep.h_moment_max, 1e-12);
}
