#pragma once

/**
 * @file moments.hpp
 * @brief Moment conditions along closed chain traces and the stationarity
 *        residual of the best trigonometric multiplier.
 *
 * For a closed curve S in the z2-plane the stationarity system asks for a
 * real multiplier c > 0 such that z c rho_{z1} and z c rho_{z2} extend
 * holomorphically inside S, i.e. all moments  oint z^m (.) dz  vanish.
 * Moments are taken on the rescaled curve zhat = z2 / s with
 *   Ghat = zhat rho_{z1},  Hhat = zhat rho_{z2} / s,
 * and normalized by 1/(2 pi). The raw moments on S are
 *   G: s^(m+2) * 2 pi * scaled,   H: s^(m+3) * 2 pi * scaled.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <future>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chainlab/error.hpp"
#include "chainlab/fit.hpp"
#include "chainlab/flow.hpp"
#include "chainlab/fourier.hpp"
#include "chainlab/surface.hpp"

namespace chainlab {

class SurfaceCurve {
public:
    /**
     * Samples on the uniform grid t_j = j T / N, j < N. dz2 is dz2/dt.
     * Throws when the sample count is not a power of two.
     */
    SurfaceCurve(std::vector<cplx> z2, std::vector<cplx> dz2, std::vector<double> y1, std::vector<double> x1,
                 double period, double s)
        : z2_(std::move(z2)), dz2_(std::move(dz2)), y1_(std::move(y1)), x1_(std::move(x1)), period_(period), s_(s) {
        const std::size_t n = z2_.size();
        if (n < 8 || (n & (n - 1)) != 0) throw std::invalid_argument("SurfaceCurve: N must be a power of two >= 8");
        if (dz2_.size() != n || y1_.size() != n || x1_.size() != n)
            throw std::invalid_argument("SurfaceCurve: sample arrays differ in length");
        if (!(period > 0.0) || !(s > 0.0)) throw std::invalid_argument("SurfaceCurve: period and s must be positive");
    }

    /// Resamples a periodic chain; x1 comes from rho = 0.
    static SurfaceCurve from_member(const Hypersurface& m, const FamilyMember& member, std::size_t n) {
        if (!member.ok()) throw std::invalid_argument("SurfaceCurve: member has no detected period");
        const ChainTrajectory& tr = *member.trajectory;
        const double T = member.period();
        std::vector<cplx> z(n), dz(n);
        std::vector<double> y(n), x(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double t = T * static_cast<double>(j) / static_cast<double>(n);
            const State q = tr.state(t);
            const State r = hamiltonian_rhs(tr.kind(), q);
            z[j] = {q[kX2], q[kY2]};
            dz[j] = {r[kX2], r[kY2]};
            y[j] = q[kY1];
            x[j] = 0.5 * m.graph()(y[j], z[j]).real();
        }
        SurfaceCurve c(std::move(z), std::move(dz), std::move(y), std::move(x), T, member.s);
        const double gap = std::abs(tr.z2(T) - tr.z2(0.0));
        if (gap > 1e-8 * member.s) throw NumericalError("SurfaceCurve: trace does not close");
        if (std::abs(c.winding_number()) != 1) throw NumericalError("SurfaceCurve: trace is not a simple loop");
        return c;
    }

    std::size_t size() const { return z2_.size(); }
    double period() const { return period_; }
    double s() const { return s_; }
    const std::vector<cplx>& z2() const { return z2_; }
    const std::vector<cplx>& dz2() const { return dz2_; }
    const std::vector<double>& y1() const { return y1_; }
    const std::vector<double>& x1() const { return x1_; }
    double dt() const { return period_ / static_cast<double>(size()); }

    AmbientPoint point(std::size_t j) const { return {x1_[j], y1_[j], z2_[j]}; }

    /// Winding number about the centroid of the samples.
    int winding_number() const {
        cplx c{};
        for (const cplx& z : z2_) c += z;
        c /= static_cast<double>(size());
        double total = 0.0;
        for (std::size_t j = 0; j < size(); ++j) {
            const cplx a = z2_[j] - c, b = z2_[(j + 1) % size()] - c;
            total += std::arg(b / a);
        }
        return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
    }

private:
    std::vector<cplx> z2_, dz2_;
    std::vector<double> y1_, x1_;
    double period_, s_;
};

/// Trapezoidal  oint z^m phi dz  with dz = z2'(t) dt (raw, unscaled).
inline cplx contour_moment(const SurfaceCurve& c, const std::vector<cplx>& phi, int m) {
    if (phi.size() != c.size()) throw std::invalid_argument("contour_moment: integrand length mismatch");
    if (m < 0) throw std::invalid_argument("contour_moment: m must be nonnegative");
    cplx acc{};
    for (std::size_t j = 0; j < c.size(); ++j) acc += std::pow(c.z2()[j], m) * phi[j] * c.dz2()[j];
    return acc * c.dt();
}

struct StationarityKernels {
    std::vector<cplx> g; // z rho_{z1}
    std::vector<cplx> h; // z rho_{z2}
};

/// Samples of z rho_{z1} and z rho_{z2} along the curve (raw variables).
inline StationarityKernels stationarity_integrands(const Hypersurface& m, const SurfaceCurve& c) {
    const FeffermanData& f = m.fefferman();
    StationarityKernels k;
    k.g.resize(c.size());
    k.h.resize(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) {
        const AmbientPoint p = c.point(j);
        if (std::abs(m.rho()(p)) > 1e-10) throw std::invalid_argument("stationarity_integrands: curve is off the surface");
        k.g[j] = p.z2 * f.rho_z1(p);
        k.h[j] = p.z2 * f.rho_z2(p);
    }
    return k;
}

struct StationarityOptions {
    int modes = 8;    // K
    int moments = 16; // M_max
};

struct StationarityReport {
    double s = 0.0;
    double residual = 0.0;
    std::vector<cplx> gamma; // gamma_0 .. gamma_K, gamma_0 = 1
    double c_min = 0.0;
    double condition = 0.0;
    int modes = 0;
    int moments = 0;
    std::size_t samples = 0;
};

namespace detail {

/// Scaled moments (1/2pi) oint zhat^m w kernel dzhat for m = 0..M of one kernel.
inline std::vector<cplx> scaled_moments(const std::vector<cplx>& zh, const std::vector<cplx>& dzh_dt,
                                        const std::vector<cplx>& kernel, const std::vector<double>& w, double dt,
                                        int M) {
    std::vector<cplx> mu(static_cast<std::size_t>(M) + 1);
    for (std::size_t j = 0; j < zh.size(); ++j) {
        const cplx base = kernel[j] * w[j] * dzh_dt[j];
        cplx zp = 1.0;
        for (int m = 0; m <= M; ++m) {
            mu[static_cast<std::size_t>(m)] += zp * base;
            zp *= zh[j];
        }
    }
    for (auto& x : mu) x *= dt / (2.0 * std::numbers::pi);
    return mu;
}

} // namespace detail

/**
 * Least-squares multiplier c = 1 + sum_{k=1..K} 2 Re(gamma_k e^{ik tau}),
 * tau = 2 pi t / T, minimizing the RMS of the 2(M+1) scaled moments.
 */
inline StationarityReport stationarity_residual(const Hypersurface& m, const SurfaceCurve& c,
                                                const StationarityOptions& opt = {}) {
    const int K = opt.modes, M = opt.moments;
    if (K < 4) throw std::invalid_argument("stationarity_residual: K must be >= 4");
    if (M < K + 2) throw std::invalid_argument("stationarity_residual: M_max must be >= K + 2");
    if (c.size() < static_cast<std::size_t>(8 * (K + M)))
        throw std::invalid_argument("stationarity_residual: need N >= 8 (K + M_max) samples");

    const StationarityKernels ker = stationarity_integrands(m, c);
    const double s = c.s();
    const std::size_t n = c.size();
    std::vector<cplx> zh(n), dzh(n), gk(n), hk(n);
    for (std::size_t j = 0; j < n; ++j) {
        zh[j] = c.z2()[j] / s;
        dzh[j] = c.dz2()[j] / s;
        gk[j] = ker.g[j] / s;
        hk[j] = ker.h[j] / (s * s);
    }

    // Column 0: c = 1. Columns 2k-1, 2k: Re gamma_k, Im gamma_k.
    const int cols = 2 * K + 1;
    const int rows = 4 * (M + 1);
    Eigen::MatrixXd A(rows, cols);
    std::vector<double> w(n);
    for (int col = 0; col < cols; ++col) {
        const int k = (col + 1) / 2;
        for (std::size_t j = 0; j < n; ++j) {
            const double tau = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
            w[j] = col == 0 ? 1.0 : (col % 2 == 1 ? 2.0 * std::cos(k * tau) : -2.0 * std::sin(k * tau));
        }
        const auto mg = detail::scaled_moments(zh, dzh, gk, w, c.dt(), M);
        const auto mh = detail::scaled_moments(zh, dzh, hk, w, c.dt(), M);
        for (int i = 0; i <= M; ++i) {
            A(4 * i + 0, col) = mg[static_cast<std::size_t>(i)].real();
            A(4 * i + 1, col) = mg[static_cast<std::size_t>(i)].imag();
            A(4 * i + 2, col) = mh[static_cast<std::size_t>(i)].real();
            A(4 * i + 3, col) = mh[static_cast<std::size_t>(i)].imag();
        }
    }
    const Eigen::MatrixXd B = A.rightCols(cols - 1);
    const Eigen::VectorXd b0 = A.col(0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto sv = svd.singularValues();
    StationarityReport rep;
    rep.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    if (!(rep.condition < 1e12))
        throw NumericalError("stationarity_residual: rank-deficient moment system (condition " +
                             std::to_string(rep.condition) + ")");
    const Eigen::VectorXd x = svd.solve(-b0);
    const Eigen::VectorXd r = b0 + B * x;

    rep.s = s;
    rep.residual = std::sqrt(r.squaredNorm() / (2.0 * (M + 1)));
    rep.modes = K;
    rep.moments = M;
    rep.samples = n;
    rep.gamma.assign(static_cast<std::size_t>(K) + 1, cplx{});
    rep.gamma[0] = 1.0;
    for (int k = 1; k <= K; ++k) rep.gamma[static_cast<std::size_t>(k)] = {x(2 * k - 2), x(2 * k - 1)};
    rep.c_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        const double tau = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
        double cv = 1.0;
        for (int k = 1; k <= K; ++k) cv += 2.0 * (rep.gamma[static_cast<std::size_t>(k)] * std::polar(1.0, k * tau)).real();
        rep.c_min = std::min(rep.c_min, cv);
    }
    return rep;
}

/// Multiplier samples c(tau_j) reconstructed from a report.
inline std::vector<double> multiplier_samples(const StationarityReport& rep, std::size_t n) {
    std::vector<double> c(n, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double tau = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
        for (std::size_t k = 1; k < rep.gamma.size(); ++k)
            c[j] += 2.0 * (rep.gamma[k] * std::polar(1.0, static_cast<double>(k) * tau)).real();
    }
    return c;
}

/**
 * The G moment of index j - 1 written through zhat = r e^{it}:
 *   int_0^T r^j e^{i(j+1)t} c rho_{z1} (dr/dt + i r) dt,
 * with t the flow time. Equals 2 pi times the scaled G moment.
 */
inline cplx reduced_g_moment(const Hypersurface& m, const SurfaceCurve& c, const std::vector<double>& mult, int j) {
    const FeffermanData& f = m.fefferman();
    cplx acc{};
    const double s = c.s();
    for (std::size_t n = 0; n < c.size(); ++n) {
        const double t = c.dt() * static_cast<double>(n);
        const cplx e = std::polar(1.0, -t);
        const cplx r = c.z2()[n] / s * e;
        const cplx dr = (c.dz2()[n] / s - cplx(0, 1) * c.z2()[n] / s) * e;
        acc += std::pow(r, j) * std::polar(1.0, (j + 1) * t) * mult[n] * f.rho_z1(c.point(n)) * (dr + cplx(0, 1) * r);
    }
    return acc * c.dt();
}

struct ObstructionPoint {
    double s = 0.0;
    double residual = 0.0;
    double baseline = 0.0;
    bool usable = false;
    StationarityReport report;
    std::string error;
};

struct ObstructionResult {
    double a = 0.0;
    std::vector<ObstructionPoint> points;
    double slope = 0.0;
    double amplitude = 0.0;    // C in residual ~ C s^slope
    double amplitude_s4 = 0.0; // geometric mean of residual / s^4
    std::size_t usable = 0;
};

struct ObstructionOptions {
    ScanOptions scan;
    StationarityOptions stationarity;
    std::size_t samples = 512;
    double floor_factor = 100.0; // usable when residual > floor_factor * baseline
};

inline std::vector<std::pair<StationarityReport, std::string>> residual_scan(
    std::shared_ptr<const Hypersurface> m, const FamilySeed& seed, const std::vector<double>& s_grid,
    const ObstructionOptions& opt) {
    const auto kind = HamiltonianKind::full(m);
    const auto scan = family_scan(kind, seed, s_grid, opt.scan);
    std::vector<std::pair<StationarityReport, std::string>> out(scan.size());
    for (std::size_t i = 0; i < scan.size(); ++i) {
        if (!scan[i].ok()) {
            out[i].second = scan[i].error;
            continue;
        }
        try {
            const SurfaceCurve c = SurfaceCurve::from_member(*m, scan[i], opt.samples);
            out[i].first = stationarity_residual(*m, c, opt.stationarity);
        } catch (const std::exception& e) {
            out[i].second = e.what();
        }
    }
    return out;
}

/// Residual of the model surface with parameter a against the a = 0 baseline.
inline ObstructionResult obstruction_scan(double a, const std::vector<double>& s_grid, const FamilySeed& seed = {},
                                          const ObstructionOptions& opt = {}) {
    if (s_grid.size() < 5) throw std::invalid_argument("obstruction_scan: need at least five s values");
    const auto surf = std::make_shared<const Hypersurface>(a);
    const auto base = std::make_shared<const Hypersurface>(0.0);
    const auto res = residual_scan(surf, seed, s_grid, opt);
    const auto ref = residual_scan(base, seed, s_grid, opt);

    ObstructionResult out;
    out.a = a;
    std::vector<double> xs, ys;
    double log_s4 = 0.0;
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        ObstructionPoint p;
        p.s = s_grid[i];
        p.error = !res[i].second.empty() ? res[i].second : ref[i].second;
        if (p.error.empty()) {
            p.report = res[i].first;
            p.residual = res[i].first.residual;
            p.baseline = ref[i].first.residual;
            p.usable = p.residual > opt.floor_factor * p.baseline;
        }
        if (p.usable) {
            xs.push_back(p.s);
            ys.push_back(p.residual);
            log_s4 += std::log(p.residual / std::pow(p.s, 4));
        }
        out.points.push_back(std::move(p));
    }
    out.usable = xs.size();
    if (xs.size() < 2) throw NumericalError("obstruction_scan: residuals at the noise floor on the whole grid");
    const LineFit f = loglog_fit(xs, ys);
    out.slope = f.slope;
    out.amplitude = std::exp(f.intercept);
    out.amplitude_s4 = std::exp(log_s4 / static_cast<double>(xs.size()));
    return out;
}

struct SphereDiscReport {
    double attachment_error = 0.0;
    double g_moment_max = 0.0;
    double h_moment_max = 0.0;
    double multiplier = 1.0;
    bool passed = false;
};

/**
 * The disc f(zeta) = (1 - zeta, 1 - zeta) attached to 2 Re z1 = |z2|^2 with
 * constant multiplier: zeta rho_{z1} = zeta and zeta rho_{z2} = 1 - zeta
 * on the unit circle, both with vanishing moments.
 */
inline SphereDiscReport verify_sphere_disc(std::size_t n = 128, int max_moment = 32) {
    const Hypersurface sph(0.0);
    const FeffermanData& f = sph.fefferman();
    SphereDiscReport rep;
    std::vector<cplx> zeta(n), g(n), h(n);
    for (std::size_t j = 0; j < n; ++j) {
        const cplx z = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
        const cplx w = 1.0 - z;
        rep.attachment_error = std::max(rep.attachment_error, std::abs(2.0 * w.real() - std::norm(w)));
        const AmbientPoint p{w.real(), w.imag(), w};
        zeta[j] = z;
        g[j] = rep.multiplier * z * f.rho_z1(p);
        h[j] = rep.multiplier * z * f.rho_z2(p);
    }
    for (int m = 0; m <= max_moment; ++m) {
        cplx mg{}, mh{};
        for (std::size_t j = 0; j < n; ++j) {
            const cplx dz = cplx(0, 1) * zeta[j];
            mg += std::pow(zeta[j], m) * g[j] * dz;
            mh += std::pow(zeta[j], m) * h[j] * dz;
        }
        const double dt = 2.0 * std::numbers::pi / static_cast<double>(n);
        rep.g_moment_max = std::max(rep.g_moment_max, std::abs(mg) * dt);
        rep.h_moment_max = std::max(rep.h_moment_max, std::abs(mh) * dt);
    }
    rep.passed = rep.attachment_error <= 1e-12 && rep.g_moment_max <= 1e-12 && rep.h_moment_max <= 1e-12 &&
                 rep.multiplier > 0.0;
    return rep;
}

} // namespace chainlab
