#pragma once

/**
 * @file flow.hpp
 * @brief Chain flow: seeded initial data, integration, periods, family scans.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <future>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "chainlab/error.hpp"
#include "chainlab/fit.hpp"
#include "chainlab/fourier.hpp"
#include "chainlab/hamiltonian.hpp"
#include "chainlab/ode.hpp"

namespace chainlab {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <typename T>
T polyval(const std::vector<T>& c, double s) {
    T v{};
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * s + *it;
    return v;
}

/**
 * Free data of the seeded family, as polynomial coefficients in s
 * (constant term first):
 *   y1 = s^2 phi, z2 = s + s^5 psi, p_x0 = -s^2/2 + s^6 chi,
 *   p_y1 = -3/4, p_z2 = -(3i/4) s + s^5 xi, x0 = x0_init.
 */
struct FamilySeed {
    std::vector<double> x0_init;
    std::vector<double> phi;
    std::vector<double> psi;
    std::vector<cplx> xi;

    PhasePoint point(double s, double chi) const {
        PhasePoint q;
        q.x0 = polyval(x0_init, s);
        q.y1 = s * s * polyval(phi, s);
        q.z2 = s + std::pow(s, 5) * polyval(psi, s);
        q.p_x0 = -0.5 * s * s + std::pow(s, 6) * chi;
        q.p_y1 = -0.75;
        q.p_z2 = cplx(0.0, -0.75) * s + std::pow(s, 5) * polyval(xi, s);
        return q;
    }
};

/// chi with H = 0 at the seeded phase point (Newton on the exact derivative).
inline double solve_initial_chi(const HamiltonianKind& kind, double s, const FamilySeed& seed = {}) {
    if (!(s > 0.0 && s <= 0.3)) throw std::invalid_argument("solve_initial_chi: s must lie in (0, 0.3]");
    const double s6 = std::pow(s, 6);
    double chi = 0.0;
    for (int it = 0; it < 60; ++it) {
        const Gradient g = grad_H(kind, seed.point(s, chi));
        if (std::abs(g.H) <= 1e-15) return chi;
        const double dh = g.H_p[0] * s6;
        if (!std::isfinite(dh) || dh == 0.0) break;
        const double step = g.H / dh;
        chi -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(chi))) {
            if (std::abs(eval_H(kind, seed.point(s, chi))) <= 1e-13) return chi;
            break;
        }
    }
    const double h = eval_H(kind, seed.point(s, chi));
    if (std::abs(h) <= 1e-13) return chi;
    throw NumericalError("solve_initial_chi: no root (|H| = " + std::to_string(h) + ")");
}

struct IntegrationOptions {
    double rtol = 1e-12;
    double atol = 1e-12;
    /// Abort when |H| exceeds drift_factor * max(rtol, atol) * max(1, |q0|^2).
    double drift_factor = 100.0;
};

class ChainTrajectory {
public:
    ChainTrajectory(HamiltonianKind kind, DenseSolution<8> sol, std::vector<double> t, std::vector<State> q,
                    std::vector<double> h)
        : kind_(std::move(kind)), sol_(std::move(sol)), t_(std::move(t)), q_(std::move(q)), h_(std::move(h)) {
        for (std::size_t i = 0; i < q_.size(); ++i) {
            max_h_ = std::max(max_h_, std::abs(h_[i]));
            max_px0_ = std::max(max_px0_, std::abs(q_[i][kPX0] - q_[0][kPX0]));
            max_py1_ = std::max(max_py1_, std::abs(q_[i][kPY1] - q_[0][kPY1]));
        }
    }

    const HamiltonianKind& kind() const { return kind_; }
    const std::vector<double>& times() const { return t_; }
    const std::vector<State>& samples() const { return q_; }
    const std::vector<double>& h_residuals() const { return h_; }
    std::size_t steps() const { return sol_.steps(); }
    double t_begin() const { return t_.front(); }
    double t_end() const { return t_.back(); }

    double max_h_drift() const { return max_h_; }
    double max_px0_drift() const { return max_px0_; }
    double max_py1_drift() const { return max_py1_; }

    State state(double t) const { return sol_(t); }
    PhasePoint point(double t) const { return PhasePoint::from_state(sol_(t)); }
    cplx z2(double t) const {
        const State s = sol_(t);
        return {s[kX2], s[kY2]};
    }
    /// z2' from the vector field at the interpolated state.
    cplx z2_velocity(double t) const {
        const State r = hamiltonian_rhs(kind_, sol_(t));
        return {r[kX2], r[kY2]};
    }

    std::optional<double> period() const { return period_; }
    void set_period(double T) { period_ = T; }

private:
    HamiltonianKind kind_;
    DenseSolution<8> sol_;
    std::vector<double> t_;
    std::vector<State> q_;
    std::vector<double> h_;
    double max_h_ = 0.0, max_px0_ = 0.0, max_py1_ = 0.0;
    std::optional<double> period_;
};

inline ChainTrajectory integrate_chain(const HamiltonianKind& kind, const PhasePoint& q0, double t0, double t1,
                                       const IntegrationOptions& opt = {}) {
    const auto in_range = [](double x) { return x >= 1e-13 * (1 - 1e-9) && x <= 1e-6 * (1 + 1e-9); };
    if (!in_range(opt.rtol) || !in_range(opt.atol))
        throw std::invalid_argument("integrate_chain: tolerances must lie in [1e-13, 1e-6]");
    const State s0 = q0.to_state();
    const double h0 = kind.evaluate(s0);
    if (std::abs(h0) > 1e-12) throw std::invalid_argument("integrate_chain: initial point is not null (|H| > 1e-12)");

    double norm2 = 0.0;
    for (double x : s0) norm2 += x * x;
    const double limit = opt.drift_factor * std::max(opt.rtol, opt.atol) * std::max(1.0, norm2);

    std::vector<double> ts{t0};
    std::vector<State> qs{s0};
    std::vector<double> hs{h0};
    OdeOptions ode;
    ode.rtol = opt.rtol;
    ode.atol = opt.atol;
    auto rhs = [&kind](double, const State& y) { return hamiltonian_rhs(kind, y); };
    auto observe = [&](double t, const State& y) {
        const double h = kind.evaluate(y);
        if (!(std::abs(h) <= limit))
            throw NumericalError("integrate_chain: H drift " + std::to_string(h) + " exceeds limit at t = " +
                                 std::to_string(t));
        ts.push_back(t);
        qs.push_back(y);
        hs.push_back(h);
    };
    DenseSolution<8> sol = dopri5<8>(rhs, s0, t0, t1, ode, observe);
    return ChainTrajectory(kind, std::move(sol), std::move(ts), std::move(qs), std::move(hs));
}

struct PeriodOptions {
    double guess = kTwoPi;
    double window = 0.25; // relative half-width of the search window
    double closure_tol = 0.0; // absolute; 0 selects 1e-8 x curve diameter
    int scan_points = 400;
};

/**
 * First return to the line through z2(0) normal to z2'(0), nearest to the
 * guess, crossing in the same direction as at t = 0. For the seeded family
 * this is the zero of Im z2 near 2 pi.
 */
inline double detect_period(ChainTrajectory& traj, const PeriodOptions& opt = {}) {
    const double t0 = traj.t_begin();
    const double lo = t0 + opt.guess * (1.0 - opt.window), hi = t0 + opt.guess * (1.0 + opt.window);
    if (hi > traj.t_end() + 1e-12) throw std::invalid_argument("detect_period: trajectory does not cover the window");

    const cplx p0 = traj.z2(t0);
    const cplx v0 = traj.z2_velocity(t0);
    if (std::abs(v0) == 0.0) throw NumericalError("detect_period: stationary curve");
    const auto iota = [&](double t) { return (std::conj(v0) * (traj.z2(t) - p0)).real(); };

    double best = std::numeric_limits<double>::quiet_NaN();
    double prev_t = lo, prev_v = iota(lo);
    for (int i = 1; i <= opt.scan_points; ++i) {
        const double t = lo + (hi - lo) * i / opt.scan_points;
        const double v = iota(t);
        if (prev_v < 0.0 && v >= 0.0) {
            boost::uintmax_t iters = 100;
            const auto r = boost::math::tools::toms748_solve(
                iota, prev_t, t, prev_v, v,
                [](double a, double b) { return std::abs(b - a) <= 1e-14 * std::max(1.0, std::abs(a)); }, iters);
            const double root = 0.5 * (r.first + r.second);
            if (std::isnan(best) || std::abs(root - t0 - opt.guess) < std::abs(best - t0 - opt.guess)) best = root;
        }
        prev_t = t;
        prev_v = v;
    }
    if (std::isnan(best)) throw NumericalError("detect_period: no crossing near the expected period");

    double diam = 0.0;
    for (const State& q : traj.samples()) diam = std::max(diam, std::abs(cplx(q[kX2], q[kY2]) - p0));
    const double tol = opt.closure_tol > 0.0 ? opt.closure_tol : 1e-8 * std::max(diam, 1e-300);
    const double gap = std::abs(traj.z2(best) - p0);
    if (gap > tol)
        throw NumericalError("detect_period: curve does not close (gap " + std::to_string(gap) + ")");
    const double T = best - t0;
    traj.set_period(T);
    return T;
}

struct ScanOptions {
    IntegrationOptions integration;
    PeriodOptions period;
    double t_end = 2.5 * std::numbers::pi;
    unsigned jobs = 1;
};

struct FamilyMember {
    double s = 0.0;
    double chi = 0.0;
    std::optional<ChainTrajectory> trajectory;
    std::string error;

    bool ok() const { return trajectory.has_value() && trajectory->period().has_value(); }
    double period() const { return *trajectory->period(); }
};

inline FamilyMember run_family_member(const HamiltonianKind& kind, const FamilySeed& seed, double s,
                                      const ScanOptions& opt) {
    FamilyMember m;
    m.s = s;
    try {
        m.chi = solve_initial_chi(kind, s, seed);
        ChainTrajectory tr = integrate_chain(kind, seed.point(s, m.chi), 0.0, opt.t_end, opt.integration);
        detect_period(tr, opt.period);
        m.trajectory = std::move(tr);
    } catch (const std::exception& e) {
        m.error = e.what();
    }
    return m;
}

/// Runs every s independently; failures are recorded per member.
inline std::vector<FamilyMember> family_scan(const HamiltonianKind& kind, const FamilySeed& seed,
                                             const std::vector<double>& s_grid, const ScanOptions& opt = {}) {
    for (double s : s_grid)
        if (!(s > 0.0 && s <= 0.3)) throw std::invalid_argument("family_scan: s-grid must lie in (0, 0.3]");
    std::vector<FamilyMember> out(s_grid.size());
    const std::size_t jobs = std::max<std::size_t>(1, opt.jobs);
    for (std::size_t start = 0; start < s_grid.size(); start += jobs) {
        std::vector<std::future<FamilyMember>> batch;
        const std::size_t end = std::min(s_grid.size(), start + jobs);
        for (std::size_t i = start; i < end; ++i)
            batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, run_family_member,
                                       std::cref(kind), std::cref(seed), s_grid[i], std::cref(opt)));
        for (std::size_t i = start; i < end; ++i) out[i] = batch[i - start].get();
    }
    return out;
}

struct KFit {
    cplx c3{};
    double residual = 0.0;
    double condition = 0.0;
    std::vector<double> tau;
    std::vector<cplx> k_hat;       // s^4 coefficient of z2/s - e^{i tau}
    std::vector<cplx> nuisance;    // s^5 coefficient
    FourierSeries spectrum;        // of k_hat

    /// Coefficient of e^{i n tau} in k_hat.
    cplx harmonic(int n) const { return spectrum.coeff(n); }
};

/// z2/s on the period-normalized grid tau_j = 2 pi j / n.
inline std::vector<cplx> rescaled_curve(const FamilyMember& m, int n) {
    if (!m.ok()) throw std::invalid_argument("rescaled_curve: member has no periodic trajectory");
    std::vector<cplx> z(static_cast<std::size_t>(n));
    const double T = m.period();
    for (int j = 0; j < n; ++j) z[static_cast<std::size_t>(j)] = m.trajectory->z2(T * j / n) / m.s;
    return z;
}

/**
 * Per-tau least squares of z2/s - e^{i tau} on (s^4, s^5) across the family,
 * followed by the harmonic analysis of the s^4 coefficient.
 */
inline KFit fit_k(const std::vector<FamilyMember>& scan, int n_samples = 256) {
    std::vector<const FamilyMember*> good;
    for (const auto& m : scan)
        if (m.ok()) good.push_back(&m);
    if (good.size() < 4) throw std::invalid_argument("fit_k: need at least four periodic members");

    Eigen::MatrixXd X(static_cast<Eigen::Index>(good.size()), 2);
    for (std::size_t i = 0; i < good.size(); ++i) {
        X(static_cast<Eigen::Index>(i), 0) = std::pow(good[i]->s, 4);
        X(static_cast<Eigen::Index>(i), 1) = std::pow(good[i]->s, 5);
    }
    // Column scaling keeps the condition number about the geometry of the grid.
    const Eigen::Vector2d cs = X.colwise().norm().cwiseInverse();
    const Eigen::MatrixXd Xs = X * cs.asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Xs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto sv = svd.singularValues();
    KFit out;
    out.condition = sv(0) / sv(sv.size() - 1);
    if (!(out.condition < 1e8)) throw NumericalError("fit_k: ill-conditioned s-grid");

    std::vector<std::vector<cplx>> curves;
    for (const auto* m : good) curves.push_back(rescaled_curve(*m, n_samples));

    double ss = 0.0;
    const auto n = static_cast<std::size_t>(n_samples);
    out.tau.resize(n);
    out.k_hat.resize(n);
    out.nuisance.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double tau = kTwoPi * static_cast<double>(j) / n_samples;
        const cplx e = std::polar(1.0, tau);
        Eigen::VectorXd re(static_cast<Eigen::Index>(good.size())), im(static_cast<Eigen::Index>(good.size()));
        for (std::size_t i = 0; i < good.size(); ++i) {
            const cplx d = curves[i][j] - e;
            re(static_cast<Eigen::Index>(i)) = d.real();
            im(static_cast<Eigen::Index>(i)) = d.imag();
        }
        const Eigen::Vector2d br = cs.asDiagonal() * svd.solve(re);
        const Eigen::Vector2d bi = cs.asDiagonal() * svd.solve(im);
        out.tau[j] = tau;
        out.k_hat[j] = {br(0), bi(0)};
        out.nuisance[j] = {br(1), bi(1)};
        ss += (re - X * br).squaredNorm() + (im - X * bi).squaredNorm();
    }
    out.residual = std::sqrt(ss / static_cast<double>(n * good.size()));
    out.spectrum = fourier_coeffs(out.k_hat);
    out.c3 = out.spectrum.coeff(3);
    return out;
}

/// Log-log fit of |T_s - 2 pi| against s over the periodic members.
inline LineFit period_slope(const std::vector<FamilyMember>& scan) {
    std::vector<double> s, d;
    for (const auto& m : scan) {
        if (!m.ok()) continue;
        s.push_back(m.s);
        d.push_back(std::abs(m.period() - kTwoPi));
    }
    if (s.size() < 2) throw std::invalid_argument("period_slope: need at least two periodic members");
    return loglog_fit(s, d);
}

} // namespace chainlab
