#pragma once

/**
 * @file ode.hpp
 * @brief Dormand-Prince 5(4) with a retained continuous extension.
 *
 * Every accepted step keeps its seven stage derivatives so the solution can
 * be interpolated anywhere in [t0, t1] after the run (4th-order free
 * interpolant of Shampine).
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainlab/error.hpp"

namespace chainlab {

struct OdeOptions {
    double rtol = 1e-12;
    double atol = 1e-12;
    double initial_step = 0.0; // 0 selects automatically
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 5'000'000;
};

namespace dp5 {
// clang-format off
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - bhat
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
// continuous extension: weight_i(theta) = sum_j P[i][j] theta^(j+1)
inline constexpr double P[7][4] = {
    {1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608, -12715105075.0 / 11282082432},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933, 87487479700.0 / 32700410799},
    {0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304, -10690763975.0 / 1880347072},
    {0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408, 701980252875.0 / 199316789632},
    {0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883, -1453857185.0 / 822651844},
    {0.0, 40617522.0 / 29380423, -110615467.0 / 29380423, 69997945.0 / 29380423}};
// clang-format on
} // namespace dp5

template <std::size_t N>
class DenseSolution {
public:
    using Vec = std::array<double, N>;

    struct Segment {
        double t = 0.0;
        double h = 0.0;
        Vec y{};
        std::array<Vec, 7> k{};
    };

    double t_begin() const { return segments_.empty() ? t_end_ : segments_.front().t; }
    double t_end() const { return t_end_; }
    std::size_t steps() const { return segments_.size(); }
    const std::vector<Segment>& segments() const { return segments_; }
    const Vec& final_state() const { return y_end_; }

    Vec operator()(double t) const {
        if (segments_.empty()) return y_end_;
        const double lo = t_begin(), hi = t_end_;
        const double tol = 1e-12 * std::max(1.0, std::abs(hi - lo));
        if (t < lo - tol || t > hi + tol) throw std::out_of_range("DenseSolution: time outside the integrated span");
        auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                                   [](double x, const Segment& s) { return x < s.t; });
        const Segment& s = it == segments_.begin() ? segments_.front() : *std::prev(it);
        const double th = std::clamp((t - s.t) / s.h, 0.0, 1.0);
        const std::array<double, 4> pw{th, th * th, th * th * th, th * th * th * th};
        std::array<double, 7> w{};
        for (std::size_t i = 0; i < 7; ++i)
            for (std::size_t j = 0; j < 4; ++j) w[i] += dp5::P[i][j] * pw[j];
        Vec y = s.y;
        for (std::size_t i = 0; i < 7; ++i)
            for (std::size_t n = 0; n < N; ++n) y[n] += s.h * w[i] * s.k[i][n];
        return y;
    }

    void push(Segment s) { segments_.push_back(std::move(s)); }
    void finish(double t, const Vec& y) {
        t_end_ = t;
        y_end_ = y;
    }

private:
    std::vector<Segment> segments_;
    double t_end_ = 0.0;
    Vec y_end_{};
};

/**
 * Integrates y' = f(t, y) from t0 to t1. `observe(t, y)` runs after each
 * accepted step and may throw to abort.
 */
template <std::size_t N, typename Rhs, typename Observer>
DenseSolution<N> dopri5(Rhs&& f, const std::array<double, N>& y0, double t0, double t1, const OdeOptions& opt,
                        Observer&& observe) {
    using Vec = std::array<double, N>;
    if (!(t1 > t0)) throw std::invalid_argument("dopri5: t1 must exceed t0");
    if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw std::invalid_argument("dopri5: tolerances must be positive");

    const auto axpy = [](Vec y, double h, std::initializer_list<std::pair<double, const Vec*>> terms) {
        for (const auto& [c, k] : terms)
            if (c != 0.0)
                for (std::size_t n = 0; n < N; ++n) y[n] += h * c * (*k)[n];
        return y;
    };
    const auto scale = [&](const Vec& a, const Vec& b, std::size_t n) {
        return opt.atol + opt.rtol * std::max(std::abs(a[n]), std::abs(b[n]));
    };
    const auto rms = [](const Vec& v, auto&& sc) {
        double s = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            const double x = v[n] / sc(n);
            s += x * x;
        }
        return std::sqrt(s / N);
    };

    DenseSolution<N> sol;
    Vec y = y0;
    double t = t0;
    Vec k1 = f(t, y);

    double h = opt.initial_step;
    if (h <= 0.0) {
        // Hairer-Wanner starting step heuristic.
        const double d0 = rms(y, [&](std::size_t n) { return scale(y, y, n); });
        const double d1 = rms(k1, [&](std::size_t n) { return scale(y, y, n); });
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        const Vec y1 = axpy(y, h0, {{1.0, &k1}});
        const Vec f1 = f(t + h0, y1);
        Vec df;
        for (std::size_t n = 0; n < N; ++n) df[n] = f1[n] - k1[n];
        const double d2 = rms(df, [&](std::size_t n) { return scale(y, y, n); }) / h0;
        const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                    : std::pow(0.01 / std::max(d1, d2), 1.0 / 5.0);
        h = std::min(100 * h0, h1);
    }
    h = std::min({h, opt.max_step, t1 - t0});

    std::size_t accepted = 0;
    bool last_rejected = false;
    while (t < t1) {
        if (accepted++ > opt.max_steps) throw NumericalError("dopri5: step limit exceeded");
        if (h < 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
            throw NumericalError("dopri5: step size underflow at t = " + std::to_string(t));
        if (t + h > t1 || t1 - (t + h) < 1e-14 * std::abs(t1)) h = t1 - t;

        using namespace dp5;
        const Vec k2 = f(t + c2 * h, axpy(y, h, {{a21, &k1}}));
        const Vec k3 = f(t + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
        const Vec k4 = f(t + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const Vec k5 = f(t + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const Vec k6 = f(t + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const Vec ynew = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const Vec k7 = f(t + h, ynew);

        Vec err{};
        for (std::size_t n = 0; n < N; ++n)
            err[n] = h * (e1 * k1[n] + e3 * k3[n] + e4 * k4[n] + e5 * k5[n] + e6 * k6[n] + e7 * k7[n]);
        const double en = rms(err, [&](std::size_t n) { return scale(y, ynew, n); });

        if (!std::isfinite(en)) {
            h *= 0.1;
            last_rejected = true;
            continue;
        }
        if (en <= 1.0) {
            typename DenseSolution<N>::Segment seg;
            seg.t = t;
            seg.h = h;
            seg.y = y;
            seg.k = {k1, k2, k3, k4, k5, k6, k7};
            sol.push(std::move(seg));
            t = (h == t1 - t) ? t1 : t + h;
            y = ynew;
            k1 = k7;
            observe(t, y);
            double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
            if (last_rejected) fac = std::min(fac, 1.0);
            h = std::min(h * fac, opt.max_step);
            last_rejected = false;
        } else {
            h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
            last_rejected = true;
        }
    }
    sol.finish(t, y);
    return sol;
}

template <std::size_t N, typename Rhs>
DenseSolution<N> dopri5(Rhs&& f, const std::array<double, N>& y0, double t0, double t1, const OdeOptions& opt) {
    return dopri5<N>(std::forward<Rhs>(f), y0, t0, t1, opt, [](double, const std::array<double, N>&) {});
}

} // namespace chainlab
