#include <gtest/gtest.h>

#include <cmath>

#include "chainlab/ode.hpp"

using namespace chainlab;

TEST(Ode, ExponentialDecay) {
    OdeOptions opt;
    opt.rtol = opt.atol = 1e-12;
    const auto sol = dopri5<1>([](double, const std::array<double, 1>& y) { return std::array<double, 1>{-y[0]}; },
                               {1.0}, 0.0, 3.0, opt);
    EXPECT_NEAR(sol.final_state()[0], std::exp(-3.0), 1e-11);
    EXPECT_NEAR(sol(1.234)[0], std::exp(-1.234), 1e-10);
}

TEST(Ode, HarmonicOscillatorDenseOutput) {
    OdeOptions opt;
    opt.rtol = opt.atol = 1e-11;
    const auto sol = dopri5<2>(
        [](double, const std::array<double, 2>& y) { return std::array<double, 2>{y[1], -y[0]}; }, {0.0, 1.0}, 0.0,
        10.0, opt);
    double err = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double t = 10.0 * i / 1000;
        err = std::max(err, std::abs(sol(t)[0] - std::sin(t)));
    }
    EXPECT_LT(err, 1e-9);
    EXPECT_DOUBLE_EQ(sol.t_begin(), 0.0);
    EXPECT_DOUBLE_EQ(sol.t_end(), 10.0);
}

TEST(Ode, DenseOutputMatchesStepEndpoints) {
    OdeOptions opt;
    opt.rtol = opt.atol = 1e-10;
    std::vector<std::pair<double, double>> accepted;
    const auto sol = dopri5<1>(
        [](double t, const std::array<double, 1>& y) { return std::array<double, 1>{std::cos(t) * y[0]}; }, {1.0},
        0.0, 5.0, opt, [&](double t, const std::array<double, 1>& y) { accepted.emplace_back(t, y[0]); });
    ASSERT_EQ(accepted.size(), sol.steps());
    for (const auto& [t, y] : accepted) EXPECT_NEAR(sol(t)[0], y, 1e-13 * std::max(1.0, std::abs(y)));
}

TEST(Ode, ObserverAbortPropagates) {
    OdeOptions opt;
    const auto f = [](double, const std::array<double, 1>& y) { return y; };
    EXPECT_THROW(dopri5<1>(f, {1.0}, 0.0, 1.0, opt, [](double t, const auto&) {
                     if (t > 0.5) throw NumericalError("stop");
                 }),
                 NumericalError);
}

TEST(Ode, InvalidArguments) {
    OdeOptions opt;
    const auto f = [](double, const std::array<double, 1>& y) { return y; };
    EXPECT_THROW(dopri5<1>(f, {1.0}, 1.0, 0.0, opt), std::invalid_argument);
    opt.rtol = 0.0;
    EXPECT_THROW(dopri5<1>(f, {1.0}, 0.0, 1.0, opt), std::invalid_argument);
}

TEST(Ode, StepLimit) {
    OdeOptions opt;
    opt.max_steps = 3;
    const auto f = [](double, const std::array<double, 2>& y) { return std::array<double, 2>{y[1], -y[0]}; };
    EXPECT_THROW(dopri5<2>(f, {0.0, 1.0}, 0.0, 100.0, opt), NumericalError);
}

TEST(Ode, OutsideSpanThrows) {
    OdeOptions opt;
    const auto sol = dopri5<1>([](double, const std::array<double, 1>&) { return std::array<double, 1>{1.0}; }, {0.0},
                               0.0, 1.0, opt);
    EXPECT_THROW(sol(1.5), std::out_of_range);
    EXPECT_NEAR(sol(0.5)[0], 0.5, 1e-14);
}
