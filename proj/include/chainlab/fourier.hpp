#pragma once

/**
 * @file fourier.hpp
 * @brief Discrete Fourier coefficients of uniformly sampled periodic data.
 *
 * gamma_k = (1/N) sum_j x_j exp(-2 pi i j k / N), so gamma_0 is the mean and
 * x(t) ~ sum_k gamma_k exp(i k t) on [0, 2 pi).
 */

#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace chainlab {

class FourierSeries {
public:
    FourierSeries() = default;
    explicit FourierSeries(std::vector<std::complex<double>> c) : c_(std::move(c)) {}

    std::size_t size() const { return c_.size(); }

    /// Coefficient of exp(i k t); negative k wraps (aliasing beyond N/2).
    std::complex<double> coeff(int k) const {
        if (c_.empty()) return {};
        const auto n = static_cast<long>(c_.size());
        long i = k % n;
        if (i < 0) i += n;
        return c_[static_cast<std::size_t>(i)];
    }

    const std::vector<std::complex<double>>& raw() const { return c_; }

private:
    std::vector<std::complex<double>> c_;
};

inline FourierSeries fourier_coeffs(const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    if (n == 0) throw std::invalid_argument("fourier_coeffs: empty sample");
    std::vector<std::complex<double>> tw(n);
    for (std::size_t m = 0; m < n; ++m)
        tw[m] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n));
    std::vector<std::complex<double>> c(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{};
        for (std::size_t j = 0; j < n; ++j) acc += x[j] * tw[(j * k) % n];
        c[k] = acc / static_cast<double>(n);
    }
    return FourierSeries(std::move(c));
}

inline FourierSeries fourier_coeffs(const std::vector<double>& x) {
    return fourier_coeffs(std::vector<std::complex<double>>(x.begin(), x.end()));
}

} // namespace chainlab
