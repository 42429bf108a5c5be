#pragma once

/**
 * @file jet.hpp
 * @brief First-order forward-mode jets over a fixed list of real directions.
 *
 * A Jet<T, N> carries a value and its N partial derivatives. The scalar T is
 * either double or std::complex<double>; the seeded directions are always
 * real phase-space coordinates, so conj() acts componentwise.
 */

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <type_traits>

namespace chainlab {

template <typename T, std::size_t N>
struct Jet {
    T value{};
    std::array<T, N> d{};

    constexpr Jet() = default;
    constexpr Jet(T v) : value(v) {} // NOLINT(google-explicit-constructor)

    template <typename U>
        requires(std::is_arithmetic_v<U> && !std::is_same_v<U, T>)
    constexpr Jet(U v) : value(static_cast<T>(v)) {} // NOLINT(google-explicit-constructor)

    /// Independent variable number `i` with value v.
    static Jet variable(T v, std::size_t i) {
        Jet j(v);
        j.d[i] = T(1);
        return j;
    }

    Jet& operator+=(const Jet& o) {
        value += o.value;
        for (std::size_t i = 0; i < N; ++i) d[i] += o.d[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        value -= o.value;
        for (std::size_t i = 0; i < N; ++i) d[i] -= o.d[i];
        return *this;
    }
    Jet& operator*=(const Jet& o) {
        for (std::size_t i = 0; i < N; ++i) d[i] = d[i] * o.value + value * o.d[i];
        value *= o.value;
        return *this;
    }
    Jet& operator/=(const Jet& o) {
        const T inv = T(1) / o.value;
        value *= inv;
        for (std::size_t i = 0; i < N; ++i) d[i] = (d[i] - value * o.d[i]) * inv;
        return *this;
    }
    Jet& operator*=(const T& s) {
        value *= s;
        for (auto& x : d) x *= s;
        return *this;
    }

    Jet operator-() const {
        Jet r = *this;
        r.value = -r.value;
        for (auto& x : r.d) x = -x;
        return r;
    }
};

template <typename T, std::size_t N>
Jet<T, N> operator+(Jet<T, N> a, const Jet<T, N>& b) { return a += b; }
template <typename T, std::size_t N>
Jet<T, N> operator-(Jet<T, N> a, const Jet<T, N>& b) { return a -= b; }
template <typename T, std::size_t N>
Jet<T, N> operator*(Jet<T, N> a, const Jet<T, N>& b) { return a *= b; }
template <typename T, std::size_t N>
Jet<T, N> operator/(Jet<T, N> a, const Jet<T, N>& b) { return a /= b; }

// Mixed scalar arithmetic. S is T or anything convertible to it (double -> complex).
template <typename T, std::size_t N, typename S>
    requires std::is_convertible_v<S, T>
Jet<T, N> operator+(Jet<T, N> a, const S& s) { a.value += T(s); return a; }
template <typename T, std::size_t N, typename S>
    requires std::is_convertible_v<S, T>
Jet<T, N> operator+(const S& s, Jet<T, N> a) { a.value += T(s); return a; }
template <typename T, std::size_t N, typename S>
    requires std::is_convertible_v<S, T>
Jet<T, N> operator-(Jet<T, N> a, const S& s) { a.value -= T(s); return a; }
template <typename T, std::size_t N, typename S>
    requires std::is_convertible_v<S, T>
Jet<T, N> operator-(const S& s, const Jet<T, N>& a) { Jet<T, N> r = -a; r.value += T(s); return r; }
template <typename T, std::size_t N, typename S>
    requires std::is_convertible_v<S, T>
Jet<T, N> operator*(Jet<T, N> a, const S& s) { return a *= T(s); }
template <typename T, std::size_t N, typename S>
    requires std::is_convertible_v<S, T>
Jet<T, N> operator*(const S& s, Jet<T, N> a) { return a *= T(s); }
template <typename T, std::size_t N, typename S>
    requires std::is_convertible_v<S, T>
Jet<T, N> operator/(Jet<T, N> a, const S& s) { return a *= T(1) / T(s); }
template <typename T, std::size_t N, typename S>
    requires std::is_convertible_v<S, T>
Jet<T, N> operator/(const S& s, const Jet<T, N>& a) { return Jet<T, N>(T(s)) / a; }

template <typename T, std::size_t N>
Jet<T, N> conj(const Jet<T, N>& a) {
    Jet<T, N> r;
    r.value = std::conj(a.value);
    for (std::size_t i = 0; i < N; ++i) r.d[i] = std::conj(a.d[i]);
    return r;
}

/// Real part, as a real-valued jet.
template <std::size_t N>
Jet<double, N> real(const Jet<std::complex<double>, N>& a) {
    Jet<double, N> r(a.value.real());
    for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i].real();
    return r;
}

template <std::size_t N>
Jet<double, N> imag(const Jet<std::complex<double>, N>& a) {
    Jet<double, N> r(a.value.imag());
    for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i].imag();
    return r;
}

/// Chain rule helper: f(a) given f(a.value) and f'(a.value).
template <typename T, std::size_t N>
Jet<T, N> chain(const Jet<T, N>& a, T f, T df) {
    Jet<T, N> r(f);
    for (std::size_t i = 0; i < N; ++i) r.d[i] = df * a.d[i];
    return r;
}

template <typename T, std::size_t N>
Jet<T, N> sqrt(const Jet<T, N>& a) {
    using std::sqrt;
    const T s = sqrt(a.value);
    return chain(a, s, T(0.5) / s);
}

template <typename T, std::size_t N>
Jet<T, N> pow(const Jet<T, N>& a, double p) {
    using std::pow;
    const T v = pow(a.value, p);
    return chain(a, v, T(p) * pow(a.value, p - 1.0));
}

template <typename T, std::size_t N>
Jet<T, N> exp(const Jet<T, N>& a) {
    using std::exp;
    const T e = exp(a.value);
    return chain(a, e, e);
}

template <typename T, std::size_t N>
Jet<T, N> sin(const Jet<T, N>& a) {
    using std::cos;
    using std::sin;
    return chain(a, sin(a.value), cos(a.value));
}

template <typename T, std::size_t N>
Jet<T, N> cos(const Jet<T, N>& a) {
    using std::cos;
    using std::sin;
    return chain(a, cos(a.value), -sin(a.value));
}

// Plain-scalar overloads so generic code can call conj/real on either kind.
inline std::complex<double> conj(const std::complex<double>& z) { return std::conj(z); }
inline double real(const std::complex<double>& z) { return z.real(); }

} // namespace chainlab
