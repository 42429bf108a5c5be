#pragma once

/**
 * @file local_taylor.hpp
 * @brief Dense truncated Taylor expansions in the four Wirtinger directions
 *        (z1, conj z1, z2, conj z2) about a fixed ambient point.
 *
 * Used off the hot path to differentiate non-polynomial expressions such as
 * rho / J(rho)^(1/3) to fourth order. Variables are treated as independent,
 * which is exact for real-analytic data.
 */

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace chainlab {

enum class Wirtinger : int { z1 = 0, zb1 = 1, z2 = 2, zb2 = 3 };

namespace detail {

inline constexpr int kMaxTaylorOrder = 8;

struct TaylorTable {
    std::vector<std::array<int, 4>> exps;    // graded order: degree 0, 1, 2, ...
    std::vector<std::size_t> count_up_to;    // number of monomials with degree <= k
    std::vector<int> lookup;                 // flat (K+1)^4 -> index or -1

    static int flat(const std::array<int, 4>& e) {
        constexpr int B = kMaxTaylorOrder + 1;
        return ((e[0] * B + e[1]) * B + e[2]) * B + e[3];
    }

    TaylorTable() {
        constexpr int K = kMaxTaylorOrder;
        lookup.assign(static_cast<std::size_t>((K + 1) * (K + 1) * (K + 1) * (K + 1)), -1);
        for (int deg = 0; deg <= K; ++deg) {
            for (int a = deg; a >= 0; --a)
                for (int b = deg - a; b >= 0; --b)
                    for (int c = deg - a - b; c >= 0; --c) {
                        const std::array<int, 4> e{a, b, c, deg - a - b - c};
                        lookup[static_cast<std::size_t>(flat(e))] = static_cast<int>(exps.size());
                        exps.push_back(e);
                    }
            count_up_to.push_back(exps.size());
        }
    }

    int index(const std::array<int, 4>& e) const {
        for (int x : e)
            if (x < 0 || x > kMaxTaylorOrder) return -1;
        return lookup[static_cast<std::size_t>(flat(e))];
    }
};

inline const TaylorTable& taylor_table() {
    static const TaylorTable table;
    return table;
}

inline double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

} // namespace detail

class LocalTaylor {
public:
    using cplx = std::complex<double>;

    explicit LocalTaylor(int order = 0, cplx value = {}) : order_(order) {
        if (order < 0 || order > detail::kMaxTaylorOrder)
            throw std::invalid_argument("LocalTaylor: order out of range");
        c_.assign(detail::taylor_table().count_up_to[static_cast<std::size_t>(order)], cplx{});
        c_[0] = value;
    }

    // Constant at full order; the order shrinks when combined with shorter expansions.
    explicit LocalTaylor(double value) : LocalTaylor(detail::kMaxTaylorOrder, cplx(value)) {}

    /// The coordinate function base + (displacement along v), to the given order.
    static LocalTaylor coordinate(int order, Wirtinger v, cplx base) {
        LocalTaylor t(order, base);
        if (order >= 1) {
            std::array<int, 4> e{0, 0, 0, 0};
            e[static_cast<std::size_t>(v)] = 1;
            t.c_[static_cast<std::size_t>(detail::taylor_table().index(e))] = 1.0;
        }
        return t;
    }

    int order() const { return order_; }
    cplx value() const { return c_[0]; }

    cplx coeff(const std::array<int, 4>& e) const {
        const int i = detail::taylor_table().index(e);
        if (i < 0 || static_cast<std::size_t>(i) >= c_.size()) return {};
        return c_[static_cast<std::size_t>(i)];
    }

    /// Mixed partial derivative at the expansion point, exponents in
    /// (z1, zb1, z2, zb2) order.
    cplx partial(const std::array<int, 4>& e) const {
        int deg = 0;
        double f = 1.0;
        for (int x : e) {
            deg += x;
            f *= detail::factorial(x);
        }
        if (deg > order_) throw std::invalid_argument("LocalTaylor::partial: exceeds expansion order");
        return coeff(e) * f;
    }

    /// Derivative as a new expansion of one lower order.
    LocalTaylor derivative(Wirtinger v) const {
        if (order_ == 0) throw std::invalid_argument("LocalTaylor::derivative: order 0");
        const auto& tab = detail::taylor_table();
        const auto k = static_cast<std::size_t>(v);
        LocalTaylor r(order_ - 1);
        for (std::size_t i = 0; i < r.c_.size(); ++i) {
            auto e = tab.exps[i];
            ++e[k];
            r.c_[i] = c_[static_cast<std::size_t>(tab.index(e))] * static_cast<double>(e[k]);
        }
        return r;
    }

    LocalTaylor truncated(int order) const {
        LocalTaylor r(std::min(order, order_));
        std::copy_n(c_.begin(), r.c_.size(), r.c_.begin());
        return r;
    }

    LocalTaylor& operator+=(const LocalTaylor& o) {
        shrink_to(o.order_);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    LocalTaylor& operator-=(const LocalTaylor& o) {
        shrink_to(o.order_);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    LocalTaylor& operator*=(cplx s) {
        for (auto& x : c_) x *= s;
        return *this;
    }
    LocalTaylor operator-() const {
        LocalTaylor r = *this;
        return r *= -1.0;
    }

    friend LocalTaylor operator+(LocalTaylor a, const LocalTaylor& b) { return a += b; }
    friend LocalTaylor operator-(LocalTaylor a, const LocalTaylor& b) { return a -= b; }
    friend LocalTaylor operator*(LocalTaylor a, cplx s) { return a *= s; }
    friend LocalTaylor operator*(cplx s, LocalTaylor a) { return a *= s; }
    friend LocalTaylor operator+(LocalTaylor a, cplx s) { a.c_[0] += s; return a; }
    friend LocalTaylor operator-(cplx s, const LocalTaylor& a) { LocalTaylor r = -a; r.c_[0] += s; return r; }

    friend LocalTaylor operator*(const LocalTaylor& a, const LocalTaylor& b) {
        const auto& tab = detail::taylor_table();
        const int order = std::min(a.order_, b.order_);
        LocalTaylor r(order);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == cplx{}) continue;
            const auto& ei = tab.exps[i];
            const int di = ei[0] + ei[1] + ei[2] + ei[3];
            if (di > order) break;
            const std::size_t jmax = tab.count_up_to[static_cast<std::size_t>(order - di)];
            for (std::size_t j = 0; j < std::min(jmax, b.c_.size()); ++j) {
                if (b.c_[j] == cplx{}) continue;
                const auto& ej = tab.exps[j];
                const int k = tab.index({ei[0] + ej[0], ei[1] + ej[1], ei[2] + ej[2], ei[3] + ej[3]});
                r.c_[static_cast<std::size_t>(k)] += a.c_[i] * b.c_[j];
            }
        }
        return r;
    }

    LocalTaylor& operator*=(const LocalTaylor& o) { return *this = *this * o; }

    /// Real power via the binomial series about the constant term.
    friend LocalTaylor pow(const LocalTaylor& f, double p) {
        const cplx c0 = f.value();
        if (c0 == cplx{}) throw std::domain_error("LocalTaylor::pow: zero constant term");
        LocalTaylor g = f * (1.0 / c0);
        g.c_[0] = 0.0; // g = f/c0 - 1
        LocalTaylor sum(f.order_, 1.0);
        LocalTaylor gk(f.order_, 1.0);
        double binom = 1.0;
        for (int k = 1; k <= f.order_; ++k) {
            binom *= (p - (k - 1)) / k;
            gk = gk * g;
            sum += gk * cplx(binom);
        }
        return sum * std::pow(c0, p);
    }

    friend LocalTaylor operator/(const LocalTaylor& a, const LocalTaylor& b) { return a * pow(b, -1.0); }

private:
    void shrink_to(int order) {
        if (order < order_) {
            order_ = order;
            c_.resize(detail::taylor_table().count_up_to[static_cast<std::size_t>(order)]);
        }
    }

    int order_;
    std::vector<cplx> c_;
};

} // namespace chainlab
