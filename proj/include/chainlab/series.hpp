#pragma once

/**
 * @file series.hpp
 * @brief Sparse polynomials in (y1, z2, conj z2) with anisotropic weights.
 *
 * Weights: wt y1 = 2, wt z2 = wt conj(z2) = 1. A WeightedSeries never stores a
 * monomial whose weighted degree exceeds its truncation order, and never
 * stores an exact zero coefficient.
 */

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <cstdlib>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <vector>

namespace chainlab {

using cplx = std::complex<double>;

enum class SeriesVar { y1, z2, zb2 };

struct Monomial {
    int y1 = 0;
    int z2 = 0;
    int zb2 = 0;

    constexpr int weight() const { return 2 * y1 + z2 + zb2; }
    constexpr Monomial mirror() const { return {y1, zb2, z2}; }
    constexpr auto operator<=>(const Monomial&) const = default;
};

class WeightedSeries {
public:
    /// Large enough that products of normal-form data are never truncated.
    static constexpr int kExact = 1000;

    explicit WeightedSeries(int truncation_order = kExact) : order_(truncation_order) {
        if (truncation_order < 0) throw std::invalid_argument("WeightedSeries: negative truncation order");
    }

    WeightedSeries(std::initializer_list<std::pair<Monomial, cplx>> terms, int truncation_order = kExact)
        : WeightedSeries(truncation_order) {
        for (const auto& [m, c] : terms) add_term(m, c);
    }

    static WeightedSeries constant(cplx c, int truncation_order = kExact) {
        WeightedSeries s(truncation_order);
        s.add_term({}, c);
        return s;
    }

    static WeightedSeries monomial(Monomial m, cplx c = 1.0, int truncation_order = kExact) {
        WeightedSeries s(truncation_order);
        s.add_term(m, c);
        return s;
    }

    int truncation_order() const { return order_; }
    const std::map<Monomial, cplx>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    cplx coeff(Monomial m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? cplx{} : it->second;
    }

    /// Accumulates c into monomial m; drops it if above the truncation order.
    void add_term(Monomial m, cplx c) {
        if (m.y1 < 0 || m.z2 < 0 || m.zb2 < 0) throw std::invalid_argument("Monomial: negative exponent");
        if (m.weight() > order_ || c == cplx{}) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == cplx{}) terms_.erase(it);
        }
    }

    /// Smallest weighted degree present (kExact + 1 for the zero series).
    int min_weight() const {
        int w = kExact + 1;
        for (const auto& [m, c] : terms_) w = std::min(w, m.weight());
        return w;
    }

    int max_weight() const {
        int w = -1;
        for (const auto& [m, c] : terms_) w = std::max(w, m.weight());
        return w;
    }

    bool depends_on(SeriesVar v) const {
        return std::any_of(terms_.begin(), terms_.end(), [v](const auto& kv) {
            const Monomial& m = kv.first;
            return (v == SeriesVar::y1 ? m.y1 : v == SeriesVar::z2 ? m.z2 : m.zb2) > 0;
        });
    }

    /// True when coeff(k, a, b) == conj(coeff(k, b, a)) within tol, i.e. the
    /// series takes real values for real y1.
    bool is_real(double tol = 0.0) const {
        for (const auto& [m, c] : terms_) {
            if (std::abs(c - std::conj(coeff(m.mirror()))) > tol) return false;
        }
        return true;
    }

    /// Maximum coefficient distance; truncation orders are ignored.
    double distance(const WeightedSeries& o) const {
        double d = 0.0;
        for (const auto& [m, c] : terms_) d = std::max(d, std::abs(c - o.coeff(m)));
        for (const auto& [m, c] : o.terms_) d = std::max(d, std::abs(c - coeff(m)));
        return d;
    }

    WeightedSeries& operator+=(const WeightedSeries& o) {
        order_ = std::min(order_, o.order_);
        prune();
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }

    WeightedSeries& operator-=(const WeightedSeries& o) {
        order_ = std::min(order_, o.order_);
        prune();
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }

    WeightedSeries& operator*=(cplx s) {
        if (s == cplx{}) {
            terms_.clear();
            return *this;
        }
        for (auto& [m, c] : terms_) c *= s;
        return *this;
    }

    WeightedSeries operator-() const {
        WeightedSeries r = *this;
        r *= -1.0;
        return r;
    }

    friend WeightedSeries operator+(WeightedSeries a, const WeightedSeries& b) { return a += b; }
    friend WeightedSeries operator-(WeightedSeries a, const WeightedSeries& b) { return a -= b; }
    friend WeightedSeries operator*(WeightedSeries a, cplx s) { return a *= s; }
    friend WeightedSeries operator*(cplx s, WeightedSeries a) { return a *= s; }

    friend WeightedSeries operator*(const WeightedSeries& a, const WeightedSeries& b) {
        WeightedSeries r(std::min(a.order_, b.order_));
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                r.add_term({ma.y1 + mb.y1, ma.z2 + mb.z2, ma.zb2 + mb.zb2}, ca * cb);
            }
        }
        return r;
    }

    /// Formal partial derivative. The truncation order drops by the weight of v.
    WeightedSeries diff(SeriesVar v) const {
        const int w = v == SeriesVar::y1 ? 2 : 1;
        WeightedSeries r(std::max(0, order_ == kExact ? kExact : order_ - w));
        for (const auto& [m, c] : terms_) {
            Monomial n = m;
            int* e = v == SeriesVar::y1 ? &n.y1 : v == SeriesVar::z2 ? &n.z2 : &n.zb2;
            if (*e == 0) continue;
            const double k = *e;
            --*e;
            r.add_term(n, c * k);
        }
        return r;
    }

    /// Multiplies every monomial of weighted degree d by delta^d.
    WeightedSeries anisotropic_scale(double delta) const {
        if (!(delta > 0.0)) throw std::invalid_argument("anisotropic_scale: delta must be positive");
        WeightedSeries r(order_);
        for (const auto& [m, c] : terms_) r.add_term(m, c * std::pow(delta, m.weight()));
        return r;
    }

    /// Swaps z2 and conj(z2) and conjugates coefficients.
    WeightedSeries conjugate() const {
        WeightedSeries r(order_);
        for (const auto& [m, c] : terms_) r.add_term(m.mirror(), std::conj(c));
        return r;
    }

    /// Evaluates at arbitrary ring-valued arguments (complex, Jet, LocalTaylor).
    /// The conjugate slot is passed explicitly so that z2 and conj(z2) may be
    /// treated as independent variables.
    template <typename T>
    T evaluate(const T& y1, const T& z2, const T& zb2) const {
        int ky = 0, kz = 0, kb = 0;
        for (const auto& [m, c] : terms_) {
            ky = std::max(ky, m.y1);
            kz = std::max(kz, m.z2);
            kb = std::max(kb, m.zb2);
        }
        const auto powers = [](const T& x, int n) {
            std::vector<T> p;
            p.reserve(static_cast<std::size_t>(n) + 1);
            p.push_back(T(1.0));
            for (int i = 1; i <= n; ++i) p.push_back(p.back() * x);
            return p;
        };
        const auto py = powers(y1, ky);
        const auto pz = powers(z2, kz);
        const auto pb = powers(zb2, kb);
        T sum(0.0);
        for (const auto& [m, c] : terms_) {
            sum += (py[m.y1] * pz[m.z2]) * pb[m.zb2] * c;
        }
        return sum;
    }

    cplx operator()(double y1, cplx z2) const { return evaluate<cplx>(y1, z2, std::conj(z2)); }

private:
    void prune() {
        for (auto it = terms_.begin(); it != terms_.end();) {
            it = it->first.weight() > order_ ? terms_.erase(it) : std::next(it);
        }
    }

    std::map<Monomial, cplx> terms_;
    int order_;
};

} // namespace chainlab
