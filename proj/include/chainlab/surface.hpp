#pragma once

/**
 * @file surface.hpp
 * @brief Normal-form hypersurfaces 2 Re z1 = F(y1, z2, conj z2) in C^2.
 *
 * F = |z2|^2 + a z2^2 zb2^4 + a z2^4 zb2^2 + y1 * eta(y1, z2, zb2) + delta(z2, zb2)
 * with eta of weighted order >= 6 and delta of weighted order >= 7.
 *
 * Every function of the ambient point built here is affine in x1, so it is
 * stored as x1 * slope + base with slope and base polynomials in
 * (y1, z2, zb2). Wirtinger derivatives act on that pair exactly.
 */

#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <string>

#include "chainlab/error.hpp"
#include "chainlab/local_taylor.hpp"
#include "chainlab/series.hpp"

namespace chainlab {

struct AmbientPoint {
    double x1 = 0.0;
    double y1 = 0.0;
    cplx z2{};
};

struct SurfacePoint {
    double y1 = 0.0;
    cplx z2{};
};

/// Exponents of d/dz1, d/dzb1, d/dz2, d/dzb2.
using RhoIndex = std::array<int, 4>;

/// f(x1, y1, z2, zb2) = x1 * slope + base.
class AmbientFunction {
public:
    AmbientFunction() = default;
    AmbientFunction(WeightedSeries slope, WeightedSeries base) : slope_(std::move(slope)), base_(std::move(base)) {}

    const WeightedSeries& slope() const { return slope_; }
    const WeightedSeries& base() const { return base_; }
    bool affine_free() const { return slope_.empty(); }

    AmbientFunction wirtinger(Wirtinger v) const {
        // d/dz1 = (d/dx1 - i d/dy1)/2, d/dzb1 = (d/dx1 + i d/dy1)/2.
        switch (v) {
        case Wirtinger::z1:
        case Wirtinger::zb1: {
            const cplx k = v == Wirtinger::z1 ? cplx(0, -0.5) : cplx(0, 0.5);
            return {slope_.diff(SeriesVar::y1) * k, slope_ * cplx(0.5) + base_.diff(SeriesVar::y1) * k};
        }
        case Wirtinger::z2:
            return {slope_.diff(SeriesVar::z2), base_.diff(SeriesVar::z2)};
        case Wirtinger::zb2:
            return {slope_.diff(SeriesVar::zb2), base_.diff(SeriesVar::zb2)};
        }
        throw std::logic_error("unreachable");
    }

    AmbientFunction partial(const RhoIndex& idx) const {
        AmbientFunction f = *this;
        for (int k = 0; k < 4; ++k)
            for (int n = 0; n < idx[static_cast<std::size_t>(k)]; ++n) f = f.wirtinger(static_cast<Wirtinger>(k));
        return f;
    }

    template <typename T>
    T evaluate(const T& x1, const T& y1, const T& z2, const T& zb2) const {
        T v = base_.evaluate(y1, z2, zb2);
        if (!slope_.empty()) v += x1 * slope_.evaluate(y1, z2, zb2);
        return v;
    }

    cplx operator()(const AmbientPoint& p) const {
        return evaluate<cplx>(p.x1, p.y1, p.z2, std::conj(p.z2));
    }

    friend AmbientFunction operator+(const AmbientFunction& a, const AmbientFunction& b) {
        return {a.slope_ + b.slope_, a.base_ + b.base_};
    }
    friend AmbientFunction operator-(const AmbientFunction& a, const AmbientFunction& b) {
        return {a.slope_ - b.slope_, a.base_ - b.base_};
    }
    /// Products stay affine in x1 only when one factor is x1-free.
    friend AmbientFunction operator*(const AmbientFunction& a, const AmbientFunction& b) {
        if (!a.affine_free() && !b.affine_free())
            throw std::logic_error("AmbientFunction: product would be quadratic in x1");
        return {a.slope_ * b.base_ + a.base_ * b.slope_, a.base_ * b.base_};
    }

private:
    WeightedSeries slope_;
    WeightedSeries base_;
};

/// Partials of rho and of Phi = J(rho) entering the Fefferman Hamiltonian.
struct FeffermanData {
    // rho_{z1}, rho_{zb1}, rho_{z2}, rho_{zb2}
    AmbientFunction rho_z1, rho_zb1, rho_z2, rho_zb2;
    // rho_{zj zbk}, j,k in {1,2}
    std::array<std::array<AmbientFunction, 2>, 2> rho_hess;
    AmbientFunction phi;
    std::array<AmbientFunction, 2> phi_z;  // Phi_{z1}, Phi_{z2}
    std::array<AmbientFunction, 2> phi_zb; // Phi_{zb1}, Phi_{zb2}
    std::array<std::array<AmbientFunction, 2>, 2> phi_hess;
};

/// 3x3 bordered complex Hessian determinant built from any ring type.
template <typename T>
T bordered_determinant(const T& r, const T& r_zb1, const T& r_zb2, const T& r_z1, const T& r_z1zb1,
                       const T& r_z1zb2, const T& r_z2, const T& r_z2zb1, const T& r_z2zb2) {
    return r * (r_z1zb1 * r_z2zb2 - r_z1zb2 * r_z2zb1) - r_zb1 * (r_z1 * r_z2zb2 - r_z1zb2 * r_z2) +
           r_zb2 * (r_z1 * r_z2zb1 - r_z1zb1 * r_z2);
}

class Hypersurface {
public:
    /// Normal-form surface with Cartan coefficient a and perturbations eta, delta.
    explicit Hypersurface(double a, WeightedSeries eta = WeightedSeries{}, WeightedSeries delta = WeightedSeries{})
        : a_(a), eta_(std::move(eta)), delta_(std::move(delta)) {
        if (!std::isfinite(a)) throw std::invalid_argument("Hypersurface: a must be finite");
        if (!eta_.empty() && eta_.min_weight() < 6)
            throw std::invalid_argument("Hypersurface: eta must have weighted order >= 6");
        if (!delta_.empty() && delta_.min_weight() < 7)
            throw std::invalid_argument("Hypersurface: delta must have weighted order >= 7");
        if (delta_.depends_on(SeriesVar::y1)) throw std::invalid_argument("Hypersurface: delta may not depend on y1");
        if (!eta_.is_real(1e-12) || !delta_.is_real(1e-12))
            throw std::invalid_argument("Hypersurface: eta and delta must be real-valued");

        graph_ = WeightedSeries{{{0, 1, 1}, 1.0}, {{0, 2, 4}, a_}, {{0, 4, 2}, a_}};
        graph_ += WeightedSeries::monomial({1, 0, 0}) * eta_;
        graph_ += delta_;
        rho_ = AmbientFunction(WeightedSeries::constant(2.0), -graph_);
        build_fefferman_data();
    }

    static Hypersurface sphere() { return Hypersurface(0.0); }

    double a() const { return a_; }
    const WeightedSeries& eta() const { return eta_; }
    const WeightedSeries& delta() const { return delta_; }
    /// The graph function F with rho = 2 x1 - F.
    const WeightedSeries& graph() const { return graph_; }
    const AmbientFunction& rho() const { return rho_; }
    const FeffermanData& fefferman() const { return data_; }
    bool is_rigid() const { return eta_.empty(); }

    AmbientPoint lift(const SurfacePoint& p) const {
        return {0.5 * graph_(p.y1, p.z2).real(), p.y1, p.z2};
    }

    /// Exact Wirtinger partial of rho of total order <= 4.
    cplx rho_partial(const AmbientPoint& p, const RhoIndex& idx) const {
        int total = 0;
        for (int k : idx) {
            if (k < 0) throw std::invalid_argument("rho_partial: negative index");
            total += k;
        }
        if (total > 4) throw std::invalid_argument("rho_partial: total order exceeds 4");
        return rho_.partial(idx)(p);
    }

    /// J(rho) at an ambient point.
    cplx monge_ampere(const AmbientPoint& p) const { return data_.phi(p); }

    /// Taylor expansion of rho about p in the Wirtinger displacements.
    LocalTaylor expand_rho(const AmbientPoint& p, int order) const {
        const cplx z1(p.x1, p.y1);
        const auto u1 = LocalTaylor::coordinate(order, Wirtinger::z1, z1);
        const auto ub1 = LocalTaylor::coordinate(order, Wirtinger::zb1, std::conj(z1));
        const auto u2 = LocalTaylor::coordinate(order, Wirtinger::z2, p.z2);
        const auto ub2 = LocalTaylor::coordinate(order, Wirtinger::zb2, std::conj(p.z2));
        const LocalTaylor y1 = (u1 - ub1) * cplx(0.0, -0.5);
        return (u1 + ub1) - graph_.evaluate<LocalTaylor>(y1, u2, ub2);
    }

private:
    void build_fefferman_data() {
        auto& d = data_;
        d.rho_z1 = rho_.wirtinger(Wirtinger::z1);
        d.rho_zb1 = rho_.wirtinger(Wirtinger::zb1);
        d.rho_z2 = rho_.wirtinger(Wirtinger::z2);
        d.rho_zb2 = rho_.wirtinger(Wirtinger::zb2);
        const std::array<const AmbientFunction*, 2> first{&d.rho_z1, &d.rho_z2};
        constexpr std::array<Wirtinger, 2> bars{Wirtinger::zb1, Wirtinger::zb2};
        constexpr std::array<Wirtinger, 2> holo{Wirtinger::z1, Wirtinger::z2};
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k) d.rho_hess[j][k] = first[j]->wirtinger(bars[k]);

        d.phi = bordered_determinant(rho_, d.rho_zb1, d.rho_zb2, d.rho_z1, d.rho_hess[0][0], d.rho_hess[0][1],
                                     d.rho_z2, d.rho_hess[1][0], d.rho_hess[1][1]);
        for (std::size_t j = 0; j < 2; ++j) {
            d.phi_z[j] = d.phi.wirtinger(holo[j]);
            d.phi_zb[j] = d.phi.wirtinger(bars[j]);
        }
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k) d.phi_hess[j][k] = d.phi_z[j].wirtinger(bars[k]);
    }

    double a_;
    WeightedSeries eta_;
    WeightedSeries delta_;
    WeightedSeries graph_;
    AmbientFunction rho_;
    FeffermanData data_;
};

/// J applied to a local expansion; the result has order r.order() - 2.
inline LocalTaylor monge_ampere(const LocalTaylor& r) {
    using W = Wirtinger;
    const LocalTaylor r1 = r.derivative(W::z1), rb1 = r.derivative(W::zb1);
    const LocalTaylor r2 = r.derivative(W::z2), rb2 = r.derivative(W::zb2);
    return bordered_determinant(r, rb1, rb2, r1, r1.derivative(W::zb1), r1.derivative(W::zb2), r2,
                                r2.derivative(W::zb1), r2.derivative(W::zb2));
}

/**
 * Pointwise evaluators for the approximate Monge-Ampere solutions
 *   rho1 = rho / J(rho)^(1/3),  rho2 = rho1 (5 - J(rho1)) / 4.
 * Each call expands rho to sixth order about the query point.
 */
class ApproximateSolutions {
public:
    explicit ApproximateSolutions(std::shared_ptr<const Hypersurface> surface) : surface_(std::move(surface)) {}

    struct Values {
        cplx rho, rho1, rho2;
        cplx j_rho, j_rho1, j_rho2;
    };

    Values evaluate(const AmbientPoint& p) const {
        const LocalTaylor r = surface_->expand_rho(p, 6);
        const LocalTaylor j0 = monge_ampere(r);
        const cplx j0v = j0.value();
        if (!(j0v.real() > 0.0) || std::abs(j0v.imag()) > 1e-9 * std::abs(j0v))
            throw NumericalError("approx_ma_solutions: J(rho) is not positive at the query point");
        const LocalTaylor r1 = r.truncated(4) * pow(j0, -1.0 / 3.0);
        const LocalTaylor j1 = monge_ampere(r1);
        const LocalTaylor r2 = r1.truncated(2) * (cplx(5.0) - j1) * cplx(0.25);
        const LocalTaylor j2 = monge_ampere(r2);
        return {r.value(), r1.value(), r2.value(), j0v, j1.value(), j2.value()};
    }

    cplx rho1(const AmbientPoint& p) const { return evaluate(p).rho1; }
    cplx rho2(const AmbientPoint& p) const { return evaluate(p).rho2; }

private:
    std::shared_ptr<const Hypersurface> surface_;
};

inline ApproximateSolutions approx_ma_solutions(std::shared_ptr<const Hypersurface> surface) {
    return ApproximateSolutions(std::move(surface));
}

} // namespace chainlab
