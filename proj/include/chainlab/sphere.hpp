#pragma once

/**
 * @file sphere.hpp
 * @brief Closed-form chains of 2 Re z1 = |z2|^2 and the comparison harness.
 *
 * With the sphere normalization of H and c = 4 p_y1:
 *   z2(t) = c2 + c1 e^{-ict},  c1 = i z2'(0) / c,  c2 = z2(0) - c1,
 *   y1(t) = y1(0) + (6 p_x0 - c |c1|^2) t + Im(conj(c2) c1 (e^{-ict} - 1)),
 *   x0(t) = x0(0) + 6 p_y1 t,
 * and x1 = |z2|^2 / 2 throughout.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "chainlab/flow.hpp"
#include "chainlab/hamiltonian.hpp"

namespace chainlab {

class SphereChain {
public:
    explicit SphereChain(const PhasePoint& q0) : q0_(q0) {
        c_ = 4.0 * q0.p_y1;
        const cplx v0 = cplx(0, -2.0) * q0.p_y1 * q0.z2 - 2.0 * q0.p_z2;
        if (c_ != 0.0) {
            c1_ = cplx(0, 1) * v0 / c_;
            c2_ = q0.z2 - c1_;
        } else {
            v0_ = v0;
        }
    }

    double frequency() const { return c_; }
    /// 2 pi / |c|; infinite for vertical chains.
    double period() const { return c_ == 0.0 ? std::numeric_limits<double>::infinity() : kTwoPi / std::abs(c_); }

    cplx z2(double t) const {
        if (c_ == 0.0) return q0_.z2 + v0_ * t;
        return c2_ + c1_ * std::polar(1.0, -c_ * t);
    }

    double y1(double t) const {
        if (c_ == 0.0) {
            if (v0_ != cplx{}) throw std::logic_error("SphereChain: p_y1 = 0 requires p_z2 = 0");
            return q0_.y1 + 6.0 * q0_.p_x0 * t;
        }
        return q0_.y1 + (6.0 * q0_.p_x0 - c_ * std::norm(c1_)) * t +
               (std::conj(c2_) * c1_ * (std::polar(1.0, -c_ * t) - 1.0)).imag();
    }

    double x0(double t) const { return q0_.x0 + 6.0 * q0_.p_y1 * t; }

private:
    PhasePoint q0_;
    double c_ = 0.0;
    cplx c1_{}, c2_{}, v0_{};
};

/// Solves H_sphere = 0 for p_x0 (H is linear in p_x0 when p_y1 != 0).
inline PhasePoint sphere_null_point(double x0, double y1, cplx z2, double p_y1, cplx p_z2) {
    if (p_y1 == 0.0) throw std::invalid_argument("sphere_null_point: p_y1 must be nonzero");
    PhasePoint q{x0, y1, z2, 0.0, p_y1, p_z2};
    const double rest = eval_H(HamiltonianKind::sphere(), q);
    q.p_x0 = -rest / (6.0 * p_y1);
    return q;
}

/// Random null initial data with |p_y1| in [0.25, 1].
inline PhasePoint random_sphere_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0), m(0.25, 1.0);
    const double x0 = u(rng), y1 = u(rng);
    const cplx z2(0.7 * u(rng), 0.7 * u(rng));
    const double p1 = (u(rng) < 0 ? -1.0 : 1.0) * m(rng);
    const cplx pz(u(rng), u(rng));
    return sphere_null_point(x0, y1, z2, p1, pz);
}

struct SphereComparison {
    double sup_error = 0.0; // over x0, y1, z2 on a uniform grid of one period
    double period = 0.0;
    double max_h_drift = 0.0;
};

inline SphereComparison compare_sphere_chain(const PhasePoint& q0, const IntegrationOptions& opt, double horizon = 0.0,
                                             int grid = 256) {
    const SphereChain exact(q0);
    const double T = horizon > 0.0 ? horizon : exact.period();
    if (!std::isfinite(T)) throw std::invalid_argument("compare_sphere_chain: give a horizon for vertical chains");
    const ChainTrajectory tr = integrate_chain(HamiltonianKind::sphere(), q0, 0.0, T, opt);
    SphereComparison out;
    out.period = T;
    out.max_h_drift = tr.max_h_drift();
    for (int i = 0; i <= grid; ++i) {
        const double t = T * i / grid;
        const State q = tr.state(t);
        out.sup_error = std::max({out.sup_error, std::abs(cplx(q[kX2], q[kY2]) - exact.z2(t)),
                                  std::abs(q[kY1] - exact.y1(t)), std::abs(q[kX0] - exact.x0(t))});
    }
    return out;
}

} // namespace chainlab
