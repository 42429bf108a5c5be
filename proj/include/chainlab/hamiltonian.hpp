#pragma once

/**
 * @file hamiltonian.hpp
 * @brief Fefferman Hamiltonian on T*(S^1 x M) in four flavours.
 *
 * Phase coordinates, in integrator order:
 *   (x0, y1, x2, y2, p_x0, p_y1, p_x2, p_y2)
 * with z2 = x2 + i y2 and p_z2 = p_x2 + i p_y2. Points of M are lifted
 * through rho = 0, so x1 is never an independent coordinate.
 *
 *   full    H = P A^-1 P* - (2 p_x0 / Phi) Im(dbar Phi . A^-1 . P*)
 *               - (p_x0^2 / (2 Phi)) Tr(PhiTilde A^-1)
 *   rigid   closed form of the above when rho does not depend on y1
 *   model   the weighted order <= 6, linear-in-a truncation H0
 *   sphere  3 x (full H of the sphere); the normalization used for the
 *           closed-form sphere chains
 */

#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainlab/error.hpp"
#include "chainlab/fit.hpp"
#include "chainlab/jet.hpp"
#include "chainlab/series.hpp"
#include "chainlab/surface.hpp"

namespace chainlab {

using State = std::array<double, 8>;

enum StateIndex : std::size_t { kX0 = 0, kY1, kX2, kY2, kPX0, kPY1, kPX2, kPY2 };

struct PhasePoint {
    double x0 = 0.0;
    double y1 = 0.0;
    cplx z2{};
    double p_x0 = 0.0;
    double p_y1 = 0.0;
    cplx p_z2{};

    State to_state() const { return {x0, y1, z2.real(), z2.imag(), p_x0, p_y1, p_z2.real(), p_z2.imag()}; }

    static PhasePoint from_state(const State& s) {
        return {s[kX0], s[kY1], {s[kX2], s[kY2]}, s[kPX0], s[kPY1], {s[kPX2], s[kPY2]}};
    }

    /// Weighted dilation: y1, p_x0 by delta^2; z2, p_z2 by delta; x0, p_y1 fixed.
    PhasePoint scaled(double delta) const {
        return {x0, y1 * delta * delta, z2 * delta, p_x0 * delta * delta, p_y1, p_z2 * delta};
    }
};

enum class HamiltonianTag { full, rigid, model, sphere };

inline const char* to_string(HamiltonianTag t) {
    switch (t) {
    case HamiltonianTag::full: return "full";
    case HamiltonianTag::rigid: return "rigid";
    case HamiltonianTag::model: return "model";
    case HamiltonianTag::sphere: return "sphere";
    }
    return "?";
}

namespace detail {

template <typename T>
struct ComplexOf {
    using type = cplx;
};
template <std::size_t N>
struct ComplexOf<Jet<double, N>> {
    using type = Jet<cplx, N>;
};

inline cplx complexify(double x) { return x; }
template <std::size_t N>
Jet<cplx, N> complexify(const Jet<double, N>& x) {
    Jet<cplx, N> r(cplx(x.value));
    for (std::size_t i = 0; i < N; ++i) r.d[i] = x.d[i];
    return r;
}

inline cplx value_of(const cplx& x) { return x; }
template <std::size_t N>
cplx value_of(const Jet<cplx, N>& x) { return x.value; }

inline double real_part(const cplx& x) { return x.real(); }
template <std::size_t N>
Jet<double, N> real_part(const Jet<cplx, N>& x) { return real(x); }

template <typename C>
C imag_of(const C& x) {
    return (x - conj(x)) * cplx(0.0, -0.5);
}

template <typename C>
using Mat3 = std::array<std::array<C, 3>, 3>;

/// Cofactor inverse; throws when the value-level condition number is too large.
template <typename C>
Mat3<C> inverse3(const Mat3<C>& m) {
    const auto cof = [&](std::size_t r, std::size_t c) {
        const std::size_t r0 = (r + 1) % 3, r1 = (r + 2) % 3, c0 = (c + 1) % 3, c1 = (c + 2) % 3;
        return m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    };
    const C det = m[0][0] * cof(0, 0) + m[0][1] * cof(0, 1) + m[0][2] * cof(0, 2);
    if (value_of(det) == cplx{}) throw NumericalError("Hamiltonian: singular matrix A");
    const C inv_det = C(cplx(1.0)) / det;
    Mat3<C> r;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) r[i][j] = cof(j, i) * inv_det;

    double nm = 0.0, ni = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            nm += std::norm(value_of(m[i][j]));
            ni += std::norm(value_of(r[i][j]));
        }
    if (std::sqrt(nm * ni) > 1e12) throw NumericalError("Hamiltonian: matrix A is numerically singular");
    return r;
}

/// Holomorphic derivatives of the graph needed by the rigid closed form.
struct RigidData {
    WeightedSeries q_z, q_zb, q_zzb, q_zzbb, q_zzzb, q_zzzbb;
};

} // namespace detail

class HamiltonianKind {
public:
    static HamiltonianKind full(std::shared_ptr<const Hypersurface> m) {
        if (!m) throw std::invalid_argument("HamiltonianKind: null surface");
        HamiltonianKind k(HamiltonianTag::full);
        k.surface_ = std::move(m);
        k.a_ = k.surface_->a();
        return k;
    }

    static HamiltonianKind rigid(std::shared_ptr<const Hypersurface> m) {
        if (!m) throw std::invalid_argument("HamiltonianKind: null surface");
        if (!m->is_rigid()) throw std::invalid_argument("HamiltonianKind: rigid form requires eta = 0");
        HamiltonianKind k(HamiltonianTag::rigid);
        k.surface_ = std::move(m);
        k.a_ = k.surface_->a();
        const WeightedSeries& q = k.surface_->graph();
        auto r = std::make_shared<detail::RigidData>();
        r->q_z = q.diff(SeriesVar::z2);
        r->q_zb = q.diff(SeriesVar::zb2);
        r->q_zzb = r->q_z.diff(SeriesVar::zb2);
        r->q_zzbb = r->q_zzb.diff(SeriesVar::zb2);
        r->q_zzzb = r->q_zzb.diff(SeriesVar::z2);
        r->q_zzzbb = r->q_zzzb.diff(SeriesVar::zb2);
        k.rigid_ = std::move(r);
        return k;
    }

    static HamiltonianKind model(double a) {
        if (!std::isfinite(a)) throw std::invalid_argument("HamiltonianKind: a must be finite");
        HamiltonianKind k(HamiltonianTag::model);
        k.a_ = a;
        return k;
    }

    static HamiltonianKind sphere() { return HamiltonianKind(HamiltonianTag::sphere); }

    HamiltonianTag tag() const { return tag_; }
    const char* name() const { return to_string(tag_); }
    double a() const { return a_; }
    const std::shared_ptr<const Hypersurface>& surface() const { return surface_; }

    /// True when y1 is cyclic, so p_y1 is conserved.
    bool conserves_p_y1() const {
        return tag_ == HamiltonianTag::model || tag_ == HamiltonianTag::sphere || tag_ == HamiltonianTag::rigid ||
               surface_->is_rigid();
    }

    /// Complex-assembled H. For real-valued T (double or a real jet) the
    /// imaginary part is round-off only.
    template <typename T>
    typename detail::ComplexOf<T>::type evaluate_complex(const std::array<T, 8>& q) const {
        switch (tag_) {
        case HamiltonianTag::full: return eval_full(q);
        case HamiltonianTag::rigid: return eval_rigid(q);
        case HamiltonianTag::model: return eval_model(q);
        case HamiltonianTag::sphere: return eval_sphere(q);
        }
        throw std::logic_error("unreachable");
    }

    template <typename T>
    T evaluate(const std::array<T, 8>& q) const {
        return detail::real_part(evaluate_complex(q));
    }

private:
    explicit HamiltonianKind(HamiltonianTag t) : tag_(t) {}

    template <typename T>
    struct Vars {
        using C = typename detail::ComplexOf<T>::type;
        C y1, z, zb, p0, p1, pz, pzb;
        explicit Vars(const std::array<T, 8>& q)
            : y1(detail::complexify(q[kY1])),
              z(detail::complexify(q[kX2]) + detail::complexify(q[kY2]) * cplx(0, 1)),
              zb(conj(z)),
              p0(detail::complexify(q[kPX0])),
              p1(detail::complexify(q[kPY1])),
              pz(detail::complexify(q[kPX2]) + detail::complexify(q[kPY2]) * cplx(0, 1)),
              pzb(conj(pz)) {}
    };

    template <typename T>
    auto eval_full(const std::array<T, 8>& q) const {
        using C = typename detail::ComplexOf<T>::type;
        const Vars<T> v(q);
        const FeffermanData& f = surface_->fefferman();
        const C x1 = detail::complexify(detail::real_part(surface_->graph().evaluate<C>(v.y1, v.z, v.zb))) * 0.5;
        const auto at = [&](const AmbientFunction& g) { return g.evaluate<C>(x1, v.y1, v.z, v.zb); };
        const cplx I(0, 1);

        detail::Mat3<C> A;
        A[0] = {C(cplx{}), at(f.rho_zb1) * I, at(f.rho_zb2) * I};
        A[1] = {at(f.rho_z1) * -I, at(f.rho_hess[0][0]) * 3.0, at(f.rho_hess[0][1]) * 3.0};
        A[2] = {at(f.rho_z2) * -I, at(f.rho_hess[1][0]) * 3.0, at(f.rho_hess[1][1]) * 3.0};
        const auto Ai = detail::inverse3(A);

        const std::array<C, 3> P{v.p0, v.p1 * I, v.pz};
        const std::array<C, 3> Ps{v.p0, v.p1 * -I, v.pzb};
        const C phi = at(f.phi);
        const std::array<C, 2> phi_z{at(f.phi_z[0]), at(f.phi_z[1])};
        const std::array<C, 2> phi_zb{at(f.phi_zb[0]), at(f.phi_zb[1])};
        const std::array<C, 3> dbar{C(cplx{}), phi_zb[0], phi_zb[1]};

        C t1(cplx{}), w(cplx{});
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k) {
                t1 += P[j] * Ai[j][k] * Ps[k];
                w += dbar[j] * Ai[j][k] * Ps[k];
            }
        C tr(cplx{});
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k) {
                const C pt = at(f.phi_hess[j][k]) * 3.0 - phi_z[j] * phi_zb[k] * 5.0 / phi;
                tr += pt * Ai[k + 1][j + 1];
            }
        return t1 - v.p0 * 2.0 / phi * detail::imag_of(w) - v.p0 * v.p0 / (phi * 2.0) * tr;
    }

    template <typename T>
    auto eval_rigid(const std::array<T, 8>& q) const {
        using C = typename detail::ComplexOf<T>::type;
        const Vars<T> v(q);
        const auto at = [&](const WeightedSeries& g) { return g.evaluate<C>(v.y1, v.z, v.zb); };
        const cplx I(0, 1);
        const C qz = at(rigid_->q_z), qzb = at(rigid_->q_zb), d = at(rigid_->q_zzb);
        const C qzbb = at(rigid_->q_zzbb), qzzb = at(rigid_->q_zzzb), qzzbb = at(rigid_->q_zzzbb);
        const C pap = v.p0 * v.p1 * 2.0 - qzb * qz / (d * 3.0) * v.p1 * v.p1 + qz / (d * 3.0) * v.p1 * v.pz * I -
                      qzb / (d * 3.0) * v.p1 * v.pzb * I - v.pz * v.pzb / (d * 3.0);
        const C im = detail::imag_of(qzbb * (qz * v.p1 * I - v.pzb));
        const C last = (qzzbb * 3.0 - qzzb * qzbb * 5.0 / d) * v.p0 * v.p0 / (d * d * 6.0);
        return pap - v.p0 * im * (2.0 / 3.0) / (d * d) + last;
    }

    template <typename T>
    auto eval_model(const std::array<T, 8>& q) const {
        const Vars<T> v(q);
        const cplx I(0, 1);
        const double a = a_;
        const auto& z = v.z;
        const auto& zb = v.zb;
        const auto A2 = z * zb;
        const auto R2 = (z * z + zb * zb) * 0.5;
        const auto z2 = z * z, zb2 = zb * zb;
        return v.p0 * v.p0 * R2 * (24.0 * a) + (2.0 - A2 * R2 * (64.0 * a / 3.0)) * v.p0 * v.p1 +
               (z2 * zb * 24.0 + zb2 * zb * 8.0) * v.p0 * v.pz * (I * a / 3.0) -
               (z2 * z * 8.0 + z * zb2 * 24.0) * v.p0 * v.pzb * (I * a / 3.0) +
               (A2 * A2 * R2 * (4.0 * a) - A2) * v.p1 * v.p1 * (1.0 / 3.0) +
               (zb - z * (A2 * A2 * 4.0 + zb2 * zb2 * 6.0) * a) * v.p1 * v.pz * (I / 3.0) -
               (z - zb * (A2 * A2 * 4.0 + z2 * z2 * 6.0) * a) * v.p1 * v.pzb * (I / 3.0) -
               (1.0 - A2 * R2 * (16.0 * a)) * v.pz * v.pzb * (1.0 / 3.0);
    }

    template <typename T>
    auto eval_sphere(const std::array<T, 8>& q) const {
        using C = typename detail::ComplexOf<T>::type;
        const T& x2 = q[kX2];
        const T& y2 = q[kY2];
        const T& p0 = q[kPX0];
        const T& p1 = q[kPY1];
        const T& px = q[kPX2];
        const T& py = q[kPY2];
        const T h = 6.0 * p0 * p1 - (x2 * x2 + y2 * y2) * p1 * p1 + 2.0 * y2 * p1 * px - 2.0 * x2 * p1 * py -
                    px * px - py * py;
        return C(detail::complexify(h));
    }

    HamiltonianTag tag_;
    double a_ = 0.0;
    std::shared_ptr<const Hypersurface> surface_;
    std::shared_ptr<const detail::RigidData> rigid_;
};

/// Ratio eval_H(sphere) / eval_H(full on the sphere surface).
inline constexpr double kSphereNormalization = 3.0;

inline double eval_H(const HamiltonianKind& k, const PhasePoint& q) { return k.evaluate(q.to_state()); }

/// Imaginary part of the complex-assembled H (round-off diagnostic).
inline double eval_H_imag(const HamiltonianKind& k, const PhasePoint& q) {
    return k.evaluate_complex(q.to_state()).imag();
}

struct Gradient {
    std::array<double, 4> H_x{}; // d/d(x0, y1, x2, y2)
    std::array<double, 4> H_p{}; // d/d(p_x0, p_y1, p_x2, p_y2)
    double H = 0.0;
};

inline Gradient grad_H(const HamiltonianKind& k, const PhasePoint& q) {
    using J8 = Jet<double, 8>;
    const State s = q.to_state();
    std::array<J8, 8> js;
    for (std::size_t i = 0; i < 8; ++i) js[i] = J8::variable(s[i], i);
    const J8 h = k.evaluate(js);
    Gradient g;
    g.H = h.value;
    for (std::size_t i = 0; i < 4; ++i) {
        g.H_x[i] = h.d[i];
        g.H_p[i] = h.d[i + 4];
    }
    return g;
}

/// Right-hand side x' = H_p, p' = -H_x.
inline State hamiltonian_rhs(const HamiltonianKind& k, const State& s) {
    const Gradient g = grad_H(k, PhasePoint::from_state(s));
    State r;
    for (std::size_t i = 0; i < 4; ++i) {
        r[i] = g.H_p[i];
        r[i + 4] = -g.H_x[i];
    }
    return r;
}

/// Complex velocity z2' = 2 dH/d(conj p_z2).
inline cplx z2_velocity(const Gradient& g) { return {g.H_p[2], g.H_p[3]}; }

/// |H_full - H_model| at q scaled by each delta.
inline std::vector<double> truncation_gaps(std::shared_ptr<const Hypersurface> m, const PhasePoint& q,
                                           const std::vector<double>& deltas) {
    const auto full = HamiltonianKind::full(m);
    const auto model = HamiltonianKind::model(m->a());
    std::vector<double> gaps;
    gaps.reserve(deltas.size());
    for (double d : deltas) {
        if (!(d > 0.0 && d <= 0.3)) throw std::invalid_argument("truncation_gap: delta must lie in (0, 0.3]");
        const PhasePoint qs = q.scaled(d);
        gaps.push_back(std::abs(eval_H(full, qs) - eval_H(model, qs)));
    }
    return gaps;
}

/// Log-log slope of the truncation gap against delta.
inline double truncation_gap(std::shared_ptr<const Hypersurface> m, const PhasePoint& q,
                             const std::vector<double>& deltas) {
    if (deltas.size() < 2) throw std::invalid_argument("truncation_gap: need at least two deltas");
    const auto gaps = truncation_gaps(std::move(m), q, deltas);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        if (gaps[i] < 1e-14) continue;
        xs.push_back(deltas[i]);
        ys.push_back(gaps[i]);
    }
    if (xs.size() < 2) throw NumericalError("truncation_gap: differences at the cancellation floor");
    return loglog_fit(xs, ys).slope;
}

} // namespace chainlab
