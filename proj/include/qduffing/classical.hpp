#pragma once

// Deterministic engine: fixed-step RK4 for the classical oscillator plus its
// variational (tangent) flow. Steps always divide the drive period, so
// stroboscopic samples land exactly on t = n T.

#include <array>
#include <cmath>
#include <span>
#include <string>

#include "qduffing/error.hpp"
#include "qduffing/params.hpp"

namespace qduffing {

struct ClassicalState {
    double x = 0.0;
    double p = 0.0;
    double t = 0.0;
};

struct TangentVector {
    double dx = 0.0;
    double dp = 0.0;
};

struct PhaseRate {
    double dx;
    double dp;
};

inline PhaseRate classical_derivative(const ClassicalState& s, const SystemParams& params) {
    const double b2 = params.beta * params.beta;
    return {s.p, -2.0 * params.gamma * s.p - b2 * s.x * s.x * s.x + s.x + params.drive(s.t)};
}

/// |x| beyond this means the integration has left every physical attractor.
inline double escape_radius(const SystemParams& params) { return 100.0 / params.beta; }

inline void check_escape(double x, double p, double t, const SystemParams& params) {
    if (!std::isfinite(x) || !std::isfinite(p))
        throw TrajectoryEscaped("trajectory became non-finite at t=" + std::to_string(t), t);
    if (std::abs(x) > escape_radius(params))
        throw TrajectoryEscaped("trajectory escaped (|x| > 100/beta) at t=" + std::to_string(t), t);
}

namespace detail {

// RK4 with the drive supplied at the start, midpoint and end of the step.
inline ClassicalState rk4_step(const ClassicalState& s, const SystemParams& params, double dt, double f0, double fm,
                               double f1, std::span<TangentVector> tangents) {
    const double b2 = params.beta * params.beta;
    const double damp = 2.0 * params.gamma;
    auto rate = [&](double x, double p, double f) -> PhaseRate { return {p, -damp * p - b2 * x * x * x + x + f}; };
    const double h2 = 0.5 * dt;

    const PhaseRate k1 = rate(s.x, s.p, f0);
    const double x2 = s.x + h2 * k1.dx, p2 = s.p + h2 * k1.dp;
    const PhaseRate k2 = rate(x2, p2, fm);
    const double x3 = s.x + h2 * k2.dx, p3 = s.p + h2 * k2.dp;
    const PhaseRate k3 = rate(x3, p3, fm);
    const double x4 = s.x + dt * k3.dx, p4 = s.p + dt * k3.dp;
    const PhaseRate k4 = rate(x4, p4, f1);

    // Jacobian [[0, 1], [1 - 3 b^2 x^2, -2 gamma]] at each stage point.
    const double j1 = 1.0 - 3.0 * b2 * s.x * s.x;
    const double j2 = 1.0 - 3.0 * b2 * x2 * x2;
    const double j3 = 1.0 - 3.0 * b2 * x3 * x3;
    const double j4 = 1.0 - 3.0 * b2 * x4 * x4;
    for (TangentVector& v : tangents) {
        const double a1 = v.dp, c1 = j1 * v.dx - damp * v.dp;
        const double vx2 = v.dx + h2 * a1, vp2 = v.dp + h2 * c1;
        const double a2 = vp2, c2 = j2 * vx2 - damp * vp2;
        const double vx3 = v.dx + h2 * a2, vp3 = v.dp + h2 * c2;
        const double a3 = vp3, c3 = j3 * vx3 - damp * vp3;
        const double vx4 = v.dx + dt * a3, vp4 = v.dp + dt * c3;
        const double a4 = vp4, c4 = j4 * vx4 - damp * vp4;
        v.dx += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        v.dp += dt / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4);
    }

    ClassicalState out;
    out.x = s.x + dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    out.p = s.p + dt / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
    out.t = s.t + dt;
    check_escape(out.x, out.p, out.t, params);
    return out;
}

}  // namespace detail

/// One RK4 step of the state together with any number of tangent vectors.
inline ClassicalState step_with_tangents(const ClassicalState& s, const SystemParams& params, double dt,
                                         std::span<TangentVector> tangents) {
    return detail::rk4_step(s, params, dt, params.drive(s.t), params.drive(s.t + 0.5 * dt), params.drive(s.t + dt),
                            tangents);
}

inline ClassicalState step_deterministic(const ClassicalState& s, const SystemParams& params, double dt) {
    return step_with_tangents(s, params, dt, {});
}

/// Evolves a deviation vector over one step along the trajectory starting at s.
inline TangentVector tangent_step(const ClassicalState& s, TangentVector v, const SystemParams& params,
                                  double dt) {
    step_with_tangents(s, params, dt, std::span<TangentVector>(&v, 1));
    return v;
}

/// Index n of the period grid point t = n T nearest to t.
inline long long period_index(double t, double period) { return std::llround(t / period); }

/// Integrates exactly one drive period. The state must sit on the period grid;
/// on return s.t is recomputed as (n + 1) T so that no time drift accumulates.
inline void advance_period(ClassicalState& s, const SystemParams& params, const DriveTable& drive,
                           std::span<TangentVector> tangents = {}) {
    const int steps = drive.steps();
    const double period = params.period();
    const double dt = period / steps;
    const long long n = period_index(s.t, period);
    const double t0 = static_cast<double>(n) * period;
    for (int k = 0; k < steps; ++k) {
        s.t = t0 + k * dt;
        s = detail::rk4_step(s, params, dt, drive[2 * k], drive[2 * k + 1], drive[2 * k + 2], tangents);
    }
    s.t = static_cast<double>(n + 1) * period;
}

inline void advance_period(ClassicalState& s, const SystemParams& params, int steps_per_period,
                           std::span<TangentVector> tangents = {}) {
    advance_period(s, params, DriveTable(params, steps_per_period), tangents);
}

/// Default start: resting at the bottom of the right-hand well.
inline ClassicalState default_classical_start(const SystemParams& params) {
    return {well_minima(params).second, 0.0, 0.0};
}

inline double classical_energy(const ClassicalState& s, const SystemParams& params) {
    return 0.5 * s.p * s.p + potential_value(s.x, params);
}

struct LyapunovSpectrum {
    double largest;
    double smallest;
};

/// Both Lyapunov exponents from the tangent flow, with Gram-Schmidt
/// reorthonormalisation once per period. Natural-log units per unit time.
inline LyapunovSpectrum tangent_lyapunov_spectrum(const SystemParams& params, int steps_per_period,
                                                  ClassicalState start, int n_periods, int transient_periods) {
    std::array<TangentVector, 2> basis = {TangentVector{1.0, 0.0}, TangentVector{0.0, 1.0}};
    const DriveTable drive(params, steps_per_period);
    double sum1 = 0.0, sum2 = 0.0;
    for (int n = 0; n < n_periods; ++n) {
        advance_period(start, params, drive, basis);
        auto& [u, w] = basis;
        const double nu = std::hypot(u.dx, u.dp);
        u.dx /= nu;
        u.dp /= nu;
        const double proj = u.dx * w.dx + u.dp * w.dp;
        w.dx -= proj * u.dx;
        w.dp -= proj * u.dp;
        const double nw = std::hypot(w.dx, w.dp);
        w.dx /= nw;
        w.dp /= nw;
        if (n >= transient_periods) {
            sum1 += std::log(nu);
            sum2 += std::log(nw);
        }
    }
    const double span_t = (n_periods - transient_periods) * params.period();
    return {sum1 / span_t, sum2 / span_t};
}

}  // namespace qduffing
