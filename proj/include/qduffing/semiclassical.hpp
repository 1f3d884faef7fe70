#pragma once

// Second-order moment closure of the quantum dynamics. The centroid (x, p) is
// driven by the Ito noise of the measurement channel, the spreads
//   mu = sigma_QQ, kappa = sigma_PP, r = (sigma_QP + sigma_PQ) / 2
// evolve deterministically. Higher moments are dropped.

#include <array>
#include <cmath>
#include <string>

#include "qduffing/classical.hpp"
#include "qduffing/error.hpp"
#include "qduffing/noise.hpp"
#include "qduffing/params.hpp"

namespace qduffing {

struct SemiclassicalState {
    double x = 0.0;
    double p = 0.0;
    double mu = 0.5;
    double kappa = 0.5;
    double r = 0.0;
    double t = 0.0;
    // Sticky: set once mu or kappa has been seen <= 0. The closure permits it; we
    // report rather than clamp.
    bool spread_warning = false;
};

struct SemiclassicalRates {
    double dx;
    double dp;
    double dmu;
    double dkappa;
    double dr;
};

/// Row i maps (Re dxi, Im dxi) onto dx (i = 0) and dp (i = 1).
using NoiseMatrix = std::array<std::array<double, 2>, 2>;

inline NoiseMatrix semiclassical_noise_coefficients(const SemiclassicalState& s, const SystemParams& params) {
    const double c = 2.0 * std::sqrt(params.gamma);
    return {{{c * (s.mu - 0.5), -c * s.r}, {c * s.r, -c * (s.kappa - 0.5)}}};
}

namespace detail {

inline SemiclassicalRates semiclassical_drift(const SemiclassicalState& s, const SystemParams& params, double f) {
    const double b2 = params.beta * params.beta;
    const double gam = params.gamma;
    const double curv = 1.0 - 3.0 * b2 * s.x * s.x;  // -V''(x)
    const double r2 = s.r * s.r;
    return {
        s.p,
        -b2 * (s.x * s.x * s.x + 3.0 * s.mu * s.x) + s.x - 2.0 * gam * s.p + f,
        2.0 * s.r + 2.0 * gam * (s.mu - s.mu * s.mu - r2 + 0.25),
        2.0 * s.r * curv + 2.0 * gam * (-s.kappa - s.kappa * s.kappa - r2 + 0.25),
        s.mu * curv + s.kappa - 2.0 * gam * s.r * (s.mu + s.kappa),
    };
}

inline SemiclassicalState heun_step(const SemiclassicalState& s, const SystemParams& params, double dt, Complex dxi,
                                    double f0, double f1) {
    const NoiseMatrix gmat = semiclassical_noise_coefficients(s, params);
    const double nx = gmat[0][0] * dxi.real() + gmat[0][1] * dxi.imag();
    const double np = gmat[1][0] * dxi.real() + gmat[1][1] * dxi.imag();

    const SemiclassicalRates a = semiclassical_drift(s, params, f0);
    SemiclassicalState pred = s;
    pred.x += a.dx * dt + nx;
    pred.p += a.dp * dt + np;
    pred.mu += a.dmu * dt;
    pred.kappa += a.dkappa * dt;
    pred.r += a.dr * dt;
    const SemiclassicalRates b = semiclassical_drift(pred, params, f1);

    SemiclassicalState out = s;
    const double h = 0.5 * dt;
    out.x += h * (a.dx + b.dx) + nx;
    out.p += h * (a.dp + b.dp) + np;
    out.mu += h * (a.dmu + b.dmu);
    out.kappa += h * (a.dkappa + b.dkappa);
    out.r += h * (a.dr + b.dr);
    out.t = s.t + dt;

    if (!std::isfinite(out.mu) || !std::isfinite(out.kappa) || !std::isfinite(out.r))
        throw TrajectoryEscaped("semiclassical moments became non-finite at t=" + std::to_string(out.t), out.t);
    check_escape(out.x, out.p, out.t, params);
    if (out.mu <= 0.0 || out.kappa <= 0.0) out.spread_warning = true;
    return out;
}

}  // namespace detail

inline SemiclassicalRates semiclassical_drift(const SemiclassicalState& s, const SystemParams& params) {
    return detail::semiclassical_drift(s, params, params.drive(s.t));
}

/// Stochastic Heun: trapezoidal drift, noise coefficients frozen at the start
/// of the step (Ito). dxi is the complex increment for this step.
inline SemiclassicalState step_sde(const SemiclassicalState& s, const SystemParams& params, double dt,
                                   Complex dxi) {
    return detail::heun_step(s, params, dt, dxi, params.drive(s.t), params.drive(s.t + dt));
}

inline SemiclassicalState step_sde(const SemiclassicalState& s, const SystemParams& params, NoiseStream& stream,
                                   double dt) {
    return step_sde(s, params, dt, stream.next_increment(dt));
}

/// One drive period; same grid contract as the classical advance_period.
inline void advance_period(SemiclassicalState& s, const SystemParams& params, const DriveTable& drive,
                           NoiseStream& stream) {
    const int steps = drive.steps();
    const double period = params.period();
    const double dt = period / steps;
    const long long n = period_index(s.t, period);
    const double t0 = static_cast<double>(n) * period;
    for (int k = 0; k < steps; ++k) {
        s.t = t0 + k * dt;
        s = detail::heun_step(s, params, dt, stream.next_increment(dt), drive[2 * k], drive[2 * k + 2]);
    }
    s.t = static_cast<double>(n + 1) * period;
}

inline void advance_period(SemiclassicalState& s, const SystemParams& params, int sde_steps_per_period,
                           NoiseStream& stream) {
    advance_period(s, params, DriveTable(params, sde_steps_per_period), stream);
}

/// Coherent (minimum-uncertainty) packet at the right-hand well bottom.
inline SemiclassicalState default_semiclassical_start(const SystemParams& params) {
    SemiclassicalState s;
    s.x = well_minima(params).second;
    return s;
}

}  // namespace qduffing
