#pragma once

// Quantum state diffusion in a truncated number basis.
//
// Units: [Q, P] = i, so a coherent state has variance 1/2 in both quadratures and
// the semiclassical coherent offsets (mu - 1/2, kappa - 1/2) vanish on it. The
// effective Planck constant enters only through the potential (beta^2 Q^4 / 4)
// and the drive (g / beta); wells sit at +-1/beta.
//
//   H = P^2/2 + beta^2 Q^4/4 - Q^2/2 + (gamma/2)(QP + PQ) - (g/beta) Q cos(omega t)
//   L = sqrt(gamma) (Q + i P) = sqrt(2 gamma) a
//
// Ito QSD:  d psi = -i H psi dt + (L - <L>) psi dxi
//                 + (<L>^* L - L^dag L / 2 - |<L>|^2 / 2) psi dt

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "qduffing/banded.hpp"
#include "qduffing/error.hpp"
#include "qduffing/noise.hpp"
#include "qduffing/params.hpp"

namespace qduffing {

inline constexpr int kMaxBasisDimension = 1 << 20;

/// Ladder-operator algebra of the truncated oscillator. Independent of the
/// system parameters; L and L^dag L are stored per unit gamma.
struct OperatorSet {
    int dimension = 0;
    BandedMatrix a;
    BandedMatrix q;
    BandedMatrix p;
    BandedMatrix q2;
    BandedMatrix p2;
    BandedMatrix q4;
    BandedMatrix qp_pq;   // QP + PQ
    BandedMatrix l;       // Q + iP; multiply by sqrt(gamma)
    BandedMatrix ldag_l;  // (Q - iP)(Q + iP); multiply by gamma
    BandedMatrix number;  // a^dag a
};

inline OperatorSet build_operators(int n) {
    if (n < 2) throw ConfigError("basis dimension must be >= 2, got " + std::to_string(n));
    if (n > kMaxBasisDimension)
        throw CapacityError("basis dimension " + std::to_string(n) + " exceeds capacity " +
                            std::to_string(kMaxBasisDimension));
    OperatorSet ops;
    ops.dimension = n;
    ops.a = BandedMatrix(n, 0, 1);
    for (int k = 1; k < n; ++k) ops.a.at(k - 1, k) = std::sqrt(static_cast<double>(k));
    const BandedMatrix adag = ops.a.adjoint();
    const double s = 1.0 / std::sqrt(2.0);
    const Complex i{0.0, 1.0};
    ops.q = s * (ops.a + adag);
    ops.p = (i * s) * (adag - ops.a);
    ops.q2 = ops.q * ops.q;
    ops.p2 = ops.p * ops.p;
    ops.q4 = ops.q2 * ops.q2;
    ops.qp_pq = ops.q * ops.p + ops.p * ops.q;
    ops.l = ops.q + i * ops.p;
    ops.ldag_l = ops.l.adjoint() * ops.l;
    ops.number = adag * ops.a;
    return ops;
}

inline BandedMatrix hamiltonian(const OperatorSet& ops, const SystemParams& params, double t) {
    const double b2 = params.beta * params.beta;
    BandedMatrix h = 0.5 * ops.p2 + (0.25 * b2) * ops.q4 - 0.5 * ops.q2;
    h = h + (0.5 * params.gamma) * ops.qp_pq;
    const double f = params.drive(t);
    if (f != 0.0) h = h - Complex(f) * ops.q;
    return h;
}

struct QuantumState {
    std::vector<Complex> amplitudes;
    double t = 0.0;

    int dimension() const { return static_cast<int>(amplitudes.size()); }
};

inline double norm_squared(std::span<const Complex> v) {
    double s = 0.0;
    for (const Complex& c : v) s += std::norm(c);
    return s;
}

inline void normalize(std::vector<Complex>& v) {
    const double inv = 1.0 / std::sqrt(norm_squared(v));
    for (Complex& c : v) c *= inv;
}

/// Probability in the top 10% of levels (at least one level).
inline double tail_mass(const QuantumState& s) {
    const int n = s.dimension();
    const int width = std::max(1, (n + 9) / 10);
    double m = 0.0;
    for (int k = n - width; k < n; ++k) m += std::norm(s.amplitudes[k]);
    return m / norm_squared(s.amplitudes);
}

/// Effective number of occupied levels, 1 / sum |c_n|^4 for a normalised state.
inline double participation_ratio(const QuantumState& s) {
    const double nrm = norm_squared(s.amplitudes);
    double s4 = 0.0;
    for (const Complex& c : s.amplitudes) s4 += std::norm(c) * std::norm(c);
    return nrm * nrm / s4;
}

/// <psi|A|psi> / <psi|psi> without the Hermiticity check.
inline Complex complex_expectation(const QuantumState& s, const BandedMatrix& op) {
    if (op.size() != s.dimension())
        throw Error("expectation: operator dimension " + std::to_string(op.size()) + " does not match state " +
                    std::to_string(s.dimension()));
    const auto& v = s.amplitudes;
    Complex acc{};
    for (int d = -op.lower(); d <= op.upper(); ++d) {
        const auto diag = op.diagonal(d);
        const int lo = std::max(0, -d), hi = std::min(op.size(), op.size() - d);
        for (int i = lo; i < hi; ++i) acc += std::conj(v[i]) * diag[i] * v[i + d];
    }
    return acc / norm_squared(v);
}

inline double expectation(const QuantumState& s, const BandedMatrix& op) {
    const Complex e = complex_expectation(s, op);
    if (std::abs(e.imag()) > 1e-10 * std::max(1.0, std::abs(e.real())))
        throw Error("expectation of a non-Hermitian operator: imaginary part " + std::to_string(e.imag()));
    return e.real();
}

/// Coherent state with <Q> = x, <P> = p: c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!),
/// alpha = (x + i p) / sqrt(2). Throws CapacityError with a suggested dimension
/// when the truncated tail carries more than tail_tolerance.
inline QuantumState coherent_state(int n, double x, double p, double tail_tolerance = 1e-6) {
    if (n < 2) throw ConfigError("basis dimension must be >= 2");
    const Complex alpha = Complex(x, p) / std::sqrt(2.0);
    std::vector<Complex> c(static_cast<std::size_t>(n));
    // Recursion in log-magnitude avoids overflow of alpha^n and n! separately.
    c[0] = std::exp(-0.5 * std::norm(alpha));
    for (int k = 1; k < n; ++k) c[k] = c[k - 1] * alpha / std::sqrt(static_cast<double>(k));
    QuantumState s{std::move(c), 0.0};
    const double captured = norm_squared(s.amplitudes);
    const double tail = std::max(tail_mass(s), 1.0 - captured);
    if (tail > tail_tolerance) {
        const double mean = std::norm(alpha);
        const int suggested = static_cast<int>(std::ceil(1.25 * (mean + 8.0 * std::sqrt(mean) + 16.0)));
        throw CapacityError("coherent state at (" + std::to_string(x) + ", " + std::to_string(p) +
                            ") does not fit in dimension " + std::to_string(n) + "; try N >= " +
                            std::to_string(suggested));
    }
    normalize(s.amplitudes);
    return s;
}

/// Zero-pads the state into a basis enlarged by factor and rebuilds the operators.
inline std::pair<QuantumState, OperatorSet> grow_basis(const QuantumState& s, const OperatorSet& ops,
                                                       double factor = 1.5, int max_dimension = 4096) {
    if (!(factor > 1.0)) throw ConfigError("basis growth factor must exceed 1");
    const int n_new = static_cast<int>(std::ceil(ops.dimension * factor));
    if (n_new > max_dimension)
        throw CapacityError("basis growth to " + std::to_string(n_new) + " exceeds N_max " +
                            std::to_string(max_dimension));
    QuantumState out = s;
    out.amplitudes.resize(static_cast<std::size_t>(n_new), Complex{});
    return {std::move(out), build_operators(n_new)};
}

/// Default starting dimension ceil(8 / beta^2) + 32.
inline int initial_basis_dimension(double beta) {
    return static_cast<int>(std::ceil(8.0 / (beta * beta))) + 32;
}

/// exp(alpha a^dag - alpha^* a) psi with alpha = (dx + i dp) / sqrt(2), by Taylor
/// series on the vector. Shifts <Q> by dx and <P> by dp up to truncation effects.
inline QuantumState displace(const QuantumState& s, const OperatorSet& ops, double dx, double dp) {
    const Complex alpha = Complex(dx, dp) / std::sqrt(2.0);
    const int n = s.dimension();
    QuantumState out = s;
    if (alpha == Complex{}) return out;
    const auto a_up = ops.a.diagonal(1);  // a(k-1, k) = sqrt(k)
    std::vector<Complex> term = s.amplitudes, next(static_cast<std::size_t>(n));
    const double base = std::sqrt(norm_squared(s.amplitudes));
    for (int order = 1; order < 200; ++order) {
        // next = (alpha a^dag - alpha^* a) term / order
        for (int k = 0; k < n; ++k) {
            Complex v{};
            if (k > 0) v += alpha * a_up[k - 1] * term[k - 1];
            if (k + 1 < n) v -= std::conj(alpha) * a_up[k] * term[k + 1];
            next[k] = v / static_cast<double>(order);
        }
        term.swap(next);
        for (int k = 0; k < n; ++k) out.amplitudes[k] += term[k];
        if (std::sqrt(norm_squared(term)) < 1e-18 * base) break;
    }
    normalize(out.amplitudes);
    return out;
}

/// Precomputed drift pieces for one (basis, parameter set). Not thread-shared:
/// it owns scratch buffers.
class QsdIntegrator {
public:
    QsdIntegrator(std::shared_ptr<const OperatorSet> ops, const SystemParams& params)
        : ops_(std::move(ops)), params_(params) {
        const Complex i{0.0, 1.0};
        const double b2 = params.beta * params.beta;
        const BandedMatrix h0 = 0.5 * ops_->p2 + (0.25 * b2) * ops_->q4 - 0.5 * ops_->q2 +
                                (0.5 * params.gamma) * ops_->qp_pq;
        base_ = (-i) * h0 - (0.5 * params.gamma) * ops_->ldag_l;
        const int n = ops_->dimension;
        l_scale_ = std::sqrt(params.gamma);
        ladder_.resize(static_cast<std::size_t>(n));
        for (int k = 1; k < n; ++k) ladder_[k] = std::sqrt(static_cast<double>(k));
        for (auto* buf : {&k1_, &k2_, &k3_, &k4_, &tmp_, &lpsi_}) buf->assign(static_cast<std::size_t>(n), Complex{});
    }

    const OperatorSet& operators() const { return *ops_; }
    std::shared_ptr<const OperatorSet> operators_ptr() const { return ops_; }
    const SystemParams& params() const { return params_; }

    /// <L> / sqrt(gamma) = <Q + iP> = sqrt(2) <a>
    Complex mean_lindblad_unit(std::span<const Complex> v) const {
        const int n = static_cast<int>(v.size());
        Complex acc{};
        for (int k = 1; k < n; ++k) acc += ladder_[k] * cmul(std::conj(v[k - 1]), v[k]);
        return std::sqrt(2.0) * acc / norm_squared(v);
    }

    /// out = D(psi, t), the deterministic part of the Ito increment per unit time.
    void drift(std::span<const Complex> v, double t, std::span<Complex> out) const {
        const int n = static_cast<int>(v.size());
        std::fill(out.begin(), out.end(), Complex{});
        base_.apply_add(1.0, v, out);
        const Complex mean_l = l_scale_ * mean_lindblad_unit(v);
        const Complex drive = Complex(0.0, params_.drive(t) / std::sqrt(2.0));  // i f Q, Q = (a + a^dag)/sqrt2
        const Complex up = drive + std::conj(mean_l) * (l_scale_ * std::sqrt(2.0));
        const Complex diag = -0.5 * std::norm(mean_l);
        for (int k = 0; k < n; ++k) {
            Complex acc = diag * v[k];
            if (k + 1 < n) acc += ladder_[k + 1] * cmul(up, v[k + 1]);
            if (k > 0) acc += ladder_[k] * cmul(drive, v[k - 1]);
            out[k] += acc;
        }
    }

    /// One step: RK4 on the deterministic drift plus the Euler-Maruyama noise
    /// term (L - <L>) psi dxi evaluated at the start of the step.
    void step(QuantumState& s, double dt, Complex dxi, bool renormalize = true) {
        const int n = s.dimension();
        if (n != ops_->dimension) throw Error("qsd step: state and operator dimensions differ");
        auto& v = s.amplitudes;
        const double t = s.t;

        // Noise direction at the start point.
        const Complex mean_l = l_scale_ * mean_lindblad_unit(v);
        const double ls = l_scale_ * std::sqrt(2.0);
        for (int k = 0; k < n; ++k)
            lpsi_[k] = (k + 1 < n ? ls * ladder_[k + 1] * v[k + 1] : Complex{}) - cmul(mean_l, v[k]);

        drift(v, t, k1_);
        for (int k = 0; k < n; ++k) tmp_[k] = v[k] + 0.5 * dt * k1_[k];
        drift(tmp_, t + 0.5 * dt, k2_);
        for (int k = 0; k < n; ++k) tmp_[k] = v[k] + 0.5 * dt * k2_[k];
        drift(tmp_, t + 0.5 * dt, k3_);
        for (int k = 0; k < n; ++k) tmp_[k] = v[k] + dt * k3_[k];
        drift(tmp_, t + dt, k4_);
        const double w = dt / 6.0;
        for (int k = 0; k < n; ++k)
            v[k] += w * (k1_[k] + 2.0 * k2_[k] + 2.0 * k3_[k] + k4_[k]) + cmul(lpsi_[k], dxi);

        s.t = t + dt;
        const double nrm = norm_squared(v);
        if (!std::isfinite(nrm) || nrm == 0.0)
            throw TrajectoryEscaped("quantum amplitudes became non-finite at t=" + std::to_string(s.t), s.t);
        if (renormalize) {
            const double inv = 1.0 / std::sqrt(nrm);
            for (Complex& c : v) c *= inv;
        }
    }

private:
    std::shared_ptr<const OperatorSet> ops_;
    SystemParams params_;
    BandedMatrix base_;
    double l_scale_ = 0.0;
    std::vector<double> ladder_;
    mutable std::vector<Complex> k1_, k2_, k3_, k4_, tmp_, lpsi_;
};

/// Single step convenience wrapper; rebuilds the drift for every call, so long
/// runs should hold a QsdIntegrator instead.
inline QuantumState qsd_step(const QuantumState& s, const OperatorSet& ops, const SystemParams& params,
                             NoiseStream& stream, double dt, bool renormalize = true) {
    QsdIntegrator integ(std::make_shared<const OperatorSet>(ops), params);
    QuantumState out = s;
    integ.step(out, dt, stream.next_increment(dt), renormalize);
    return out;
}

struct QuantumMoments {
    double q;
    double p;
    double sigma_qq;
    double sigma_pp;
};

inline QuantumMoments quantum_moments(const QuantumState& s, const OperatorSet& ops) {
    const double q = expectation(s, ops.q);
    const double p = expectation(s, ops.p);
    return {q, p, expectation(s, ops.q2) - q * q, expectation(s, ops.p2) - p * p};
}

/// A trajectory: state plus the (growable) basis it lives in.
class QsdTrajectory {
public:
    QsdTrajectory(QuantumState state, const SystemParams& params, const NumericsConfig& numerics,
                  int max_dimension = 4096)
        : state_(std::move(state)),
          numerics_(numerics),
          max_dimension_(max_dimension),
          integ_(std::make_shared<const OperatorSet>(build_operators(state_.dimension())), params) {}

    QsdTrajectory(QuantumState state, std::shared_ptr<const OperatorSet> ops, const SystemParams& params,
                  const NumericsConfig& numerics, int max_dimension = 4096)
        : state_(std::move(state)), numerics_(numerics), max_dimension_(max_dimension), integ_(std::move(ops), params) {}

    const QuantumState& state() const { return state_; }
    QuantumState& state() { return state_; }
    const OperatorSet& operators() const { return integ_.operators(); }
    std::shared_ptr<const OperatorSet> operators_ptr() const { return integ_.operators_ptr(); }
    const SystemParams& params() const { return integ_.params(); }
    int max_dimension() const { return max_dimension_; }

    void step(double dt, Complex dxi) {
        integ_.step(state_, dt, dxi, numerics_.renormalize_each_step);
        if (tail_mass(state_) > numerics_.basis_tail_tolerance) grow();
    }

    void grow(double factor = 1.5) {
        auto [s, ops] = grow_basis(state_, integ_.operators(), factor, max_dimension_);
        state_ = std::move(s);
        integ_ = QsdIntegrator(std::make_shared<const OperatorSet>(std::move(ops)), integ_.params());
    }

    /// One drive period; state must be on the period grid.
    void advance_period(int sde_steps_per_period, NoiseStream& stream) {
        const double period = params().period();
        const double dt = period / sde_steps_per_period;
        const long long n = std::llround(state_.t / period);
        const double t0 = static_cast<double>(n) * period;
        for (int k = 0; k < sde_steps_per_period; ++k) {
            state_.t = t0 + k * dt;
            step(dt, stream.next_increment(dt));
        }
        state_.t = static_cast<double>(n + 1) * period;
    }

    QuantumMoments moments() const { return quantum_moments(state_, integ_.operators()); }

private:
    QuantumState state_;
    NumericsConfig numerics_;
    int max_dimension_;
    QsdIntegrator integ_;
};

/// Coherent packet at the right-hand well in the default-sized basis.
inline QsdTrajectory default_quantum_start(const SystemParams& params, const NumericsConfig& numerics,
                                           int max_dimension = 4096) {
    const int n = initial_basis_dimension(params.beta);
    return QsdTrajectory(coherent_state(n, well_minima(params).second, 0.0, numerics.basis_tail_tolerance), params,
                         numerics, std::max(max_dimension, n));
}

}  // namespace qduffing
