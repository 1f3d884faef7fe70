#pragma once

// Uniform adapters over the three dynamics engines. The Lyapunov protocol and
// the stroboscopic scans are written once against the DynamicsEngine concept.

#include <cmath>
#include <concepts>
#include <memory>
#include <string>
#include <string_view>

#include "qduffing/classical.hpp"
#include "qduffing/error.hpp"
#include "qduffing/noise.hpp"
#include "qduffing/params.hpp"
#include "qduffing/quantum.hpp"
#include "qduffing/semiclassical.hpp"

namespace qduffing {

enum class Model { classical, semiclassical, quantum };

inline std::string_view to_string(Model m) {
    switch (m) {
        case Model::classical: return "classical";
        case Model::semiclassical: return "semiclassical";
        case Model::quantum: return "quantum";
    }
    return "?";
}

inline Model parse_model(std::string_view name) {
    if (name == "classical") return Model::classical;
    if (name == "semiclassical") return Model::semiclassical;
    if (name == "quantum") return Model::quantum;
    throw ConfigError("unknown model '" + std::string(name) + "' (expected classical, semiclassical or quantum)");
}

/// Phase-space centroid: the point itself, or <Q>, <P>.
struct Centroid {
    double x;
    double p;
};

template <class E>
concept DynamicsEngine = requires(const E& e, typename E::State& s, const typename E::State& cs, NoiseStream& ns) {
    { e.initial_state() } -> std::same_as<typename E::State>;
    e.advance_period(s, ns);
    { e.centroid(cs) } -> std::same_as<Centroid>;
    { e.time(cs) } -> std::same_as<double>;
    { e.kicked(cs, 0.0, 0.0) } -> std::same_as<typename E::State>;
    { e.rescaled(cs, cs, 0.0) } -> std::same_as<typename E::State>;
    { e.params() } -> std::convertible_to<SystemParams>;
    { E::model } -> std::convertible_to<Model>;
    { e.default_delta0() } -> std::same_as<double>;
};

class ClassicalEngine {
public:
    using State = ClassicalState;
    static constexpr Model model = Model::classical;

    ClassicalEngine(const SystemParams& params, const NumericsConfig& numerics)
        : params_(params), numerics_(numerics), start_(default_classical_start(params)) {
        params_.validate();
        numerics_.validate();
        drive_ = std::make_shared<const DriveTable>(params_, numerics_.steps_per_period);
    }
    ClassicalEngine(const SystemParams& params, const NumericsConfig& numerics, ClassicalState start)
        : ClassicalEngine(params, numerics) {
        start_ = start;
    }

    const SystemParams& params() const { return params_; }
    const NumericsConfig& numerics() const { return numerics_; }
    State initial_state() const { return start_; }
    void advance_period(State& s, NoiseStream&) const { qduffing::advance_period(s, params_, *drive_); }
    Centroid centroid(const State& s) const { return {s.x, s.p}; }
    double time(const State& s) const { return s.t; }
    State kicked(const State& s, double dx, double dp) const { return {s.x + dx, s.p + dp, s.t}; }
    State rescaled(const State& fid, const State& per, double factor) const {
        return {fid.x + factor * (per.x - fid.x), fid.p + factor * (per.p - fid.p), fid.t};
    }
    double default_delta0() const { return 1e-6 / params_.beta; }

private:
    SystemParams params_;
    NumericsConfig numerics_;
    ClassicalState start_;
    std::shared_ptr<const DriveTable> drive_;
};

class SemiclassicalEngine {
public:
    using State = SemiclassicalState;
    static constexpr Model model = Model::semiclassical;

    SemiclassicalEngine(const SystemParams& params, const NumericsConfig& numerics)
        : params_(params), numerics_(numerics), start_(default_semiclassical_start(params)) {
        params_.validate(true);
        numerics_.validate();
        drive_ = std::make_shared<const DriveTable>(params_, numerics_.sde_steps_per_period);
    }
    SemiclassicalEngine(const SystemParams& params, const NumericsConfig& numerics, SemiclassicalState start)
        : SemiclassicalEngine(params, numerics) {
        start_ = start;
    }

    const SystemParams& params() const { return params_; }
    const NumericsConfig& numerics() const { return numerics_; }
    State initial_state() const { return start_; }
    void advance_period(State& s, NoiseStream& ns) const {
        qduffing::advance_period(s, params_, *drive_, ns);
    }
    Centroid centroid(const State& s) const { return {s.x, s.p}; }
    double time(const State& s) const { return s.t; }
    State kicked(const State& s, double dx, double dp) const {
        State out = s;
        out.x += dx;
        out.p += dp;
        return out;
    }
    /// The whole deviation (centroid and spreads) is scaled back toward the
    /// fiducial, so the reset stays on the linearised flow.
    State rescaled(const State& fid, const State& per, double factor) const {
        State out = fid;
        out.x += factor * (per.x - fid.x);
        out.p += factor * (per.p - fid.p);
        out.mu += factor * (per.mu - fid.mu);
        out.kappa += factor * (per.kappa - fid.kappa);
        out.r += factor * (per.r - fid.r);
        out.spread_warning = fid.spread_warning || per.spread_warning;
        return out;
    }
    double default_delta0() const { return 1e-6 / params_.beta; }

private:
    SystemParams params_;
    NumericsConfig numerics_;
    SemiclassicalState start_;
    std::shared_ptr<const DriveTable> drive_;
};

class QuantumEngine {
public:
    using State = QsdTrajectory;
    static constexpr Model model = Model::quantum;

    QuantumEngine(const SystemParams& params, const NumericsConfig& numerics, int max_dimension = 4096)
        : params_(params), numerics_(numerics), max_dimension_(max_dimension) {
        params_.validate(true);
        numerics_.validate();
        const int n = initial_basis_dimension(params_.beta);
        ops_ = std::make_shared<const OperatorSet>(build_operators(n));
        start_ = coherent_state(n, well_minima(params_).second, 0.0, numerics_.basis_tail_tolerance);
    }

    const SystemParams& params() const { return params_; }
    const NumericsConfig& numerics() const { return numerics_; }
    int max_dimension() const { return max_dimension_; }
    State initial_state() const {
        return QsdTrajectory(start_, ops_, params_, numerics_, std::max(max_dimension_, ops_->dimension));
    }
    void advance_period(State& s, NoiseStream& ns) const { s.advance_period(numerics_.sde_steps_per_period, ns); }
    Centroid centroid(const State& s) const {
        const auto& ops = s.operators();
        return {expectation(s.state(), ops.q), expectation(s.state(), ops.p)};
    }
    double time(const State& s) const { return s.state().t; }
    /// Small phase-space displacement unitary: a coherent kick of the packet.
    State kicked(const State& s, double dx, double dp) const {
        State out = s;
        out.state() = displace(s.state(), s.operators(), dx, dp);
        return out;
    }
    /// Fresh displaced copy of the fiducial along the current centroid deviation.
    State rescaled(const State& fid, const State& per, double factor) const {
        const Centroid a = centroid(fid), b = centroid(per);
        return kicked(fid, factor * (b.x - a.x), factor * (b.p - a.p));
    }
    double default_delta0() const { return 1e-4; }

private:
    SystemParams params_;
    NumericsConfig numerics_;
    int max_dimension_;
    std::shared_ptr<const OperatorSet> ops_;
    QuantumState start_;
};

static_assert(DynamicsEngine<ClassicalEngine>);
static_assert(DynamicsEngine<SemiclassicalEngine>);
static_assert(DynamicsEngine<QuantumEngine>);

/// Calls fn with the engine selected by model.
template <class Fn>
decltype(auto) with_engine(Model model, const SystemParams& params, const NumericsConfig& numerics, Fn&& fn) {
    switch (model) {
        case Model::classical: return fn(ClassicalEngine(params, numerics));
        case Model::semiclassical: return fn(SemiclassicalEngine(params, numerics));
        case Model::quantum: return fn(QuantumEngine(params, numerics));
    }
    throw ConfigError("unknown model");
}

}  // namespace qduffing
