// Largest Lyapunov exponent of the classical and semiclassical engines at the
// same damping, with the tangent-flow value as a cross-check.
//   sample_lyapunov_compare [gamma] [beta] [periods]

#include <fmt/format.h>

#include <cstdlib>

#include "qduffing/qduffing.hpp"

int main(int argc, char** argv) {
    using namespace qduffing;
    SystemParams params;
    params.gamma = argc > 1 ? std::atof(argv[1]) : 0.13;
    params.beta = argc > 2 ? std::atof(argv[2]) : 0.05;
    LyapunovProtocol protocol;
    protocol.n_periods = argc > 3 ? std::atoi(argv[3]) : 400;
    protocol.transient_periods = 100;
    protocol.n_realizations = 2;

    const NumericsConfig numerics;
    const ClassicalEngine classical(params, numerics);
    const SemiclassicalEngine semi(params, numerics);

    const auto c = lyapunov_estimate(classical, protocol, 1);
    fmt::print("classical      lambda={:+.4f}  K={:.4f}\n", c.lambda, c.K);
    fmt::print("tangent flow   lambda={:+.4f}\n", tangent_lyapunov(classical, protocol));
    const auto s = lyapunov_estimate(semi, protocol, 1, resolve_workers(0));
    fmt::print("semiclassical  lambda={:+.4f}  K={:.4f}  stderr={:.4f}\n", s.lambda, s.K, s.std_error);
}
