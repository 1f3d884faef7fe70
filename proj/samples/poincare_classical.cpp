// Stroboscopic section of the classical oscillator, printed as CSV.
//   sample_poincare_classical [gamma] [periods]

#include <cstdlib>
#include <iostream>

#include "qduffing/qduffing.hpp"

int main(int argc, char** argv) {
    qduffing::SystemParams params;
    params.gamma = argc > 1 ? std::atof(argv[1]) : 0.13;
    const int periods = argc > 2 ? std::atoi(argv[2]) : 500;

    const qduffing::ClassicalEngine engine(params, qduffing::NumericsConfig{});
    const auto section = qduffing::poincare_section(engine, periods, 10, 0);

    std::cout << "n,x,p\n";
    for (const auto& pt : section.points)
        std::cout << pt.n << ',' << qduffing::format_number(pt.x) << ',' << qduffing::format_number(pt.p) << '\n';
}
