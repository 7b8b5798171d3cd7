// Exact optimal quantization errors at r = 1/25, printed as fractions.

#include <cantorquant/cantorquant.hpp>

#include <iostream>

using namespace cantorquant;

int main() {
    const IFSParams<Rational> params(Rational(1, 25));
    std::cout << "r = 1/25\n";
    std::cout << "V            = " << format_fraction(measure_variance(params)) << "\n";
    std::cout << "V(kappa)     = " << format_fraction(midpoint_split_value(params)) << "\n";
    for (std::size_t n = 2; n <= 10; ++n) {
        const auto opt = optimal_vn(n, params);
        std::cout << "V_" << n << (n < 10 ? "          = " : "         = ") << format_fraction(opt.value)
                  << "  (" << to_string(opt.family) << ", " << format_decimal(opt.value, 12) << ")\n";
    }

    const auto q = build(Family::beta, 4, params);
    std::cout << "\noptimal 4-point set:\n";
    for (const auto& e : q.entries) {
        std::cout << "  " << format_fraction(e.point) << "  cell {" << join_words(e.cell) << "}\n";
    }
    return 0;
}
