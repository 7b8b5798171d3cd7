// Compares the closed-form V_n with a dynamic-programming k-means on the
// discretized measure.

#include <cantorquant/cantorquant.hpp>
#include <cantorquant/io.hpp>

#include <iostream>

using namespace cantorquant;

int main() {
    const IFSParams<Real> params(Real("0.2"));
    std::cout << "n  depth  formula              corrected DP         gap       match\n";
    for (std::size_t n : {2, 3, 5, 9, 14, 27}) {
        const auto rep = verify_optimality(n, params, default_oracle_depth(n), 1e-9L);
        std::cout << n << (n < 10 ? "  " : " ") << "  " << rep.depth << "    "
                  << format_decimal(rep.formula_cost, 16) << "  " << format_decimal(rep.corrected_cost, 16)
                  << "  " << format_decimal(rep.abs_gap, 2) << "  " << io::matched_label(rep.match) << "\n";
    }
    return 0;
}
