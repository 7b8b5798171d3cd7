#pragma once

#include <cmath>
#include <string_view>
#include <vector>

#include "constructions.hpp"
#include "errors.hpp"
#include "ifs_measure.hpp"
#include "numeric.hpp"

namespace cantorquant {

/// -log 3 / log r. Accepts the limiting case r = 1/3.
inline Real quantization_dimension(const Real& r) {
    if (!(r > 0) || r * 3 > 1) throw InputError("r must lie in (0, 1/3]");
    return -log(Real(3)) / log(r);
}

enum class Subsequence { pow3, two_pow3, other };

inline std::string_view to_string(Subsequence s) {
    switch (s) {
    case Subsequence::pow3: return "pow3";
    case Subsequence::two_pow3: return "two_pow3";
    case Subsequence::other: return "other";
    }
    return "?";
}

inline Subsequence classify(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p *= 3;
    if (p == n) return Subsequence::pow3;
    if (n % 2 == 0) {
        std::size_t h = n / 2;
        std::size_t q = 1;
        while (q < h) q *= 3;
        if (q == h) return Subsequence::two_pow3;
    }
    return Subsequence::other;
}

struct CoefficientTerm {
    std::size_t n;
    Real vn;
    Real scaled;  ///< n^(2/beta) V_n
    Subsequence tag;
};

struct CoefficientSeries {
    Real r;
    Real beta_dim;
    Family family = Family::beta;
    std::vector<CoefficientTerm> terms;
    Real limit_lo;  ///< along n = 3^l
    Real limit_hi;  ///< along n = 2*3^l
};

/// n^(2/beta) V_n for n = 2..n_max with the two subsequence limits.
///
/// Along n = 3^l the scaled term equals V exactly, along n = 2*3^l it equals
/// 2^(2/beta) times the optimal two-point value, so both limits come from
/// closed forms.
template <class T>
CoefficientSeries coefficient_sequence(const IFSParams<T>& params, std::size_t n_max) {
    if (n_max < 9) throw InputError("n_max must be at least 9");
    const Real r = to_real(params.r());
    CoefficientSeries s;
    s.r = r;
    s.beta_dim = quantization_dimension(r);
    const Real exponent = Real(2) / s.beta_dim;
    for (std::size_t n = 2; n <= n_max; ++n) {
        auto opt = optimal_vn(n, params);
        Real vn = to_real(opt.value);
        Real scaled = exp(exponent * log(Real(n))) * vn;
        s.terms.push_back({n, vn, scaled, classify(n)});
        if (n == 2) s.family = opt.family;
    }
    s.limit_lo = to_real(measure_variance(params));
    s.limit_hi = exp(exponent * log(Real(2))) * to_real(two_point_value(s.family, params));
    return s;
}

/// |limit along 2*3^l - limit along 3^l|; positive means no coefficient.
template <class T>
Real coefficient_gap(const IFSParams<T>& params) {
    const auto opt = optimal_vn(2, params);
    const Real beta_dim = quantization_dimension(to_real(params.r()));
    const Real hi = exp(Real(2) / beta_dim * log(Real(2))) * to_real(opt.value);
    const Real lo = to_real(measure_variance(params));
    return abs(hi - lo);
}

} // namespace cantorquant
