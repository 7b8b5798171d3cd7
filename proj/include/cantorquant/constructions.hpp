#pragma once

/**
 * Candidate quantizer families and their closed-form distortions.
 *
 * beta, gamma and delta share one recipe and differ only in their two-point
 * base pattern, i.e. how deep the left cell reaches into the middle cylinder:
 *
 *     beta:  {1}            | {2, 3}
 *     gamma: {1, 21}        | {22, 23, 3}
 *     delta: {1, 21, 221}   | {222, 223, 23, 3}
 *
 * For n >= 3 with 3^l <= n < 3^(l+1), every level-l cylinder J_w carries
 * either one point a(w), the scaled two-point pattern, or the three points
 * a(w1), a(w2), a(w3). The index set I picks the cylinders that get the
 * finer pattern.
 *
 * kappa splits the line at 1/2; its cells are half-lines, not finite unions
 * of cylinders.
 */

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "ifs_measure.hpp"
#include "numeric.hpp"
#include "word.hpp"

namespace cantorquant {

enum class Family { beta, gamma, delta, kappa };

inline constexpr std::array<Family, 3> cylinder_families{Family::beta, Family::gamma,
                                                         Family::delta};

inline std::string_view to_string(Family f) {
    switch (f) {
    case Family::beta: return "beta";
    case Family::gamma: return "gamma";
    case Family::delta: return "delta";
    case Family::kappa: return "kappa";
    }
    return "?";
}

inline Family parse_family(std::string_view name) {
    if (name == "beta") return Family::beta;
    if (name == "gamma") return Family::gamma;
    if (name == "delta") return Family::delta;
    if (name == "kappa") return Family::kappa;
    throw InputError("unknown family '" + std::string(name) + "'");
}

/// The two cells of the family's two-point pattern, left cell first.
inline std::array<Cell, 2> two_point_cells(Family f) {
    switch (f) {
    case Family::beta: return {make_cell({"1"}), make_cell({"2", "3"})};
    case Family::gamma: return {make_cell({"1", "21"}), make_cell({"22", "23", "3"})};
    case Family::delta: return {make_cell({"1", "21", "221"}), make_cell({"222", "223", "23", "3"})};
    case Family::kappa: break;
    }
    throw InputError("kappa has no cylinder pattern");
}

inline std::array<Cell, 3> three_point_cells() {
    return {make_cell({"1"}), make_cell({"2"}), make_cell({"3"})};
}

/// l with 3^l <= n < 3^(l+1).
inline unsigned ell(std::size_t n) {
    if (n < 3) throw InputError("ell(n) requires n >= 3");
    unsigned l = 0;
    std::size_t p = 3;
    while (p <= n / 3) {
        p *= 3;
        ++l;
    }
    // p = 3^(l+1) <= n here
    return l + 1;
}

inline std::size_t pow3(unsigned k) {
    std::size_t p = 1;
    for (unsigned i = 0; i < k; ++i) p *= 3;
    return p;
}

template <class T>
struct QuantizerEntry {
    T point;
    Cell cell;                            ///< empty for non-cylinder regions
    std::optional<Interval<T>> region;    ///< set instead of `cell` for kappa
};

template <class T>
struct Quantizer {
    T r;
    Family family = Family::beta;
    std::size_t n = 0;
    std::vector<QuantizerEntry<T>> entries;
    std::vector<Word> index_set;
    T value{0};
    bool cylinder_cells = true;

    std::vector<T> points() const {
        std::vector<T> out;
        out.reserve(entries.size());
        for (const auto& e : entries) out.push_back(e.point);
        return out;
    }
};

/// How the index set I is chosen. The lex policy takes the last `card` words
/// in lexicographic order, which reproduces the standard listings
/// (gamma_5 refines 2 and 3, delta_4 refines 3); any other set of the right
/// size is accepted as an explicit list and gives the same value.
struct IndexPolicy {
    std::optional<std::vector<Word>> words;

    static IndexPolicy lex() { return {}; }
    static IndexPolicy explicit_words(std::vector<Word> w) { return {std::move(w)}; }
};

/// Sum of closed-form cell distortions at the quantizer's points.
template <class T>
T cells_distortion(const IFSParams<T>& params, const Quantizer<T>& q) {
    T total(0);
    for (const auto& e : q.entries) total += cell_distortion(params, e.cell, e.point);
    return total;
}

template <class T>
Quantizer<T> midpoint_split(const IFSParams<T>& params);

template <class T>
Quantizer<T> build(Family family, std::size_t n, const IFSParams<T>& params,
                   const IndexPolicy& policy = IndexPolicy::lex()) {
    if (family == Family::kappa) {
        if (n != 2) throw InputError("kappa supports n=2 only");
        return midpoint_split(params);
    }
    if (n < 2) throw InputError("n must be at least 2");

    Quantizer<T> q{params.r(), family, n, {}, {}, T(0), true};
    auto add = [&](Cell cell) {
        T point = union_centroid(params, cell);
        q.entries.push_back({std::move(point), std::move(cell), std::nullopt});
    };

    const auto pattern2 = two_point_cells(family);
    if (n == 2) {
        if (policy.words && !policy.words->empty()) {
            throw InputError("n=2 takes no index set");
        }
        for (const auto& c : pattern2) add(c);
        q.value = cells_distortion(params, q);
        return q;
    }

    const unsigned l = ell(n);
    const std::size_t level = pow3(l);
    const bool first_case = n <= 2 * level;
    const std::size_t card = first_case ? n - level : n - 2 * level;
    const auto words = words_of_length(l);

    std::vector<Word> index;
    if (policy.words) {
        index = *policy.words;
        if (index.size() != card) {
            throw InputError("index set for n=" + std::to_string(n) + " must have " +
                             std::to_string(card) + " words, got " + std::to_string(index.size()));
        }
        for (const auto& w : index) {
            if (w.size() != l) {
                throw InputError("index word '" + w.str() + "' must have length " +
                                 std::to_string(l));
            }
        }
        std::sort(index.begin(), index.end());
        if (std::adjacent_find(index.begin(), index.end()) != index.end()) {
            throw InputError("index set contains a repeated word");
        }
    } else {
        index.assign(words.end() - static_cast<std::ptrdiff_t>(card), words.end());
    }
    const std::set<Word> chosen(index.begin(), index.end());

    for (const auto& w : words) {
        const bool in_index = chosen.count(w) != 0;
        if (first_case) {
            if (in_index) {
                for (const auto& c : pattern2) add(prefix_cell(w, c));
            } else {
                add(Cell{w});
            }
        } else if (in_index) {
            for (const auto& c : three_point_cells()) add(prefix_cell(w, c));
        } else {
            for (const auto& c : pattern2) add(prefix_cell(w, c));
        }
    }
    for (std::size_t i = 1; i < q.entries.size(); ++i) {
        if (!(q.entries[i - 1].point < q.entries[i].point)) {
            throw std::logic_error("constructed points are not strictly increasing");
        }
    }
    q.index_set = std::move(index);
    q.value = cells_distortion(params, q);
    return q;
}

/// Closed-form V(P; kappa) where kappa = {E(X | X <= 1/2), E(X | X >= 1/2)}.
template <class T>
T midpoint_split_value(const IFSParams<T>& params) {
    const T& r = params.r();
    T num = T(-7) * r * r * r + T(13) * r * r - T(9) * r + T(3);
    T den = T(6) * (r - T(3)) * (r - T(3)) * (r + T(1));
    return num / den;
}

template <class T>
Quantizer<T> midpoint_split(const IFSParams<T>& params) {
    const T& r = params.r();
    Quantizer<T> q{r, Family::kappa, 2, {}, {}, midpoint_split_value(params), false};
    const T den = T(6) - T(2) * r;
    q.entries.push_back({(r + T(1)) / den, {}, Interval<T>{T(0), ratio<T>(1, 2)}});
    q.entries.push_back({(T(5) - T(3) * r) / den, {}, Interval<T>{ratio<T>(1, 2), T(1)}});
    return q;
}

/// V(P; F_2) as a rational function of r.
template <class T>
T two_point_value(Family family, const IFSParams<T>& params) {
    const T& r = params.r();
    auto horner = [&](std::initializer_list<int> coeffs) {
        T acc(0);
        for (int c : coeffs) acc = acc * r + T(c);
        return acc;
    };
    switch (family) {
    case Family::beta: return -horner({3, -3, 1, -1}) / (T(24) * (r + T(1)));
    case Family::gamma: return -horner({3, 15, 6, -42, 31, -13}) / (T(240) * (r + T(1)));
    case Family::delta:
        return -horner({3, 15, 60, 66, 18, -324, 283, -121}) / (T(2184) * (r + T(1)));
    case Family::kappa: return midpoint_split_value(params);
    }
    throw InputError("unknown family");
}

/// V(P; F_n) from the level-l interpolation between V, V(P;F_2) and r^2 V.
template <class T>
T vn_formula(Family family, std::size_t n, const IFSParams<T>& params) {
    if (family == Family::kappa) throw InputError("vn_formula supports beta, gamma, delta only");
    if (n < 2) throw InputError("n must be at least 2");
    const T two = two_point_value(family, params);
    if (n == 2) return two;

    const unsigned l = ell(n);
    const std::size_t level = pow3(l);
    const T v = measure_variance(params);
    const T three = params.r() * params.r() * v;
    const T prefactor = ipow(params.r(), 2 * l) / T(level);
    auto lower_case = [&] {
        return prefactor * (T(2 * level - n) * v + T(n - level) * two);
    };
    auto upper_case = [&] {
        return prefactor * (T(3 * level - n) * two + T(n - 2 * level) * three);
    };
    if (n < 2 * level) return lower_case();
    if (n > 2 * level) return upper_case();

    T a = lower_case();
    T b = upper_case();
    if (abs_value(T(a - b)) > tie_tolerance<T>() * abs_value(a)) {
        throw std::logic_error("case formulas disagree at n = 2*3^l");
    }
    return a;
}

template <class T>
struct OptimalValue {
    T value;
    Family family;
    std::optional<Family> tie;  ///< second family with the same value, at r0 or r1
};

/// Quantization error V_n for 0 < r <= r1: beta formulas up to r0, gamma
/// from r0 to r1. The family switch uses the sign of the two-point
/// differences, each of which changes sign once on (0, 1/3).
template <class T>
OptimalValue<T> optimal_vn(std::size_t n, const IFSParams<T>& params,
                           const T& tie_tol = tie_tolerance<T>()) {
    const T b = two_point_value(Family::beta, params);
    const T g = two_point_value(Family::gamma, params);
    const T d = two_point_value(Family::delta, params);
    if (b <= g + tie_tol) {
        std::optional<Family> tie;
        if (abs_value(T(b - g)) <= tie_tol) tie = Family::gamma;
        return {vn_formula(Family::beta, n, params), Family::beta, tie};
    }
    if (g <= d + tie_tol) {
        std::optional<Family> tie;
        if (abs_value(T(g - d)) <= tie_tol) tie = Family::delta;
        return {vn_formula(Family::gamma, n, params), Family::gamma, tie};
    }
    throw UnsupportedRange("optimal sets are only known for 0 < r <= r1 = 0.2317626315; got r = " +
                           format_decimal(params.r(), 12));
}

} // namespace cantorquant
