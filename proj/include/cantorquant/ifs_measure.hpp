#pragma once

/**
 * The three-map similarity system S_j(x) = r x + (j-1)(1-r)/2 on [0,1], its
 * invariant probability measure P, cylinder geometry and the distortion
 * integrals used everywhere else.
 *
 * Every integral reduces to one identity: on a cylinder J_w of length r^k and
 * mass 3^-k,
 *
 *     int_{J_w} (x - x0)^2 dP = 3^-k ( r^2k V + (S_w(1/2) - x0)^2 ),
 *
 * with V the variance of P. Distortions of unions of cylinders are finite
 * sums of such terms, hence exact in rational arithmetic.
 */

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"
#include "word.hpp"

namespace cantorquant {

template <class T>
class IFSParams {
public:
    using value_type = T;

    explicit IFSParams(T r) : r_(std::move(r)) {
        if (!(r_ > T(0)) || !(r_ * T(3) < T(1))) {
            throw InputError("contraction ratio r must lie strictly inside (0, 1/3), got " +
                             format_decimal(r_, 20));
        }
    }

    const T& r() const noexcept { return r_; }

    /// Translation part of S_j, j in {1,2,3}.
    T offset(int j) const { return T(j - 1) * (T(1) - r_) / T(2); }

    static constexpr bool exact = is_exact_v<T>;

private:
    T r_;
};

template <class T>
struct AffineMap {
    T scale{1};
    T offset{0};

    T operator()(const T& x) const { return scale * x + offset; }

    /// this ∘ inner
    AffineMap after(const AffineMap& inner) const {
        return {scale * inner.scale, scale * inner.offset + offset};
    }

    bool operator==(const AffineMap&) const = default;
};

template <class T>
struct Interval {
    T lo{};
    T hi{};

    T length() const { return hi - lo; }
    bool contains(const T& x) const { return lo <= x && x <= hi; }
    bool operator==(const Interval&) const = default;
};

/// S_w = S_{w1} ∘ ... ∘ S_{wk}; identity for the empty word.
template <class T>
AffineMap<T> compose_map(const IFSParams<T>& params, const Word& word) {
    AffineMap<T> map;
    for (std::size_t i = 0; i < word.size(); ++i) {
        map.offset += map.scale * params.offset(word.letter(i));
        map.scale *= params.r();
    }
    return map;
}

template <class T>
Interval<T> cylinder_interval(const IFSParams<T>& params, const Word& word) {
    auto map = compose_map(params, word);
    return {map.offset, map.offset + map.scale};
}

template <class T>
T cylinder_centroid(const IFSParams<T>& params, const Word& word) {
    return compose_map(params, word)(ratio<T>(1, 2));
}

template <class T>
T cylinder_mass(const Word& word) {
    return T(1) / ipow(T(3), static_cast<unsigned>(word.size()));
}

template <class T>
T cell_mass(const Cell& cell) {
    T total(0);
    for (const auto& w : cell) total += cylinder_mass<T>(w);
    return total;
}

/// Conditional mean of P on the union of the cell's cylinders.
template <class T>
T union_centroid(const IFSParams<T>& params, const Cell& cell) {
    validate_cell(cell);
    T mass(0);
    T moment(0);
    for (const auto& w : cell) {
        T p = cylinder_mass<T>(w);
        mass += p;
        moment += p * cylinder_centroid(params, w);
    }
    return moment / mass;
}

template <class T>
T measure_variance(const IFSParams<T>& params) {
    const T& r = params.r();
    return (T(1) - r) / (T(6) * (T(1) + r));
}

/// E[X^i] for i = 0..m, from the fixed-point equation
/// E[X^m] = (1/3) sum_j E[(r X + b_j)^m] solved for the top moment.
template <class T>
std::vector<T> moment_table(const IFSParams<T>& params, unsigned m) {
    const T& r = params.r();
    std::vector<T> mom{T(1)};
    std::vector<T> binom{T(1)};
    for (unsigned k = 1; k <= m; ++k) {
        std::vector<T> next(k + 1, T(1));
        for (unsigned i = 1; i < k; ++i) next[i] = binom[i - 1] + binom[i];
        binom = std::move(next);

        T rhs(0);
        for (int j = 1; j <= 3; ++j) {
            T b = params.offset(j);
            for (unsigned i = 0; i < k; ++i) {
                rhs += binom[i] * ipow(r, i) * ipow(b, k - i) * mom[i];
            }
        }
        rhs /= T(3);
        mom.push_back(rhs / (T(1) - ipow(r, k)));
    }
    return mom;
}

template <class T>
T moments(const IFSParams<T>& params, unsigned m) {
    return moment_table(params, m).back();
}

/// Integral of (x - point)^2 over the cell's cylinders. The empty word stands
/// for the whole support.
template <class T>
T cell_distortion(const IFSParams<T>& params, const Cell& cell, const T& point) {
    validate_cell(cell);
    const T v = measure_variance(params);
    T total(0);
    for (const auto& w : cell) {
        auto k = static_cast<unsigned>(w.size());
        T d = cylinder_centroid(params, w) - point;
        total += (ipow(params.r(), 2 * k) * v + d * d) / ipow(T(3), k);
    }
    return total;
}

template <class T>
struct VoronoiRegion {
    T mass{0};
    T moment{0};
    T distortion{0};
};

/// Result of integrating P against the Voronoi partition of a point set.
template <class T>
struct VoronoiSummary {
    std::vector<VoronoiRegion<T>> regions;  ///< aligned with the input points
    T distortion{0};
    T error_bound{0};    ///< upper bound on |distortion - V(P; points)|
    std::size_t deepest_level = 0;
};

inline constexpr int default_max_depth = 60;

/// Integrates over the Voronoi partition of `points` by cylinder subdivision.
///
/// A cylinder whose interval sits inside one Voronoi cell is integrated in
/// closed form. A cylinder cut by a bisector is split into its three children
/// until the error of assigning it whole to the point nearest its centroid is
/// at most tol times its mass, so the total error stays below tol. Hitting
/// max_depth first leaves a larger bound, which raises NumericError.
template <class T>
VoronoiSummary<T> voronoi_summary(const IFSParams<T>& params, const std::vector<T>& points,
                                  const T& tol, int max_depth = default_max_depth) {
    if (points.empty()) throw InputError("point set must not be empty");
    if (!(tol > T(0))) throw InputError("tolerance must be positive");
    if (max_depth < 0) throw InputError("max depth must be non-negative");

    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
    std::vector<T> sorted;
    sorted.reserve(points.size());
    for (auto i : order) sorted.push_back(points[i]);
    std::vector<T> bisectors;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        bisectors.push_back((sorted[i] + sorted[i + 1]) / T(2));
    }

    const auto levels = static_cast<std::size_t>(max_depth) + 1;
    std::vector<T> scale(levels), mass(levels);
    scale[0] = T(1);
    mass[0] = T(1);
    for (std::size_t k = 1; k < levels; ++k) {
        scale[k] = scale[k - 1] * params.r();
        mass[k] = mass[k - 1] / T(3);
    }
    const T v = measure_variance(params);
    const T half = ratio<T>(1, 2);
    std::vector<T> step{params.offset(1), params.offset(2), params.offset(3)};

    VoronoiSummary<T> out;
    std::vector<VoronoiRegion<T>> regions(sorted.size());

    auto assign = [&](std::size_t idx, const T& lo, std::size_t depth) {
        const T c = lo + scale[depth] * half;
        const T d = c - sorted[idx];
        auto& reg = regions[idx];
        reg.mass += mass[depth];
        reg.moment += mass[depth] * c;
        reg.distortion += mass[depth] * (scale[depth] * scale[depth] * v + d * d);
    };

    auto visit = [&](auto&& self, const T& lo, std::size_t depth) -> void {
        out.deepest_level = std::max(out.deepest_level, depth);
        const T hi = lo + scale[depth];
        auto first = static_cast<std::size_t>(
            std::upper_bound(bisectors.begin(), bisectors.end(), lo) - bisectors.begin());
        auto last = static_cast<std::size_t>(
            std::lower_bound(bisectors.begin(), bisectors.end(), hi) - bisectors.begin());
        if (first == last) {
            assign(first, lo, depth);
            return;
        }

        const T c = lo + scale[depth] * half;
        std::size_t best = first;
        for (std::size_t k = first + 1; k <= last; ++k) {
            if (abs_value(T(c - sorted[k])) < abs_value(T(c - sorted[best]))) best = k;
        }
        T far = std::max(T((lo - sorted[best]) * (lo - sorted[best])),
                         T((hi - sorted[best]) * (hi - sorted[best])));
        T near(0);
        bool inside = false;
        for (std::size_t k = first; k <= last; ++k) inside = inside || (lo <= sorted[k] && sorted[k] <= hi);
        if (!inside) {
            near = std::min(T((lo - sorted[first]) * (lo - sorted[first])),
                            T((hi - sorted[last]) * (hi - sorted[last])));
        }
        const T bound = mass[depth] * (far - near);
        if (bound <= tol * mass[depth] || depth + 1 >= levels) {
            assign(best, lo, depth);
            out.error_bound += bound;
            return;
        }
        for (int j = 0; j < 3; ++j) self(self, T(lo + scale[depth] * step[j]), depth + 1);
    };
    visit(visit, T(0), 0);

    if (out.error_bound > tol) {
        throw NumericError("cylinder subdivision reached max depth " + std::to_string(max_depth) +
                               " with error bound " + format_decimal(out.error_bound, 6),
                           to_double(out.error_bound));
    }

    out.regions.resize(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        out.regions[order[i]] = regions[i];
        out.distortion += regions[i].distortion;
    }
    return out;
}

/// V(P; points) to within tol.
template <class T>
T quantizer_distortion(const IFSParams<T>& params, const std::vector<T>& points, const T& tol,
                       int max_depth = default_max_depth) {
    return voronoi_summary(params, points, tol, max_depth).distortion;
}

} // namespace cantorquant
