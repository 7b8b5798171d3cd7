#pragma once

/**
 * Independent optimality check.
 *
 * P is replaced by 3^k equal atoms at the level-k cylinder centroids. Every
 * partition of the line into cells that are unions of level-k cylinders has
 * distortion = (atomic distortion) + r^2k V, because each cylinder contributes
 * its own within-cylinder variance 3^-k r^2k V regardless of where the
 * quantizer point is. Optimal 1-D clusters are runs of consecutive atoms, so
 * the atomic problem is solved exactly by the interval-partition DP.
 */

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "constructions.hpp"
#include "errors.hpp"
#include "ifs_measure.hpp"
#include "numeric.hpp"
#include "word.hpp"

namespace cantorquant {

template <class T>
struct Atom {
    T position;
    T weight;
};

template <class T>
struct DiscreteMeasure {
    T r;
    unsigned depth = 0;
    std::vector<Atom<T>> atoms;
};

inline constexpr unsigned max_discretization_depth = 12;

/// 3^depth atoms at S_w(1/2), |w| = depth, each of weight 3^-depth.
template <class T>
DiscreteMeasure<T> discretize(const IFSParams<T>& params, unsigned depth) {
    if (depth < 1 || depth > max_discretization_depth) {
        throw InputError("discretization depth must be in [1, 12], got " + std::to_string(depth));
    }
    std::vector<T> pos{ratio<T>(1, 2)};
    for (unsigned k = 0; k < depth; ++k) {
        std::vector<T> next;
        next.reserve(pos.size() * 3);
        for (int j = 1; j <= 3; ++j) {
            const T b = params.offset(j);
            for (const auto& x : pos) next.push_back(params.r() * x + b);
        }
        pos = std::move(next);
    }
    DiscreteMeasure<T> m{params.r(), depth, {}};
    const T w = T(1) / ipow(T(3), depth);
    m.atoms.reserve(pos.size());
    for (auto& x : pos) m.atoms.push_back({std::move(x), w});
    return m;
}

enum class DpAlgorithm { quadratic, divide_and_conquer };

template <class T>
struct DpResult {
    T cost;
    std::vector<T> points;
    std::vector<std::size_t> breakpoints;  ///< first atom of each cluster after the first
    std::optional<std::vector<T>> reflected_points;
};

namespace detail {

template <class T>
class SegmentCost {
public:
    explicit SegmentCost(const std::vector<Atom<T>>& atoms)
        : w_(atoms.size() + 1, T(0)), wx_(atoms.size() + 1, T(0)), wxx_(atoms.size() + 1, T(0)) {
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            const auto& a = atoms[i];
            w_[i + 1] = w_[i] + a.weight;
            wx_[i + 1] = wx_[i] + a.weight * a.position;
            wxx_[i + 1] = wxx_[i] + a.weight * a.position * a.position;
        }
    }

    /// Weighted squared deviation of atoms [i, j) about their mean.
    T operator()(std::size_t i, std::size_t j) const {
        const T w = w_[j] - w_[i];
        const T wx = wx_[j] - wx_[i];
        T c = (wxx_[j] - wxx_[i]) - wx * wx / w;
        return c < T(0) ? T(0) : c;
    }

    T mean(std::size_t i, std::size_t j) const { return (wx_[j] - wx_[i]) / (w_[j] - w_[i]); }

private:
    std::vector<T> w_, wx_, wxx_;
};

} // namespace detail

/// Globally optimal weighted n-means of the atoms.
template <class T>
DpResult<T> dp_kmeans(const DiscreteMeasure<T>& measure, std::size_t n,
                      DpAlgorithm algorithm = DpAlgorithm::divide_and_conquer) {
    const std::size_t count = measure.atoms.size();
    if (n < 1 || n > count) {
        throw InputError("cluster count must be in [1, " + std::to_string(count) + "], got " +
                         std::to_string(n));
    }
    const detail::SegmentCost<T> cost(measure.atoms);

    // prev[j]: best cost of atoms [0, j) in m-1 clusters; entries j < m-1 are never read
    std::vector<T> prev(count + 1, T(0)), cur(count + 1, T(0));
    for (std::size_t j = 1; j <= count; ++j) prev[j] = cost(0, j);
    std::vector<std::vector<std::uint32_t>> arg(n);

    for (std::size_t m = 2; m <= n; ++m) {
        auto& split = arg[m - 1];
        split.assign(count + 1, 0);
        auto solve_one = [&](std::size_t j, std::size_t from, std::size_t to) {
            // last cluster is [i, j) with i in [from, to]
            T best = prev[from] + cost(from, j);
            std::size_t best_i = from;
            for (std::size_t i = from + 1; i <= to; ++i) {
                T c = prev[i] + cost(i, j);
                if (c < best) {
                    best = c;
                    best_i = i;
                }
            }
            cur[j] = best;
            split[j] = static_cast<std::uint32_t>(best_i);
        };
        if (algorithm == DpAlgorithm::quadratic) {
            for (std::size_t j = m; j <= count; ++j) solve_one(j, m - 1, j - 1);
        } else {
            // optimal split is monotone in j for the 1-D squared-error cost
            std::function<void(std::size_t, std::size_t, std::size_t, std::size_t)> rec =
                [&](std::size_t jl, std::size_t jr, std::size_t il, std::size_t ir) {
                    if (jl > jr) return;
                    std::size_t jm = jl + (jr - jl) / 2;
                    solve_one(jm, std::max(il, m - 1), std::min(ir, jm - 1));
                    std::size_t im = split[jm];
                    if (jm > jl) rec(jl, jm - 1, il, im);
                    rec(jm + 1, jr, im, ir);
                };
            rec(m, count, m - 1, count - 1);
        }
        std::swap(prev, cur);
    }

    DpResult<T> out{prev[count], {}, {}, std::nullopt};
    std::vector<std::size_t> starts;
    std::size_t j = count;
    for (std::size_t m = n; m >= 2; --m) {
        j = arg[m - 1][j];
        starts.push_back(j);
    }
    std::reverse(starts.begin(), starts.end());
    out.breakpoints = starts;
    std::size_t begin = 0;
    for (std::size_t b : starts) {
        out.points.push_back(cost.mean(begin, b));
        begin = b;
    }
    out.points.push_back(cost.mean(begin, count));

    // P is symmetric about 1/2, so the mirror image is optimal too.
    std::vector<T> mirror;
    for (auto it = out.points.rbegin(); it != out.points.rend(); ++it) mirror.push_back(T(1) - *it);
    T diff(0);
    for (std::size_t i = 0; i < mirror.size(); ++i) {
        diff = std::max(diff, abs_value(T(mirror[i] - out.points[i])));
    }
    if (diff > T(1e-13)) out.reflected_points = std::move(mirror);
    return out;
}

/// DP cost plus the within-cylinder residual r^2k V.
template <class T>
T corrected_cost(const T& dp_cost, const IFSParams<T>& params, unsigned depth) {
    return dp_cost + ipow(params.r(), 2 * depth) * measure_variance(params);
}

template <class T>
struct LloydResult {
    std::vector<T> points;
    T value;
    std::size_t iterations = 0;
    std::vector<T> values;              ///< distortion before each update, then the final one
    std::vector<std::string> events;    ///< re-seeding notes
};

/// Raised when Lloyd iteration does not settle; carries the last iterate.
template <class T>
class LloydNonConvergence : public NumericError {
public:
    LloydNonConvergence(const std::string& what, double movement, std::vector<T> last)
        : NumericError(what, movement), last_(std::move(last)) {}
    const std::vector<T>& last_iterate() const noexcept { return last_; }

private:
    std::vector<T> last_;
};

/// Fixed-point iteration of "assign to Voronoi cells, move to cell centroids"
/// until no point moves by tol or more.
template <class T>
LloydResult<T> lloyd_run(const IFSParams<T>& params, std::vector<T> points, const T& tol,
                         std::size_t max_iters) {
    if (points.empty()) throw InputError("need at least one initial point");
    if (!(tol > T(0))) throw InputError("tolerance must be positive");
    std::sort(points.begin(), points.end());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i] < T(0) || points[i] > T(1)) throw InputError("initial points must lie in [0, 1]");
        if (i && !(points[i - 1] < points[i])) throw InputError("initial points must be distinct");
    }
    // integration error well below the movement tolerance
    const T inner_tol = tol * tol;

    LloydResult<T> out;
    for (std::size_t it = 0; it < max_iters; ++it) {
        auto summary = voronoi_summary(params, points, inner_tol);
        out.values.push_back(summary.distortion);

        std::vector<T> next = points;
        std::vector<std::size_t> empty;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto& reg = summary.regions[i];
            if (reg.mass > T(0)) {
                next[i] = reg.moment / reg.mass;
            } else {
                empty.push_back(i);
            }
        }
        for (auto i : empty) {
            // split the worst cell: put the orphan at the centroid of its right half
            std::size_t worst = 0;
            for (std::size_t k = 1; k < points.size(); ++k) {
                if (summary.regions[k].distortion > summary.regions[worst].distortion) worst = k;
            }
            const T a = next[worst];
            std::vector<T> probe = next;
            probe[i] = a + (T(1) - a) / T(1024);
            const auto split = voronoi_summary(params, probe, inner_tol);
            const auto& reg = split.regions[i];
            next[i] = reg.mass > T(0) ? T(reg.moment / reg.mass) : probe[i];
            out.events.push_back("iteration " + std::to_string(it) + ": point " +
                                 std::to_string(i) + " had an empty region; re-seeded at " +
                                 format_decimal(next[i], 12));
        }
        std::sort(next.begin(), next.end());

        T movement(0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            movement = std::max(movement, abs_value(T(next[i] - points[i])));
        }
        points = std::move(next);
        out.iterations = it + 1;
        if (movement < tol) {
            out.points = points;
            out.value = voronoi_summary(params, points, inner_tol).distortion;
            out.values.push_back(out.value);
            return out;
        }
        if (it + 1 == max_iters) {
            throw LloydNonConvergence<T>("Lloyd iteration did not converge in " +
                                             std::to_string(max_iters) + " steps",
                                         to_double(movement), points);
        }
    }
    throw LloydNonConvergence<T>("Lloyd iteration needs max_iters >= 1", 0.0, points);
}

struct FamilyMatch {
    std::vector<Family> families;            ///< families whose construction matches outright
    std::vector<Family> pattern_families;    ///< families seen in some two-point group
    bool cylinder_aligned = false;           ///< every group is a single, two- or three-point pattern
};

/// Which constructions the given sorted points coincide with, to within tol.
///
/// The points are grouped by level-l(n) cylinder and every group is compared
/// with a(w), the scaled two-point patterns (or their mirror images inside
/// the cylinder) and the scaled three-point pattern. A family matches when
/// every two-point group is its pattern.
template <class T>
FamilyMatch match_families(const IFSParams<T>& params, const std::vector<T>& points, const T& tol) {
    FamilyMatch out;
    const std::size_t n = points.size();
    auto close = [&](const std::vector<T>& a, const std::vector<T>& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (abs_value(T(a[i] - b[i])) > tol) return false;
        }
        return true;
    };
    auto pattern_points = [&](const Word& prefix, const auto& cells) {
        std::vector<T> pts;
        for (const auto& c : cells) pts.push_back(union_centroid(params, prefix_cell(prefix, c)));
        return pts;
    };

    if (n < 2) return out;
    std::vector<std::pair<Word, std::vector<T>>> groups;
    if (n == 2) {
        groups.push_back({Word(), points});
    } else {
        for (const auto& w : words_of_length(ell(n))) {
            auto iv = cylinder_interval(params, w);
            std::vector<T> inside;
            for (const auto& p : points) {
                if (iv.contains(p)) inside.push_back(p);
            }
            groups.push_back({w, std::move(inside)});
        }
    }

    std::vector<bool> ok(cylinder_families.size(), true);
    std::vector<bool> seen(cylinder_families.size(), false);
    std::size_t covered = 0;
    out.cylinder_aligned = true;
    for (const auto& [w, pts] : groups) {
        covered += pts.size();
        if (pts.size() == 1) {
            if (!close(pts, {cylinder_centroid(params, w)})) out.cylinder_aligned = false;
        } else if (pts.size() == 3 && n != 2) {
            if (!close(pts, pattern_points(w, three_point_cells()))) out.cylinder_aligned = false;
        } else if (pts.size() == 2) {
            bool any = false;
            const auto iv = cylinder_interval(params, w);
            for (std::size_t f = 0; f < cylinder_families.size(); ++f) {
                // P restricted to a cylinder is symmetric, so the mirrored pattern counts too
                const auto pattern = pattern_points(w, two_point_cells(cylinder_families[f]));
                const std::vector<T> mirrored{T(iv.lo + iv.hi - pattern[1]), T(iv.lo + iv.hi - pattern[0])};
                bool m = close(pts, pattern) || close(pts, mirrored);
                ok[f] = ok[f] && m;
                seen[f] = seen[f] || m;
                any = any || m;
            }
            out.cylinder_aligned = out.cylinder_aligned && any;
        } else {
            out.cylinder_aligned = false;
        }
    }
    if (covered != n) out.cylinder_aligned = false;
    if (!out.cylinder_aligned) return out;
    for (std::size_t f = 0; f < cylinder_families.size(); ++f) {
        if (ok[f]) out.families.push_back(cylinder_families[f]);
        if (seen[f]) out.pattern_families.push_back(cylinder_families[f]);
    }
    return out;
}

struct OracleReport {
    std::size_t n = 0;
    Real r;
    unsigned depth = 0;
    long double dp_cost = 0;
    long double corrected_cost = 0;
    Real formula_cost;
    Family formula_family = Family::beta;
    std::optional<Family> formula_tie;
    long double abs_gap = 0;
    std::vector<long double> dp_points;
    std::optional<std::vector<long double>> reflected_points;
    FamilyMatch match;

    /// First matching family, if any.
    std::optional<Family> matched_family() const {
        if (match.families.empty()) return std::nullopt;
        return match.families.front();
    }
};

inline unsigned default_oracle_depth(std::size_t n) { return (n >= 3 ? ell(n) : 0) + 3; }

/// DP on the depth-k atoms versus the closed-form optimum.
template <class T>
OracleReport verify_optimality(std::size_t n, const IFSParams<T>& params, unsigned depth,
                               long double tol) {
    OracleReport rep;
    rep.n = n;
    rep.r = to_real(params.r());
    rep.depth = depth;
    auto opt = optimal_vn(n, params);
    rep.formula_cost = to_real(opt.value);
    rep.formula_family = opt.family;
    rep.formula_tie = opt.tie;

    IFSParams<long double> fast(convert<long double>(params.r()));
    auto dp = dp_kmeans(discretize(fast, depth), n);
    rep.dp_cost = dp.cost;
    rep.corrected_cost = corrected_cost(dp.cost, fast, depth);
    rep.abs_gap = abs_value(rep.corrected_cost - convert<long double>(opt.value));
    rep.dp_points = dp.points;
    rep.reflected_points = dp.reflected_points;
    rep.match = match_families(fast, dp.points, tol);
    if (rep.match.families.empty() && dp.reflected_points) {
        auto mirrored = match_families(fast, *dp.reflected_points, tol);
        if (!mirrored.families.empty() || (mirrored.cylinder_aligned && !rep.match.cylinder_aligned)) {
            rep.match = std::move(mirrored);
        }
    }
    return rep;
}

} // namespace cantorquant
