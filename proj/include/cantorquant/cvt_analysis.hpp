#pragma once

/**
 * CVT conditions for the beta/gamma/delta families, the r-ranges where they
 * hold, and the crossings between two-point values that fix r0 and r1.
 *
 * Because the maps are similarities, a whole family is a CVT as soon as four
 * chains "left gap end <= bisector <= right gap end" hold: one for the
 * two-point pattern itself and three for the ways a pattern can sit next to
 * its neighbours in the level recursion.
 */

#include <algorithm>
#include <array>
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
struct InequalityRow {
    std::string label;
    T left;
    T middle;
    T right;
    bool holds = false;
};

template <class T>
struct InequalityReport {
    Family family = Family::beta;
    T r;
    std::vector<InequalityRow<T>> rows;
    std::vector<std::string> flags;

    bool all_hold() const {
        return std::all_of(rows.begin(), rows.end(), [](const auto& row) { return row.holds; });
    }
};

namespace detail {

struct GapEnd {
    const char* word;
    int x;  // S_word(x), x in {0, 1}
};

struct ChainSpec {
    GapEnd left;
    Cell lower;
    Cell upper;
    int coeff_den;  // bisector = (a(lower) + a(upper)) / coeff_den
    GapEnd right;
};

inline std::string describe(const GapEnd& e) {
    return "S_" + std::string(e.word) + "(" + std::to_string(e.x) + ")";
}

inline std::string describe(const ChainSpec& c) {
    return describe(c.left) + " <= (a(" + join_words(c.lower) + ") + a(" + join_words(c.upper) +
           "))/" + std::to_string(c.coeff_den) + " <= " + describe(c.right);
}

inline std::array<ChainSpec, 4> chain_specs(Family f) {
    switch (f) {
    case Family::beta:
        return {{{{"1", 1}, make_cell({"1"}), make_cell({"2", "3"}), 2, {"2", 0}},
                 {{"1", 1}, make_cell({"1"}), make_cell({"21"}), 2, {"21", 0}},
                 {{"13", 1}, make_cell({"12", "13"}), make_cell({"21"}), 2, {"21", 0}},
                 {{"13", 1}, make_cell({"13"}), make_cell({"21"}), 2, {"21", 0}}}};
    case Family::gamma:
        return {{{{"21", 1}, make_cell({"1", "21"}), make_cell({"22", "23", "3"}), 2, {"22", 0}},
                 {{"1", 1}, make_cell({"1"}), make_cell({"21", "221"}), 2, {"21", 0}},
                 {{"13", 1}, make_cell({"122", "123", "13"}), make_cell({"21", "221"}), 2, {"21", 0}},
                 {{"13", 1}, make_cell({"13"}), make_cell({"21", "221"}), 2, {"21", 0}}}};
    case Family::delta:
        return {{{{"221", 1}, make_cell({"1", "21", "221"}), make_cell({"222", "223", "23", "3"}), 2,
                  {"222", 0}},
                 {{"1", 1}, make_cell({"1"}), make_cell({"21", "221", "2221"}), 2, {"21", 0}},
                 {{"13", 1}, make_cell({"1222", "1223", "123", "13"}),
                  make_cell({"21", "221", "2221"}), 2, {"21", 0}},
                 {{"13", 1}, make_cell({"13"}), make_cell({"21", "221", "2221"}), 2, {"21", 0}}}};
    case Family::kappa: break;
    }
    throw InputError("CVT inequalities are defined for beta, gamma and delta only");
}

template <class T>
T gap_end(const IFSParams<T>& params, const GapEnd& e) {
    auto map = compose_map(params, Word(e.word));
    return map(T(e.x));
}

template <class T>
InequalityRow<T> evaluate_chain(const IFSParams<T>& params, const ChainSpec& c) {
    InequalityRow<T> row;
    row.label = describe(c);
    row.left = gap_end(params, c.left);
    row.right = gap_end(params, c.right);
    row.middle = (union_centroid(params, c.lower) + union_centroid(params, c.upper)) / T(c.coeff_den);
    row.holds = row.left <= row.middle && row.middle <= row.right;
    return row;
}

} // namespace detail

template <class T>
InequalityReport<T> cvt_inequalities(Family family, const IFSParams<T>& params) {
    InequalityReport<T> report;
    report.family = family;
    report.r = params.r();
    const auto specs = detail::chain_specs(family);
    for (const auto& spec : specs) report.rows.push_back(detail::evaluate_chain(params, spec));

    if (family == Family::gamma) {
        // Alternative reading of the third chain with a 1/3 coefficient.
        auto variant = specs[2];
        variant.coeff_den = 3;
        auto alt = detail::evaluate_chain(params, variant);
        if (alt.holds != report.rows[2].holds) {
            report.flags.push_back("row 3 with coefficient 1/3 " +
                                   std::string(alt.holds ? "holds" : "fails") +
                                   " while the midpoint version " +
                                   (report.rows[2].holds ? "holds" : "fails"));
        }
    }
    return report;
}

/// Plain bisection for a sign change of f on [lo, hi].
template <class F>
Real bisect(F&& f, Real lo, Real hi, const Real& tol) {
    if (!(tol > 0)) throw InputError("tolerance must be positive");
    if (!(lo < hi)) throw BracketError("empty bracket");
    Real flo = f(lo);
    Real fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo < 0) == (fhi < 0)) {
        throw BracketError("no sign change on [" + format_decimal(lo, 12) + ", " +
                           format_decimal(hi, 12) + "]");
    }
    while (hi - lo > tol) {
        Real mid = (lo + hi) / 2;
        Real fmid = f(mid);
        if (fmid == 0) return mid;
        if ((fmid < 0) == (flo < 0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return (lo + hi) / 2;
}

struct RangeBound {
    std::string label;
    bool lower_side = true;  ///< root of (middle - left) rather than (right - middle)
    Real root;
};

struct RangeComponent {
    Real lo;
    Real hi;
    bool lo_open = false;  ///< extends down to the edge of (0, 1/3)
    bool hi_open = false;
};

struct CvtRange {
    Family family = Family::beta;
    std::vector<RangeComponent> components;
    std::vector<RangeBound> bounds;

    /// The feasible set when it is a single interval.
    const RangeComponent& interval() const {
        if (components.size() != 1) {
            throw NumericError("CVT feasible set has " + std::to_string(components.size()) +
                                   " components",
                               0.0);
        }
        return components.front();
    }
};

inline const Real& scan_margin() {
    static const Real margin("1e-6");
    return margin;
}

/// Where all four chains of the family hold, to within tol.
///
/// Each side of each chain is scanned over (1e-6, 1/3 - 1e-6) for sign
/// changes, every change is bisected, and the pieces between consecutive
/// roots are tested for feasibility and merged.
inline CvtRange cvt_range(Family family, const Real& tol, int grid = 1999) {
    const auto specs = detail::chain_specs(family);
    const Real lo = scan_margin();
    const Real hi = Real(1) / 3 - scan_margin();

    CvtRange out;
    out.family = family;
    std::vector<Real> roots;
    for (const auto& spec : specs) {
        for (bool lower : {true, false}) {
            auto g = [&](const Real& r) {
                auto row = detail::evaluate_chain(IFSParams<Real>(r), spec);
                return lower ? Real(row.middle - row.left) : Real(row.right - row.middle);
            };
            Real prev_x = lo;
            Real prev = g(prev_x);
            for (int i = 1; i <= grid; ++i) {
                Real x = lo + (hi - lo) * i / grid;
                Real cur = g(x);
                if ((prev < 0) != (cur < 0) && prev != 0) {
                    Real root = bisect(g, prev_x, x, tol);
                    out.bounds.push_back({detail::describe(spec), lower, root});
                    roots.push_back(root);
                }
                prev_x = x;
                prev = cur;
            }
        }
    }
    std::sort(roots.begin(), roots.end());

    std::vector<Real> cuts{lo};
    for (const auto& r : roots) cuts.push_back(r);
    cuts.push_back(hi);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i] < cuts[i + 1])) continue;
        Real mid = (cuts[i] + cuts[i + 1]) / 2;
        if (!cvt_inequalities(family, IFSParams<Real>(mid)).all_hold()) continue;
        if (!out.components.empty() && out.components.back().hi == cuts[i]) {
            out.components.back().hi = cuts[i + 1];
        } else {
            out.components.push_back({cuts[i], cuts[i + 1], false, false});
        }
    }
    for (auto& c : out.components) {
        if (c.lo == lo) {
            c.lo = 0;
            c.lo_open = true;
        }
        if (c.hi == hi) {
            c.hi = Real(1) / 3;
            c.hi_open = true;
        }
    }
    return out;
}

/// Root of V(P;A_2) - V(P;B_2) inside the bracket.
inline Real crossing(Family a, Family b, const Real& lo, const Real& hi, const Real& tol) {
    auto diff = [&](const Real& r) {
        IFSParams<Real> p(r);
        return Real(two_point_value(a, p) - two_point_value(b, p));
    };
    return bisect(diff, lo, hi, tol);
}

/// Number of sign changes of V(P;A_2) - V(P;B_2) on a uniform grid over (0, 1/3).
inline int count_sign_changes(Family a, Family b, long double step = 1e-5L) {
    int changes = 0;
    int prev_sign = 0;
    for (long double r = step; r < 1.0L / 3; r += step) {
        IFSParams<long double> p(r);
        long double d = two_point_value(a, p) - two_point_value(b, p);
        int sign = (d > 0) - (d < 0);
        if (sign != 0) {
            if (prev_sign != 0 && sign != prev_sign) ++changes;
            prev_sign = sign;
        }
    }
    return changes;
}

struct Thresholds {
    Real r0;
    Real r1;
    CvtRange beta_cvt;
    CvtRange gamma_cvt;
    CvtRange delta_cvt;
    Real beta_delta_crossing;
    Real tol;
};

/// Roots are bisected three decades below tol so that printing them with
/// tol's number of places rounds correctly.
inline Thresholds thresholds(const Real& tol) {
    const Real work = tol / 1000;
    Thresholds t;
    t.tol = tol;
    t.r0 = crossing(Family::beta, Family::gamma, Real("0.1"), Real("0.2"), work);
    t.r1 = crossing(Family::gamma, Family::delta, Real("0.2"), Real("0.25"), work);
    t.beta_delta_crossing = crossing(Family::beta, Family::delta, Real("0.15"), Real("0.2"), work);
    t.beta_cvt = cvt_range(Family::beta, work);
    t.gamma_cvt = cvt_range(Family::gamma, work);
    t.delta_cvt = cvt_range(Family::delta, work);
    return t;
}

template <class T>
struct BestFamily {
    Family family = Family::beta;
    T value;
    std::vector<Family> ties;  ///< other families within the tie tolerance
};

template <class T>
T default_family_tie() {
    if constexpr (is_exact_v<T>) {
        return T(0);
    } else {
        return T(1e-12);
    }
}

/// Smallest two-point distortion among beta, gamma, delta and kappa.
template <class T>
BestFamily<T> best_family(const IFSParams<T>& params, const T& tie_tol = default_family_tie<T>()) {
    constexpr std::array<Family, 4> all{Family::beta, Family::gamma, Family::delta, Family::kappa};
    BestFamily<T> best{all[0], two_point_value(all[0], params), {}};
    std::vector<T> values;
    for (auto f : all) values.push_back(two_point_value(f, params));
    for (std::size_t i = 1; i < all.size(); ++i) {
        if (values[i] < best.value) best = {all[i], values[i], {}};
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (all[i] != best.family && abs_value(T(values[i] - best.value)) <= tie_tol) {
            best.ties.push_back(all[i]);
        }
    }
    return best;
}

} // namespace cantorquant
