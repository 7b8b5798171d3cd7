#include <gtest/gtest.h>

#include <cantorquant/constructions.hpp>

#include <functional>

#include "test_support.hpp"

using namespace cantorquant;
using cqtest::q;

namespace {

const IFSParams<Rational> r25(q(1, 25));
const IFSParams<Rational> r5(q(1, 5));

std::vector<Cell> cells_of(const Quantizer<Rational>& qz) {
    std::vector<Cell> out;
    for (const auto& e : qz.entries) out.push_back(e.cell);
    return out;
}

// All k-subsets of the given words.
void for_each_subset(const std::vector<Word>& words, std::size_t k,
                     const std::function<void(const std::vector<Word>&)>& visit) {
    std::vector<Word> current;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (current.size() == k) {
            visit(current);
            return;
        }
        for (std::size_t i = start; i < words.size(); ++i) {
            current.push_back(words[i]);
            rec(i + 1);
            current.pop_back();
        }
    };
    rec(0);
}

// Truncated series for V(P; kappa): the left half is J_1 u J_21 u J_221 u ...
Real kappa_series(const Real& r, int terms) {
    const IFSParams<Real> params(r);
    const Real v = measure_variance(params);
    const Real a1 = (r + 1) / (6 - 2 * r);
    Real within(0), between(0);
    for (int n = 1; n <= terms; ++n) {
        const Real w = 1 / ipow(Real(3), static_cast<unsigned>(n));
        const Real c = (-ipow(r, static_cast<unsigned>(n - 1)) + ipow(r, static_cast<unsigned>(n)) + 1) / 2;
        within += ipow(r, static_cast<unsigned>(2 * n)) * w * v;
        between += w * (c - a1) * (c - a1);
    }
    return 2 * (within + between);
}

} // namespace

TEST(Ell, Examples) {
    EXPECT_EQ(ell(3), 1u);
    EXPECT_EQ(ell(8), 1u);
    EXPECT_EQ(ell(9), 2u);
    EXPECT_EQ(ell(80), 3u);
    EXPECT_EQ(ell(81), 4u);
    EXPECT_THROW(ell(2), InputError);
}

TEST(Build, BetaTwoAtOneTwentyFifth) {
    const auto qz = build(Family::beta, 2, r25);
    ASSERT_EQ(qz.entries.size(), 2u);
    EXPECT_EQ(qz.entries[0].point, q(1, 50));
    EXPECT_EQ(qz.entries[1].point, q(37, 50));
    EXPECT_EQ(cells_of(qz), (std::vector<Cell>{make_cell({"1"}), make_cell({"2", "3"})}));
    EXPECT_EQ(qz.value, q(314, 8125));
}

TEST(Build, GammaFiveListing) {
    const auto qz = build(Family::gamma, 5, r5);
    EXPECT_EQ(cells_of(qz), (std::vector<Cell>{make_cell({"1"}), make_cell({"21", "221"}),
                                               make_cell({"222", "223", "23"}), make_cell({"31", "321"}),
                                               make_cell({"322", "323", "33"})}));
}

TEST(Build, DeltaFourListing) {
    const auto qz = build(Family::delta, 4, r5);
    EXPECT_EQ(cells_of(qz), (std::vector<Cell>{make_cell({"1"}), make_cell({"2"}),
                                               make_cell({"31", "321", "3221"}),
                                               make_cell({"3222", "3223", "323", "33"})}));
}

TEST(Build, GammaThreeIsLevelOneCentroids) {
    const auto qz = build(Family::gamma, 3, IFSParams<Real>(Real("0.2")));
    ASSERT_EQ(qz.entries.size(), 3u);
    EXPECT_LT(abs(qz.entries[0].point - Real("0.1")), Real("1e-45"));
    EXPECT_LT(abs(qz.entries[1].point - Real("0.5")), Real("1e-45"));
    EXPECT_LT(abs(qz.entries[2].point - Real("0.9")), Real("1e-45"));
}

TEST(Build, SecondCaseUsesThreePointPattern) {
    // beta_7: I = {3}, J_3 gets three points, J_1 and J_2 the scaled pair
    const auto qz = build(Family::beta, 7, r25);
    EXPECT_EQ(cells_of(qz),
              (std::vector<Cell>{make_cell({"11"}), make_cell({"12", "13"}), make_cell({"21"}),
                                 make_cell({"22", "23"}), make_cell({"31"}), make_cell({"32"}),
                                 make_cell({"33"})}));
    EXPECT_EQ(qz.index_set, std::vector<Word>{Word("3")});
}

TEST(Build, KappaOnlyForTwoPoints) {
    try {
        build(Family::kappa, 3, r5);
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        EXPECT_STREQ(e.what(), "kappa supports n=2 only");
    }
    EXPECT_FALSE(build(Family::kappa, 2, r5).cylinder_cells);
}

TEST(Build, ExplicitIndexSetValidation) {
    const auto two = [](const char* a, const char* b) { return IndexPolicy::explicit_words({Word(a), Word(b)}); };
    EXPECT_NO_THROW(build(Family::beta, 5, r25, two("1", "3")));
    EXPECT_THROW(build(Family::beta, 5, r25, IndexPolicy::explicit_words({Word("1")})), InputError);
    EXPECT_THROW(build(Family::beta, 5, r25, two("1", "22")), InputError);
    EXPECT_THROW(build(Family::beta, 5, r25, two("2", "2")), InputError);
    EXPECT_THROW(build(Family::beta, 1, r25), InputError);
}

TEST(Build, QuantizerInvariants) {
    for (auto family : cylinder_families) {
        for (std::size_t n = 2; n <= 30; ++n) {
            const auto qz = build(family, n, r5);
            ASSERT_EQ(qz.entries.size(), n);
            Rational mass(0);
            Cell all;
            for (std::size_t i = 0; i < n; ++i) {
                const auto& e = qz.entries[i];
                if (i) EXPECT_LT(qz.entries[i - 1].point, e.point);
                EXPECT_EQ(e.point, union_centroid(r5, e.cell));
                mass += cell_mass<Rational>(e.cell);
                all.insert(all.end(), e.cell.begin(), e.cell.end());
            }
            EXPECT_EQ(mass, 1);
            EXPECT_NO_THROW(validate_cell(all));
            const std::size_t level = pow3(n >= 3 ? ell(n) : 0);
            if (n >= 3) {
                EXPECT_EQ(qz.index_set.size(), n <= 2 * level ? n - level : n - 2 * level);
            }
        }
    }
}

TEST(Build, IndexSetInvariance) {
    for (const auto& r : {q(1, 25), q(1, 5), q(9, 40)}) {
        const IFSParams<Rational> params(r);
        for (auto family : cylinder_families) {
            for (std::size_t n : {4, 5, 7, 8, 11, 13, 16, 22, 25}) {
                const unsigned l = ell(n);
                const std::size_t level = pow3(l);
                const std::size_t card = n <= 2 * level ? n - level : n - 2 * level;
                const Rational expected = build(family, n, params).value;
                int seen = 0;
                for_each_subset(words_of_length(l), card, [&](const std::vector<Word>& index) {
                    const auto qz = build(family, n, params, IndexPolicy::explicit_words(index));
                    EXPECT_EQ(cells_distortion(params, qz), expected);
                    ++seen;
                });
                EXPECT_GT(seen, 0);
            }
        }
    }
}

TEST(Build, PatternSelfSimilarity) {
    for (auto family : cylinder_families) {
        for (std::size_t n : {3, 9, 27}) {
            const auto small = build(family, n, r5);
            const auto big = build(family, 3 * n, r5);
            for (int j = 1; j <= 3; ++j) {
                const auto map = compose_map(r5, Word(std::string(1, static_cast<char>('0' + j))));
                for (std::size_t i = 0; i < n; ++i) {
                    EXPECT_EQ(big.entries[(j - 1) * n + i].point, map(small.entries[i].point));
                }
            }
        }
    }
}

TEST(MidpointSplit, ExactValuesAtOneTwentyFifth) {
    const auto k = midpoint_split(r25);
    EXPECT_EQ(k.entries[0].point, q(13, 74));
    EXPECT_EQ(k.entries[1].point, q(61, 74));
    EXPECT_EQ(k.value, q(866, 17797));
    ASSERT_TRUE(k.entries[0].region.has_value());
    EXPECT_EQ(k.entries[0].region->hi, q(1, 2));
}

TEST(MidpointSplit, PointsSumToOne) {
    for (const auto& r : {q(1, 25), q(1, 7), q(3, 10)}) {
        const auto k = midpoint_split(IFSParams<Rational>(r));
        EXPECT_EQ(k.entries[0].point + k.entries[1].point, 1);
    }
}

TEST(MidpointSplit, PointsAreHalfLineCentroids) {
    const IFSParams<Real> params{Real("0.2")};
    const auto k = midpoint_split(params);
    // refinement stops on the distortion bound, so the moment is only good to about (r/3)^k
    const auto s = voronoi_summary(params, {Real("0.4999"), Real("0.5001")}, Real("1e-36"));
    EXPECT_LT(abs(s.regions[0].moment / s.regions[0].mass - k.entries[0].point), Real("1e-20"));
}

TEST(MidpointSplit, AgreesWithTruncatedSeries) {
    for (const char* r : {"0.01", "0.04", "0.1622776602", "0.2", "0.3"}) {
        const Real rr(r);
        EXPECT_LT(abs(midpoint_split_value(IFSParams<Real>(rr)) - kappa_series(rr, 40)), Real("1e-12"))
            << "r=" << r;
    }
    EXPECT_NEAR(to_double(midpoint_split_value(IFSParams<Real>(cqtest::r0()))), 0.0329779, 1e-7);
}

TEST(TwoPointValue, MatchesConstructedCells) {
    for (const auto& r : {q(1, 25), q(1, 5), q(1, 10), q(6, 25), q(8, 25)}) {
        const IFSParams<Rational> params(r);
        for (auto family : cylinder_families) {
            EXPECT_EQ(two_point_value(family, params), build(family, 2, params).value);
        }
    }
}

TEST(TwoPointValue, PrintedDecimals) {
    EXPECT_EQ(two_point_value(Family::beta, r25), q(314, 8125));
    EXPECT_NEAR(to_double(two_point_value(Family::gamma, IFSParams<Real>(cqtest::r0()))), 0.0324042, 1e-7);
    EXPECT_NEAR(to_double(two_point_value(Family::gamma, IFSParams<Real>(cqtest::r1()))), 0.026897, 1e-6);
}

TEST(VnFormula, Examples) {
    EXPECT_EQ(vn_formula(Family::beta, 4, r25), q(938, 5078125));
    EXPECT_EQ(vn_formula(Family::beta, 3, r25), q(2, 8125));
    for (const auto& r : {q(1, 25), q(1, 5), q(1, 9)}) {
        const IFSParams<Rational> params(r);
        for (auto family : cylinder_families) {
            EXPECT_EQ(vn_formula(family, 3, params), r * r * measure_variance(params));
        }
    }
    EXPECT_NEAR(to_double(vn_formula(Family::gamma, 3, IFSParams<Real>(cqtest::r0()))), 0.00316342, 1e-7);
    EXPECT_THROW(vn_formula(Family::kappa, 2, r25), InputError);
}

TEST(VnFormula, CaseFormulasAgreeAtBoundary) {
    for (const auto& r : {q(1, 25), q(1, 5), q(7, 30)}) {
        const IFSParams<Rational> params(r);
        const Rational v = measure_variance(params);
        for (auto family : cylinder_families) {
            const Rational two = two_point_value(family, params);
            for (unsigned l = 1; l <= 5; ++l) {
                const std::size_t level = pow3(l);
                const std::size_t n = 2 * level;
                const Rational pre = ipow(r, 2 * l) / Rational(level);
                const Rational first = pre * (Rational(2 * level - n) * v + Rational(n - level) * two);
                const Rational second =
                    pre * (Rational(3 * level - n) * two + Rational(n - 2 * level) * r * r * v);
                EXPECT_EQ(first, second);
                EXPECT_EQ(vn_formula(family, n, params), first);
            }
        }
    }
}

TEST(VnFormula, EqualsCellSumOfConstruction) {
    for (const auto& r : {q(1, 25), q(1, 5), q(1, 4)}) {
        const IFSParams<Rational> params(r);
        for (auto family : cylinder_families) {
            for (std::size_t n = 2; n <= 81; ++n) {
                EXPECT_EQ(vn_formula(family, n, params), build(family, n, params).value) << n;
            }
        }
    }
}

TEST(VnFormula, EqualsVoronoiIntegralWhereFamilyIsCvt) {
    // beta is a CVT up to 1/5, gamma on about [0.085, 0.247], delta on about [0.185, 0.27]
    const std::vector<std::pair<Family, double>> cases{
        {Family::beta, 0.04}, {Family::beta, 0.1}, {Family::beta, 0.2},
        {Family::gamma, 0.1}, {Family::gamma, 0.2}, {Family::delta, 0.2}, {Family::delta, 0.25}};
    for (const auto& [family, r] : cases) {
        const IFSParams<long double> params(r);
        for (std::size_t n = 2; n <= 81; ++n) {
            const auto qz = build(family, n, params);
            const long double integral = quantizer_distortion(params, qz.points(), 1e-14L);
            EXPECT_NEAR(static_cast<double>(integral), static_cast<double>(vn_formula(family, n, params)),
                        1e-11)
                << to_string(family) << " r=" << r << " n=" << n;
        }
    }
}

TEST(OptimalVn, Examples) {
    const auto two = optimal_vn(2, r25);
    EXPECT_EQ(two.value, q(314, 8125));
    EXPECT_EQ(two.family, Family::beta);
    EXPECT_FALSE(two.tie.has_value());

    const auto at_r1 = optimal_vn(3, IFSParams<Real>(cqtest::r1()));
    EXPECT_EQ(at_r1.family, Family::gamma);
    EXPECT_NEAR(to_double(at_r1.value), 0.00558347, 1e-8);

    const IFSParams<Real> p0(cqtest::r0());
    const auto at_r0 = optimal_vn(2, p0);
    ASSERT_TRUE(at_r0.tie.has_value());
    EXPECT_EQ(*at_r0.tie, Family::gamma);
    EXPECT_LT(abs(two_point_value(Family::beta, p0) - two_point_value(Family::gamma, p0)), Real("1e-10"));
}

TEST(OptimalVn, FamilySwitchesAtThresholds) {
    EXPECT_EQ(optimal_vn(5, IFSParams<Real>(Real("0.16"))).family, Family::beta);
    EXPECT_EQ(optimal_vn(5, IFSParams<Real>(Real("0.17"))).family, Family::gamma);
    EXPECT_EQ(optimal_vn(5, IFSParams<Real>(Real("0.2317626315"))).family, Family::gamma);
    EXPECT_THROW(optimal_vn(5, IFSParams<Real>(Real("0.2317626316"))), UnsupportedRange);
    EXPECT_THROW(optimal_vn(2, IFSParams<Rational>(q(3, 10))), UnsupportedRange);
}

TEST(Family, NamesRoundTrip) {
    for (auto f : {Family::beta, Family::gamma, Family::delta, Family::kappa}) {
        EXPECT_EQ(parse_family(to_string(f)), f);
    }
    EXPECT_THROW(parse_family("epsilon"), InputError);
}
