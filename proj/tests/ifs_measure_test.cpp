#include <gtest/gtest.h>

#include <cantorquant/ifs_measure.hpp>

#include <random>

#include "test_support.hpp"

using namespace cantorquant;
using cqtest::q;

namespace {

const IFSParams<Rational> r25(q(1, 25));
const IFSParams<Rational> r5(q(1, 5));

Rational binomial(unsigned m, unsigned i) {
    Rational c(1);
    for (unsigned k = 0; k < i; ++k) c = c * Rational(m - k) / Rational(k + 1);
    return c;
}

// Depth-K cylinder sum: each cylinder goes whole to the point nearest its
// centroid, which is exact for every cylinder not cut by a bisector.
long double atom_distortion(long double r, const std::vector<long double>& points, unsigned depth) {
    const IFSParams<long double> params(r);
    const long double v = measure_variance(params);
    const long double scale = std::pow(r, static_cast<long double>(depth));
    const long double mass = std::pow(3.0L, -static_cast<long double>(depth));
    long double total = 0;
    for (const auto& w : words_of_length(depth)) {
        const long double c = cylinder_centroid(params, w);
        long double best = std::numeric_limits<long double>::max();
        for (auto p : points) best = std::min(best, (c - p) * (c - p));
        total += mass * (scale * scale * v + best);
    }
    return total;
}

} // namespace

TEST(IFSParams, RejectsRatiosOutsideOpenInterval) {
    EXPECT_THROW(IFSParams<Rational>(q(0, 1)), InputError);
    EXPECT_THROW(IFSParams<Rational>(q(1, 3)), InputError);
    EXPECT_THROW(IFSParams<Real>(Real("0.5")), InputError);
    EXPECT_THROW(IFSParams<double>(-0.1), InputError);
    EXPECT_NO_THROW(IFSParams<Real>(Real("0.333")));
}

TEST(ComposeMap, IdentityAndExamples) {
    auto id = compose_map(r5, Word());
    EXPECT_EQ(id.scale, 1);
    EXPECT_EQ(id.offset, 0);
    auto m13 = compose_map(r5, Word("13"));
    EXPECT_EQ(m13.scale, q(1, 25));
    EXPECT_EQ(m13.offset, q(4, 25));
    auto m2 = compose_map(r25, Word("2"));
    EXPECT_EQ(m2.scale, q(1, 25));
    EXPECT_EQ(m2.offset, q(12, 25));
}

TEST(ComposeMap, ScaleIsPowerOfRAndImageInUnitInterval) {
    for (const auto& w : words_of_length(4)) {
        auto m = compose_map(r5, w);
        EXPECT_EQ(m.scale, ipow(q(1, 5), 4));
        EXPECT_GE(m(Rational(0)), 0);
        EXPECT_LE(m(Rational(1)), 1);
    }
}

TEST(CylinderInterval, Examples) {
    auto whole = cylinder_interval(r25, Word());
    EXPECT_EQ(whole.lo, 0);
    EXPECT_EQ(whole.hi, 1);
    auto j2 = cylinder_interval(r25, Word("2"));
    EXPECT_EQ(j2.lo, q(12, 25));
    EXPECT_EQ(j2.hi, q(13, 25));
    auto j3 = cylinder_interval(r5, Word("3"));
    EXPECT_EQ(j3.lo, q(4, 5));
    EXPECT_EQ(j3.hi, 1);
    EXPECT_EQ(cylinder_interval(r5, Word("213")).length(), q(1, 125));
}

TEST(Centroids, CylinderAndUnion) {
    EXPECT_EQ(cylinder_centroid(r25, Word()), q(1, 2));
    EXPECT_EQ(cylinder_centroid(r25, Word("1")), q(1, 50));
    EXPECT_EQ(cylinder_centroid(r25, Word("3")), q(49, 50));
    EXPECT_EQ(union_centroid(r25, make_cell({"1", "2", "3"})), q(1, 2));
    EXPECT_EQ(union_centroid(r25, make_cell({"2", "3"})), q(37, 50));
    EXPECT_EQ(union_centroid(r25, make_cell({"1"})), q(1, 50));
    EXPECT_THROW(union_centroid(r25, Cell{}), InputError);
    EXPECT_THROW(union_centroid(r25, make_cell({"1", "12"})), InputError);
}

TEST(CylinderMass, PowersOfThree) {
    EXPECT_EQ(cylinder_mass<Rational>(Word("221")), q(1, 27));
    EXPECT_EQ(cell_mass<Rational>(make_cell({"1", "21", "221"})), q(13, 27));
}

TEST(MeasureVariance, ClosedFormValues) {
    EXPECT_EQ(measure_variance(r25), q(2, 13));
    EXPECT_NEAR(to_double(measure_variance(IFSParams<Real>(Real("1e-12")))), 1.0 / 6, 1e-11);
    const auto v0 = measure_variance(IFSParams<Real>(cqtest::r0()));
    EXPECT_NEAR(to_double(v0), 0.120126537, 1e-9);
}

TEST(Moments, Examples) {
    EXPECT_EQ(moments(r25, 0), 1);
    EXPECT_EQ(moments(r25, 1), q(1, 2));
    EXPECT_EQ(moments(r5, 1), q(1, 2));
    EXPECT_EQ(moments(r25, 2), q(21, 52));
    EXPECT_EQ(moments(r5, 2) - q(1, 4), measure_variance(r5));
}

TEST(Moments, SelfSimilarFixedPointExact) {
    for (const auto& r : {q(1, 25), q(1, 5), q(1, 10), q(7, 30), q(1, 4)}) {
        const IFSParams<Rational> params(r);
        const auto mom = moment_table(params, 8);
        for (unsigned m = 0; m <= 8; ++m) {
            Rational rhs(0);
            for (int j = 1; j <= 3; ++j) {
                for (unsigned i = 0; i <= m; ++i) {
                    rhs += binomial(m, i) * ipow(r, i) * ipow(params.offset(j), m - i) * mom[i];
                }
            }
            EXPECT_EQ(mom[m], rhs / 3) << "m=" << m;
        }
    }
}

TEST(Moments, SelfSimilarFixedPointRandomReal) {
    std::uniform_real_distribution<double> dist(0.001, 0.333);
    for (int trial = 0; trial < 20; ++trial) {
        const Real r(dist(cqtest::rng()));
        const IFSParams<Real> params(r);
        const auto mom = moment_table(params, 8);
        for (unsigned m = 0; m <= 8; ++m) {
            Real rhs(0);
            for (int j = 1; j <= 3; ++j) {
                for (unsigned i = 0; i <= m; ++i) {
                    rhs += to_real(binomial(m, i)) * ipow(r, i) * ipow(params.offset(j), m - i) *
                           mom[i];
                }
            }
            EXPECT_LT(abs(mom[m] - rhs / 3), Real("1e-14"));
        }
    }
}

TEST(Moments, SymmetricAboutOneHalf) {
    // odd central moments vanish
    const auto mom = moment_table(r5, 5);
    const Rational c3 = mom[3] - 3 * mom[2] / 2 + 3 * mom[1] / 4 - Rational(1, 8);
    EXPECT_EQ(c3, 0);
}

TEST(CellDistortion, Examples) {
    EXPECT_EQ(cell_distortion(r25, Cell{Word()}, q(1, 2)), q(2, 13));
    EXPECT_EQ(cell_distortion(r25, make_cell({"1"}), q(1, 50)), q(2, 24375));
    EXPECT_EQ(cell_distortion(r25, make_cell({"1"}), q(1, 50)) +
                  cell_distortion(r25, make_cell({"2", "3"}), q(37, 50)),
              q(314, 8125));
}

TEST(CellDistortion, OneLevelRefinementIsExact) {
    const std::vector<Cell> cells{make_cell({"1"}), make_cell({"1", "21"}), make_cell({"22", "23", "3"}),
                                  make_cell({"122", "123", "13"}), Cell{Word()}};
    for (const auto& r : {q(1, 25), q(1, 5), q(3, 13)}) {
        const IFSParams<Rational> params(r);
        for (const auto& cell : cells) {
            for (const auto& x : {q(0, 1), q(1, 7), q(1, 2), q(9, 10)}) {
                Rational refined(0);
                for (const auto& w : cell) {
                    refined += cell_distortion(params, refine(Cell{w}), x);
                }
                EXPECT_EQ(cell_distortion(params, cell, x), refined);
            }
        }
    }
}

TEST(CellDistortion, MinimizedAtUnionCentroid) {
    const std::vector<Cell> cells{make_cell({"1", "21"}), make_cell({"222", "223", "23", "3"}),
                                  make_cell({"13"}), make_cell({"2", "3"})};
    const IFSParams<Rational> params(q(1, 5));
    for (const auto& cell : cells) {
        const Rational c = union_centroid(params, cell);
        const Rational at = cell_distortion(params, cell, c);
        for (const auto& h : {q(1, 10), q(1, 1000), q(1, 1000000)}) {
            EXPECT_GT(cell_distortion(params, cell, Rational(c + h)), at);
            EXPECT_GT(cell_distortion(params, cell, Rational(c - h)), at);
        }
    }
}

TEST(QuantizerDistortion, ExactExamples) {
    const Rational tol = q(1, 1000000000000LL);
    EXPECT_EQ(quantizer_distortion(r25, {q(1, 50), q(37, 50)}, tol), q(314, 8125));
    EXPECT_EQ(quantizer_distortion(r25, {q(1, 50), q(1, 2), q(49, 50)}, tol), q(2, 8125));
    EXPECT_EQ(quantizer_distortion(r25, {q(1, 2)}, tol), q(2, 13));
}

TEST(QuantizerDistortion, OnePointAtMeanIsVariance) {
    for (const char* r : {"0.01", "0.2", "0.33"}) {
        const IFSParams<Real> params{Real(r)};
        EXPECT_LT(abs(quantizer_distortion(params, {Real("0.5")}, Real("1e-12")) -
                      measure_variance(params)),
                  Real("1e-12"));
    }
}

TEST(QuantizerDistortion, RejectsEmptyPointSet) {
    EXPECT_THROW(quantizer_distortion(r25, {}, q(1, 1000)), InputError);
}

TEST(QuantizerDistortion, DepthGuardCarriesAchievedBound) {
    // bisector at 1/2, the fixed point of S_2, is cut at every depth
    const IFSParams<Real> params{Real("0.2")};
    try {
        quantizer_distortion(params, {Real("0.4"), Real("0.6")}, Real("1e-12"), 3);
        FAIL() << "expected NumericError";
    } catch (const NumericError& e) {
        EXPECT_GT(e.achieved_bound(), 1e-12);
    }
    EXPECT_NO_THROW(quantizer_distortion(params, {Real("0.4"), Real("0.6")}, Real("1e-12")));
}

TEST(QuantizerDistortion, MatchesAtomEnumeration) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double r : {0.05, 0.2, 0.3}) {
        const IFSParams<long double> params(r);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<long double> pts;
            const int count = 1 + trial % 5;
            for (int i = 0; i < count; ++i) pts.push_back(unit(cqtest::rng()));
            const long double value = quantizer_distortion(params, pts, 1e-14L);
            // cut cylinders at depth 9 misassign at most a few atoms of size 3^-9 r^9
            EXPECT_NEAR(static_cast<double>(value),
                        static_cast<double>(atom_distortion(r, pts, 9)), 1e-8);
        }
    }
}

TEST(QuantizerDistortion, ReflectionSymmetry) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const long double tol = 1e-13L;
    for (double r : {0.04, 0.15, 0.25, 0.32}) {
        const IFSParams<long double> params(r);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<long double> pts, mirrored;
            for (int i = 0; i < 1 + trial % 6; ++i) {
                pts.push_back(unit(cqtest::rng()));
                mirrored.push_back(1 - pts.back());
            }
            EXPECT_NEAR(static_cast<double>(quantizer_distortion(params, pts, tol)),
                        static_cast<double>(quantizer_distortion(params, mirrored, tol)),
                        static_cast<double>(2 * tol));
        }
    }
}

TEST(QuantizerDistortion, AgreesWithCellsForCylinderVoronoiCells) {
    const Real tol("1e-12");
    const IFSParams<Real> params{Real("0.2")};
    const std::vector<Cell> cells{make_cell({"1", "21"}), make_cell({"22", "23", "3"})};
    std::vector<Real> pts;
    Real sum(0);
    for (const auto& c : cells) {
        pts.push_back(union_centroid(params, c));
        sum += cell_distortion(params, c, pts.back());
    }
    EXPECT_LT(abs(quantizer_distortion(params, pts, tol) - sum), tol);
}

TEST(VoronoiSummary, RegionsFollowInputOrder) {
    const auto s = voronoi_summary(r25, {q(37, 50), q(1, 50)}, q(1, 1000000));
    ASSERT_EQ(s.regions.size(), 2u);
    EXPECT_EQ(s.regions[0].mass, q(2, 3));
    EXPECT_EQ(s.regions[1].mass, q(1, 3));
    EXPECT_EQ(s.regions[0].moment / s.regions[0].mass, q(37, 50));
    EXPECT_EQ(s.error_bound, 0);
}
