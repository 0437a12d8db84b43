#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "regroup/errors.hpp"
#include "regroup/orbit3.hpp"

using namespace regroup;

namespace {

const double kTheta = std::numbers::sqrt2 * std::numbers::pi / 180.0;

// O(n^2) scan, independent of the sweep in closest_pair.
double brute_min_gap(const std::vector<Vec3>& pts) {
    double best = INFINITY;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, norm(pts[i] - pts[j]));
    }
    return best;
}

}  // namespace

TEST(Rotation, Examples) {
    EXPECT_EQ(rot_h({0, 0, 5}), (Vec3{0, 0, 5}));
    Vec3 r = rot_h({1, 0, 0});
    EXPECT_NEAR(r.x, std::cos(kTheta), 1e-14);
    EXPECT_NEAR(r.y, std::sin(kTheta), 1e-14);
    EXPECT_EQ(r.z, 0.0);
    EXPECT_DOUBLE_EQ(rotation_angle(), kTheta);
}

TEST(Rotation, NoReturnAfter360Steps) {
    Vec3 v{1, 0, 0};
    for (int k = 0; k < 360; ++k) v = rot_h(v);
    EXPECT_GT(norm(v - Vec3{1, 0, 0}), 0.01);
}

TEST(Slide, Examples) {
    EXPECT_EQ(slide_g({0, 0, 0}), (Vec3{0, 0, 1}));
    EXPECT_EQ(slide_g({1, 0, 7}), (Vec3{1, 0, 7}));
    Vec3 b = slide_g({0.6, 0.8, 2});
    EXPECT_NEAR(b.z, 2.0, 1e-15);
    EXPECT_THROW(slide_g({1, 1, 0}), OutsideCylinder);
}

TEST(F3, Examples) {
    EXPECT_EQ(f3({0, 0, 3}), (Vec3{0, 0, 4}));
    EXPECT_EQ(f3({2, 0, 0}), rot_h({2, 0, 0}));
    Vec3 w = f3({1, 0, 0});
    EXPECT_NEAR(radius_xy_squared(w), 1.0, 1e-12);
    EXPECT_EQ(w.z, 0.0);
}

TEST(F3, InteriorIsSlideAfterRotation) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> d(-0.7, 0.7);
    for (int i = 0; i < 1000; ++i) {
        Vec3 v{d(rng), d(rng), 10 * d(rng)};
        Vec3 expected = slide_g(rot_h(v));
        ASSERT_NEAR(norm(f3(v) - expected), 0.0, 1e-14);
    }
}

TEST(F3, RadiusInvariance) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> d(-3, 3);
    for (int i = 0; i < 1000; ++i) {
        Vec3 v{d(rng), d(rng), d(rng)};
        ASSERT_NEAR(radius_xy_squared(f3(v)), radius_xy_squared(rot_h(v)), 1e-14);
        ASSERT_EQ(f3(v).x, rot_h(v).x);
        ASSERT_EQ(f3(v).y, rot_h(v).y);
    }
}

TEST(F3, BoundarySeam) {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> angle(0, 2 * std::numbers::pi);
    std::uniform_real_distribution<double> height(-100, 100);
    for (int i = 0; i < 1000; ++i) {
        double a = angle(rng);
        Vec3 v{std::cos(a), std::sin(a), height(rng)};
        ASSERT_LE(norm(f3(v) - rot_h(v)), 1e-12);
    }
}

TEST(F3, NoShortPeriods) {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> d(-2, 2);
    for (int i = 0; i < 100; ++i) {
        Vec3 v{d(rng), d(rng), d(rng)};
        if (i == 0) v = {0, 0, 0};
        if (i == 1) v = {1, 0, 0};
        Vec3 w = v;
        for (int k = 1; k <= 360; ++k) {
            w = f3(w);
            ASSERT_GT(norm(w - v), 1e-6) << "k=" << k;
        }
    }
}

TEST(Orbit, UnitCircle) {
    auto pts = orbit({1, 0, 0}, 10);
    ASSERT_EQ(pts.size(), 11u);
    for (const auto& p : pts) {
        EXPECT_NEAR(radius_xy_squared(p), 1.0, 1e-10);
        EXPECT_EQ(p.z, 0.0);
    }
}

TEST(Orbit, LongCircleOrbitStaysFlat) {
    for (const auto& p : orbit({1, 0, 0}, 100000)) ASSERT_EQ(p.z, 0.0);
}

TEST(Orbit, AxisZValuesExact) {
    auto pts = orbit({0, 0, 0}, 10000);
    for (std::size_t k = 0; k < pts.size(); ++k) {
        ASSERT_EQ(pts[k].z, static_cast<double>(k));
        ASSERT_EQ(pts[k].x, 0.0);
        ASSERT_EQ(pts[k].y, 0.0);
    }
}

TEST(Orbit, OutsideKeepsRadius) {
    for (const auto& p : orbit({5, 0, 0}, 4)) {
        EXPECT_NEAR(std::sqrt(radius_xy_squared(p)), 5.0, 1e-12);
        EXPECT_EQ(p.z, 0.0);
    }
}

TEST(Orbit, NeedsAtLeastOneStep) { EXPECT_THROW(orbit({0, 0, 0}, 0), std::invalid_argument); }

TEST(Gap, Examples) {
    EXPECT_LT(min_pairwise_gap(orbit({1, 0, 0}, 1000)), 0.02);
    EXPECT_EQ(min_pairwise_gap(orbit({0, 0, 0}, 1000)), 1.0);
    EXPECT_EQ(min_pairwise_gap({{1, 2, 3}, {1, 2, 3}}), 0.0);
    EXPECT_THROW(min_pairwise_gap({{1, 2, 3}}), TooFewPoints);
}

TEST(Gap, SweepMatchesBruteForce) {
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> d(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vec3> pts;
        for (int i = 0; i < 300; ++i) pts.push_back({d(rng), d(rng), d(rng)});
        auto cp = closest_pair(pts);
        EXPECT_EQ(cp.gap, brute_min_gap(pts));
        EXPECT_LT(cp.i, cp.j);
        EXPECT_EQ(norm(pts[cp.i] - pts[cp.j]), cp.gap);
    }
    auto circle = orbit({1, 0, 0}, 2000);
    EXPECT_EQ(min_pairwise_gap(circle), brute_min_gap(circle));
}

TEST(Gap, NonIncreasingInN) {
    double prev = INFINITY;
    for (int n : {10, 100, 500, 1000, 5000, 10000}) {
        double g = min_pairwise_gap(orbit({1, 0, 0}, n));
        EXPECT_LE(g, prev) << n;
        prev = g;
    }
    EXPECT_LT(prev, 0.01);
}

TEST(ShiftGap, Examples) {
    EXPECT_EQ(shift_orbit_gap({0, 0, 0}, {0, 0, 1}, 100), 1.0);
    EXPECT_EQ(shift_orbit_gap({0, 0, 0}, {3, 4, 0}, 50), 5.0);
    EXPECT_THROW(shift_orbit_gap({0, 0, 0}, {0, 0, 0}, 10), ZeroShiftVector);
    EXPECT_THROW(shift_orbit_gap({0, 0, 0}, {1, 0, 0}, 1), std::invalid_argument);
}

TEST(ShiftGap, EqualsStepLength) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> d(-5, 5);
    for (int i = 0; i < 100; ++i) {
        Vec3 x{d(rng), d(rng), d(rng)};
        Vec3 v{d(rng), d(rng), d(rng)};
        EXPECT_NEAR(shift_orbit_gap(x, v, 100), norm(v), 1e-12);
    }
}

TEST(Obstruction, Examples) {
    auto big = obstruction_report(10000, {0.01});
    ASSERT_EQ(big.entries.size(), 1u);
    EXPECT_TRUE(big.entries[0].witness_found);
    EXPECT_LT(big.entries[0].witness_i, big.entries[0].witness_j);

    auto small = obstruction_report(10, {1e-6});
    EXPECT_FALSE(small.entries[0].witness_found);

    auto two = obstruction_report(2, {10.0});
    EXPECT_TRUE(two.entries[0].witness_found);
    EXPECT_THROW(obstruction_report(1, {0.1}), std::invalid_argument);
}

TEST(Obstruction, WitnessIsARealPair) {
    auto r = obstruction_report(10000, {0.01, 0.001, 1e-9});
    auto pts = orbit({1, 0, 0}, 10000);
    for (const auto& e : r.entries) {
        if (!e.witness_found) continue;
        EXPECT_LT(norm(pts[e.witness_i] - pts[e.witness_j]), e.eps);
    }
    EXPECT_FALSE(r.entries[2].witness_found);
    EXPECT_NEAR(r.shift_baseline, norm(pts[1] - pts[0]), 1e-12);
}

TEST(Obstruction, JsonShape) {
    nlohmann::json j = obstruction_report(10, {1e-6});
    const auto& e = j["entries"][0];
    for (const char* key : {"N", "eps", "witness_i", "witness_j", "gap", "shift_baseline"}) {
        EXPECT_TRUE(e.contains(key)) << key;
    }
    EXPECT_TRUE(e["witness_i"].is_null());
}

TEST(Csv, Header) {
    std::ostringstream out;
    write_orbit_csv(out, orbit({0, 0, 0}, 2));
    EXPECT_EQ(out.str(), "n,x,y,z\n0,0.0,0.0,0.0\n1,0.0,0.0,1.0\n2,0.0,0.0,2.0\n");
}
