#pragma once

// A periodic-point free homeomorphism of R^3 that is not a shift.
//
// h rotates space by sqrt2 degrees about the z-axis. Inside the unit cylinder
// S = {x^2 + y^2 <= 1} the map additionally slides points up by their
// distance-squared deficit 1 - x^2 - y^2, which vanishes on the wall, so
//
//   f(v) = h(v)         v outside S
//   f(v) = g(h(v))      v in S,   g(x, y, z) = (x, y, z + 1 - x^2 - y^2).
//
// The orbit of (1, 0, 0) stays on the unit circle and accumulates; an orbit
// of any translation v -> v + w (w != 0) has all pairwise gaps >= |w|.

#include <iosfwd>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace regroup {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;
};

Vec3 operator+(const Vec3& a, const Vec3& b);
Vec3 operator-(const Vec3& a, const Vec3& b);
Vec3 operator*(double s, const Vec3& v);
double norm(const Vec3& v);
double radius_xy_squared(const Vec3& v);

// sqrt2 * pi / 180. The ratio to 2 pi is sqrt2 / 360, which is irrational; the
// double below only approximates it and no test relies on its exact value.
double rotation_angle();

Vec3 rot_h(const Vec3& v);
// Throws OutsideCylinder when x^2 + y^2 > 1.
Vec3 slide_g(const Vec3& v);
Vec3 f3(const Vec3& v);

// [v, f3(v), ..., f3^n(v)]; n >= 1.
std::vector<Vec3> orbit(const Vec3& v, int n);

struct ClosestPair {
    std::size_t i = 0;
    std::size_t j = 0;
    double gap = 0.0;
};

// Minimum distance over index pairs i < j. Throws TooFewPoints.
ClosestPair closest_pair(const std::vector<Vec3>& points);
double min_pairwise_gap(const std::vector<Vec3>& points);

// Minimum pairwise gap of {x + k w : 0 <= k <= n}. Throws ZeroShiftVector.
double shift_orbit_gap(const Vec3& x, const Vec3& w, int n);

struct ObstructionEntry {
    double eps = 0.0;
    bool witness_found = false;
    std::size_t witness_i = 0;
    std::size_t witness_j = 0;
    double gap = 0.0;
};

struct ObstructionReport {
    int n = 0;
    Vec3 start{1.0, 0.0, 0.0};
    double min_gap = 0.0;
    // Gap of the translation orbit with the same first step f(start) - start.
    double shift_baseline = 0.0;
    std::vector<ObstructionEntry> entries;
};

void to_json(nlohmann::json& j, const ObstructionReport& r);

ObstructionReport obstruction_report(int n, const std::vector<double>& eps_list,
                                     const Vec3& start = {1.0, 0.0, 0.0});

// "n,x,y,z" with a header row.
void write_orbit_csv(std::ostream& out, const std::vector<Vec3>& points);

}  // namespace regroup
