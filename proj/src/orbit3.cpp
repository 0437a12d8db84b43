#include "regroup/orbit3.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>

#include <gmpxx.h>
#include <nlohmann/json.hpp>

#include "regroup/errors.hpp"

namespace regroup {

namespace {
constexpr double kWallTolerance = 1e-12;
}  // namespace

Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
double norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }
double radius_xy_squared(const Vec3& v) { return v.x * v.x + v.y * v.y; }

double rotation_angle() {
    static const double theta = std::numbers::sqrt2 * std::numbers::pi / 180.0;
    return theta;
}

namespace {

struct RotationCoefficients {
    double c;
    double s;
};

// cos and sin of the angle, nudged by a few ulps so that c^2 + s^2 - 1 is
// ~1e-21 instead of ~1e-16. With the plain pair every step shrinks the radius
// by the same bias and the unit circle orbit drifts into the cylinder.
RotationCoefficients balanced_coefficients() {
    const double c0 = std::cos(rotation_angle());
    RotationCoefficients best{c0, std::sin(rotation_angle())};
    mpq_class best_err = -1;
    double c = c0;
    for (int k = 0; k < 3; ++k) c = std::nextafter(c, 0.0);
    for (int k = 0; k < 7; ++k, c = std::nextafter(c, 2.0)) {
        mpf_class s_exact(1 - mpq_class(c) * mpq_class(c), 256);
        s_exact = sqrt(s_exact);
        double s = s_exact.get_d();
        mpq_class err = abs(mpq_class(c) * mpq_class(c) + mpq_class(s) * mpq_class(s) - 1);
        if (best_err < 0 || err < best_err) {
            best_err = err;
            best = {c, s};
        }
    }
    return best;
}

}  // namespace

Vec3 rot_h(const Vec3& v) {
    static const RotationCoefficients k = balanced_coefficients();
    return {v.x * k.c - v.y * k.s, v.x * k.s + v.y * k.c, v.z};
}

Vec3 slide_g(const Vec3& v) {
    double r2 = radius_xy_squared(v);
    if (r2 > 1.0) throw OutsideCylinder("slide is only defined inside the unit cylinder");
    return {v.x, v.y, v.z + 1.0 - r2};
}

Vec3 f3(const Vec3& v) {
    double r2 = radius_xy_squared(v);
    Vec3 w = rot_h(v);
    // Rotation keeps the radius, so the slide is read off v itself. A deficit
    // below 1e-12 counts as the wall, so rounding noise in x^2 + y^2 does not
    // lift the boundary circle.
    const double deficit = 1.0 - r2;
    if (deficit > kWallTolerance) w.z = v.z + deficit;
    return w;
}

std::vector<Vec3> orbit(const Vec3& v, int n) {
    if (n < 1) throw std::invalid_argument("orbit needs n >= 1");
    std::vector<Vec3> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    out.push_back(v);
    for (int k = 0; k < n; ++k) out.push_back(f3(out.back()));
    return out;
}

ClosestPair closest_pair(const std::vector<Vec3>& points) {
    if (points.size() < 2) throw TooFewPoints("closest pair needs at least two points");
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return points[a].x < points[b].x || (points[a].x == points[b].x && a < b);
    });
    ClosestPair best{0, 1, std::numeric_limits<double>::infinity()};
    for (std::size_t p = 0; p < order.size(); ++p) {
        const Vec3& a = points[order[p]];
        for (std::size_t q = p + 1; q < order.size(); ++q) {
            const Vec3& b = points[order[q]];
            if (b.x - a.x > best.gap) break;
            double d = norm(a - b);
            auto i = std::min(order[p], order[q]);
            auto j = std::max(order[p], order[q]);
            if (d < best.gap || (d == best.gap && std::pair(i, j) < std::pair(best.i, best.j))) {
                best = {i, j, d};
            }
        }
    }
    return best;
}

double min_pairwise_gap(const std::vector<Vec3>& points) { return closest_pair(points).gap; }

double shift_orbit_gap(const Vec3& x, const Vec3& w, int n) {
    if (w.x == 0.0 && w.y == 0.0 && w.z == 0.0) throw ZeroShiftVector("shift vector must be nonzero");
    if (n < 2) throw std::invalid_argument("shift_orbit_gap needs n >= 2");
    std::vector<Vec3> pts;
    pts.reserve(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) pts.push_back(x + static_cast<double>(k) * w);
    return min_pairwise_gap(pts);
}

ObstructionReport obstruction_report(int n, const std::vector<double>& eps_list,
                                     const Vec3& start) {
    if (n < 2) throw std::invalid_argument("obstruction_report needs n >= 2");
    ObstructionReport r;
    r.n = n;
    r.start = start;
    const auto pts = orbit(r.start, n);
    const auto best = closest_pair(pts);
    r.min_gap = best.gap;
    r.shift_baseline = shift_orbit_gap(r.start, pts[1] - pts[0], n);
    for (double eps : eps_list) {
        ObstructionEntry e;
        e.eps = eps;
        e.gap = best.gap;
        if (best.gap < eps) {
            e.witness_found = true;
            e.witness_i = best.i;
            e.witness_j = best.j;
        }
        r.entries.push_back(e);
    }
    return r;
}

void to_json(nlohmann::json& j, const ObstructionReport& r) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : r.entries) {
        nlohmann::json item{{"N", r.n},
                            {"eps", e.eps},
                            {"witness", e.witness_found},
                            {"gap", e.gap},
                            {"shift_baseline", r.shift_baseline}};
        if (e.witness_found) {
            item["witness_i"] = e.witness_i;
            item["witness_j"] = e.witness_j;
        } else {
            item["witness_i"] = nullptr;
            item["witness_j"] = nullptr;
        }
        entries.push_back(std::move(item));
    }
    j = nlohmann::json{{"N", r.n},
                       {"start", {r.start.x, r.start.y, r.start.z}},
                       {"min_gap", r.min_gap},
                       {"shift_baseline", r.shift_baseline},
                       {"entries", entries}};
}

void write_orbit_csv(std::ostream& out, const std::vector<Vec3>& points) {
    out << "n,x,y,z\n";
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& p = points[k];
        out << k << ',' << nlohmann::json(p.x).dump() << ',' << nlohmann::json(p.y).dump() << ','
            << nlohmann::json(p.z).dump() << '\n';
    }
}

}  // namespace regroup
