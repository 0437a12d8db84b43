#include "regroup/tricolor.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include <nlohmann/json.hpp>

#include "regroup/errors.hpp"

namespace regroup {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

int color_of_block(std::int64_t k) { return static_cast<int>(((k % 3) + 3) % 3); }

}  // namespace

void to_json(nlohmann::json& j, const ColoringReport& r) {
    j = nlohmann::json{{"samples", r.samples},
                       {"violations", r.violations},
                       {"failed_evaluations", r.failed_evaluations},
                       {"pass", r.pass}};
    if (!r.first_error.empty()) j["first_error"] = r.first_error;
}

void to_json(nlohmann::json& j, const ColoredBlock& b) {
    j = nlohmann::json{{"lo", b.lo}, {"hi", b.hi}, {"color", b.color}};
}

std::int64_t ColoringScheme::block_of(double x) const {
    double u = g_->inverse(x);
    return static_cast<std::int64_t>(std::floor(1.5 * u));
}

int ColoringScheme::color(double x) const { return color_of_block(block_of(x)); }

std::vector<ColoredBlock> ColoringScheme::emit_blocks(double lo, double hi) const {
    std::vector<ColoredBlock> out;
    if (!(lo < hi)) return out;
    std::int64_t ka = block_of(lo);
    std::int64_t kb = block_of(hi);
    if (ka > kb) std::swap(ka, kb);
    // Edge k sits at u = n + r/3 with 2k = 3n + r. Edges sharing r lie on one
    // orbit, so each phase is computed in a single walk instead of one per edge.
    const std::int64_t n_lo = floor_div(2 * ka, 3);
    const std::int64_t n_hi = floor_div(2 * (kb + 1), 3);
    std::vector<double> phase[3];
    for (int r = 0; r < 3; ++r) phase[r] = g_->forward_run(r / 3.0, n_lo, n_hi);
    auto edge = [&](std::int64_t k) {
        const std::int64_t n = floor_div(2 * k, 3);
        return phase[2 * k - 3 * n][static_cast<std::size_t>(n - n_lo)];
    };
    for (std::int64_t k = ka; k <= kb; ++k) {
        double a = edge(k);
        double b = edge(k + 1);
        if (a > b) std::swap(a, b);
        if (a < hi && lo < b) out.push_back({a, b, color_of_block(k)});
    }
    std::sort(out.begin(), out.end(),
              [](const ColoredBlock& p, const ColoredBlock& q) { return p.lo < q.lo; });
    return out;
}

ColoringReport verify_coloring(const ColoringScheme& s, std::size_t samples, std::uint64_t seed,
                               SampleRange range) {
    if (samples < 1) throw std::invalid_argument("verify_coloring needs at least one sample");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(range.lo, range.hi);
    const auto& f = s.conjugacy().map();
    ColoringReport report;
    for (std::size_t i = 0; i < samples; ++i) {
        double x = dist(rng);
        ++report.samples;
        try {
            if (s.color(f(x)) == s.color(x)) ++report.violations;
        } catch (const Error& e) {
            ++report.failed_evaluations;
            if (report.first_error.empty()) report.first_error = e.what();
        }
    }
    report.pass = report.violations == 0 && report.failed_evaluations == 0;
    return report;
}

void write_blocks_csv(std::ostream& out, const std::vector<ColoredBlock>& blocks) {
    out << "lo,hi,color\n";
    for (const auto& b : blocks) {
        // json number formatting gives the shortest round-trip representation
        out << nlohmann::json(b.lo).dump() << ',' << nlohmann::json(b.hi).dump() << ','
            << b.color << '\n';
    }
}

}  // namespace regroup
