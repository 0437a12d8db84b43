#pragma once

// Three-coloring of R with color(f(x)) != color(x) for a certified f.
//
// In conjugated coordinates u = g^{-1}(x) the map is u -> u + 1. There the
// line is cut into half-open blocks [2k/3, 2(k+1)/3) colored k mod 3; a block
// moved by 1 lands 1/3 into the next block or the one after, never on its
// own color. Pulling the pattern back through g colors the original line.
// For f(x) = x + 3 this reproduces [6n, 6n+2), [6n+2, 6n+4), [6n+4, 6n+6).

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "regroup/conjugacy.hpp"
#include "regroup/group_rebuild.hpp"

namespace regroup {

struct ColoredBlock {
    double lo = 0.0;
    double hi = 0.0;
    int color = 0;
};

struct ColoringReport {
    std::size_t samples = 0;
    std::size_t violations = 0;
    std::size_t failed_evaluations = 0;
    std::string first_error;
    bool pass = false;
};

void to_json(nlohmann::json& j, const ColoringReport& r);
void to_json(nlohmann::json& j, const ColoredBlock& b);

class ColoringScheme {
public:
    explicit ColoringScheme(std::shared_ptr<const ConjugacyMap> g) : g_(std::move(g)) {}

    const ConjugacyMap& conjugacy() const { return *g_; }

    // Block index k of u = g^{-1}(x): u in [2k/3, 2(k+1)/3).
    std::int64_t block_of(double x) const;
    int color(double x) const;

    // Maximal blocks meeting the half-open range [lo, hi), in increasing x.
    std::vector<ColoredBlock> emit_blocks(double lo, double hi) const;

private:
    std::shared_ptr<const ConjugacyMap> g_;

};

inline int color(const ColoringScheme& s, double x) { return s.color(x); }

ColoringReport verify_coloring(const ColoringScheme& s, std::size_t samples,
                               std::uint64_t seed = kDefaultSeed, SampleRange range = {});

// "lo,hi,color" with a header row.
void write_blocks_csv(std::ostream& out, const std::vector<ColoredBlock>& blocks);

}  // namespace regroup
