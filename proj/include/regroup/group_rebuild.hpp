#pragma once

// The group operation transported along g:
//
//   x (+)_g y = g(g^{-1}(x) + g^{-1}(y))
//
// With g from ConjugacyMap, f(x) = x (+)_g f(0) for every x, i.e. f is the
// shift by 1_f = f(0). plus_f is the same operation under its other name.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "regroup/conjugacy.hpp"

namespace regroup {

struct SampleRange {
    double lo = -20.0;
    double hi = 20.0;
};

inline constexpr std::uint64_t kDefaultSeed = 20240601;
inline constexpr double kDefaultLawTol = 1e-8;

// Outcome of checking one law on random samples. Samples whose evaluation
// throws (ladder cap, overflow) count as failures and are tallied separately.
struct LawReport {
    std::string law;
    std::size_t samples = 0;
    double max_deviation = 0.0;
    double tol = 0.0;
    std::size_t failed_evaluations = 0;
    std::string first_error;
    bool pass = false;
};

void to_json(nlohmann::json& j, const LawReport& r);

class RebuiltGroup {
public:
    explicit RebuiltGroup(std::shared_ptr<const ConjugacyMap> g);

    const ConjugacyMap& conjugacy() const { return *g_; }
    const MonotoneMap1D& map() const { return g_->map(); }

    double op(double x, double y) const;
    double plus_f(double x, double y) const { return op(x, y); }
    double inv(double x) const;
    double identity() const { return 0.0; }
    double shift_element() const { return shift_; }

private:
    std::shared_ptr<const ConjugacyMap> g_;
    double shift_;
};

// Convenience: certify-free construction from an already certified map.
RebuiltGroup rebuild_group(const MonotoneMap1D& f, std::int64_t ladder_cap = kDefaultLadderCap);

inline double op(const RebuiltGroup& G, double x, double y) { return G.op(x, y); }
inline double inv(const RebuiltGroup& G, double x) { return G.inv(x); }
inline double shift_element(const RebuiltGroup& G) { return G.shift_element(); }

// |f(x) - (x (+) 1_f)| over uniform x in the range.
LawReport verify_shift(const RebuiltGroup& G, std::size_t samples, double tol = kDefaultLawTol,
                       std::uint64_t seed = kDefaultSeed, SampleRange range = {});

// Associativity, two-sided identity, inverse, commutativity and the
// homomorphism law g(a + b) = g(a) (+) g(b), over random triples.
std::vector<LawReport> verify_axioms(const RebuiltGroup& G, std::size_t triples,
                                     double tol = kDefaultLawTol,
                                     std::uint64_t seed = kDefaultSeed, SampleRange range = {});

// If f(n) = n + c for every n in [-window, window], returns c. A monotone
// bijection of Z is always of this form; anything else signals the table is
// not one. Throws NotMonotone if the table is not strictly monotone.
std::optional<std::int64_t> discrete_shift_detect(
    const std::function<std::int64_t(std::int64_t)>& f, std::int64_t window);

}  // namespace regroup
