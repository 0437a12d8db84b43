#include "regroup/group_rebuild.hpp"

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "regroup/errors.hpp"

namespace regroup {

void to_json(nlohmann::json& j, const LawReport& r) {
    j = nlohmann::json{{"law", r.law},
                       {"samples", r.samples},
                       {"max_deviation", r.max_deviation},
                       {"tol", r.tol},
                       {"failed_evaluations", r.failed_evaluations},
                       {"pass", r.pass}};
    if (!r.first_error.empty()) j["first_error"] = r.first_error;
}

RebuiltGroup::RebuiltGroup(std::shared_ptr<const ConjugacyMap> g)
    : g_(std::move(g)), shift_(g_->anchor(1)) {}

double RebuiltGroup::op(double x, double y) const {
    return g_->forward(g_->inverse(x) + g_->inverse(y));
}

double RebuiltGroup::inv(double x) const { return g_->forward(-g_->inverse(x)); }

RebuiltGroup rebuild_group(const MonotoneMap1D& f, std::int64_t ladder_cap) {
    return RebuiltGroup(std::make_shared<const ConjugacyMap>(f, ladder_cap));
}

namespace {

class LawAccumulator {
public:
    LawAccumulator(std::string law, double tol) {
        report_.law = std::move(law);
        report_.tol = tol;
    }

    template <class Fn>
    void sample(Fn&& deviation) {
        ++report_.samples;
        try {
            double d = deviation();
            if (!(d <= report_.max_deviation)) report_.max_deviation = d;  // NaN propagates
        } catch (const Error& e) {
            ++report_.failed_evaluations;
            if (report_.first_error.empty()) report_.first_error = e.what();
        }
    }

    LawReport finish() {
        report_.pass = report_.failed_evaluations == 0 && report_.max_deviation <= report_.tol;
        return report_;
    }

private:
    LawReport report_;
};

}  // namespace

LawReport verify_shift(const RebuiltGroup& G, std::size_t samples, double tol,
                       std::uint64_t seed, SampleRange range) {
    if (samples < 1) throw std::invalid_argument("verify_shift needs at least one sample");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(range.lo, range.hi);
    const auto& f = G.map();
    const double c = G.shift_element();
    LawAccumulator acc("shift", tol);
    for (std::size_t i = 0; i < samples; ++i) {
        double x = dist(rng);
        acc.sample([&] { return std::fabs(f(x) - G.op(x, c)); });
    }
    return acc.finish();
}

std::vector<LawReport> verify_axioms(const RebuiltGroup& G, std::size_t triples, double tol,
                                     std::uint64_t seed, SampleRange range) {
    if (triples < 1) throw std::invalid_argument("verify_axioms needs at least one triple");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(range.lo, range.hi);
    const auto& g = G.conjugacy();

    LawAccumulator assoc("associativity", tol);
    LawAccumulator ident("identity", tol);
    LawAccumulator inverse("inverse", tol);
    LawAccumulator comm("commutativity", tol);
    LawAccumulator homo("homomorphism", tol);

    for (std::size_t i = 0; i < triples; ++i) {
        double x = dist(rng);
        double y = dist(rng);
        double z = dist(rng);
        assoc.sample([&] { return std::fabs(G.op(G.op(x, y), z) - G.op(x, G.op(y, z))); });
        ident.sample([&] {
            return std::max(std::fabs(G.op(x, 0.0) - x), std::fabs(G.op(0.0, x) - x));
        });
        inverse.sample([&] { return std::fabs(G.op(x, G.inv(x))); });
        comm.sample([&] { return std::fabs(G.op(x, y) - G.op(y, x)); });
        homo.sample([&] {
            double a = g.inverse(x);
            double b = g.inverse(y);
            return std::fabs(g.forward(a + b) - G.op(g.forward(a), g.forward(b)));
        });
    }
    return {assoc.finish(), ident.finish(), inverse.finish(), comm.finish(), homo.finish()};
}

std::optional<std::int64_t> discrete_shift_detect(
    const std::function<std::int64_t(std::int64_t)>& f, std::int64_t window) {
    if (window < 1) throw std::invalid_argument("window must be positive");
    const std::int64_t c = f(-window) + window;
    bool shift = true;
    int direction = 0;
    std::int64_t prev = f(-window);
    for (std::int64_t n = -window + 1; n <= window; ++n) {
        std::int64_t v = f(n);
        int d = v > prev ? 1 : (v < prev ? -1 : 0);
        if (d == 0 || (direction != 0 && d != direction)) {
            throw NotMonotone(static_cast<double>(n),
                              "integer table is not strictly monotone at n = " + std::to_string(n));
        }
        direction = d;
        if (v - n != c) shift = false;
        prev = v;
    }
    if (shift) return c;
    return std::nullopt;
}

}  // namespace regroup
