#pragma once

// The correspondence x -> x_f that turns translation by 1 into f:
//
//   g(n)      = f^n(0)                      n integer
//   g(t)      = h(t) = t * f(0)             t in [0, 1)
//   g(t + n)  = f^n(h(t))
//
// so that g(u + 1) = f(g(u)) for every real u. Below-identity maps are
// handled by running the construction on r o f o r (r(x) = -x), which is
// above-identity, and composing with r; g is then order-reversing.

#include <cstdint>
#include <mutex>
#include <shared_mutex>
#include <vector>

#include "regroup/funcspec.hpp"

namespace regroup {

inline constexpr std::int64_t kDefaultLadderCap = 1'000'000;

// Grow-only cache of f^n(0), n in [-cap, cap]. Reads take a shared lock;
// extending the window takes the exclusive one.
class OrbitLadder {
public:
    explicit OrbitLadder(MonotoneMap1D f, std::int64_t cap = kDefaultLadderCap,
                         double invert_tol = kDefaultInvertTol);

    OrbitLadder(const OrbitLadder&) = delete;
    OrbitLadder& operator=(const OrbitLadder&) = delete;

    // f^n(0). Throws LadderCapExceeded for |n| > cap.
    double anchor(std::int64_t n) const;

    // For an above-identity map: the unique n with f^n(0) <= y < f^{n+1}(0).
    std::int64_t locate(double y) const;

    const MonotoneMap1D& map() const { return f_; }
    std::int64_t cap() const { return cap_; }
    double invert_tol() const { return invert_tol_; }

    // Number of cached rungs on each side (for reports).
    std::int64_t cached_up() const;
    std::int64_t cached_down() const;

private:
    MonotoneMap1D f_;
    std::int64_t cap_;
    double invert_tol_;
    mutable std::shared_mutex mutex_;
    mutable std::vector<double> up_{0.0};    // up_[k] = f^k(0)
    mutable std::vector<double> down_{0.0};  // down_[k] = f^{-k}(0)

    void grow_to(std::int64_t n) const;
};

// f^n(0), memoized in the ladder.
double build_ladder(const OrbitLadder& ladder, std::int64_t n);

class ConjugacyMap {
public:
    explicit ConjugacyMap(const MonotoneMap1D& f, std::int64_t ladder_cap = kDefaultLadderCap,
                          double invert_tol = kDefaultInvertTol);

    ConjugacyMap(const ConjugacyMap&) = delete;
    ConjugacyMap& operator=(const ConjugacyMap&) = delete;

    const MonotoneMap1D& map() const { return f_; }
    bool order_reversing() const { return reversed_; }
    double unit() const { return f0_; }  // f(0)

    // f^n(0) of the original map.
    double anchor(std::int64_t n) const;

    // h(t) = t * f(0) on [0, 1). Throws OutOfUnitInterval.
    double h_unit(double t) const;
    double h_unit_inverse(double w) const;

    double forward(double u) const;
    // f^n(h(t)) for a pre-split argument u = n + t.
    double forward_split(std::int64_t n, double t) const;
    // forward_split(n, t) for every n in [n_lo, n_hi], in one pass over the
    // orbit of h(t). Values are bit-identical to the single calls.
    std::vector<double> forward_run(double t, std::int64_t n_lo, std::int64_t n_hi) const;
    double inverse(double y) const;

    // Above-identity: n with f^n(0) <= y < f^{n+1}(0). Below-identity: n with
    // f^{n+1}(0) < y <= f^n(0), which is the same rung read through r.
    std::int64_t locate_rung(double y) const;

    const OrbitLadder& ladder() const { return ladder_; }

private:
    MonotoneMap1D f_;
    bool reversed_;
    double sign_;
    MonotoneMap1D base_;  // above-identity map the construction runs on
    OrbitLadder ladder_;
    double f0_;
    double base_f0_;

    double base_forward(std::int64_t n, double t) const;
    double base_power(double w, std::int64_t n) const;
};

double h_unit(const ConjugacyMap& c, double t);
double g_forward(const ConjugacyMap& c, double x);
double g_inverse(const ConjugacyMap& c, double y);
std::int64_t locate_rung(const ConjugacyMap& c, double y);

}  // namespace regroup
