#include "regroup/conjugacy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "regroup/errors.hpp"

namespace regroup {

namespace {

[[noreturn]] void cap_exceeded(std::int64_t n, std::int64_t cap) {
    throw LadderCapExceeded("rung " + std::to_string(n) + " is beyond the ladder cap of " +
                            std::to_string(cap));
}

}  // namespace

OrbitLadder::OrbitLadder(MonotoneMap1D f, std::int64_t cap, double invert_tol)
    : f_(std::move(f)), cap_(cap), invert_tol_(invert_tol) {
    if (cap_ < 1) throw std::invalid_argument("ladder cap must be positive");
}

std::int64_t OrbitLadder::cached_up() const {
    std::shared_lock lock(mutex_);
    return static_cast<std::int64_t>(up_.size()) - 1;
}

std::int64_t OrbitLadder::cached_down() const {
    std::shared_lock lock(mutex_);
    return static_cast<std::int64_t>(down_.size()) - 1;
}

void OrbitLadder::grow_to(std::int64_t n) const {
    // caller holds the exclusive lock
    if (n >= 0) {
        while (static_cast<std::int64_t>(up_.size()) <= n) up_.push_back(f_(up_.back()));
    } else {
        while (static_cast<std::int64_t>(down_.size()) <= -n) {
            down_.push_back(invert_map(f_, down_.back(), invert_tol_));
        }
    }
}

double OrbitLadder::anchor(std::int64_t n) const {
    if (n > cap_ || n < -cap_) cap_exceeded(n, cap_);
    {
        std::shared_lock lock(mutex_);
        if (n >= 0 && n < static_cast<std::int64_t>(up_.size())) return up_[n];
        if (n < 0 && -n < static_cast<std::int64_t>(down_.size())) return down_[-n];
    }
    std::unique_lock lock(mutex_);
    grow_to(n);
    return n >= 0 ? up_[n] : down_[-n];
}

double build_ladder(const OrbitLadder& ladder, std::int64_t n) { return ladder.anchor(n); }

std::int64_t OrbitLadder::locate(double y) const {
    if (!std::isfinite(y)) throw std::invalid_argument("locate: y must be finite");
    if (y >= 0) {
        auto search = [&] {
            auto it = std::upper_bound(up_.begin(), up_.end(), y);
            return static_cast<std::int64_t>(it - up_.begin()) - 1;
        };
        {
            std::shared_lock lock(mutex_);
            if (up_.back() > y) return search();
        }
        std::unique_lock lock(mutex_);
        while (up_.back() <= y) {
            auto next = static_cast<std::int64_t>(up_.size());
            if (next > cap_) cap_exceeded(next, cap_);
            up_.push_back(f_(up_.back()));
        }
        return search();
    }

    // down_ is decreasing; want the smallest k with down_[k] <= y.
    auto search = [&] {
        auto it = std::lower_bound(down_.begin(), down_.end(), y,
                                   [](double a, double b) { return a > b; });
        return -static_cast<std::int64_t>(it - down_.begin());
    };
    {
        std::shared_lock lock(mutex_);
        if (down_.back() <= y) return search();
    }
    std::unique_lock lock(mutex_);
    while (down_.back() > y) {
        auto next = static_cast<std::int64_t>(down_.size());
        if (next > cap_) cap_exceeded(-next, cap_);
        down_.push_back(invert_map(f_, down_.back(), invert_tol_));
    }
    return search();
}

ConjugacyMap::ConjugacyMap(const MonotoneMap1D& f, std::int64_t ladder_cap, double invert_tol)
    : f_(f),
      reversed_(!f.above_identity()),
      sign_(reversed_ ? -1.0 : 1.0),
      base_(reversed_ ? f.negated() : f),
      ladder_(base_, ladder_cap, invert_tol),
      f0_(f(0.0)),
      base_f0_(ladder_.anchor(1)) {
    if (!(base_f0_ > 0.0)) {
        throw FixedPointDetected(0.0, "f(0) = 0 or has the wrong sign for the certified direction");
    }
}

double ConjugacyMap::anchor(std::int64_t n) const { return sign_ * ladder_.anchor(n); }

double ConjugacyMap::h_unit(double t) const {
    if (!(t >= 0.0 && t < 1.0)) {
        throw OutOfUnitInterval("h is defined on [0, 1), got t = " + std::to_string(t));
    }
    return t * f0_;
}

double ConjugacyMap::h_unit_inverse(double w) const { return w / f0_; }

double ConjugacyMap::base_power(double w, std::int64_t n) const {
    const auto cap = ladder_.cap();
    if (n > cap || n < -cap) cap_exceeded(n, cap);
    for (std::int64_t k = 0; k < n; ++k) w = base_(w);
    if (n >= 0) return w;
    // Each backward step lands one rung lower, so the ladder brackets it.
    std::int64_t rung = ladder_.locate(w);
    for (std::int64_t k = 0; k > n; --k, --rung) {
        w = invert_map_in(base_, w, ladder_.anchor(rung - 1), ladder_.anchor(rung),
                          ladder_.invert_tol());
    }
    return w;
}

double ConjugacyMap::base_forward(std::int64_t n, double t) const {
    if (t == 0.0) return ladder_.anchor(n);
    return base_power(t * base_f0_, n);
}

double ConjugacyMap::forward_split(std::int64_t n, double t) const {
    if (!(t >= 0.0 && t < 1.0)) {
        throw OutOfUnitInterval("fractional part must lie in [0, 1), got " + std::to_string(t));
    }
    return sign_ * base_forward(n, t);
}

std::vector<double> ConjugacyMap::forward_run(double t, std::int64_t n_lo, std::int64_t n_hi) const {
    if (!(t >= 0.0 && t < 1.0)) {
        throw OutOfUnitInterval("fractional part must lie in [0, 1), got " + std::to_string(t));
    }
    const auto cap = ladder_.cap();
    if (n_lo > n_hi) return {};
    if (n_lo < -cap) cap_exceeded(n_lo, cap);
    if (n_hi > cap) cap_exceeded(n_hi, cap);
    std::vector<double> out(static_cast<std::size_t>(n_hi - n_lo + 1));
    auto put = [&](std::int64_t n, double w) {
        if (n >= n_lo && n <= n_hi) out[static_cast<std::size_t>(n - n_lo)] = sign_ * w;
    };
    if (t == 0.0) {
        for (std::int64_t n = n_lo; n <= n_hi; ++n) put(n, ladder_.anchor(n));
        return out;
    }
    const double w0 = t * base_f0_;
    double w = w0;
    put(0, w);
    for (std::int64_t n = 1; n <= n_hi; ++n) put(n, w = base_(w));
    w = w0;
    std::int64_t rung = n_lo < 0 ? ladder_.locate(w) : 0;
    for (std::int64_t n = -1; n >= n_lo; --n, --rung) {
        w = invert_map_in(base_, w, ladder_.anchor(rung - 1), ladder_.anchor(rung), ladder_.invert_tol());
        put(n, w);
    }
    return out;
}

double ConjugacyMap::forward(double u) const {
    if (!std::isfinite(u)) throw std::invalid_argument("g: argument must be finite");
    double fl = std::floor(u);
    if (std::fabs(fl) > static_cast<double>(ladder_.cap())) {
        cap_exceeded(static_cast<std::int64_t>(std::clamp(fl, -9.0e18, 9.0e18)), ladder_.cap());
    }
    auto n = static_cast<std::int64_t>(fl);
    double t = u - fl;
    if (t >= 1.0) {  // u = -tiny rounds up
        t = 0.0;
        ++n;
    }
    return sign_ * base_forward(n, t);
}

std::int64_t ConjugacyMap::locate_rung(double y) const { return ladder_.locate(sign_ * y); }

double ConjugacyMap::inverse(double y) const {
    const double base_y = sign_ * y;
    const std::int64_t n = ladder_.locate(base_y);
    if (base_y == ladder_.anchor(n)) return static_cast<double>(n);
    double w = base_power(base_y, -n);
    double t = w / base_f0_;
    t = std::clamp(t, 0.0, std::nextafter(1.0, 0.0));
    return static_cast<double>(n) + t;
}

double h_unit(const ConjugacyMap& c, double t) { return c.h_unit(t); }
double g_forward(const ConjugacyMap& c, double x) { return c.forward(x); }
double g_inverse(const ConjugacyMap& c, double y) { return c.inverse(y); }
std::int64_t locate_rung(const ConjugacyMap& c, double y) { return c.locate_rung(y); }

}  // namespace regroup
