#include "regroup/qexact.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "regroup/errors.hpp"

namespace regroup {

// ---------------------------------------------------------------------------
// QuadNum

QuadNum::QuadNum(mpq_class a, mpq_class b, mpq_class c, mpq_class d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
    a_.canonicalize();
    b_.canonicalize();
    c_.canonicalize();
    d_.canonicalize();
}

QuadNum& QuadNum::operator+=(const QuadNum& o) {
    a_ += o.a_;
    b_ += o.b_;
    c_ += o.c_;
    d_ += o.d_;
    return *this;
}

QuadNum& QuadNum::operator-=(const QuadNum& o) {
    a_ -= o.a_;
    b_ -= o.b_;
    c_ -= o.c_;
    d_ -= o.d_;
    return *this;
}

QuadNum& QuadNum::operator*=(const QuadNum& o) {
    // sqrt2*sqrt2 = 2, sqrt7*sqrt7 = 7, sqrt14*sqrt14 = 14,
    // sqrt2*sqrt7 = sqrt14, sqrt2*sqrt14 = 2 sqrt7, sqrt7*sqrt14 = 7 sqrt2.
    const mpq_class &a = a_, &b = b_, &c = c_, &d = d_;
    const mpq_class &e = o.a_, &f = o.b_, &g = o.c_, &h = o.d_;
    mpq_class ra = a * e + 2 * b * f + 7 * c * g + 14 * d * h;
    mpq_class rb = a * f + b * e + 7 * (c * h + d * g);
    mpq_class rc = a * g + c * e + 2 * (b * h + d * f);
    mpq_class rd = a * h + d * e + b * g + c * f;
    a_ = std::move(ra);
    b_ = std::move(rb);
    c_ = std::move(rc);
    d_ = std::move(rd);
    return *this;
}

QuadNum QuadNum::reciprocal() const {
    if (is_zero()) throw DivisionByZero("reciprocal of zero in Q(sqrt2, sqrt7)");
    // u * conj7(u) lies in Q(sqrt2); times its sqrt2-conjugate it is rational.
    QuadNum half = *this * conj7();
    QuadNum partner = half.conj2();
    QuadNum norm = half * partner;
    const mpq_class& n = norm.a();
    QuadNum num = conj7() * partner;
    return QuadNum(num.a() / n, num.b() / n, num.c() / n, num.d() / n);
}

QuadNum& QuadNum::operator/=(const QuadNum& o) { return *this *= o.reciprocal(); }

QuadNum operator+(QuadNum u, const QuadNum& v) { return u += v; }
QuadNum operator-(QuadNum u, const QuadNum& v) { return u -= v; }
QuadNum operator*(QuadNum u, const QuadNum& v) { return u *= v; }
QuadNum operator/(QuadNum u, const QuadNum& v) { return u /= v; }

QuadNum quad_arith(QuadOp op, const QuadNum& u, const QuadNum& v) {
    switch (op) {
        case QuadOp::Add: return u + v;
        case QuadOp::Sub: return u - v;
        case QuadOp::Mul: return u * v;
        case QuadOp::Div: return u / v;
    }
    throw std::invalid_argument("unknown QuadOp");
}

double QuadNum::to_double() const {
    return a_.get_d() + b_.get_d() * std::sqrt(2.0) + c_.get_d() * std::sqrt(7.0) +
           d_.get_d() * std::sqrt(14.0);
}

std::string QuadNum::to_string() const {
    std::ostringstream out;
    out << a_ << " + " << b_ << "*sqrt2 + " << c_ << "*sqrt7 + " << d_ << "*sqrt14";
    return out.str();
}

namespace {

struct Enclosure {
    mpq_class lo, hi;
};

// floor(sqrt(k) * 2^bits) / 2^bits  <=  sqrt(k)  <  that + 2^-bits
Enclosure sqrt_enclosure(unsigned long k, unsigned long bits) {
    mpz_class scaled = k;
    scaled <<= 2 * bits;
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
    mpz_class den = 1;
    den <<= bits;
    Enclosure e{mpq_class(root, den), mpq_class(root + 1, den)};
    e.lo.canonicalize();
    e.hi.canonicalize();
    return e;
}

void add_term(Enclosure& acc, const mpq_class& coef, const Enclosure& r) {
    if (sgn(coef) >= 0) {
        acc.lo += coef * r.lo;
        acc.hi += coef * r.hi;
    } else {
        acc.lo += coef * r.hi;
        acc.hi += coef * r.lo;
    }
}

}  // namespace

int quad_sign(const QuadNum& u) {
    if (u.is_rational()) return sgn(u.a());
    for (unsigned long bits = 64;; bits *= 2) {
        Enclosure acc{u.a(), u.a()};
        add_term(acc, u.b(), sqrt_enclosure(2, bits));
        add_term(acc, u.c(), sqrt_enclosure(7, bits));
        add_term(acc, u.d(), sqrt_enclosure(14, bits));
        if (sgn(acc.lo) > 0) return 1;
        if (sgn(acc.hi) < 0) return -1;
        // A nonzero element has a nonzero value, so the width shrinking to
        // zero eventually separates it from 0.
    }
}

std::strong_ordering operator<=>(const QuadNum& u, const QuadNum& v) {
    int s = quad_sign(u - v);
    if (s < 0) return std::strong_ordering::less;
    if (s > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

namespace {

nlohmann::json integer_json(const mpz_class& z) {
    if (z.fits_slong_p()) return nlohmann::json(z.get_si());
    return nlohmann::json(z.get_str());
}

nlohmann::json fraction_json(const mpq_class& q) {
    return nlohmann::json::array({integer_json(q.get_num()), integer_json(q.get_den())});
}

}  // namespace

void to_json(nlohmann::json& j, const QuadNum& q) {
    j = nlohmann::json::array(
        {fraction_json(q.a()), fraction_json(q.b()), fraction_json(q.c()), fraction_json(q.d())});
}

// ---------------------------------------------------------------------------
// Intervals and pieces

QClopenInterval::QClopenInterval(QuadNum lo, QuadNum hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.is_rational() || hi_.is_rational()) {
        throw std::invalid_argument("clopen interval endpoints must be irrational");
    }
    if (!(lo_ < hi_)) throw std::invalid_argument("clopen interval needs lo < hi");
}

QClopenInterval QClopenInterval::middle_third() const {
    QuadNum third = width() / QuadNum(3);
    return QClopenInterval(lo_ + third, lo_ + third + third);
}

void to_json(nlohmann::json& j, const QClopenInterval& i) {
    j = nlohmann::json{{"lo", i.lo()},
                       {"hi", i.hi()},
                       {"approx", {i.lo().to_double(), i.hi().to_double()}}};
}

AffinePiece::AffinePiece(QClopenInterval source, QClopenInterval target)
    : source_(std::move(source)), target_(std::move(target)) {
    slope_ = target_.width() / source_.width();
    intercept_ = target_.lo() - slope_ * source_.lo();
}

QClopenInterval AffinePiece::image(const QClopenInterval& i) const {
    if (!i.inside(source_)) throw std::domain_error("interval is not inside the piece's source");
    return QClopenInterval(apply(i.lo()), apply(i.hi()));
}

QClopenInterval AffinePiece::preimage(const QClopenInterval& i) const {
    if (!i.inside(target_)) throw std::domain_error("interval is not inside the piece's target");
    return QClopenInterval(apply_inverse(i.lo()), apply_inverse(i.hi()));
}

void to_json(nlohmann::json& j, const AffinePiece& p) {
    j = nlohmann::json{{"source", p.source()},
                       {"target", p.target()},
                       {"slope", p.slope()},
                       {"intercept", p.intercept()}};
}

// ---------------------------------------------------------------------------
// Example map

namespace {

QuadNum epsilon() { return QuadNum(0, 0, mpq_class(1, 7), 0); }  // 1/sqrt7

constexpr int kHOffset = 1000;
constexpr int kShrinkRounds = 8;

std::string piece_name(int key) {
    if (key > kHOffset) return "h_" + std::to_string(key - kHOffset);
    return "g_" + std::to_string(key);
}

}  // namespace

QClopenInterval ExampleMap::level(int n) const {
    return QClopenInterval(QuadNum(n) - eps, QuadNum(n) + eps);
}

QClopenInterval ExampleMap::unit_window(int k) {
    mpz_class den = 1;
    den <<= (k + 1);
    QuadNum r(0, mpq_class(mpz_class(1), den), 0, 0);  // 1/(2^k sqrt2) = sqrt2 / 2^{k+1}
    return QClopenInterval(-r, r);
}

ExampleMap ExampleMap::with_A(int n, const QClopenInterval& a) const {
    ExampleMap copy = *this;
    copy.A.insert_or_assign(n, a);
    copy.h.insert_or_assign(n, AffinePiece(a, copy.B.at(n)));
    return copy;
}

void to_json(nlohmann::json& j, const ExampleMap& m) {
    nlohmann::json pieces = nlohmann::json::array();
    for (const auto& [k, p] : m.g) {
        nlohmann::json e = p;
        e["name"] = piece_name(k);
        pieces.push_back(std::move(e));
    }
    for (const auto& [k, p] : m.h) {
        nlohmann::json e = p;
        e["name"] = piece_name(kHOffset + k);
        pieces.push_back(std::move(e));
    }
    nlohmann::json a = nlohmann::json::object();
    nlohmann::json b = nlohmann::json::object();
    for (const auto& [k, i] : m.A) a[std::to_string(k)] = i;
    for (const auto& [k, i] : m.B) b[std::to_string(k)] = i;
    j = nlohmann::json{{"depth", m.depth}, {"eps", m.eps}, {"pieces", pieces}, {"A", a}, {"B", b}};
}

namespace {

// Pushes an interval through g_{-n}, ..., g_{-1}, g_1, ..., g_n endpoint by endpoint.
QClopenInterval push_through_chain(const ExampleMap& m, int n, QClopenInterval i) {
    for (int k = n; k >= 1; --k) i = m.g.at(-k).image(i);
    for (int k = 1; k <= n; ++k) i = m.g.at(k).image(i);
    return i;
}

}  // namespace

ExampleMap build_example(int depth, int depth_cap) {
    if (depth < 1) throw std::invalid_argument("depth must be at least 1");
    if (depth > depth_cap) {
        throw DepthCapExceeded("depth " + std::to_string(depth) + " exceeds the cap of " +
                               std::to_string(depth_cap));
    }
    ExampleMap m;
    m.depth = depth;
    m.eps = epsilon();

    const auto d1 = ExampleMap::unit_window(1);
    m.g.emplace(1, AffinePiece(d1, m.level(1)));
    m.g.emplace(-1, AffinePiece(m.level(-1), d1));

    try {
        for (int n = 2; n <= depth; ++n) {
            auto dom = ExampleMap::unit_window(n);
            for (int k = 1; k < n; ++k) dom = m.g.at(k).image(dom);
            m.g.emplace(n, AffinePiece(dom, m.level(n)));

            auto ran = ExampleMap::unit_window(n);
            for (int k = 1; k < n; ++k) ran = m.g.at(-k).preimage(ran);
            m.g.emplace(-n, AffinePiece(m.level(-n), ran));
        }

        for (int n = 1; n < depth; ++n) {
            const auto lvl_neg = m.level(-n);
            const auto lvl_pos = m.level(n);

            // B_n: middle third of the gap left of ran(g_{-(n+1)}) inside L(-n).
            const auto& ran_next = m.g.at(-(n + 1)).target();
            auto b = QClopenInterval(lvl_neg.lo(), ran_next.lo()).middle_third();

            // A_n: middle third of the gap right of dom(g_{n+1}) inside L(n),
            // shrunk while it meets the P3 image of B_n.
            const auto image = push_through_chain(m, n, b);
            const auto& dom_next = m.g.at(n + 1).source();
            auto a = QClopenInterval(dom_next.hi(), lvl_pos.hi()).middle_third();
            int rounds = 0;
            while (a.meets(image)) {
                if (++rounds > kShrinkRounds) {
                    throw ConstructionFailure("no admissible A_" + std::to_string(n));
                }
                a = a.middle_third();
            }
            m.A.emplace(n, a);
            m.B.emplace(n, b);
            m.h.emplace(n, AffinePiece(a, b));
        }
    } catch (const std::domain_error& e) {
        throw ConstructionFailure(std::string("piece chain is not nested: ") + e.what());
    }
    return m;
}

bool check_domains_disjoint(const ExampleMap& m) {
    std::vector<const QClopenInterval*> sources;
    for (const auto& [k, p] : m.g) sources.push_back(&p.source());
    for (const auto& [k, a] : m.A) sources.push_back(&a);
    for (std::size_t i = 0; i < sources.size(); ++i) {
        for (std::size_t j = i + 1; j < sources.size(); ++j) {
            if (sources[i]->meets(*sources[j])) return false;
        }
    }
    return true;
}

P123Report check_P123(const ExampleMap& m, int n) {
    if (n < 1 || n >= m.depth) {
        throw DepthCapExceeded("P1-P3 need 1 <= n < depth, got n = " + std::to_string(n));
    }
    P123Report r;
    r.n = n;
    const auto& a = m.A.at(n);
    const auto& b = m.B.at(n);
    const QuadNum npos(n), nneg(-n);
    r.a_in_level = a.inside_open(npos - m.eps, npos + m.eps);
    r.b_in_level = b.inside_open(nneg - m.eps, nneg + m.eps);
    r.p1 = !a.meets(m.g.at(n + 1).source());
    r.p2 = !b.meets(m.g.at(-(n + 1)).target());

    // Compose x -> s x + t over g_{-n}, ..., g_{-1}, g_1, ..., g_n.
    QuadNum s(1), t(0);
    auto compose = [&](const AffinePiece& p) {
        s = p.slope() * s;
        t = p.slope() * t + p.intercept();
    };
    for (int k = n; k >= 1; --k) compose(m.g.at(-k));
    for (int k = 1; k <= n; ++k) compose(m.g.at(k));
    // The chain is increasing, so the image of B_n is [s lo + t, s hi + t].
    const QuadNum lo = s * b.lo() + t;
    const QuadNum hi = s * b.hi() + t;
    r.p3 = hi < a.lo() || a.hi() < lo;
    return r;
}

void to_json(nlohmann::json& j, const P123Report& r) {
    j = nlohmann::json{{"n", r.n},
                       {"A_in_level", r.a_in_level},
                       {"B_in_level", r.b_in_level},
                       {"P1", r.p1},
                       {"P2", r.p2},
                       {"P3", r.p3},
                       {"pass", r.pass()}};
}

std::optional<int> locate_piece(const ExampleMap& m, const QuadNum& x) {
    for (const auto& [k, p] : m.g) {
        if (p.source().contains(x)) return k;
    }
    for (const auto& [k, a] : m.A) {
        if (a.contains(x)) return kHOffset + k;
    }
    return std::nullopt;
}

QuadNum apply_g(const ExampleMap& m, const QuadNum& x) {
    auto key = locate_piece(m, x);
    if (!key) throw OutsideDomain("point " + x.to_string() + " is outside every piece");
    if (*key > kHOffset) return m.h.at(*key - kHOffset).apply(x);
    return m.g.at(*key).apply(x);
}

StarWitness star_witness(const ExampleMap& m, int n) {
    if (n < 1) throw std::invalid_argument("star_witness needs n >= 1");
    if (n >= m.depth) {
        throw DepthCapExceeded("star witness at n = " + std::to_string(n) +
                               " needs level n + 1, depth is " + std::to_string(m.depth));
    }
    const auto I = ExampleMap::unit_window(n);

    bool fwd_ok = true;
    auto fwd = I;
    for (int k = 1; k <= n; ++k) {
        const auto& p = m.g.at(k);
        if (!fwd.inside(p.source())) {
            fwd_ok = false;
            break;
        }
        fwd = p.image(fwd);
    }

    bool bwd_ok = true;
    auto bwd = I;
    for (int k = 1; k <= n; ++k) {
        const auto& p = m.g.at(-k);
        if (!bwd.inside(p.target())) {
            bwd_ok = false;
            break;
        }
        bwd = p.preimage(bwd);
    }

    const auto& a = m.A.at(n);
    const auto& b = m.B.at(n);
    StarWitness w{n, n, I, fwd, bwd, a, b};
    w.forward_chain_defined = fwd_ok;
    w.forward_is_level = fwd_ok && fwd == m.level(n);
    w.a_inside_forward = fwd_ok && a.inside_open(fwd.lo(), fwd.hi());
    const auto& hn = m.h.at(n);
    w.b_is_image_of_a = hn.source() == a && hn.image(a) == b;
    w.backward_chain_defined = bwd_ok;
    w.backward_is_level = bwd_ok && bwd == m.level(-n);
    w.b_inside_backward = bwd_ok && b.inside_open(bwd.lo(), bwd.hi());
    return w;
}

void to_json(nlohmann::json& j, const StarWitness& w) {
    j = nlohmann::json{{"n", w.n},
                       {"m", w.m},
                       {"neighborhood", w.neighborhood},
                       {"forward_image", w.forward_image},
                       {"backward_image", w.backward_image},
                       {"A", w.a},
                       {"B", w.b},
                       {"forward_chain_defined", w.forward_chain_defined},
                       {"forward_is_level", w.forward_is_level},
                       {"A_inside_forward", w.a_inside_forward},
                       {"B_is_image_of_A", w.b_is_image_of_a},
                       {"backward_chain_defined", w.backward_chain_defined},
                       {"backward_is_level", w.backward_is_level},
                       {"B_inside_backward", w.b_inside_backward},
                       {"certified", w.certified()}};
}

std::vector<QuadNum> piece_midpoints(const ExampleMap& m) {
    std::vector<QuadNum> pts;
    for (const auto& [k, p] : m.g) pts.push_back(p.source().midpoint());
    for (const auto& [k, a] : m.A) pts.push_back(a.midpoint());
    return pts;
}

PeriodicScanReport no_periodic_scan(const ExampleMap& m, int max_period,
                                    const std::vector<QuadNum>& points) {
    if (max_period < 1) throw std::invalid_argument("max_period must be at least 1");
    PeriodicScanReport r;
    r.max_period = max_period;
    for (const auto& start : points) {
        ++r.points;
        QuadNum x = start;
        bool done = false;
        for (int step = 1; step <= max_period; ++step) {
            if (!locate_piece(m, x)) {
                ++r.exited;
                done = true;
                break;
            }
            x = apply_g(m, x);
            if (x == start) {
                ++r.periodic;
                done = true;
                break;
            }
        }
        if (!done) {
            if (locate_piece(m, x)) {
                ++r.survived;
            } else {
                ++r.exited;
            }
        }
    }
    return r;
}

PeriodicScanReport no_periodic_scan(const ExampleMap& m, int max_period) {
    return no_periodic_scan(m, max_period, piece_midpoints(m));
}

void to_json(nlohmann::json& j, const PeriodicScanReport& r) {
    j = nlohmann::json{{"points", r.points},
                       {"max_period", r.max_period},
                       {"periodic", r.periodic},
                       {"exited", r.exited},
                       {"survived", r.survived},
                       {"pass", r.pass()}};
}

}  // namespace regroup
