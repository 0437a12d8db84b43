#pragma once

// Exact rebuild of the periodic-point free, non-shift homeomorphism on Q.
//
// Numbers live in Q(sqrt2, sqrt7) with basis {1, sqrt2, sqrt7, sqrt14}.
// Every interval endpoint of the construction is irrational, so each interval
// [lo, hi] cut down to Q is clopen. Pieces are affine between the prescribed
// source and target intervals; chains of pieces compose exactly.
//
// Levels: L(n) = [n - eps, n + eps] with eps = 1/sqrt7, and
// D(k) = [-1/(2^k sqrt2), 1/(2^k sqrt2)] around 0.
//
//   g_1    : D(1) -> L(1)
//   g_{-1} : L(-1) -> D(1)
//   g_n    : (g_{n-1} o ... o g_1)(D(n)) -> L(n)                      n >= 2
//   g_{-n} : L(-n) -> (g_{-(n-1)}^{-1} o ... o g_{-1}^{-1})(D(n))     n >= 2
//
// and for 1 <= n < depth the extra pieces h_n : A_n -> B_n with
// A_n in L(n), B_n in L(-n) chosen so that
//   P1  A_n misses dom(g_{n+1})
//   P2  B_n misses ran(g_{-(n+1)})
//   P3  (g_n o ... o g_1 o g_{-1} o ... o g_{-n})(B_n) misses A_n.

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <nlohmann/json_fwd.hpp>

namespace regroup {

// a + b*sqrt2 + c*sqrt7 + d*sqrt14 with canonical rational coefficients.
class QuadNum {
public:
    QuadNum() = default;
    QuadNum(long a) : a_(a) {}  // NOLINT: integers convert implicitly
    explicit QuadNum(mpq_class a, mpq_class b = 0, mpq_class c = 0, mpq_class d = 0);

    static QuadNum sqrt2() { return QuadNum(0, 1, 0, 0); }
    static QuadNum sqrt7() { return QuadNum(0, 0, 1, 0); }
    static QuadNum sqrt14() { return QuadNum(0, 0, 0, 1); }

    const mpq_class& a() const { return a_; }
    const mpq_class& b() const { return b_; }
    const mpq_class& c() const { return c_; }
    const mpq_class& d() const { return d_; }

    bool is_zero() const { return sgn(a_) == 0 && is_rational(); }
    bool is_rational() const { return sgn(b_) == 0 && sgn(c_) == 0 && sgn(d_) == 0; }

    QuadNum operator-() const { return QuadNum(-a_, -b_, -c_, -d_); }
    QuadNum& operator+=(const QuadNum& o);
    QuadNum& operator-=(const QuadNum& o);
    QuadNum& operator*=(const QuadNum& o);
    QuadNum& operator/=(const QuadNum& o);

    QuadNum reciprocal() const;  // throws DivisionByZero

    // Images under the field automorphisms sqrt2 -> -sqrt2 and sqrt7 -> -sqrt7.
    QuadNum conj2() const { return QuadNum(a_, -b_, c_, -d_); }
    QuadNum conj7() const { return QuadNum(a_, b_, -c_, -d_); }

    double to_double() const;
    std::string to_string() const;

    friend bool operator==(const QuadNum& u, const QuadNum& v) {
        return u.a_ == v.a_ && u.b_ == v.b_ && u.c_ == v.c_ && u.d_ == v.d_;
    }

private:
    mpq_class a_{0}, b_{0}, c_{0}, d_{0};
};

QuadNum operator+(QuadNum u, const QuadNum& v);
QuadNum operator-(QuadNum u, const QuadNum& v);
QuadNum operator*(QuadNum u, const QuadNum& v);
QuadNum operator/(QuadNum u, const QuadNum& v);

enum class QuadOp { Add, Sub, Mul, Div };
QuadNum quad_arith(QuadOp op, const QuadNum& u, const QuadNum& v);

// Exact sign: coefficient test for zero, then interval evaluation with
// rational enclosures of sqrt2, sqrt7, sqrt14 refined until 0 is excluded.
int quad_sign(const QuadNum& u);

std::strong_ordering operator<=>(const QuadNum& u, const QuadNum& v);

void to_json(nlohmann::json& j, const QuadNum& q);

// [lo, hi] with irrational endpoints and lo < hi.
class QClopenInterval {
public:
    QClopenInterval(QuadNum lo, QuadNum hi);  // throws std::invalid_argument

    const QuadNum& lo() const { return lo_; }
    const QuadNum& hi() const { return hi_; }

    QuadNum midpoint() const { return (lo_ + hi_) / QuadNum(2); }
    QuadNum width() const { return hi_ - lo_; }
    bool contains(const QuadNum& x) const { return lo_ <= x && x <= hi_; }
    // this is a subset of the open interval (other.lo, other.hi)
    bool inside_open(const QuadNum& lo, const QuadNum& hi) const { return lo < lo_ && hi_ < hi; }
    bool inside(const QClopenInterval& o) const { return o.lo_ <= lo_ && hi_ <= o.hi_; }
    bool meets(const QClopenInterval& o) const { return !(hi_ < o.lo_ || o.hi_ < lo_); }
    // Middle third [lo + w/3, lo + 2w/3].
    QClopenInterval middle_third() const;

    friend bool operator==(const QClopenInterval&, const QClopenInterval&) = default;

private:
    QuadNum lo_, hi_;
};

void to_json(nlohmann::json& j, const QClopenInterval& i);

// Increasing affine bijection source -> target, x -> slope * x + intercept.
class AffinePiece {
public:
    AffinePiece(QClopenInterval source, QClopenInterval target);

    const QClopenInterval& source() const { return source_; }
    const QClopenInterval& target() const { return target_; }
    const QuadNum& slope() const { return slope_; }
    const QuadNum& intercept() const { return intercept_; }

    QuadNum apply(const QuadNum& x) const { return slope_ * x + intercept_; }
    QuadNum apply_inverse(const QuadNum& y) const { return (y - intercept_) / slope_; }
    // Image / preimage of a sub-interval; throws std::domain_error if it does
    // not lie inside source / target.
    QClopenInterval image(const QClopenInterval& i) const;
    QClopenInterval preimage(const QClopenInterval& i) const;

private:
    QClopenInterval source_, target_;
    QuadNum slope_, intercept_;
};

void to_json(nlohmann::json& j, const AffinePiece& p);

inline constexpr int kDefaultDepthCap = 8;

struct ExampleMap {
    int depth = 0;
    QuadNum eps;
    std::map<int, AffinePiece> g;         // keys +-1 .. +-depth
    std::map<int, QClopenInterval> A, B;  // keys 1 .. depth-1
    std::map<int, AffinePiece> h;         // keys 1 .. depth-1

    QClopenInterval level(int n) const;  // [n - eps, n + eps]
    static QClopenInterval unit_window(int k);  // D(k)

    // Copy with A_n replaced and h_n rebuilt onto the existing B_n; no checks.
    ExampleMap with_A(int n, const QClopenInterval& a) const;
};

void to_json(nlohmann::json& j, const ExampleMap& m);

// Throws DepthCapExceeded for depth > cap, std::invalid_argument for depth < 1,
// ConstructionFailure if no admissible A_n exists (a bug, not an input error).
ExampleMap build_example(int depth, int depth_cap = kDefaultDepthCap);

// All sources (dom g_n for every n != 0 and every A_n) pairwise disjoint.
bool check_domains_disjoint(const ExampleMap& m);

struct P123Report {
    int n = 0;
    bool a_in_level = false;  // A_n inside (n - eps, n + eps)
    bool b_in_level = false;  // B_n inside (-n - eps, -n + eps)
    bool p1 = false;
    bool p2 = false;
    bool p3 = false;
    bool pass() const { return a_in_level && b_in_level && p1 && p2 && p3; }
};

void to_json(nlohmann::json& j, const P123Report& r);

// Recomputes the chain of P3 by composing the affine pieces into one map,
// independently of the endpoint pushing used at build time.
P123Report check_P123(const ExampleMap& m, int n);

// Index of the piece whose source contains x: +-k for g_k, and 1000 + k for h_k.
std::optional<int> locate_piece(const ExampleMap& m, const QuadNum& x);

// Exact value of the partial map at x. The result is rational whenever the
// piece's slope and intercept make it so; use is_rational() to tell.
// Throws OutsideDomain.
QuadNum apply_g(const ExampleMap& m, const QuadNum& x);

struct StarWitness {
    int n = 0;
    int m = 0;
    QClopenInterval neighborhood;     // I_n = D(n)
    QClopenInterval forward_image;    // f^n(I_n)
    QClopenInterval backward_image;   // f^{-n}(I_n)
    QClopenInterval a, b;             // A_n, B_n
    bool forward_chain_defined = false;   // each f^k(I_n) lies in dom g_{k+1}
    bool forward_is_level = false;        // f^n(I_n) == L(n)
    bool a_inside_forward = false;        // A_n subset of f^n(I_n)
    bool b_is_image_of_a = false;         // h_n(A_n) == B_n, so B_n subset of f^{n+1}(I_n)
    bool backward_chain_defined = false;
    bool backward_is_level = false;       // f^{-n}(I_n) == L(-n)
    bool b_inside_backward = false;       // B_n subset of f^{-n}(I_n)
    bool certified() const {
        return forward_chain_defined && forward_is_level && a_inside_forward && b_is_image_of_a &&
               backward_chain_defined && backward_is_level && b_inside_backward;
    }
};

void to_json(nlohmann::json& j, const StarWitness& w);

// Witness m = n for the accumulation property at p = 0: B_n lies in both
// f^{n+1}(I_n) and f^{-n}(I_n). Throws DepthCapExceeded for n >= depth.
StarWitness star_witness(const ExampleMap& m, int n);

struct PeriodicScanReport {
    std::size_t points = 0;
    std::size_t periodic = 0;
    std::size_t exited = 0;    // orbit left the domain of the partial map
    std::size_t survived = 0;  // still inside after max_period steps, never returned
    int max_period = 0;
    bool pass() const { return periodic == 0; }
};

void to_json(nlohmann::json& j, const PeriodicScanReport& r);

// Midpoints of every piece source.
std::vector<QuadNum> piece_midpoints(const ExampleMap& m);

PeriodicScanReport no_periodic_scan(const ExampleMap& m, int max_period,
                                    const std::vector<QuadNum>& points);
PeriodicScanReport no_periodic_scan(const ExampleMap& m, int max_period);

}  // namespace regroup
