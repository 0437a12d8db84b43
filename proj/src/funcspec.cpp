#include "regroup/funcspec.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/roots.hpp>
#include <nlohmann/json.hpp>

#include "regroup/errors.hpp"

namespace regroup {

namespace {

using Node = ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_node(Node::Kind kind, std::size_t offset, NodePtr lhs = nullptr,
                  NodePtr rhs = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->offset = offset;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse() {
        auto root = expr();
        skip_ws();
        if (pos_ != text_.size()) {
            throw SyntaxError(pos_, "unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        return root;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    void expect(char c) {
        if (!peek(c)) {
            if (pos_ >= text_.size()) {
                throw SyntaxError(pos_, std::string("expected '") + c + "' before end of input");
            }
            throw SyntaxError(pos_, std::string("expected '") + c + "'");
        }
        ++pos_;
    }

    NodePtr expr() {
        auto lhs = term();
        for (;;) {
            if (peek('+') || peek('-')) {
                auto at = pos_;
                auto kind = text_[pos_] == '+' ? Node::Kind::Add : Node::Kind::Sub;
                ++pos_;
                lhs = make_node(kind, at, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        auto lhs = unary();
        for (;;) {
            if (peek('*')) {
                auto at = pos_++;
                lhs = make_node(Node::Kind::Mul, at, lhs, unary());
            } else if (peek('/')) {
                auto at = pos_++;
                auto rhs = unary();
                if (rhs->kind == Node::Kind::Constant && rhs->value == 0.0) {
                    throw SyntaxError(rhs->offset, "division by constant zero");
                }
                lhs = make_node(Node::Kind::Div, at, lhs, rhs);
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (peek('-')) {
            auto at = pos_++;
            return make_node(Node::Kind::Neg, at, unary());
        }
        return power();
    }

    NodePtr power() {
        auto base = primary();
        if (!peek('^')) return base;
        auto at = pos_++;
        bool parens = false;
        if (peek('(')) {
            parens = true;
            ++pos_;
        }
        skip_ws();
        auto start = pos_;
        bool negative = false;
        if (pos_ < text_.size() && text_[pos_] == '-') {
            negative = true;
            ++pos_;
        }
        auto digits_begin = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (digits_begin == pos_) throw SyntaxError(start, "exponent must be an integer literal");
        int e = 0;
        auto [p, ec] = std::from_chars(text_.data() + digits_begin, text_.data() + pos_, e);
        if (ec != std::errc{} || p != text_.data() + pos_) {
            throw SyntaxError(start, "exponent out of range");
        }
        if (parens) expect(')');
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Pow;
        n->offset = at;
        n->exponent = negative ? -e : e;
        n->lhs = std::move(base);
        return n;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw SyntaxError(pos_, "unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = expr();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw SyntaxError(pos_, "unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        auto start = pos_;
        auto is_digit = [&](std::size_t i) {
            return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
        };
        while (is_digit(pos_)) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (is_digit(pos_)) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            auto save = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (is_digit(pos_)) {
                while (is_digit(pos_)) ++pos_;
            } else {
                pos_ = save;  // 'e' belongs to something else, e.g. "2exp(x)" is then an error
            }
        }
        double v = 0.0;
        auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (ec != std::errc{} || p != text_.data() + pos_) {
            throw SyntaxError(start, "malformed number");
        }
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Constant;
        n->value = v;
        n->offset = start;
        return n;
    }

    NodePtr identifier() {
        auto start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        std::string name(text_.substr(start, pos_ - start));
        if (name == "x") return make_node(Node::Kind::Variable, start);

        Node::Kind kind;
        if (name == "exp") {
            kind = Node::Kind::Exp;
        } else if (name == "sin") {
            kind = Node::Kind::Sin;
        } else if (name == "cos") {
            kind = Node::Kind::Cos;
        } else if (name == "abs") {
            kind = Node::Kind::Abs;
        } else {
            throw UnknownIdentifier(start, name);
        }
        expect('(');
        auto arg = expr();
        expect(')');
        return make_node(kind, start, arg);
    }
};

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

void render(const Node& n, std::ostringstream& out) {
    auto call = [&](const char* name, const Node& a) {
        out << name << '(';
        render(a, out);
        out << ')';
    };
    auto call2 = [&](const char* name) {
        out << name << '(';
        render(*n.lhs, out);
        out << ", ";
        render(*n.rhs, out);
        out << ')';
    };
    switch (n.kind) {
        case Node::Kind::Constant: out << format_double(n.value); break;
        case Node::Kind::Variable: out << 'x'; break;
        case Node::Kind::Neg: call("neg", *n.lhs); break;
        case Node::Kind::Exp: call("exp", *n.lhs); break;
        case Node::Kind::Sin: call("sin", *n.lhs); break;
        case Node::Kind::Cos: call("cos", *n.lhs); break;
        case Node::Kind::Abs: call("abs", *n.lhs); break;
        case Node::Kind::Add: call2("add"); break;
        case Node::Kind::Sub: call2("sub"); break;
        case Node::Kind::Mul: call2("mul"); break;
        case Node::Kind::Div: call2("div"); break;
        case Node::Kind::Pow:
            out << "pow(";
            render(*n.lhs, out);
            out << ", " << n.exponent << ')';
            break;
    }
}

double eval_node(const Node& n, double x) {
    switch (n.kind) {
        case Node::Kind::Constant: return n.value;
        case Node::Kind::Variable: return x;
        case Node::Kind::Neg: return -eval_node(*n.lhs, x);
        case Node::Kind::Exp: return std::exp(eval_node(*n.lhs, x));
        case Node::Kind::Sin: return std::sin(eval_node(*n.lhs, x));
        case Node::Kind::Cos: return std::cos(eval_node(*n.lhs, x));
        case Node::Kind::Abs: return std::fabs(eval_node(*n.lhs, x));
        case Node::Kind::Add: return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
        case Node::Kind::Sub: return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
        case Node::Kind::Mul: return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
        case Node::Kind::Div: {
            double num = eval_node(*n.lhs, x);
            double den = eval_node(*n.rhs, x);
            if (den == 0.0) {
                throw DomainError("division by zero at x = " + format_double(x) +
                                  " (offset " + std::to_string(n.offset) + ")");
            }
            return num / den;
        }
        case Node::Kind::Pow: {
            double base = eval_node(*n.lhs, x);
            if (n.exponent < 0 && base == 0.0) {
                throw DomainError("zero raised to a negative power at x = " + format_double(x));
            }
            return std::pow(base, n.exponent);
        }
    }
    return 0.0;
}

// Affine coefficients (slope, intercept) of a subtree, if it is affine in x.
std::optional<std::pair<double, double>> affine_of(const Node& n) {
    using P = std::pair<double, double>;
    auto constant = [](const std::optional<P>& p) { return p && p->first == 0.0; };
    switch (n.kind) {
        case Node::Kind::Constant: return P{0.0, n.value};
        case Node::Kind::Variable: return P{1.0, 0.0};
        case Node::Kind::Neg: {
            auto a = affine_of(*n.lhs);
            if (!a) return std::nullopt;
            return P{-a->first, -a->second};
        }
        case Node::Kind::Add:
        case Node::Kind::Sub: {
            auto a = affine_of(*n.lhs);
            auto b = affine_of(*n.rhs);
            if (!a || !b) return std::nullopt;
            double s = n.kind == Node::Kind::Add ? 1.0 : -1.0;
            return P{a->first + s * b->first, a->second + s * b->second};
        }
        case Node::Kind::Mul: {
            auto a = affine_of(*n.lhs);
            auto b = affine_of(*n.rhs);
            if (!a || !b) return std::nullopt;
            if (constant(a)) return P{a->second * b->first, a->second * b->second};
            if (constant(b)) return P{b->second * a->first, b->second * a->second};
            return std::nullopt;
        }
        case Node::Kind::Div: {
            auto a = affine_of(*n.lhs);
            auto b = affine_of(*n.rhs);
            if (!a || !constant(b) || b->second == 0.0) return std::nullopt;
            return P{a->first / b->second, a->second / b->second};
        }
        default: return std::nullopt;
    }
}

double checked_eval(const ExprAst& ast, double x) { return eval_expr(ast, x); }

std::optional<MonotoneMap1D::Evaluator> closed_inverse_for(const ExprAst& ast) {
    auto aff = ast.affine_form();
    if (!aff || !(aff->first > 0.0)) return std::nullopt;
    auto [slope, intercept] = *aff;
    if (slope == 1.0) {
        return MonotoneMap1D::Evaluator([intercept](double y) { return y - intercept; });
    }
    return MonotoneMap1D::Evaluator(
        [slope, intercept](double y) { return (y - intercept) / slope; });
}

// Bisection on d(x) = f(x) - x between a grid pair with opposite signs.
double bisect_displacement(const ExprAst& ast, double a, double b) {
    double da = checked_eval(ast, a) - a;
    for (int i = 0; i < 200; ++i) {
        double mid = a + (b - a) / 2;
        if (mid == a || mid == b) break;
        double dm = checked_eval(ast, mid) - mid;
        if (dm == 0.0) return mid;
        if ((dm < 0) == (da < 0)) {
            a = mid;
            da = dm;
        } else {
            b = mid;
        }
    }
    return a + (b - a) / 2;
}

}  // namespace

std::string ExprAst::to_sexpr() const {
    std::ostringstream out;
    render(*root_, out);
    return out.str();
}

std::optional<std::pair<double, double>> ExprAst::affine_form() const {
    return affine_of(*root_);
}

ExprAst parse_expr(std::string_view text) {
    Parser p(text);
    return ExprAst(p.parse(), std::string(text));
}

double eval_expr(const ExprAst& ast, double x) {
    double v = eval_node(ast.root(), x);
    if (!std::isfinite(v)) {
        throw Overflow("non-finite value of '" + ast.source() + "' at x = " + format_double(x));
    }
    return v;
}

std::string to_string(Displacement d) {
    return d == Displacement::AboveIdentity ? "above-identity" : "below-identity";
}

void to_json(nlohmann::json& j, const CertificationReport& r) {
    j = nlohmann::json{
        {"direction", r.increasing ? "increasing" : "decreasing"},
        {"displacement", to_string(r.displacement)},
        {"grid", {{"lo", r.grid.lo}, {"hi", r.grid.hi}, {"points", r.grid.points},
                  {"fixed_point_tol", r.grid.fixed_point_tol}}},
        {"min_abs_displacement", r.min_abs_displacement},
        {"assumed", r.assumed},
    };
}

MonotoneMap1D::MonotoneMap1D(Evaluator forward, std::optional<Evaluator> inverse,
                             CertificationReport report, std::string label)
    : forward_(std::move(forward)), inverse_(std::move(inverse)), report_(report),
      label_(std::move(label)) {}

MonotoneMap1D MonotoneMap1D::negated() const {
    auto fwd = forward_;
    std::optional<Evaluator> inv;
    if (inverse_) {
        auto i = *inverse_;
        inv = [i](double y) { return -i(-y); };
    }
    auto report = report_;
    report.displacement = above_identity() ? Displacement::BelowIdentity
                                           : Displacement::AboveIdentity;
    return MonotoneMap1D([fwd](double x) { return -fwd(-x); }, std::move(inv), report,
                         "-(" + label_ + ")(-x)");
}

MonotoneMap1D certify_map(const ExprAst& ast, const GridSpec& grid) {
    if (grid.points < 1000) throw std::invalid_argument("certification grid needs >= 1000 points");
    if (!(grid.lo < grid.hi)) throw std::invalid_argument("certification grid needs lo < hi");

    const std::size_t n = grid.points;
    const double step = (grid.hi - grid.lo) / static_cast<double>(n - 1);
    auto grid_x = [&](std::size_t i) {
        return i + 1 == n ? grid.hi : grid.lo + step * static_cast<double>(i);
    };

    double prev_x = grid_x(0);
    double prev_f = eval_expr(ast, prev_x);
    double min_abs = std::fabs(prev_f - prev_x);
    int sign0 = prev_f > prev_x ? 1 : -1;
    std::optional<std::size_t> sign_change;
    std::optional<double> near_fixed;
    if (min_abs < grid.fixed_point_tol) near_fixed = prev_x;

    for (std::size_t i = 1; i < n; ++i) {
        double x = grid_x(i);
        double fx = eval_expr(ast, x);
        if (!(fx > prev_f)) {
            throw NotMonotone(x, "'" + ast.source() + "' is not increasing between x = " +
                                     format_double(prev_x) + " and x = " + format_double(x));
        }
        double d = fx - x;
        double ad = std::fabs(d);
        if (ad < min_abs) min_abs = ad;
        if (ad < grid.fixed_point_tol && !near_fixed) near_fixed = x;
        int s = d > 0 ? 1 : -1;
        if (s != sign0 && !sign_change) sign_change = i;
        prev_x = x;
        prev_f = fx;
    }

    if (near_fixed) {
        throw FixedPointDetected(*near_fixed, "'" + ast.source() + "' has |f(x) - x| < " +
                                                  format_double(grid.fixed_point_tol) +
                                                  " at x = " + format_double(*near_fixed));
    }
    if (sign_change) {
        double a = grid_x(*sign_change - 1);
        double b = grid_x(*sign_change);
        double root = bisect_displacement(ast, a, b);
        if (std::fabs(eval_expr(ast, root) - root) < grid.fixed_point_tol) {
            throw FixedPointDetected(root, "'" + ast.source() + "' has a fixed point near x = " +
                                               format_double(root));
        }
        throw NotFixedPointFree(root, "f(x) - x of '" + ast.source() +
                                          "' changes sign without a detectable root near x = " +
                                          format_double(root));
    }

    CertificationReport report;
    report.grid = grid;
    report.increasing = true;
    report.displacement = sign0 > 0 ? Displacement::AboveIdentity : Displacement::BelowIdentity;
    report.min_abs_displacement = min_abs;
    return MonotoneMap1D([ast](double x) { return eval_expr(ast, x); }, closed_inverse_for(ast),
                         report, ast.source());
}

MonotoneMap1D assume_certified(const ExprAst& ast) {
    double f0 = eval_expr(ast, 0.0);
    if (f0 == 0.0) throw FixedPointDetected(0.0, "'" + ast.source() + "' fixes 0");
    CertificationReport report;
    report.grid.points = 0;
    report.displacement = f0 > 0 ? Displacement::AboveIdentity : Displacement::BelowIdentity;
    report.min_abs_displacement = std::fabs(f0);
    report.assumed = true;
    return MonotoneMap1D([ast](double x) { return eval_expr(ast, x); }, closed_inverse_for(ast),
                         report, ast.source());
}

MonotoneMap1D make_map(MonotoneMap1D::Evaluator forward, Displacement d, std::string label,
                       std::optional<MonotoneMap1D::Evaluator> inverse) {
    CertificationReport report;
    report.grid.points = 0;
    report.displacement = d;
    report.assumed = true;
    return MonotoneMap1D(std::move(forward), std::move(inverse), report, std::move(label));
}

namespace {

// Overflow while probing far out means the value is beyond every finite y.
// f is increasing with f(0) finite, so the side of 0 fixes the sign.
double probe(const MonotoneMap1D& f, double x) {
    try {
        return f(x);
    } catch (const Overflow&) {
        return x > 0 ? std::numeric_limits<double>::infinity()
                     : -std::numeric_limits<double>::infinity();
    }
}

// f(lo) <= y <= f(hi) on entry.
double solve_in_bracket(const MonotoneMap1D& f, double y, double lo, double hi, double tol) {
    double flo = probe(f, lo) - y;
    double fhi = probe(f, hi) - y;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    // TOMS 748 interpolates and overflows to NaN on huge residuals, so bisect
    // first to a unit-width bracket with moderate endpoint values.
    auto wild = [](double v) { return !(std::fabs(v) <= 1e150); };
    while (hi - lo > 1.0 || wild(flo) || wild(fhi)) {
        double mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi) break;
        double fm = probe(f, mid) - y;
        if (fm == 0.0) return mid;
        (fm < 0 ? lo : hi) = mid;
        (fm < 0 ? flo : fhi) = fm;
    }
    if (!wild(flo) && !wild(fhi)) {
        auto stop = [tol](double a, double b) {
            return std::fabs(b - a) <= std::max(tol, 4 * std::numeric_limits<double>::epsilon() *
                                                         std::max(std::fabs(a), std::fabs(b)));
        };
        std::uintmax_t iters = 200;
        auto [a, b] = boost::math::tools::toms748_solve(
            [&](double x) { return probe(f, x) - y; }, lo, hi, flo, fhi, stop, iters);
        if (a >= lo && b <= hi && a <= b) {
            lo = a;
            hi = b;
            flo = probe(f, lo) - y;
            fhi = probe(f, hi) - y;
        }
    }
    return std::fabs(flo) <= std::fabs(fhi) ? lo : hi;
}

}  // namespace

double invert_map(const MonotoneMap1D& f, double y, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("invert_map: tol must be positive");
    if (const auto& inv = f.closed_form_inverse()) return (*inv)(y);

    const double start = y;
    const double fs = probe(f, start);
    if (fs == y) return start;

    // The first step is the displacement at y (at most 1), which already
    // brackets the preimage for slowly moving maps; then double.
    constexpr double kStepCap = 1152921504606846976.0;  // 2^60
    double step = std::isfinite(fs) ? std::clamp(std::fabs(fs - y), tol, 1.0) : 1.0;
    double lo, hi;
    if (fs < y) {
        lo = start;
        for (;;) {
            hi = start + step;
            if (probe(f, hi) >= y) break;
            lo = hi;
            step *= 2;
            if (step > kStepCap) throw BracketFailure("no upper bracket for y = " + format_double(y));
        }
    } else {
        hi = start;
        for (;;) {
            lo = start - step;
            if (probe(f, lo) <= y) break;
            hi = lo;
            step *= 2;
            if (step > kStepCap) throw BracketFailure("no lower bracket for y = " + format_double(y));
        }
    }
    return solve_in_bracket(f, y, lo, hi, tol);
}

double invert_map_in(const MonotoneMap1D& f, double y, double lo, double hi, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("invert_map: tol must be positive");
    if (const auto& inv = f.closed_form_inverse()) return (*inv)(y);
    if (!(lo <= hi)) throw BracketFailure("empty bracket");
    if (probe(f, lo) > y || probe(f, hi) < y) {
        return invert_map(f, y, tol);
    }
    return solve_in_bracket(f, y, lo, hi, tol);
}

}  // namespace regroup
