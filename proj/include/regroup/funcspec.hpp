#pragma once

// User-supplied maps f: R -> R. A tiny expression language, an evaluator, a
// sample-based certificate that f is an increasing fixed-point free map, and
// numeric inversion.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace regroup {

// Expression tree. Nodes are immutable and shared, so copying an ExprAst is
// cheap and evaluation is safe from any thread.
struct ExprNode {
    enum class Kind { Constant, Variable, Neg, Exp, Sin, Cos, Abs, Add, Sub, Mul, Div, Pow };

    Kind kind = Kind::Constant;
    double value = 0.0;  // Constant
    int exponent = 0;    // Pow
    std::shared_ptr<const ExprNode> lhs;
    std::shared_ptr<const ExprNode> rhs;
    std::size_t offset = 0;  // position in the source text
};

class ExprAst {
public:
    ExprAst(std::shared_ptr<const ExprNode> root, std::string source)
        : root_(std::move(root)), source_(std::move(source)) {}

    const ExprNode& root() const { return *root_; }
    const std::string& source() const { return source_; }

    // Function-call rendering, e.g. "add(x, exp(x))".
    std::string to_sexpr() const;

    // If the expression is a*x + b after constant folding, returns (a, b).
    std::optional<std::pair<double, double>> affine_form() const;

private:
    std::shared_ptr<const ExprNode> root_;
    std::string source_;
};

// Grammar:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' int)?            int := '-'? digits | '(' '-'? digits ')'
//   primary := number | 'x' | fn '(' expr ')' | '(' expr ')'
//   fn      := exp | sin | cos | abs
// Throws SyntaxError (with offset) or UnknownIdentifier.
ExprAst parse_expr(std::string_view text);

// Throws DomainError on division by zero, Overflow on a non-finite result.
double eval_expr(const ExprAst& ast, double x);

enum class Displacement { AboveIdentity, BelowIdentity };

std::string to_string(Displacement d);

struct GridSpec {
    double lo = -100.0;
    double hi = 100.0;
    std::size_t points = 10000;
    double fixed_point_tol = 1e-9;
};

struct CertificationReport {
    GridSpec grid;
    bool increasing = true;
    Displacement displacement = Displacement::AboveIdentity;
    double min_abs_displacement = 0.0;
    bool assumed = false;  // true when produced by assume_certified
};

void to_json(nlohmann::json& j, const CertificationReport& r);

// A strictly increasing bijection of R with a fixed displacement sign. The
// certificate behind it is sample-based, not a proof.
class MonotoneMap1D {
public:
    using Evaluator = std::function<double(double)>;

    MonotoneMap1D(Evaluator forward, std::optional<Evaluator> inverse,
                  CertificationReport report, std::string label);

    double operator()(double x) const { return forward_(x); }
    const std::optional<Evaluator>& closed_form_inverse() const { return inverse_; }
    Displacement displacement() const { return report_.displacement; }
    bool above_identity() const { return report_.displacement == Displacement::AboveIdentity; }
    const CertificationReport& report() const { return report_; }
    const std::string& label() const { return label_; }

    // r o f o r with r(x) = -x. Above-identity maps become below-identity and
    // vice versa; negation is exact so this is bit-faithful to f.
    MonotoneMap1D negated() const;

private:
    Evaluator forward_;
    std::optional<Evaluator> inverse_;
    CertificationReport report_;
    std::string label_;
};

// Samples f on the grid. Throws NotMonotone, FixedPointDetected or
// NotFixedPointFree; std::invalid_argument if the grid is too coarse.
MonotoneMap1D certify_map(const ExprAst& ast, const GridSpec& grid = {});

// Skips the grid scan and trusts the caller; the displacement sign is read off
// f(0). Still throws FixedPointDetected if f(0) == 0.
MonotoneMap1D assume_certified(const ExprAst& ast);

// Wraps an arbitrary evaluator (tests, internal reductions). No scan.
MonotoneMap1D make_map(MonotoneMap1D::Evaluator forward, Displacement d, std::string label,
                       std::optional<MonotoneMap1D::Evaluator> inverse = std::nullopt);

inline constexpr double kDefaultInvertTol = 1e-12;

// Returns x with f(x) ~ y: closed-form inverse when present, otherwise bracket
// expansion from x = y (first step |f(y) - y|, then doubling up to 2^60) and a
// TOMS 748 solve down to width tol. Throws BracketFailure.
double invert_map(const MonotoneMap1D& f, double y, double tol = kDefaultInvertTol);

// Same, with a caller-known bracket [lo, hi]; falls back to invert_map if the
// bracket does not straddle y.
double invert_map_in(const MonotoneMap1D& f, double y, double lo, double hi,
                     double tol = kDefaultInvertTol);

}  // namespace regroup
