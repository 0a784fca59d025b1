#pragma once

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "qls/discretization.hpp"

namespace qls {

/// Byte range of a node in its source text, with 1-based line/column of `begin`.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  int line = 1;
  int column = 1;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, Span at, std::vector<std::string> expected)
      : std::runtime_error(what), at_(at), expected_(std::move(expected)) {}
  const Span& span() const { return at_; }
  int line() const { return at_.line; }
  int column() const { return at_.column; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  Span at_;
  std::vector<std::string> expected_;
};

class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& what, Span at) : std::runtime_error(what), at_(at) {}
  const Span& span() const { return at_; }

 private:
  Span at_;
};

/// Variable values: the radius r and Cartesian coordinates x1..x3.
struct Bindings {
  double r = 0.0;
  std::array<double, 3> x{0.0, 0.0, 0.0};

  static Bindings at(const Point& p) { return Bindings{p.r, p.x}; }
};

struct ExprNode;

/// Immutable parsed expression; cheap to copy and safe to share between threads.
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const ExprNode> root, std::string source)
      : root_(std::move(root)), source_(std::move(source)) {}

  double eval(const Bindings& b) const;
  double operator()(const Point& p) const { return eval(Bindings::at(p)); }
  /// Canonical fully parenthesized text; parsing it yields the same tree.
  std::string print() const;
  const std::string& source() const { return source_; }
  bool valid() const { return root_ != nullptr; }
  /// True if the expression mentions only r (no Cartesian coordinate).
  bool radial_only() const;
  /// True if the expression mentions no variable at all.
  bool constant() const;
  const ExprNode& root() const { return *root_; }

 private:
  std::shared_ptr<const ExprNode> root_;
  std::string source_;
};

using Constants = std::map<std::string, double>;

/// Grammar (lowest to highest): + - ; * / ; unary - ; ^ (right associative);
/// primaries are numbers, r, x1..x3, named constants, f(args), ( expr ).
/// Functions: exp, log, sqrt, abs (one argument), min, max (two arguments).
Expr parse(const std::string& src, const Constants& constants = {});

bool structurally_equal(const ExprNode& a, const ExprNode& b);

struct ExprNode {
  enum class Kind { Number, Variable, Constant, Negate, Binary, Call };
  Kind kind = Kind::Number;
  double value = 0.0;  // Number, Constant
  std::string name;    // Variable, Constant, Call
  char op = 0;         // Binary: + - * / ^
  std::vector<std::shared_ptr<const ExprNode>> args;
  Span span;
};

/// A bounded open set used as the region O: a ball around a center.
struct Region {
  std::array<double, 3> center{0.0, 0.0, 0.0};
  double radius = 1.0;

  bool contains(const Point& p) const;
  double distance_to_boundary(const Point& p) const;
};

/// Result of sampling V and K against the standing assumptions.
struct AssumptionReport {
  struct Violation {
    std::string assumption;  ///< "V" or "K"
    std::string message;
    Point witness;
    double value = 0.0;
  };
  bool passed = true;
  double V0 = 0.0;          ///< sampled inf V
  double V_sup = 0.0;       ///< sampled sup V
  double m = 0.0;           ///< sampled sup of K over O
  double K_boundary = 0.0;  ///< sampled max of K over the boundary of O
  double K_sup = 0.0;       ///< sampled sup of K over everything
  std::vector<Point> maximizers;  ///< sampled points of O where K is within tolerance of m
  double maximizer_radius = 0.0;  ///< mean |x - center| over maximizers
  std::vector<Violation> violations;
};

struct SamplingPlan {
  int dimension = 2;         ///< 1 means radial sampling only
  int per_axis = 201;        ///< resolution across the region O
  int shells = 24;           ///< nested shells at radii R * 2^k
  int shell_points = 64;     ///< angular points per shell
  double K0 = INFINITY;      ///< strict upper bound for sup K
  double maximizer_tol = 1e-9;
};

AssumptionReport validate_assumptions(const Expr& V, const Expr& K, const Region& region,
                                      const SamplingPlan& plan);

}  // namespace qls
