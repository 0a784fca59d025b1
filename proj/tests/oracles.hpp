#pragma once

// Reference computations used only by the tests. None of them call the code
// they check: quadrature replaces closed forms, bisection replaces Newton and
// the expression evaluator works on the raw token stream instead of the AST.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

/// Adaptive Gauss-Kronrod quadrature of f over [a, b] (b may be infinite).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-14);

/// G(t) = int_0^t sqrt(1 + 2 zeta s^2) ds by quadrature.
double G(double zeta, double t);
/// G^{-1}(v) by bisection on the quadrature G.
double G_inverse(double zeta, double v);

/// Shunting-yard evaluation straight from the source text. Same grammar as the
/// library: + - < * / < unary - < ^ (right associative), functions exp, log,
/// sqrt, abs, min, max, variables r, x1..x3. Returns false when evaluation fails
/// (division by zero, log of a nonpositive value, non-finite result).
struct Vars {
  double r = 0.0, x1 = 0.0, x2 = 0.0, x3 = 0.0;
};
bool shunting_yard(const std::string& src, const Vars& vars, double& out);

/// Random well-formed expression over the library grammar.
std::string random_expression(std::mt19937_64& rng, int depth);

/// Central difference of f at x along direction d with step h.
double directional_derivative(const std::function<double(const std::vector<double>&)>& f,
                              const std::vector<double>& x, const std::vector<double>& d,
                              double h);

}  // namespace oracle
