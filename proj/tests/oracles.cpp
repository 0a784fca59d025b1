#include "oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace oracle {

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(f, a, b, 10, tol);
}

double G(double zeta, double t) {
  if (t == 0.0) return 0.0;
  const double s = t < 0.0 ? -1.0 : 1.0;
  const double val =
      integrate([zeta](double x) { return std::sqrt(1.0 + 2.0 * zeta * x * x); }, 0.0, std::abs(t));
  return s * val;
}

double G_inverse(double zeta, double v) {
  if (v == 0.0) return 0.0;
  const double target = std::abs(v);
  double hi = std::max(1.0, target);
  while (G(zeta, hi) < target) hi *= 2.0;
  auto f = [&](double t) { return G(zeta, t) - target; };
  auto stop = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, b); };
  const auto [lo, up] = boost::math::tools::bisect(f, 0.0, hi, stop);
  return std::copysign(0.5 * (lo + up), v);
}

namespace {

struct Tok {
  enum Kind { Num, Name, Op, LPar, RPar, Comma } kind;
  std::string text;
  double value = 0.0;
};

std::vector<Tok> tokenize(const std::string& s) {
  std::vector<Tok> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end = nullptr;
      const double v = std::strtod(s.c_str() + i, &end);
      const std::size_t n = static_cast<std::size_t>(end - (s.c_str() + i));
      out.push_back({Tok::Num, s.substr(i, n), v});
      i += n;
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isalnum(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Name, s.substr(i, j - i)});
      i = j;
    } else if (c == '(') {
      out.push_back({Tok::LPar, "("});
      ++i;
    } else if (c == ')') {
      out.push_back({Tok::RPar, ")"});
      ++i;
    } else if (c == ',') {
      out.push_back({Tok::Comma, ","});
      ++i;
    } else {
      out.push_back({Tok::Op, std::string(1, c)});
      ++i;
    }
  }
  return out;
}

struct Failed {};

double finite(double x) {
  if (!std::isfinite(x)) throw Failed{};
  return x;
}

int precedence(const std::string& op) {
  if (op == "+" || op == "-") return 1;
  if (op == "*" || op == "/") return 2;
  if (op == "neg") return 3;
  return 4;  // ^
}

bool is_function(const std::string& s) {
  return s == "exp" || s == "log" || s == "sqrt" || s == "abs" || s == "min" || s == "max";
}

void reduce_top(const std::string& op, std::vector<double>& stack) {
  auto pop = [&] {
    const double x = stack.back();
    stack.pop_back();
    return x;
  };
  if (op == "neg") {
    stack.push_back(-pop());
  } else if (op == "exp") {
    stack.push_back(finite(std::exp(pop())));
  } else if (op == "log") {
    const double x = pop();
    if (!(x > 0.0)) throw Failed{};
    stack.push_back(std::log(x));
  } else if (op == "sqrt") {
    const double x = pop();
    if (x < 0.0) throw Failed{};
    stack.push_back(std::sqrt(x));
  } else if (op == "abs") {
    stack.push_back(std::abs(pop()));
  } else {
    const double y = pop();
    const double x = pop();
    if (op == "min") stack.push_back(std::min(x, y));
    else if (op == "max") stack.push_back(std::max(x, y));
    else if (op == "+") stack.push_back(finite(x + y));
    else if (op == "-") stack.push_back(finite(x - y));
    else if (op == "*") stack.push_back(finite(x * y));
    else if (op == "/") {
      if (y == 0.0) throw Failed{};
      stack.push_back(finite(x / y));
    } else {
      stack.push_back(finite(std::pow(x, y)));
    }
  }
}

}  // namespace

bool shunting_yard(const std::string& src, const Vars& vars, double& out) {
  const std::vector<Tok> toks = tokenize(src);
  std::vector<double> values;
  std::vector<std::string> ops;  // operators, "(" and function names
  bool operand_expected = true;
  try {
    for (const Tok& t : toks) {
      switch (t.kind) {
        case Tok::Num:
          values.push_back(t.value);
          operand_expected = false;
          break;
        case Tok::Name:
          if (is_function(t.text)) {
            ops.push_back(t.text);
          } else {
            if (t.text == "r") values.push_back(vars.r);
            else if (t.text == "x1") values.push_back(vars.x1);
            else if (t.text == "x2") values.push_back(vars.x2);
            else if (t.text == "x3") values.push_back(vars.x3);
            else throw std::invalid_argument("unknown name " + t.text);
            operand_expected = false;
          }
          break;
        case Tok::LPar:
          ops.push_back("(");
          operand_expected = true;
          break;
        case Tok::Comma:
          while (ops.back() != "(") {
            reduce_top(ops.back(), values);
            ops.pop_back();
          }
          operand_expected = true;
          break;
        case Tok::RPar:
          while (ops.back() != "(") {
            reduce_top(ops.back(), values);
            ops.pop_back();
          }
          ops.pop_back();
          if (!ops.empty() && is_function(ops.back())) {
            reduce_top(ops.back(), values);
            ops.pop_back();
          }
          operand_expected = false;
          break;
        case Tok::Op: {
          if (operand_expected) {
            if (t.text != "-") throw std::invalid_argument("operator without operand");
            ops.push_back("neg");
            break;
          }
          const int p = precedence(t.text);
          const bool right = t.text == "^";
          while (!ops.empty() && ops.back() != "(" && !is_function(ops.back())) {
            const int q = precedence(ops.back());
            if (q > p || (q == p && !right)) {
              reduce_top(ops.back(), values);
              ops.pop_back();
            } else {
              break;
            }
          }
          ops.push_back(t.text);
          operand_expected = true;
          break;
        }
      }
    }
    while (!ops.empty()) {
      reduce_top(ops.back(), values);
      ops.pop_back();
    }
  } catch (const Failed&) {
    return false;
  }
  if (values.size() != 1) throw std::invalid_argument("malformed expression " + src);
  out = values.back();
  return true;
}

std::string random_expression(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, 99);
  auto literal = [&] {
    std::uniform_real_distribution<double> u(0.0, 5.0);
    char buf[32];
    switch (pick(rng) % 4) {
      case 0: std::snprintf(buf, sizeof buf, "%d", pick(rng) % 10); break;
      case 1: std::snprintf(buf, sizeof buf, "%.3g", u(rng)); break;
      case 2: std::snprintf(buf, sizeof buf, "%.6e", u(rng)); break;
      default: std::snprintf(buf, sizeof buf, "%.17g", u(rng)); break;
    }
    return std::string(buf);
  };
  if (depth <= 0 || pick(rng) < 20) {
    static const char* vars[] = {"r", "x1", "x2", "x3"};
    return pick(rng) < 50 ? literal() : std::string(vars[pick(rng) % 4]);
  }
  const int k = pick(rng);
  auto sub = [&] { return random_expression(rng, depth - 1); };
  if (k < 15) return sub() + " + " + sub();
  if (k < 28) return sub() + " - " + sub();
  if (k < 42) return sub() + "*" + sub();
  if (k < 52) return sub() + " / " + sub();
  if (k < 60) return "(" + sub() + ")^" + std::to_string(pick(rng) % 4);
  if (k < 64) return "abs(" + sub() + ")^0.5";
  if (k < 68) return "2^-" + sub();
  if (k < 74) return "-" + sub();
  if (k < 80) return "(" + sub() + ")";
  if (k < 84) return "exp(-abs(" + sub() + "))";
  if (k < 88) return "log(1 + abs(" + sub() + "))";
  if (k < 91) return "sqrt(abs(" + sub() + "))";
  if (k < 94) return "abs(" + sub() + ")";
  if (k < 97) return "min(" + sub() + ", " + sub() + ")";
  return "max(" + sub() + "," + sub() + ")";
}

double directional_derivative(const std::function<double(const std::vector<double>&)>& f,
                              const std::vector<double>& x, const std::vector<double>& d,
                              double h) {
  std::vector<double> plus(x), minus(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    plus[i] += h * d[i];
    minus[i] -= h * d[i];
  }
  return (f(plus) - f(minus)) / (2.0 * h);
}

}  // namespace oracle
