#include "qls/potential_dsl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>

#include "qls/csv.hpp"

namespace qls {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  std::string text;
  double value = 0.0;
  Span span;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Number: return "number";
    case Tok::Ident: return "identifier";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Caret: return "'^'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t;
    t.span = {i, i, line, col};
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      t.kind = Tok::Number;
      t.text = src.substr(i, j - i);
      char* endp = nullptr;
      t.value = std::strtod(t.text.c_str(), &endp);
      if (endp != t.text.c_str() + t.text.size())
        throw ParseError("malformed number '" + t.text + "'", t.span, {"number"});
      if (!std::isfinite(t.value))
        throw ParseError("number out of range '" + t.text + "'", t.span, {"number"});
      advance(j - i);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
    } else {
      switch (c) {
        case '+': t.kind = Tok::Plus; break;
        case '-': t.kind = Tok::Minus; break;
        case '*': t.kind = Tok::Star; break;
        case '/': t.kind = Tok::Slash; break;
        case '^': t.kind = Tok::Caret; break;
        case '(': t.kind = Tok::LParen; break;
        case ')': t.kind = Tok::RParen; break;
        case ',': t.kind = Tok::Comma; break;
        default:
          throw ParseError(std::string("unexpected character '") + c + "'", t.span,
                           {"number", "identifier", "operator", "'('", "')'"});
      }
      t.text = std::string(1, c);
      advance(1);
    }
    t.span.end = i;
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.span = {i, i, line, col};
  out.push_back(end);
  return out;
}

const std::vector<std::string>& function_names() {
  static const std::vector<std::string> names{"exp", "log", "sqrt", "abs", "min", "max"};
  return names;
}

int arity(const std::string& f) { return f == "min" || f == "max" ? 2 : 1; }

bool is_variable(const std::string& s) { return s == "r" || s == "x1" || s == "x2" || s == "x3"; }

using NodePtr = std::shared_ptr<const ExprNode>;

class Parser {
 public:
  Parser(std::vector<Token> toks, const Constants& constants)
      : toks_(std::move(toks)), constants_(constants) {}

  NodePtr parse_all() {
    NodePtr e = parse_sum();
    if (peek().kind != Tok::End) fail({"operator", "end of input"});
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    Span at = t.span;
    std::string msg;
    if (t.kind == Tok::End && pos_ > 0) {
      at = toks_[pos_ - 1].span;
      msg = "unexpected end of input after '" + toks_[pos_ - 1].text + "'";
    } else {
      msg = std::string("unexpected ") + describe(t.kind) +
            (t.text.empty() ? "" : " '" + t.text + "'");
    }
    msg += " at line " + std::to_string(at.line) + ", column " + std::to_string(at.column) +
           "; expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? " or " : "") + expected[i];
    throw ParseError(msg, at, std::move(expected));
  }

  static NodePtr binary(char op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Binary;
    n->op = op;
    n->span = {a->span.begin, b->span.end, a->span.line, a->span.column};
    n->args = {std::move(a), std::move(b)};
    return n;
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const char op = take().text[0];
      lhs = binary(op, lhs, parse_product());
    }
    return lhs;
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const char op = take().text[0];
      lhs = binary(op, lhs, parse_unary());
    }
    return lhs;
  }

  NodePtr parse_unary() {
    if (peek().kind == Tok::Minus) {
      const Span at = take().span;
      NodePtr arg = parse_unary();
      auto n = std::make_shared<ExprNode>();
      n->kind = ExprNode::Kind::Negate;
      n->span = {at.begin, arg->span.end, at.line, at.column};
      n->args = {std::move(arg)};
      return n;
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (peek().kind == Tok::Caret) {
      take();
      return binary('^', base, parse_unary());
    }
    return base;
  }

  NodePtr parse_primary() {
    const Token& t = peek();
    auto n = std::make_shared<ExprNode>();
    n->span = t.span;
    switch (t.kind) {
      case Tok::Number:
        n->kind = ExprNode::Kind::Number;
        n->value = take().value;
        return n;
      case Tok::LParen: {
        take();
        NodePtr inner = parse_sum();
        if (peek().kind != Tok::RParen) fail({"')'", "operator"});
        take();
        return inner;
      }
      case Tok::Ident: {
        const std::string name = take().text;
        n->name = name;
        if (peek().kind == Tok::LParen) {
          const auto& fs = function_names();
          if (std::find(fs.begin(), fs.end(), name) == fs.end())
            throw ParseError("unknown function '" + name + "' at line " +
                                 std::to_string(n->span.line) + ", column " +
                                 std::to_string(n->span.column),
                             n->span, fs);
          take();
          n->kind = ExprNode::Kind::Call;
          n->args.push_back(parse_sum());
          for (int k = 1; k < arity(name); ++k) {
            if (peek().kind != Tok::Comma) fail({"','"});
            take();
            n->args.push_back(parse_sum());
          }
          if (peek().kind != Tok::RParen) fail({"')'"});
          n->span.end = take().span.end;
          return n;
        }
        if (is_variable(name)) {
          n->kind = ExprNode::Kind::Variable;
          return n;
        }
        if (auto it = constants_.find(name); it != constants_.end()) {
          n->kind = ExprNode::Kind::Constant;
          n->value = it->second;
          return n;
        }
        std::vector<std::string> known{"r", "x1", "x2", "x3"};
        for (const auto& [k, v] : constants_) known.push_back(k);
        throw ParseError("unknown identifier '" + name + "' at line " +
                             std::to_string(n->span.line) + ", column " +
                             std::to_string(n->span.column),
                         n->span, known);
      }
      default:
        fail({"number", "identifier", "'('", "'-'"});
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Constants& constants_;
};

double checked(double x, const ExprNode& n, const char* what) {
  if (!std::isfinite(x)) throw EvalError(std::string(what) + " produced a non-finite value", n.span);
  return x;
}

double eval_node(const ExprNode& n, const Bindings& b) {
  using K = ExprNode::Kind;
  switch (n.kind) {
    case K::Number:
    case K::Constant:
      return n.value;
    case K::Variable: {
      double v = n.name == "r" ? b.r : b.x[static_cast<std::size_t>(n.name[1] - '1')];
      if (!std::isfinite(v)) throw EvalError("variable '" + n.name + "' is not finite", n.span);
      return v;
    }
    case K::Negate:
      return -eval_node(*n.args[0], b);
    case K::Binary: {
      const double x = eval_node(*n.args[0], b);
      const double y = eval_node(*n.args[1], b);
      switch (n.op) {
        case '+': return checked(x + y, n, "addition");
        case '-': return checked(x - y, n, "subtraction");
        case '*': return checked(x * y, n, "multiplication");
        case '/':
          if (y == 0.0) throw EvalError("division by zero", n.span);
          return checked(x / y, n, "division");
        default: return checked(std::pow(x, y), n, "power");
      }
    }
    case K::Call: {
      const double x = eval_node(*n.args[0], b);
      if (n.name == "exp") return checked(std::exp(x), n, "exp");
      if (n.name == "log") {
        if (!(x > 0.0)) throw EvalError("log of a nonpositive value", n.span);
        return std::log(x);
      }
      if (n.name == "sqrt") {
        if (x < 0.0) throw EvalError("sqrt of a negative value", n.span);
        return std::sqrt(x);
      }
      if (n.name == "abs") return std::abs(x);
      const double y = eval_node(*n.args[1], b);
      return n.name == "min" ? std::min(x, y) : std::max(x, y);
    }
  }
  return 0.0;
}

void print_node(const ExprNode& n, std::string& out) {
  using K = ExprNode::Kind;
  switch (n.kind) {
    case K::Number: out += format_double(n.value); break;
    case K::Variable:
    case K::Constant: out += n.name; break;
    case K::Negate:
      out += "(-";
      print_node(*n.args[0], out);
      out += ')';
      break;
    case K::Binary:
      out += '(';
      print_node(*n.args[0], out);
      out += ' ';
      out += n.op;
      out += ' ';
      print_node(*n.args[1], out);
      out += ')';
      break;
    case K::Call:
      out += n.name + '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print_node(*n.args[i], out);
      }
      out += ')';
      break;
  }
}

bool mentions_cartesian(const ExprNode& n) {
  if (n.kind == ExprNode::Kind::Variable && n.name != "r") return true;
  return std::any_of(n.args.begin(), n.args.end(),
                     [](const NodePtr& a) { return mentions_cartesian(*a); });
}

bool mentions_variable(const ExprNode& n) {
  if (n.kind == ExprNode::Kind::Variable) return true;
  return std::any_of(n.args.begin(), n.args.end(),
                     [](const NodePtr& a) { return mentions_variable(*a); });
}

}  // namespace

Expr parse(const std::string& src, const Constants& constants) {
  for (const auto& [name, value] : constants) {
    if (is_variable(name)) throw ParseError("constant '" + name + "' shadows a variable", {}, {});
    if (!std::isfinite(value)) throw ParseError("constant '" + name + "' is not finite", {}, {});
  }
  Parser parser(lex(src), constants);
  return Expr(parser.parse_all(), src);
}

double Expr::eval(const Bindings& b) const {
  if (!root_) throw EvalError("empty expression", {});
  return eval_node(*root_, b);
}

std::string Expr::print() const {
  std::string out;
  if (root_) print_node(*root_, out);
  return out;
}

bool Expr::radial_only() const { return root_ && !mentions_cartesian(*root_); }

bool Expr::constant() const { return root_ && !mentions_variable(*root_); }

bool structurally_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind || a.op != b.op || a.name != b.name || a.args.size() != b.args.size())
    return false;
  if ((a.kind == ExprNode::Kind::Number || a.kind == ExprNode::Kind::Constant) &&
      !(a.value == b.value))
    return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!structurally_equal(*a.args[i], *b.args[i])) return false;
  return true;
}

bool Region::contains(const Point& p) const { return distance_to_boundary(p) > 0.0; }

double Region::distance_to_boundary(const Point& p) const {
  double s = 0.0;
  for (int d = 0; d < 3; ++d) s += (p.x[d] - center[d]) * (p.x[d] - center[d]);
  return radius - std::sqrt(s);
}

namespace {

Point make_point(int dim, const std::array<double, 3>& x) {
  Point p;
  if (dim == 1) {
    p.r = std::abs(x[0]);
    p.x = {p.r, 0.0, 0.0};
  } else {
    p.x = x;
    p.r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  }
  return p;
}

// Points on the sphere |x - c| = R (a pair of radii in the radial case).
std::vector<Point> sphere_points(int dim, const std::array<double, 3>& c, double R, int count) {
  std::vector<Point> pts;
  if (dim == 1) {
    pts.push_back(make_point(1, {c[0] + R, 0, 0}));
    return pts;
  }
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    std::array<double, 3> x = c;
    if (dim == 2) {
      const double th = 2.0 * M_PI * k / count;
      x[0] += R * std::cos(th);
      x[1] += R * std::sin(th);
    } else {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double rho = std::sqrt(1.0 - z * z);
      x[0] += R * rho * std::cos(golden * k);
      x[1] += R * rho * std::sin(golden * k);
      x[2] += R * z;
    }
    pts.push_back(make_point(dim, x));
  }
  return pts;
}

// Tensor lattice over the box [c - h, c + h]^dim.
std::vector<Point> box_points(int dim, const std::array<double, 3>& c, double h, int n) {
  std::vector<Point> pts;
  if (dim == 1) {
    for (int i = 0; i < n; ++i) pts.push_back(make_point(1, {h * i / (n - 1.0), 0, 0}));
    return pts;
  }
  const int nk = dim == 3 ? n : 1;
  for (int k = 0; k < nk; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        auto t = [&](int q) { return -h + 2.0 * h * q / (n - 1.0); };
        pts.push_back(make_point(dim, {c[0] + t(i), c[1] + t(j), dim == 3 ? c[2] + t(k) : 0.0}));
      }
  return pts;
}

}  // namespace

AssumptionReport validate_assumptions(const Expr& V, const Expr& K, const Region& region,
                                      const SamplingPlan& plan) {
  AssumptionReport rep;
  const int dim = plan.dimension;
  const Region O = dim == 1 ? Region{{0, 0, 0}, region.radius} : region;
  auto violate = [&](const std::string& a, const std::string& msg, const Point& w, double v) {
    rep.passed = false;
    rep.violations.push_back({a, msg, w, v});
  };
  auto safe = [&](const Expr& e, const Point& p, const char* which, bool& ok) -> double {
    try {
      return e(p);
    } catch (const EvalError& err) {
      if (ok) violate(which, std::string(which) + " cannot be evaluated: " + err.what(), p, NAN);
      ok = false;
      return std::nan("");
    }
  };

  const int n = dim == 3 ? std::min(plan.per_axis, 61) : plan.per_axis;
  std::vector<Point> inner = box_points(dim, O.center, 2.0 * O.radius, n);
  std::vector<std::vector<Point>> shells;
  for (int k = 1; k <= plan.shells; ++k)
    shells.push_back(sphere_points(dim, O.center, 2.0 * O.radius * std::pow(2.0, k), plan.shell_points));

  // (V): 0 < inf V <= sup V < infinity.
  bool v_ok = true;
  double vmin = INFINITY, vmax = -INFINITY;
  Point wmin, wmax;
  auto visit_v = [&](const Point& p) {
    const double v = safe(V, p, "V", v_ok);
    if (std::isnan(v)) return v;
    if (v < vmin) { vmin = v; wmin = p; }
    if (v > vmax) { vmax = v; wmax = p; }
    return v;
  };
  for (const Point& p : inner) visit_v(p);
  std::vector<double> shell_sup;
  std::vector<Point> shell_arg;
  for (const auto& shell : shells) {
    double s = -INFINITY;
    Point arg;
    for (const Point& p : shell) {
      const double v = visit_v(p);
      if (v > s) { s = v; arg = p; }
    }
    shell_sup.push_back(s);
    shell_arg.push_back(arg);
  }
  rep.V0 = vmin;
  rep.V_sup = vmax;
  if (v_ok) {
    if (!(vmin > 0.0)) violate("V", "inf V must be positive", wmin, vmin);
    const std::size_t S = shell_sup.size();
    bool growing = S >= 4;
    for (std::size_t k = S >= 4 ? S - 3 : 0; growing && k < S; ++k)
      growing = shell_sup[k] > 0.0 && shell_sup[k] >= 1.5 * shell_sup[k - 1];
    if (growing || !(vmax < 1e12))
      violate("V", "V is unbounded: sup over nested shells keeps growing", shell_arg.back(),
              shell_sup.back());
  }

  // (K): 0 < sup K < K0 and max over the boundary of O strictly below m = sup over O.
  bool k_ok = true;
  double m = -INFINITY, kb = -INFINITY, ksup = -INFINITY;
  Point wb, wsup;
  std::vector<std::pair<Point, double>> interior;
  for (const Point& p : inner) {
    const double k = safe(K, p, "K", k_ok);
    if (std::isnan(k)) continue;
    if (k > ksup) { ksup = k; wsup = p; }
    if (O.contains(p)) {
      interior.emplace_back(p, k);
      m = std::max(m, k);
    }
  }
  for (const Point& p : sphere_points(dim, O.center, O.radius, 8 * plan.shell_points)) {
    const double k = safe(K, p, "K", k_ok);
    if (std::isnan(k)) continue;
    if (k > kb) { kb = k; wb = p; }
    if (k > ksup) { ksup = k; wsup = p; }
  }
  for (const auto& shell : shells)
    for (const Point& p : shell) {
      const double k = safe(K, p, "K", k_ok);
      if (!std::isnan(k) && k > ksup) { ksup = k; wsup = p; }
    }
  rep.m = m;
  rep.K_boundary = kb;
  rep.K_sup = ksup;
  if (k_ok) {
    if (!(ksup > 0.0)) violate("K", "sup K must be positive", wsup, ksup);
    if (!(ksup < plan.K0)) violate("K", "sup K must be below K0", wsup, ksup);
    if (!(kb < m - 1e-12 * std::max(1.0, std::abs(m))))
      violate("K", "max of K over the boundary of O must be strictly below sup over O", wb, kb);
    const double tol = plan.maximizer_tol * std::max(1.0, std::abs(m));
    double rsum = 0.0;
    for (const auto& [p, k] : interior) {
      if (k >= m - tol) {
        rep.maximizers.push_back(p);
        rsum += O.radius - O.distance_to_boundary(p);
      }
    }
    if (!rep.maximizers.empty()) rep.maximizer_radius = rsum / rep.maximizers.size();
  }
  return rep;
}

}  // namespace qls
