#include "crosswidth/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace crosswidth {

struct Node {
  Op op = Op::constant;
  double c = 0.0;
  int n = 0;
  std::shared_ptr<const Node> a, b;
};

namespace {

double ipow(double v, int n) {
  if (n < 0) return 1.0 / ipow(v, -n);
  double r = 1.0;
  while (n) {
    if (n & 1) r *= v;
    v *= v;
    n >>= 1;
  }
  return r;
}

double blend_value(double u) { return 0.5 * (1.0 + std::tanh(u)); }

}  // namespace

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double c) {
  auto nd = std::make_shared<Node>();
  nd->op = Op::constant;
  nd->c = c;
  n_ = nd;
}

Expr Expr::x() {
  auto nd = std::make_shared<Node>();
  nd->op = Op::var;
  return Expr(std::shared_ptr<const Node>(nd));
}

Expr Expr::binary(Op op, Expr a, Expr b) {
  if (a.is_constant() && b.is_constant()) {
    double u = a.value(), v = b.value();
    switch (op) {
      case Op::add: return Expr(u + v);
      case Op::sub: return Expr(u - v);
      case Op::mul: return Expr(u * v);
      case Op::div: return Expr(u / v);
      default: break;
    }
  }
  switch (op) {
    case Op::add:
      if (a.is_zero()) return b;
      if (b.is_zero()) return a;
      break;
    case Op::sub:
      if (b.is_zero()) return a;
      if (a.is_zero()) return unary(Op::neg, b);
      break;
    case Op::mul:
      if (a.is_zero() || b.is_zero()) return Expr(0.0);
      if (a.is_one()) return b;
      if (b.is_one()) return a;
      break;
    case Op::div:
      if (a.is_zero()) return Expr(0.0);
      if (b.is_one()) return a;
      break;
    default:
      throw std::invalid_argument("Expr::binary: not a binary operator");
  }
  auto nd = std::make_shared<Node>();
  nd->op = op;
  nd->a = std::move(a.n_);
  nd->b = std::move(b.n_);
  return Expr(std::shared_ptr<const Node>(nd));
}

Expr Expr::unary(Op op, Expr a) {
  if (a.is_constant()) {
    double u = a.value();
    switch (op) {
      case Op::neg: return Expr(-u);
      case Op::exp: return Expr(std::exp(u));
      case Op::tanh: return Expr(std::tanh(u));
      case Op::blend: return Expr(blend_value(u));
      default: break;
    }
  }
  if (op == Op::neg && a.op() == Op::neg) return a.lhs();
  if (op != Op::neg && op != Op::exp && op != Op::tanh && op != Op::blend)
    throw std::invalid_argument("Expr::unary: not a unary operator");
  auto nd = std::make_shared<Node>();
  nd->op = op;
  nd->a = std::move(a.n_);
  return Expr(std::shared_ptr<const Node>(nd));
}

Expr Expr::power(Expr a, int n) {
  if (n == 0) return Expr(1.0);
  if (n == 1) return a;
  if (a.is_constant()) return Expr(ipow(a.value(), n));
  auto nd = std::make_shared<Node>();
  nd->op = Op::pow;
  nd->n = n;
  nd->a = std::move(a.n_);
  return Expr(std::shared_ptr<const Node>(nd));
}

Op Expr::op() const { return n_->op; }
double Expr::value() const { return n_->c; }
int Expr::exponent() const { return n_->n; }
Expr Expr::lhs() const { return Expr(n_->a); }
Expr Expr::rhs() const { return Expr(n_->b); }

bool Expr::depends_on_x() const {
  switch (op()) {
    case Op::constant: return false;
    case Op::var: return true;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div: return lhs().depends_on_x() || rhs().depends_on_x();
    default: return lhs().depends_on_x();
  }
}

double Expr::operator()(double x) const {
  switch (op()) {
    case Op::constant: return value();
    case Op::var: return x;
    case Op::add: return lhs()(x) + rhs()(x);
    case Op::sub: return lhs()(x) - rhs()(x);
    case Op::mul: return lhs()(x) * rhs()(x);
    case Op::div: return lhs()(x) / rhs()(x);
    case Op::pow: return ipow(lhs()(x), exponent());
    case Op::neg: return -lhs()(x);
    case Op::exp: return std::exp(lhs()(x));
    case Op::tanh: return std::tanh(lhs()(x));
    case Op::blend: return blend_value(lhs()(x));
  }
  return 0.0;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Op::add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Op::sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Op::mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Op::div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(Op::neg, a); }
Expr pow(const Expr& a, int n) { return Expr::power(a, n); }
Expr exp(const Expr& a) { return Expr::unary(Op::exp, a); }
Expr tanh(const Expr& a) { return Expr::unary(Op::tanh, a); }
Expr blend(const Expr& a) { return Expr::unary(Op::blend, a); }

// ---------------------------------------------------------------- printing

namespace {

std::string number_text(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

// 1: + -   2: * /   3: unary minus   4: ^   5: atom
int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::add:
    case Op::sub: return 1;
    case Op::mul:
    case Op::div: return 2;
    case Op::neg: return 3;
    case Op::pow: return 4;
    case Op::constant: return (e.value() < 0 || std::signbit(e.value())) ? 3 : 5;
    default: return 5;
  }
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(e, out);
  if (wrap) out += ')';
}

void print(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::constant: out += number_text(e.value()); return;
    case Op::var: out += 'x'; return;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div: {
      int p = precedence(e);
      print_wrapped(e.lhs(), precedence(e.lhs()) < p, out);
      const char* sym = e.op() == Op::add   ? " + "
                        : e.op() == Op::sub ? " - "
                        : e.op() == Op::mul ? "*"
                                            : "/";
      out += sym;
      int q = precedence(e.rhs());
      print_wrapped(e.rhs(), q <= p || q == 3, out);
      return;
    }
    case Op::neg:
      out += '-';
      print_wrapped(e.lhs(), precedence(e.lhs()) <= 3, out);
      return;
    case Op::pow:
      print_wrapped(e.lhs(), precedence(e.lhs()) <= 4, out);
      out += '^';
      if (e.exponent() < 0)
        out += "(" + std::to_string(e.exponent()) + ")";
      else
        out += std::to_string(e.exponent());
      return;
    case Op::exp:
    case Op::tanh:
    case Op::blend:
      out += e.op() == Op::exp ? "exp(" : e.op() == Op::tanh ? "tanh(" : "blend(";
      print(e.lhs(), out);
      out += ')';
      return;
  }
}

}  // namespace

std::string Expr::str() const {
  std::string s;
  print(*this, s);
  return s;
}

// ----------------------------------------------------------------- parsing

namespace {

class Parser {
public:
  explicit Parser(const std::string& s) : s_(s) {}

  Expr run() {
    skip();
    if (pos_ == s_.size()) fail("empty expression");
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (eat('+'))
        e = e + term();
      else if (eat('-'))
        e = e - term();
      else
        return e;
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (eat('*'))
        e = e * unary();
      else if (eat('/'))
        e = e / unary();
      else
        return e;
    }
  }

  Expr unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (!eat('^')) return base;
    bool paren = eat('(');
    int sign = 1;
    if (eat('-'))
      sign = -1;
    else
      eat('+');
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("integer exponent expected");
    long n = std::strtol(s_.substr(start, pos_ - start).c_str(), nullptr, 10);
    if (n > 64) fail("exponent too large");
    if (paren && !eat(')')) fail("')' expected");
    return pow(base, sign * static_cast<int>(n));
  }

  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("operand expected");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      if (id == "x") return Expr::x();
      Op op;
      if (id == "exp")
        op = Op::exp;
      else if (id == "tanh")
        op = Op::tanh;
      else if (id == "blend")
        op = Op::blend;
      else {
        pos_ = start;
        fail("unknown identifier '" + id + "'");
      }
      if (!eat('(')) fail("'(' expected after " + id);
      Expr arg = expr();
      if (!eat(')')) fail("')' expected");
      return Expr::unary(op, arg);
    }
    if (eat('(')) {
      Expr e = expr();
      if (!eat(')')) fail("')' expected");
      return e;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        digits();
      else
        pos_ = save;
    }
    std::string tok = s_.substr(start, pos_ - start);
    if (tok == ".") {
      pos_ = start;
      fail("malformed number");
    }
    return Expr(std::strtod(tok.c_str(), nullptr));
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(const std::string& text) { return Parser(text).run(); }

// ------------------------------------------------------------- derivatives

namespace {

Expr d1(const Expr& e) {
  switch (e.op()) {
    case Op::constant: return Expr(0.0);
    case Op::var: return Expr(1.0);
    case Op::add: return d1(e.lhs()) + d1(e.rhs());
    case Op::sub: return d1(e.lhs()) - d1(e.rhs());
    case Op::mul: return d1(e.lhs()) * e.rhs() + e.lhs() * d1(e.rhs());
    case Op::div:
      if (!e.rhs().depends_on_x()) return d1(e.lhs()) / e.rhs();
      return (d1(e.lhs()) * e.rhs() - e.lhs() * d1(e.rhs())) / pow(e.rhs(), 2);
    case Op::pow:
      return Expr(static_cast<double>(e.exponent())) * pow(e.lhs(), e.exponent() - 1) *
             d1(e.lhs());
    case Op::neg: return -d1(e.lhs());
    case Op::exp: return e * d1(e.lhs());
    case Op::tanh: return (Expr(1.0) - pow(e, 2)) * d1(e.lhs());
    case Op::blend:
      return Expr(0.5) * (Expr(1.0) - pow(tanh(e.lhs()), 2)) * d1(e.lhs());
  }
  return Expr(0.0);
}

}  // namespace

Expr derivative(const Expr& e, int n, int max_order) {
  if (n < 0) throw std::invalid_argument("derivative order must be nonnegative");
  if (n > max_order)
    throw std::invalid_argument("derivative order " + std::to_string(n) +
                                " exceeds cap " + std::to_string(max_order));
  Expr r = e;
  for (int i = 0; i < n; ++i) r = d1(r);
  return r;
}

// ----------------------------------------------------------- Taylor jets

namespace {

using Jet = std::vector<double>;

Jet jmul(const Jet& a, const Jet& b) {
  Jet r(a.size(), 0.0);
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t j = 0; j <= k; ++j) r[k] += a[j] * b[k - j];
  return r;
}

Jet jdiv(const Jet& a, const Jet& b) {
  Jet q(a.size(), 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    double s = a[k];
    for (std::size_t j = 1; j <= k; ++j) s -= b[j] * q[k - j];
    q[k] = s / b[0];
  }
  return q;
}

Jet jtanh(const Jet& a) {
  std::size_t N = a.size();
  Jet t(N, 0.0), s(N, 0.0);
  t[0] = std::tanh(a[0]);
  s[0] = 1.0 - t[0] * t[0];
  for (std::size_t k = 1; k < N; ++k) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= k; ++j) acc += double(j) * a[j] * s[k - j];
    t[k] = acc / double(k);
    double sq = 0.0;
    for (std::size_t j = 0; j <= k; ++j) sq += t[j] * t[k - j];
    s[k] = -sq;
  }
  return t;
}

Jet jet(const Expr& e, double x0, std::size_t N) {
  Jet r(N, 0.0);
  switch (e.op()) {
    case Op::constant: r[0] = e.value(); return r;
    case Op::var:
      r[0] = x0;
      if (N > 1) r[1] = 1.0;
      return r;
    case Op::add:
    case Op::sub: {
      Jet a = jet(e.lhs(), x0, N), b = jet(e.rhs(), x0, N);
      double sg = e.op() == Op::add ? 1.0 : -1.0;
      for (std::size_t k = 0; k < N; ++k) r[k] = a[k] + sg * b[k];
      return r;
    }
    case Op::mul: return jmul(jet(e.lhs(), x0, N), jet(e.rhs(), x0, N));
    case Op::div: return jdiv(jet(e.lhs(), x0, N), jet(e.rhs(), x0, N));
    case Op::pow: {
      Jet base = jet(e.lhs(), x0, N);
      int n = e.exponent();
      Jet acc(N, 0.0);
      acc[0] = 1.0;
      Jet sq = base;
      for (int m = n < 0 ? -n : n; m; m >>= 1) {
        if (m & 1) acc = jmul(acc, sq);
        if (m > 1) sq = jmul(sq, sq);
      }
      if (n < 0) {
        Jet one(N, 0.0);
        one[0] = 1.0;
        return jdiv(one, acc);
      }
      return acc;
    }
    case Op::neg: {
      Jet a = jet(e.lhs(), x0, N);
      for (auto& v : a) v = -v;
      return a;
    }
    case Op::exp: {
      Jet a = jet(e.lhs(), x0, N);
      r[0] = std::exp(a[0]);
      for (std::size_t k = 1; k < N; ++k) {
        double acc = 0.0;
        for (std::size_t j = 1; j <= k; ++j) acc += double(j) * a[j] * r[k - j];
        r[k] = acc / double(k);
      }
      return r;
    }
    case Op::tanh: return jtanh(jet(e.lhs(), x0, N));
    case Op::blend: {
      Jet t = jtanh(jet(e.lhs(), x0, N));
      for (auto& v : t) v *= 0.5;
      t[0] += 0.5;
      return t;
    }
  }
  return r;
}

}  // namespace

std::vector<double> taylor_coefficients(const Expr& e, double x0, int order) {
  if (order < 0) throw std::invalid_argument("taylor order must be nonnegative");
  return jet(e, x0, static_cast<std::size_t>(order) + 1);
}

// ------------------------------------------------------------ compilation

namespace {

void emit(const Expr& e, std::vector<Op>& ops, std::vector<double>& cs, std::vector<int>& ns,
          std::size_t depth, std::size_t& max_depth) {
  auto push = [&](Op op, double c, int n) {
    ops.push_back(op);
    cs.push_back(c);
    ns.push_back(n);
  };
  switch (e.op()) {
    case Op::constant:
    case Op::var:
      push(e.op(), e.value(), 0);
      max_depth = std::max(max_depth, depth + 1);
      return;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
      emit(e.lhs(), ops, cs, ns, depth, max_depth);
      emit(e.rhs(), ops, cs, ns, depth + 1, max_depth);
      push(e.op(), 0.0, 0);
      return;
    default:
      emit(e.lhs(), ops, cs, ns, depth, max_depth);
      push(e.op(), 0.0, e.op() == Op::pow ? e.exponent() : 0);
      return;
  }
}

}  // namespace

CompiledExpr::CompiledExpr(const Expr& e) {
  std::vector<Op> ops;
  std::vector<double> cs;
  std::vector<int> ns;
  emit(e, ops, cs, ns, 0, depth_);
  code_.reserve(ops.size());
  for (std::size_t i = 0; i < ops.size(); ++i) code_.push_back({ops[i], cs[i], ns[i]});
}

double CompiledExpr::operator()(double x) const {
  constexpr std::size_t kInline = 64;
  double small[kInline];
  std::vector<double> big;
  double* st = small;
  if (depth_ > kInline) {
    big.resize(depth_);
    st = big.data();
  }
  std::size_t sp = 0;
  for (const Ins& in : code_) {
    switch (in.op) {
      case Op::constant: st[sp++] = in.c; break;
      case Op::var: st[sp++] = x; break;
      case Op::add: --sp; st[sp - 1] += st[sp]; break;
      case Op::sub: --sp; st[sp - 1] -= st[sp]; break;
      case Op::mul: --sp; st[sp - 1] *= st[sp]; break;
      case Op::div: --sp; st[sp - 1] /= st[sp]; break;
      case Op::pow: st[sp - 1] = ipow(st[sp - 1], in.n); break;
      case Op::neg: st[sp - 1] = -st[sp - 1]; break;
      case Op::exp: st[sp - 1] = std::exp(st[sp - 1]); break;
      case Op::tanh: st[sp - 1] = std::tanh(st[sp - 1]); break;
      case Op::blend: st[sp - 1] = blend_value(st[sp - 1]); break;
    }
  }
  return code_.empty() ? 0.0 : st[0];
}

}  // namespace crosswidth
