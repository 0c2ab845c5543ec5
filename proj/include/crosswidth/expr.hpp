#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace crosswidth {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

enum class Op { constant, var, add, sub, mul, div, pow, neg, exp, tanh, blend };

struct Node;

// Immutable expression in one variable x. Subtrees are shared.
// blend(u) = (1 + tanh(u)) / 2 is the smooth step.
class Expr {
public:
  Expr();  // zero
  Expr(double c);

  static Expr x();
  static Expr binary(Op op, Expr a, Expr b);
  static Expr unary(Op op, Expr a);
  static Expr power(Expr a, int n);

  Op op() const;
  double value() const;  // constant payload
  int exponent() const;  // pow payload
  Expr lhs() const;
  Expr rhs() const;

  bool is_constant() const { return op() == Op::constant; }
  bool is_zero() const { return is_constant() && value() == 0.0; }
  bool is_one() const { return is_constant() && value() == 1.0; }
  bool depends_on_x() const;

  double operator()(double x) const;
  std::string str() const;

private:
  explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& a, int n);
Expr exp(const Expr& a);
Expr tanh(const Expr& a);
Expr blend(const Expr& a);

Expr parse_expr(const std::string& text);

inline constexpr int kMaxDerivativeOrder = 12;

// n-th symbolic derivative; throws std::invalid_argument above max_order.
Expr derivative(const Expr& e, int n = 1, int max_order = kMaxDerivativeOrder);

// Taylor coefficients e^{(j)}(x0)/j!, j = 0..order, by truncated power series
// arithmetic. Independent of derivative(); used where many orders are needed.
std::vector<double> taylor_coefficients(const Expr& e, double x0, int order);

// Flat postfix program for fast repeated evaluation.
class CompiledExpr {
public:
  CompiledExpr() = default;
  explicit CompiledExpr(const Expr& e);
  double operator()(double x) const;

private:
  struct Ins {
    Op op;
    double c;
    int n;
  };
  std::vector<Ins> code_;
  std::size_t depth_ = 0;
};

}  // namespace crosswidth
