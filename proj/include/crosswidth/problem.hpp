#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crosswidth/errors.hpp"
#include "crosswidth/expr.hpp"

namespace crosswidth {

enum class Side { left, right };
enum class Channel { V1, V2 };

// Replace V by the constant `limit` beyond `start`, through a tanh step of the
// given width. For side=right the step occupies [start, start+width]; for
// side=left it occupies [start-width, start].
struct FlattenRecipe {
  Side side = Side::right;
  Channel which = Channel::V1;
  double start = 0.0;
  double limit = 0.0;
  double width = 0.2;
};

struct ProblemSpec {
  std::string V1_text, V2_text, r0_text, r1_text = "0";
  Expr V1, V2, r0, r1;  // raw, before flattening
  double E0 = 1.0;
  double delta0 = 0.5;
  double xL = -8.0, xR = 8.0;
  std::vector<FlattenRecipe> flatten;
};

struct CrossingData {
  int m = 1;
  double v_m = 0.0, v_m1 = 0.0;
  bool coupled = true;  // false when r0 and r1 vanish identically
  int k = 0;
  double r_k = 0.0, r_k1 = 0.0;    // r0^{(k)}(0), r0^{(k+1)}(0)
  double r1_k = 0.0, r1_k1 = 0.0;  // r1^{(k)}(0), r1^{(k+1)}(0)
  double dV1_0 = 0.0, dV2_0 = 0.0;
  double E0 = 1.0;
};

struct ValidatedProblem {
  ProblemSpec spec;
  Expr V1, V2, r0, r1;  // effective (flattened) expressions
  CrossingData crossing;
  double a = 0.0, b = 0.0, a_prime = 0.0;
};

struct VanishingOrder {
  int order;
  double value;
};

inline constexpr double kFlattenMargin = 0.5;
inline constexpr int kValidationGrid = 4096;

// Smallest j with |e^{(j)}(x0)| > tol * max(1, sum_i |e^{(i)}(x0)|/i!).
// Throws std::domain_error("order undetectable") if none up to max_order.
VanishingOrder vanishing_order(const Expr& e, double x0, int max_order = kMaxDerivativeOrder,
                               double tol = 1e-9);

Expr apply_flatten(const Expr& V, const FlattenRecipe& f);

ProblemSpec make_spec(const std::string& V1, const std::string& V2, const std::string& r0,
                      const std::string& r1, double E0, double delta0, double xL, double xR,
                      std::vector<FlattenRecipe> flatten = {});

ValidatedProblem validate(const ProblemSpec& spec, int grid = kValidationGrid);

ProblemSpec problem_from_json_text(const std::string& text);
ProblemSpec load_problem(const std::string& path);
std::string problem_to_json_text(const ProblemSpec& spec);

// Same problem with r0 replaced (texts kept consistent).
ProblemSpec with_r0(const ProblemSpec& spec, const std::string& r0);

// Root of f in [lo, hi] with a sign change: bisection to width tol, then
// Newton polish with df.
template <class F, class DF>
double refine_root(F f, DF df, double lo, double hi, double tol = 1e-10, int polish = 5);

}  // namespace crosswidth

#include "crosswidth/detail/refine_root.hpp"
