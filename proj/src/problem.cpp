#include "crosswidth/problem.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace crosswidth {

namespace {

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

std::vector<double> grid_points(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

// Roots of f on the grid, each refined inside its sign-change cell.
template <class F, class DF>
std::vector<double> grid_roots(F f, DF df, const std::vector<double>& g) {
  std::vector<double> roots;
  double prev = f(g[0]);
  for (std::size_t i = 1; i < g.size(); ++i) {
    double cur = f(g[i]);
    if ((prev < 0) != (cur < 0)) roots.push_back(refine_root(f, df, g[i - 1], g[i], 1e-10, 5));
    prev = cur;
  }
  return roots;
}

}  // namespace

VanishingOrder vanishing_order(const Expr& e, double x0, int max_order, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("vanishing_order: tol must be positive");
  std::vector<double> c = taylor_coefficients(e, x0, max_order);
  double scale = 0.0;
  for (double v : c) scale += std::abs(v);
  scale = std::max(1.0, scale);
  for (int j = 0; j <= max_order; ++j) {
    double dj = c[j] * factorial(j);
    if (std::abs(dj) > tol * scale) return {j, dj};
  }
  throw std::domain_error("order undetectable");
}

Expr apply_flatten(const Expr& V, const FlattenRecipe& f) {
  if (!(f.width > 0)) throw ValidationError("flatten width must be positive");
  double sigma = f.width / 16.0;
  Expr x = Expr::x();
  Expr s;
  if (f.side == Side::right) {
    double c = f.start + 0.5 * f.width;
    s = blend((x - Expr(c)) / Expr(sigma));
  } else {
    double c = f.start - 0.5 * f.width;
    s = blend((Expr(c) - x) / Expr(sigma));
  }
  return V + (Expr(f.limit) - V) * s;
}

ProblemSpec make_spec(const std::string& V1, const std::string& V2, const std::string& r0,
                      const std::string& r1, double E0, double delta0, double xL, double xR,
                      std::vector<FlattenRecipe> flatten) {
  ProblemSpec s;
  s.V1_text = V1;
  s.V2_text = V2;
  s.r0_text = r0;
  s.r1_text = r1;
  s.V1 = parse_expr(V1);
  s.V2 = parse_expr(V2);
  s.r0 = parse_expr(r0);
  s.r1 = parse_expr(r1);
  s.E0 = E0;
  s.delta0 = delta0;
  s.xL = xL;
  s.xR = xR;
  s.flatten = std::move(flatten);
  return s;
}

ProblemSpec with_r0(const ProblemSpec& spec, const std::string& r0) {
  ProblemSpec s = spec;
  s.r0_text = r0;
  s.r0 = parse_expr(r0);
  return s;
}

ValidatedProblem validate(const ProblemSpec& spec, int grid) {
  if (!std::isfinite(spec.xL) || !std::isfinite(spec.xR) || !(spec.xL < spec.xR))
    throw ValidationError("box must have finite endpoints with xL < xR");
  if (!(spec.delta0 > 0 && spec.delta0 < 1)) throw ValidationError("delta0 must lie in (0, 1)");
  if (!(spec.E0 > 0)) throw ValidationError("E0 must be positive");
  if (spec.xL >= 0 || spec.xR <= 0) throw ValidationError("box must contain the crossing x = 0");

  ValidatedProblem vp;
  vp.spec = spec;
  vp.V1 = spec.V1;
  vp.V2 = spec.V2;
  for (const auto& f : spec.flatten) {
    if (f.which == Channel::V1)
      vp.V1 = apply_flatten(vp.V1, f);
    else
      vp.V2 = apply_flatten(vp.V2, f);
  }
  vp.r0 = spec.r0;
  vp.r1 = spec.r1;

  const double E0 = spec.E0;
  double v10 = vp.V1(0.0), v20 = vp.V2(0.0);
  if (std::abs(v10) > 1e-10 || std::abs(v20) > 1e-10)
    throw ValidationError("crossing value not normalized: V1(0) = " + fmt("%.6g", v10) +
                          ", V2(0) = " + fmt("%.6g", v20) + " (both must be 0)");

  CompiledExpr V1c(vp.V1), V2c(vp.V2), dV1c(derivative(vp.V1)), dV2c(derivative(vp.V2));
  auto g = grid_points(spec.xL, spec.xR, grid);

  auto f1 = [&](double x) { return V1c(x) - E0; };
  auto f2 = [&](double x) { return V2c(x) - E0; };
  auto r1s = grid_roots(f1, dV1c, g);
  if (r1s.size() != 2 || !(f1(spec.xL) > 0) || !(f1(spec.xR) > 0))
    throw ValidationError("V1 - E0 must be positive at both box ends with exactly two zeros a < a'"
                          " (found " + std::to_string(r1s.size()) + " zeros)");
  vp.a = r1s[0];
  vp.a_prime = r1s[1];
  if (!(vp.a < 0 && vp.a_prime > 0))
    throw ValidationError("the well [a, a'] = [" + fmt("%.6g", vp.a) + ", " +
                          fmt("%.6g", vp.a_prime) + "] does not contain the crossing 0");

  auto r2s = grid_roots(f2, dV2c, g);
  if (r2s.size() != 1)
    throw ValidationError("V2 - E0 must have exactly one zero b on the box (found " +
                          std::to_string(r2s.size()) + ")");
  vp.b = r2s[0];
  if (vp.b <= 0) throw ValidationError("b <= 0 (b = " + fmt("%.10g", vp.b) + ")");
  if (!(f2(spec.xL) < 0 && f2(spec.xR) > 0))
    throw ValidationError("(V2 - E0)(x - b) > 0 fails: V2 must be open on the left, closed on the right");
  if (!(vp.b < vp.a_prime))
    throw ValidationError("b >= a' (b = " + fmt("%.10g", vp.b) + ", a' = " +
                          fmt("%.10g", vp.a_prime) + ")");

  // single transverse-in-sign crossing of V1 and V2 at 0
  double dx = g[1] - g[0];
  double dmax = 0.0;
  std::vector<double> D(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    D[i] = V2c(g[i]) - V1c(g[i]);
    dmax = std::max(dmax, std::abs(D[i]));
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(g[i]) <= 4 * dx) continue;
    bool bad = std::abs(D[i]) <= 1e-10 * dmax;
    if (i > 0 && std::abs(g[i - 1]) > 4 * dx && (D[i - 1] < 0) != (D[i] < 0)) bad = true;
    if (bad) throw ValidationError("second crossing of V1=V2 at x=" + fmt("%.6g", g[i]));
  }
  double left = V2c(-5 * dx) - V1c(-5 * dx), right = V2c(5 * dx) - V1c(5 * dx);
  if (!((left < 0 && right > 0) || (left > 0 && right < 0)))
    throw ValidationError("V2 - V1 does not change sign across 0; the well ordering a < 0 < b < a' "
                          "forces an odd contact order");

  CrossingData& c = vp.crossing;
  c.E0 = E0;
  Expr Dexpr = vp.V2 - vp.V1;
  VanishingOrder vo;
  try {
    vo = vanishing_order(Dexpr, 0.0);
  } catch (const std::domain_error&) {
    throw ValidationError("contact order of V2 - V1 at 0 undetectable up to order 12");
  }
  c.m = vo.order;
  if (c.m == 0) throw ValidationError("V1(0) != V2(0)");
  if (c.m % 2 == 0)
    throw ValidationError("contact order m = " + std::to_string(c.m) +
                          " is even although V2 - V1 changes sign");
  auto Dj = taylor_coefficients(Dexpr, 0.0, c.m + 1);
  c.v_m = Dj[c.m] * factorial(c.m);
  c.v_m1 = Dj[c.m + 1] * factorial(c.m + 1);
  c.dV1_0 = derivative(vp.V1)(0.0);
  c.dV2_0 = derivative(vp.V2)(0.0);

  auto identically_zero = [&](const Expr& e) {
    if (e.is_zero()) return true;
    CompiledExpr ec(e);
    for (double x : g)
      if (ec(x) != 0.0) return false;
    return true;
  };
  auto order_of = [&](const Expr& e, const char* name) {
    try {
      return vanishing_order(e, 0.0).order;
    } catch (const std::domain_error&) {
      throw ValidationError(std::string("vanishing order of ") + name + " at 0 undetectable");
    }
  };
  bool z0 = identically_zero(vp.r0), z1 = identically_zero(vp.r1);
  c.coupled = !(z0 && z1);
  if (c.coupled) {
    int k0 = z0 ? 1 << 20 : order_of(vp.r0, "r0");
    int k1 = z1 ? 1 << 20 : order_of(vp.r1, "r1");
    c.k = std::min(k0, k1);
    auto r0j = taylor_coefficients(vp.r0, 0.0, c.k + 1);
    auto r1j = taylor_coefficients(vp.r1, 0.0, c.k + 1);
    c.r_k = r0j[c.k] * factorial(c.k);
    c.r_k1 = r0j[c.k + 1] * factorial(c.k + 1);
    c.r1_k = r1j[c.k] * factorial(c.k);
    c.r1_k1 = r1j[c.k + 1] * factorial(c.k + 1);
    if (c.k >= c.m)
      throw ValidationError("k >= m: interaction vanishing order k = " + std::to_string(c.k) +
                            " is not below the contact order m = " + std::to_string(c.m));
  }

  for (const auto& f : spec.flatten) {
    double lo = f.side == Side::right ? f.start : f.start - f.width;
    double hi = f.side == Side::right ? f.start + f.width : f.start;
    if (hi > vp.a - kFlattenMargin && lo < vp.a_prime + kFlattenMargin)
      throw ValidationError("flatten blend region [" + fmt("%.6g", lo) + ", " + fmt("%.6g", hi) +
                            "] intersects [a - 0.5, a' + 0.5]");
  }
  return vp;
}

// -------------------------------------------------------------------- JSON

ProblemSpec problem_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("problem file is not valid JSON: ") + e.what());
  }
  try {
    auto box = j.at("box");
    if (!box.is_array() || box.size() != 2) throw ValidationError("box must be [xL, xR]");
    std::vector<FlattenRecipe> fl;
    if (j.contains("flatten")) {
      for (const auto& f : j.at("flatten")) {
        FlattenRecipe r;
        std::string side = f.at("side").get<std::string>();
        std::string which = f.at("which").get<std::string>();
        if (side != "left" && side != "right") throw ValidationError("flatten side must be left|right");
        if (which != "V1" && which != "V2") throw ValidationError("flatten which must be V1|V2");
        r.side = side == "left" ? Side::left : Side::right;
        r.which = which == "V1" ? Channel::V1 : Channel::V2;
        r.start = f.at("start").get<double>();
        r.limit = f.at("limit").get<double>();
        r.width = f.at("width").get<double>();
        fl.push_back(r);
      }
    }
    return make_spec(j.at("V1").get<std::string>(), j.at("V2").get<std::string>(),
                     j.at("r0").get<std::string>(), j.value("r1", std::string("0")),
                     j.at("E0").get<double>(), j.at("delta0").get<double>(),
                     box[0].get<double>(), box[1].get<double>(), std::move(fl));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed problem file: ") + e.what());
  } catch (const ParseError& e) {
    throw ValidationError(std::string("bad formula: ") + e.what());
  }
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return problem_from_json_text(ss.str());
}

std::string problem_to_json_text(const ProblemSpec& s) {
  nlohmann::ordered_json j;
  j["V1"] = s.V1_text;
  j["V2"] = s.V2_text;
  j["r0"] = s.r0_text;
  j["r1"] = s.r1_text;
  j["E0"] = s.E0;
  j["delta0"] = s.delta0;
  j["box"] = {s.xL, s.xR};
  auto fl = nlohmann::ordered_json::array();
  for (const auto& f : s.flatten) {
    nlohmann::ordered_json o;
    o["side"] = f.side == Side::left ? "left" : "right";
    o["which"] = f.which == Channel::V1 ? "V1" : "V2";
    o["start"] = f.start;
    o["limit"] = f.limit;
    o["width"] = f.width;
    fl.push_back(o);
  }
  j["flatten"] = fl;
  return j.dump(2);
}

}  // namespace crosswidth
