#include <cmath>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

#include "crosswidth/errors.hpp"
#include "crosswidth/oracle.hpp"

namespace crosswidth {

namespace {

namespace ode = boost::numeric::odeint;
using State = std::array<double, 12>;
using Plucker = std::array<cplx, 6>;

// (0,1) (0,2) (0,3) (1,2) (1,3) (2,3)
constexpr int kPair[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

struct Coefficients {
  CompiledExpr V1, V2, r0, r1, dr1, dV1, dV2, dr0;
  explicit Coefficients(const ValidatedProblem& p)
      : V1(p.V1), V2(p.V2), r0(p.r0), r1(p.r1), dr1(derivative(p.r1)), dV1(derivative(p.V1)),
        dV2(derivative(p.V2)), dr0(derivative(p.r0)) {}
};

// sqrt of a smoothed positive part
double soft_root(double u, double scale) {
  double k = 0.05 * scale;
  return std::sqrt(0.5 * (u + std::hypot(u, k)));
}

// y' = A y with A = [[0, I], [Q, B]].
struct System {
  const Coefficients& c;
  cplx E;
  double h, E_ref, sign;

  void matrix(double x, cplx A[4][4], double& lam) const {
    double v1 = c.V1(x), v2 = c.V2(x), r0 = c.r0(x), r1 = c.r1(x), dr1 = c.dr1(x);
    double h2 = h * h;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) A[i][j] = 0.0;
    A[0][2] = 1.0;
    A[1][3] = 1.0;
    A[2][0] = (v1 - E) / h2;
    A[2][1] = r0 / h;
    A[2][3] = r1;
    A[3][0] = (r0 - h * dr1) / h;
    A[3][1] = (v2 - E) / h2;
    A[3][2] = -r1;
    lam = (soft_root(v1 - E_ref, E_ref) + soft_root(v2 - E_ref, E_ref)) / h;
  }

  void operator()(const State& s, State& ds, double x) const {
    cplx A[4][4];
    double lam;
    matrix(x, A, lam);
    cplx W[4][4] = {};
    for (int k = 0; k < 6; ++k) {
      cplx v(s[2 * k], s[2 * k + 1]);
      W[kPair[k][0]][kPair[k][1]] = v;
      W[kPair[k][1]][kPair[k][0]] = -v;
    }
    for (int k = 0; k < 6; ++k) {
      int i = kPair[k][0], j = kPair[k][1];
      cplx acc = 0.0;
      for (int l = 0; l < 4; ++l) acc += A[i][l] * W[l][j] + W[i][l] * A[j][l];
      acc -= sign * lam * W[i][j];
      ds[2 * k] = acc.real();
      ds[2 * k + 1] = acc.imag();
    }
  }
};

cplx csqrt_principal(cplx z) { return std::sqrt(z); }

double norm_of(const State& s) {
  double n = 0;
  for (double v : s) n += v * v;
  return std::sqrt(n);
}

struct Propagated {
  Plucker w;
  int exp2 = 0;
};

Propagated propagate(const System& sys, const EdgeBasis& eb, double x0, double x1,
                     const ShootingConfig& cfg) {
  State s{};
  for (int k = 0; k < 6; ++k) {
    int i = kPair[k][0], j = kPair[k][1];
    cplx v = eb.y[0][i] * eb.y[1][j] - eb.y[0][j] * eb.y[1][i];
    s[2 * k] = v.real();
    s[2 * k + 1] = v.imag();
  }
  auto stepper = ode::make_controlled<ode::runge_kutta_fehlberg78<State>>(cfg.ode_tol, cfg.ode_tol);
  double dir = x1 > x0 ? 1.0 : -1.0;
  double x = x0, dx = dir * 1e-3 * sys.h;
  int e2 = 0;
  long fails = 0, steps = 0;
  while (dir * (x1 - x) > 0) {
    if (dir * (x + dx - x1) > 0) dx = x1 - x;
    auto res = stepper.try_step(sys, s, x, dx);
    if (res == ode::fail) {
      if (++fails > 100000 || std::abs(dx) < 1e-14) throw ConvergenceError("ODE step failure");
      continue;
    }
    if (++steps > 5000000) throw ConvergenceError("ODE step failure: too many steps");
    double n = norm_of(s);
    if (!std::isfinite(n)) throw ConvergenceError("overflow despite renormalization");
    if (n > cfg.renorm_threshold || n < 1.0 / cfg.renorm_threshold) {
      int e;
      std::frexp(n, &e);
      for (double& v : s) v = std::ldexp(v, -e);
      e2 += e;
    }
  }
  Propagated out;
  for (int k = 0; k < 6; ++k) out.w[k] = cplx(s[2 * k], s[2 * k + 1]);
  out.exp2 = e2;
  return out;
}

}  // namespace

const char* method_name(Method m) { return m == Method::cap ? "cap" : "shooting"; }

double width_power(const CrossingData& c) {
  if (!c.coupled) return 2.0;
  bool odd = c.k % 2 == 1 && c.m % 2 == 1 && c.k + 1 < c.m;
  return 1.0 + 2.0 * (c.k + (odd ? 2 : 1)) / (c.m + 1.0);
}

EdgeBasis boundary_basis(const ValidatedProblem& p, cplx E, double h, Side side,
                         const ShootingConfig& cfg) {
  Coefficients c(p);
  double x = side == Side::left ? cfg.x_left : cfg.x_right;
  double v1 = c.V1(x), v2 = c.V2(x), r0 = c.r0(x), dr1 = c.dr1(x);
  cplx m11 = v1 - E, m22 = v2 - E;
  cplx m12 = h * r0, m21 = h * (r0 - h * dr1);
  double dm = v1 - v2;
  cplx disc = std::sqrt(0.25 * dm * dm + m12 * m21);
  double sg = dm >= 0 ? 1.0 : -1.0;
  cplx lam1 = 0.5 * (m11 + m22) + sg * disc;  // channel-1-like
  cplx lam2 = 0.5 * (m11 + m22) - sg * disc;
  std::array<cplx, 2> e1 = {1.0, m21 / (lam1 - m22)};
  std::array<cplx, 2> e2 = {m12 / (lam2 - m11), 1.0};
  if (m12 == 0.0 && m21 == 0.0) {
    e1 = {1.0, 0.0};
    e2 = {0.0, 1.0};
  }
  double d1 = c.dV1(x), d2 = c.dV2(x), dr0 = c.dr0(x);
  auto dlam = [&](const std::array<cplx, 2>& e) {
    cplx num = e[0] * e[0] * d1 + e[1] * e[1] * d2 + 2.0 * h * dr0 * e[0] * e[1];
    return num / (e[0] * e[0] + e[1] * e[1]);
  };
  auto state = [&](const std::array<cplx, 2>& e, cplx L) {
    return std::array<cplx, 4>{e[0], e[1], L * e[0], L * e[1]};
  };
  EdgeBasis out;
  if (side == Side::right) {
    if (!(v1 > E.real() && v2 > E.real()))
      throw ValidationError("channel openness mismatch: both channels must be closed at the right edge");
    cplx L1 = -std::sqrt(lam1) / h - dlam(e1) / (4.0 * lam1);
    cplx L2 = -std::sqrt(lam2) / h - dlam(e2) / (4.0 * lam2);
    out.y = {state(e1, L1), state(e2, L2)};
  } else {
    if (!(v1 > E.real() && v2 < E.real()))
      throw ValidationError("channel openness mismatch: left edge needs channel 1 closed, channel 2 open");
    cplx L1 = std::sqrt(lam1) / h - dlam(e1) / (4.0 * lam1);
    cplx q = csqrt_principal(-lam2);
    cplx L2 = cplx(0.0, -1.0) * q / h - dlam(e2) / (4.0 * lam2);
    out.y = {state(e1, L1), state(e2, L2)};
  }
  return out;
}

ShootingValue shooting_determinant(const ValidatedProblem& p, cplx E, double h,
                                   const ShootingConfig& cfg) {
  if (!(cfg.x_left < p.a - 1.0 && cfg.x_right > p.a_prime + 1.0))
    throw std::invalid_argument("shooting box must satisfy x_left < a-1 and x_right > a'+1");
  if (cfg.x_left < p.spec.xL || cfg.x_right > p.spec.xR)
    throw std::invalid_argument("shooting box must lie inside the problem box");
  Coefficients c(p);
  EdgeBasis L = boundary_basis(p, E, h, Side::left, cfg);
  EdgeBasis R = boundary_basis(p, E, h, Side::right, cfg);
  System sl{c, E, h, p.spec.E0, +1.0};
  System sr{c, E, h, p.spec.E0, -1.0};
  Propagated a = propagate(sl, L, cfg.x_left, 0.0, cfg);
  Propagated b = propagate(sr, R, cfg.x_right, 0.0, cfg);
  const Plucker& u = a.w;
  const Plucker& v = b.w;
  cplx det = u[0] * v[5] - u[1] * v[4] + u[2] * v[3] + u[3] * v[2] - u[4] * v[1] + u[5] * v[0];
  double nu = 0, nv = 0;
  for (int k = 0; k < 6; ++k) {
    nu += std::norm(u[k]);
    nv += std::norm(v[k]);
  }
  ShootingValue out;
  out.normalized = std::abs(det) / std::sqrt(nu * nv);
  int e = a.exp2 + b.exp2;
  out.det = cplx(std::ldexp(det.real(), e), std::ldexp(det.imag(), e));
  if (!std::isfinite(out.det.real()) || !std::isfinite(out.det.imag()))
    throw ConvergenceError("overflow despite renormalization");
  return out;
}

ResonanceMeasurement find_resonance(const ValidatedProblem& p, double h, double E_init,
                                    const ShootingConfig& cfg) {
  double ptot = width_power(p.crossing);
  double delta = 1e-2 * std::pow(h, ptot);
  cplx E = E_init;
  ResonanceMeasurement m;
  m.method = Method::shooting;
  m.h = h;
  for (int it = 1; it <= cfg.max_newton; ++it) {
    ShootingValue f = shooting_determinant(p, E, h, cfg);
    cplx fp = (shooting_determinant(p, E + delta, h, cfg).det -
               shooting_determinant(p, E - delta, h, cfg).det) /
              (2.0 * delta);
    cplx step = f.det / fp;
    E -= step;
    m.iterations = it;
    if (std::abs(step) <= cfg.step_tol * std::max(1.0, std::abs(E))) {
      ShootingValue g = shooting_determinant(p, E, h, cfg);
      m.E = E;
      m.residual = g.normalized;
      if (g.normalized > cfg.newton_tol) break;
      if (E.imag() > 1e-12)
        throw ConvergenceError("converged to a point with Im E > 0");
      if (std::abs(E - E_init) > 10.0 * std::pow(h, ptot)) m.note = "wrong basin";
      return m;
    }
  }
  throw ConvergenceError("Newton iteration did not converge from E = " + std::to_string(E_init));
}

}  // namespace crosswidth
