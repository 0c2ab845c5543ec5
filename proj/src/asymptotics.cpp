#include "crosswidth/asymptotics.hpp"

#include <cmath>
#include <numeric>
#include <numbers>
#include <stdexcept>

#include "crosswidth/actions.hpp"

namespace crosswidth {

Rational reduced(int num, int den) {
  int g = std::gcd(num, den);
  if (g == 0) return {0, 1};
  if (den < 0) g = -g;
  return {num / g, den / g};
}

namespace {

constexpr double pi = std::numbers::pi;

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

double sgn(double v) { return v > 0 ? 1.0 : -1.0; }

// Common factor of the general-regime coefficient, without r^{(k)}(0).
cplx omega_unit(const CrossingData& c) {
  int k = c.k, m = c.m;
  double p = double(k + 1) / (m + 1);
  cplx muv = mu(k, m, sgn(c.v_m) * (k + 1) * pi / (2.0 * (m + 1)));
  if (muv == 0.0) return 0.0;
  double mag = std::tgamma(p) / ((m + 1) * factorial(k)) *
               std::pow(c.E0, double(k - m) / (2.0 * (m + 1))) *
               std::pow(2.0 * factorial(m + 1) / std::abs(c.v_m), p);
  return muv * mag;
}

cplx omega_odd_unit(const CrossingData& c, OddConvention conv) {
  int k = c.k, m = c.m;
  double p = double(k + 2) / (m + 1);
  int kk = conv.mu == MuInterpretation::shifted ? k + 1 : k;
  cplx muv = mu(kk, m, sgn(c.v_m) * (k + 2) * pi / (2.0 * (m + 1)));
  double mag = std::tgamma(p) / ((m + 1) * factorial(k + 1)) *
               std::pow(c.E0, double(k + 1 - m) / (2.0 * (m + 1))) *
               std::pow(2.0 * factorial(m + 1) / std::abs(c.v_m), p);
  return muv * mag;
}

void require_odd(const CrossingData& c) {
  if (!(c.k % 2 == 1 && c.m % 2 == 1 && c.k + 1 < c.m))
    throw std::invalid_argument("omega_odd requires k, m odd and k+1 < m");
}

}  // namespace

const char* regime_name(Regime r) { return r == Regime::odd ? "odd" : "general"; }

cplx omega(const CrossingData& c) {
  if (!c.coupled) return 0.0;
  return omega_unit(c) * c.r_k;
}

double nu(const CrossingData& c, BracketForm form) {
  int k = c.k, m = c.m;
  double s = c.dV1_0 + c.dV2_0;
  if (form == BracketForm::verbatim)
    return s / 4.0 * (k + 1 - 2.0 * (2 * k + 1) * sgn(c.v_m) / (m + 2)) -
           (2 * k + 1) * c.v_m1 / ((m + 1) * (m + 2) * std::abs(c.v_m));
  return (k + 1) * (s * (m - k) / (4.0 * c.E0 * (m + 2)) -
                    (k + 2) * c.v_m1 / ((m + 1.0) * (m + 2) * c.v_m));
}

cplx omega_odd(const CrossingData& c, OddConvention conv) {
  require_odd(c);
  if (!c.coupled) return 0.0;
  return omega_odd_unit(c, conv) * (nu(c, conv.bracket) * c.r_k + c.r_k1);
}

cplx omega_with_r1(const CrossingData& c) {
  if (!c.coupled) return 0.0;
  cplx Uk(c.r_k, -c.r1_k * std::sqrt(c.E0));
  return omega_unit(c) * Uk;
}

cplx omega_odd_with_r1(const CrossingData& c, OddConvention conv) {
  require_odd(c);
  if (!c.coupled) return 0.0;
  double sE = std::sqrt(c.E0);
  cplx Uk(c.r_k, -c.r1_k * sE);
  cplx Uk1(c.r_k1, -c.r1_k1 * sE);
  double n = nu(c, conv.bracket);
  cplx bracket;
  if (conv.bracket == BracketForm::taylor)
    // (k+1)-th derivative of r0 - i r1 sqrt(E0 - V1) at 0
    bracket = n * Uk + Uk1 + cplx(0.0, (c.k + 1) * c.r1_k * c.dV1_0 / (2.0 * sE));
  else
    bracket = n * Uk - cplx(0.0, 1.0) * (Uk1 + (c.k + 1) / (2.0 * sE) * c.r1_k);
  return omega_odd_unit(c, conv) * bracket;
}

Regime regime_of(const CrossingData& c) {
  return (c.k % 2 == 1 && c.m % 2 == 1 && c.k + 1 < c.m) ? Regime::odd : Regime::general;
}

Eigen::Matrix2cd transfer_minus(const Eigen::Matrix2cd& Tp) { return Tp.conjugate().inverse(); }

TransferAsymptotic transfer_matrices(const CrossingData& c, double h, Conventions conv) {
  if (!(h > 0)) throw std::invalid_argument("h must be positive");
  TransferAsymptotic t;
  t.regime = regime_of(c);
  if (t.regime == Regime::odd) {
    t.power = reduced(c.k + 2, c.m + 1);
    t.omega = omega_odd_with_r1(c, conv.odd);
  } else {
    t.power = reduced(c.k + 1, c.m + 1);
    t.omega = omega_with_r1(c);
  }
  double hp = std::pow(h, t.power.value());
  Eigen::Matrix2cd N;
  N << 0.0, std::conj(t.omega), t.omega, 0.0;
  t.T_plus = Eigen::Matrix2cd::Identity() - cplx(0.0, 1.0) * hp * N;
  t.T_minus = transfer_minus(t.T_plus);
  return t;
}

ResonancePrediction predict(const ValidatedProblem& p, double E_bs, double h, Conventions conv) {
  const CrossingData& c = p.crossing;
  ResonancePrediction r;
  r.E_bs = E_bs;
  r.h = h;
  r.s_exponent = std::min(1.0 / 3.0, 1.0 / (c.m + 1));
  TransferAsymptotic t = transfer_matrices(c, h, conv);
  r.regime = t.regime;
  r.omega = t.omega;
  r.power_total = reduced(t.power.den + 2 * t.power.num, t.power.den);
  r.S = action_S(p, E_bs);
  if (std::abs(t.omega) == 0.0) {
    r.has_prediction = false;
    r.D = 0.0;
    r.cos_factor = 0.0;
    r.Im_z = 0.0;
    if (!c.coupled)
      r.note = "no leading-order prediction (interaction vanishes)";
    else if (c.k % 2 == 1 && c.m % 2 == 1)
      r.note = "no leading-order prediction (k, m odd with k+1 = m; upper-bound order only)";
    else
      r.note = "no leading-order prediction";
    return r;
  }
  r.arg_omega = std::arg(t.omega);
  double Ap = dAdE(p, p.spec.E0);
  double norm = conv.width == WidthNormalization::flux ? 2.0 / Ap
                                                       : 2.0 * std::sqrt(2.0) / std::sqrt(Ap);
  r.cos_factor = std::cos(r.arg_omega - r.S / (2.0 * h));
  r.D = norm * std::norm(t.omega) * r.cos_factor * r.cos_factor;
  r.Im_z = -r.D * std::pow(h, r.power_total.value());
  if (std::abs(r.cos_factor) < 1e-8) r.note = "subleading regime / double line of resonances";
  return r;
}

}  // namespace crosswidth
