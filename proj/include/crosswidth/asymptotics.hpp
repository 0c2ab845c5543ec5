#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "crosswidth/problem.hpp"
#include "crosswidth/stationary_phase.hpp"

namespace crosswidth {

enum class Regime { general, odd };
const char* regime_name(Regime r);

// flux: D = 2|w|^2/A'(E0) cos^2(...), the normalization that matches the
// golden-rule flux through the open channel; verbatim: 2 sqrt(2)|w|^2/sqrt(A'(E0)).
enum class WidthNormalization { flux, verbatim };

struct Conventions {
  OddConvention odd;  // mu index and bracket (the bracket also selects nu)
  WidthNormalization width = WidthNormalization::flux;
};

struct Rational {
  int num = 0, den = 1;
  double value() const { return double(num) / den; }
};
Rational reduced(int num, int den);

struct TransferAsymptotic {
  Rational power;
  cplx omega;
  Eigen::Matrix2cd T_plus, T_minus;
  Regime regime = Regime::general;
};

struct ResonancePrediction {
  double E_bs = 0.0, h = 0.0;
  Regime regime = Regime::general;
  Rational power_total;
  double D = 0.0;
  double cos_factor = 0.0;
  double Im_z = 0.0;
  double S = 0.0;
  double arg_omega = 0.0;
  cplx omega;
  double s_exponent = 0.0;  // remainder exponent min(1/3, 1/(m+1))
  bool has_prediction = true;
  std::string note;
};

cplx omega(const CrossingData& c);
double nu(const CrossingData& c, BracketForm form = BracketForm::taylor);
cplx omega_odd(const CrossingData& c, OddConvention conv = {});

// Interaction U = r0 + i h r1 D_x: the symbol r0 - i r1 xi at (0, sqrt(E0))
// replaces r0 in the amplitude.
cplx omega_with_r1(const CrossingData& c);
cplx omega_odd_with_r1(const CrossingData& c, OddConvention conv = {});

// regime = odd iff k, m odd and k+1 < m
Regime regime_of(const CrossingData& c);

// T- from T+ through T-(E) = (conj(T+(conj E)))^{-1}.
Eigen::Matrix2cd transfer_minus(const Eigen::Matrix2cd& T_plus_at_conj_E);

TransferAsymptotic transfer_matrices(const CrossingData& c, double h, Conventions conv = {});

ResonancePrediction predict(const ValidatedProblem& p, double E_bs, double h,
                            Conventions conv = {});

}  // namespace crosswidth
