#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crosswidth/asymptotics.hpp"
#include "crosswidth/oracle.hpp"

namespace crosswidth {

struct GridPoint {
  double h = 0.0;
  int n = 0;
  double E_bs = 0.0;
  double cos_factor = 0.0;
  bool skip = false;
  std::string reason;
};

// h = A(E0)/((2n+1) pi) for integers n with h in [h_lo, h_hi], so E0 itself is
// a Bohr-Sommerfeld energy. At most n_points values, spread evenly in n;
// points with |cos| < min_abs_cos are kept but marked "near node".
std::vector<GridPoint> choose_h_grid(const ValidatedProblem& p, int n_points, double h_lo,
                                     double h_hi, Conventions conv = {},
                                     double min_abs_cos = 0.3);

// Every candidate n between n_lo and n_hi (inclusive).
std::vector<GridPoint> h_grid_from_n(const ValidatedProblem& p, int n_lo, int n_hi,
                                     Conventions conv = {}, double min_abs_cos = 0.3);

struct SweepRow {
  double h = 0.0;
  int n = 0;
  double E_bs = 0.0;
  Regime regime = Regime::general;
  double power_pred = 0.0;
  double D = 0.0;
  double cos_factor = 0.0;
  double im_pred = 0.0;
  double im_meas = 0.0;
  double re_meas = 0.0;
  double ratio = 0.0;
  bool skipped = false;
  std::string reason;
};

struct ExponentFit {
  double p_hat = 0.0, p_sigma = 0.0, C_hat = 0.0;
  int rows_used = 0;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // h descending
  std::optional<ExponentFit> fit;
  std::string fit_error;
  Regime regime = Regime::general;
};

struct SweepConfig {
  ShootingConfig shooting;
  Conventions conv;
  double min_decades = 0.5;
};

SweepReport run_sweep(const ValidatedProblem& p, const std::vector<GridPoint>& grid,
                      const SweepConfig& cfg = {});

// OLS of log|im_meas / D| on log h over unskipped rows with im_meas < 0.
// Requires >= 4 rows spanning >= min_decades decades of h.
ExponentFit fit_exponent(const std::vector<SweepRow>& rows, double min_decades = 0.5);

inline constexpr const char* kSweepHeader =
    "h,n,E_bs,regime,power_pred,D,cos_factor,im_pred,im_meas,re_meas,ratio,skipped,reason";

std::string sweep_csv(const SweepReport& r);
std::string sweep_svg(const SweepReport& r);

}  // namespace crosswidth
