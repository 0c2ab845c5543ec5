#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "crosswidth/errors.hpp"
#include "crosswidth/expr.hpp"

namespace crosswidth {

using cplx = std::complex<double>;

// Which parity index the odd-odd correction term uses in its mu factor.
// shifted: mu_{k+1,m}; verbatim: mu_{k,m} (identically zero for odd k, m).
enum class MuInterpretation { shifted, verbatim };

// Coefficient of phi1'(0) a0(0) in the odd-odd correction bracket.
// taylor: (k+2)/((m+2) phi1(0)), from expanding the phase to order m+2;
// verbatim: 2(2k+1)/((m+2)|phi1(0)|), the alternative reading.
enum class BracketForm { taylor, verbatim };

struct OddConvention {
  MuInterpretation mu = MuInterpretation::shifted;
  BracketForm bracket = BracketForm::taylor;
};

// mu_{k,m}(theta) = (e^{i theta} + (-1)^k e^{i (-1)^{m+1} theta}) / 2
cplx mu(int k, int m, double theta);

// Local data of int a(y) e^{i phi(y)/h} dy at a degenerate stationary point
// y = 0, with phi'(y) = y^m phi1(y) and a(y) = y^k a0(y).
struct PhaseData {
  int k = 0;
  int m = 1;
  double phi1_0 = 1.0;
  double phi1p_0 = 0.0;
  cplx a0_0 = 1.0;
  cplx a0p_0 = 0.0;
  double phi_0 = 0.0;
  double h = 1e-3;
};

// Reads phi1(0), phi1'(0), a0(0), a0'(0), phi(0) from Taylor coefficients.
PhaseData phase_data(const Expr& a, const Expr& phi, int k, int m, double h);

cplx leading_general(const PhaseData& d);
cplx leading_odd(const PhaseData& d, OddConvention conv = {});

struct OscillatoryOptions {
  double h_min = 1e-6;
  double panel_phase = std::numbers::pi / 4;  // max phase change per panel
  double max_panel = 0.05;                    // max panel width (amplitude scale)
  double rel_tol = 1e-10;                     // refinement agreement target
  bool refine = true;
};

// int_alpha^{x_j} a(y) e^{i phi(y)/h} dy for every x_j in xs (ascending,
// all > alpha), by panels spanning at most panel_phase of phase with 8-point
// Gauss-Legendre per panel. Checked against a run with halved panels.
std::vector<cplx> oscillatory_integrals_fn(const std::function<cplx(double)>& a,
                                           const std::function<double(double)>& phi,
                                           double alpha, const std::vector<double>& xs, double h,
                                           const OscillatoryOptions& opt = {});

cplx oscillatory_integral(const Expr& a, const Expr& phi, double alpha, double x, double h,
                          const OscillatoryOptions& opt = {});

std::vector<cplx> oscillatory_integrals(const Expr& a, const Expr& phi, double alpha,
                                        const std::vector<double>& xs, double h,
                                        const OscillatoryOptions& opt = {});

// exp(1 - 1/(1 - (y/R)^2)) for |y| < R, else 0.
double bump(double y, double R);

struct RemainderRow {
  double h;
  cplx I_num, I_lead;
  double resid;
};

struct RemainderReport {
  std::vector<RemainderRow> rows;
  double slope = 0.0;
  double intercept = 0.0;
  bool noise_floor = false;
};

// Integrand y^k a0(y) bump(y/R) e^{i phi/h} over [-R, R]; leading term from
// leading_general. Slope of log|I_num - I_lead| against log h.
RemainderReport remainder_order(const Expr& a0, const Expr& phi, int k, int m,
                                const std::vector<double>& h_grid, double R = 1.0,
                                const OscillatoryOptions& opt = {});

struct BoundReport {
  std::vector<double> h;
  std::vector<double> sup;    // sup_x |int_alpha^x a e^{i phi/h}|
  std::vector<double> C;      // sup divided by the bound's h-dependence
  std::vector<double> resid;  // sup_x of the part driven by a0 - a0(0)
  double C_min = 0.0, C_max = 0.0;
  bool stable = false;        // C_max / C_min <= 2
  // resid / h^{(k+2)/(m+1)} ~ log(1/h)^log_exponent, fitted
  double log_exponent = 0.0;
  bool log_flag = false;      // |log_exponent - 1| <= 0.2
};

// Checks |int_alpha^x y^k a0 e^{i phi/h}| <= C (h^{(k+1)/(m+1)} |a0|_inf
// + h^{(k+2)/(m+1)} |a0'|_inf log(1/h)^{[m = k+1]}) over n_samples values of x
// spread over (alpha, beta].
BoundReport check_bound(const Expr& a0, const Expr& phi, int k, int m, double alpha, double beta,
                        const std::vector<double>& h_grid, int n_samples = 64,
                        const OscillatoryOptions& opt = {});

struct LineFit {
  double slope, intercept, slope_sigma;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

std::vector<double> geometric_grid(double hi, double lo, int n);

}  // namespace crosswidth
