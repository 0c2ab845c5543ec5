#pragma once

#include <array>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "crosswidth/problem.hpp"

namespace crosswidth {

using cplx = std::complex<double>;

enum class Method { shooting, cap };
const char* method_name(Method m);

struct ShootingConfig {
  double x_left = -6.0, x_right = 6.0;
  double ode_tol = 1e-12;
  double newton_tol = 1e-8;  // on the normalized determinant
  int max_newton = 40;
  // Exterior states are rescaled by powers of two (exactly, so the returned
  // determinant is unchanged) whenever their norm leaves
  // [1/renorm_threshold, renorm_threshold].
  double renorm_threshold = 1e6;
  double step_tol = 1e-13;  // Newton step, relative to max(1, |E|)
};

struct ResonanceMeasurement {
  cplx E;
  double residual = 0.0;
  Method method = Method::shooting;
  double h = 0.0;
  int iterations = 0;
  std::string note;
};

// Columns are states (u1, u2, u1', u2').
struct EdgeBasis {
  std::array<std::array<cplx, 4>, 2> y;
};

// Right edge: the two decaying channel solutions. Left edge: decaying channel
// 1 and outgoing (leftward) channel 2. Eigen-channels of V - E + h r0 sigma_x
// at the edge, log-derivatives from the WKB form with the -lambda'/(4 lambda)
// correction.
EdgeBasis boundary_basis(const ValidatedProblem& p, cplx E, double h, Side side,
                         const ShootingConfig& cfg = {});

struct ShootingValue {
  cplx det;           // holomorphic in E
  double normalized;  // |det| / (|W_left| |W_right|), in [0, 1]
};

// 4x4 matching determinant at x = 0 of the two left and two right admissible
// solutions. The pair from each side is propagated as its exterior product
// (six Plucker coordinates) with the E-independent damping
// exp(-int (sqrt(V1-E0)_+ + sqrt(V2-E0)_+)/h), positive parts smoothed.
ShootingValue shooting_determinant(const ValidatedProblem& p, cplx E, double h,
                                   const ShootingConfig& cfg = {});

// Newton iteration on shooting_determinant from E_init with a complex central
// difference derivative (step 1e-2 h^{power_total}).
ResonanceMeasurement find_resonance(const ValidatedProblem& p, double h, double E_init,
                                    const ShootingConfig& cfg = {});

struct CapSpec {
  int order = 3;        // W(x) = (distance / ramp length)^order
  double margin = 1.0;  // ramp starts at a - margin and a' + margin
  std::vector<double> eta_grid = {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0};
  int max_iter = 60;
  double tol = 1e-12;
};

// Eigenvalues of the discretized P - i eta W near each target energy (by
// default the Bohr-Sommerfeld energies), one per target, each taken at the
// eta of minimal |dE/dlog eta|. residual holds that minimal rate.
std::vector<ResonanceMeasurement> cap_resonances(const ValidatedProblem& p, double h, int grid_n,
                                                 const CapSpec& cap = {},
                                                 std::vector<double> targets = {});

// Total power of h in the width for this crossing (2 when uncoupled).
double width_power(const CrossingData& c);

}  // namespace crosswidth
