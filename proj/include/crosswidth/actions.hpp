#pragma once

#include <vector>

#include "crosswidth/problem.hpp"

namespace crosswidth {

struct TurningPoints {
  double a, b, a_prime;
};

struct ActionTable {
  double E, A, dAdE, S, a, b, a_prime;
};

struct BohrSommerfeldLevel {
  int n;
  double E;
};

// V1(a) = V1(a') = E and V2(b) = E, found by scanning outward from the
// crossing. Requires |E - E0| <= delta0.
TurningPoints turning_points(const ValidatedProblem& p, double E);

// A(E) = 2 int_a^a' sqrt(E - V1).
double action_A(const ValidatedProblem& p, double E);
// A'(E) = int_a^a' dx / sqrt(E - V1).
double dAdE(const ValidatedProblem& p, double E);
// S(E) = 2 (int_0^a' sqrt(E - V1) - int_0^b sqrt(E - V2)).
double action_S(const ValidatedProblem& p, double E);

ActionTable action_table(const ValidatedProblem& p, double E);

// All E in [E0 - h delta0, E0 + h delta0] with A(E) = (2n+1) pi h.
std::vector<BohrSommerfeldLevel> bohr_sommerfeld(const ValidatedProblem& p, double h);

}  // namespace crosswidth
