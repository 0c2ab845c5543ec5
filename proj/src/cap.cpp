#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "crosswidth/actions.hpp"
#include "crosswidth/errors.hpp"
#include "crosswidth/oracle.hpp"

namespace crosswidth {

namespace {

using SpMat = Eigen::SparseMatrix<cplx>;
using Vec = Eigen::VectorXcd;

// Fourth-order stencils on offsets -2..2.
constexpr double kD2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
constexpr double kD1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};

SpMat assemble(const ValidatedProblem& p, double h, int N, double eta, const CapSpec& cap) {
  double xL = p.spec.xL, xR = p.spec.xR;
  double dx = (xR - xL) / (N + 1);
  double cl = p.a - cap.margin, cr = p.a_prime + cap.margin;
  CompiledExpr V1(p.V1), V2(p.V2), r0(p.r0), r1(p.r1), dr1(derivative(p.r1));
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(static_cast<std::size_t>(N) * 24);
  double kin = -h * h / (dx * dx);
  for (int i = 0; i < N; ++i) {
    double x = xL + (i + 1) * dx;
    double W = 0.0;
    if (x < cl) W = std::pow((cl - x) / (cl - xL), cap.order);
    if (x > cr) W = std::pow((x - cr) / (xR - cr), cap.order);
    cplx absorb(0.0, -eta * W);
    double vr0 = r0(x), vr1 = r1(x), vdr1 = dr1(x);
    for (int o = -2; o <= 2; ++o) {
      int j = i + o;
      if (j < 0 || j >= N) continue;
      double k2 = kin * kD2[o + 2];
      t.emplace_back(2 * i, 2 * j, k2);
      t.emplace_back(2 * i + 1, 2 * j + 1, k2);
      if (vr1 != 0.0 && kD1[o + 2] != 0.0) {
        double d1 = kD1[o + 2] / dx;
        t.emplace_back(2 * i, 2 * j + 1, h * h * vr1 * d1);
        t.emplace_back(2 * i + 1, 2 * j, -h * h * vr1 * d1);
      }
    }
    t.emplace_back(2 * i, 2 * i, V1(x) + absorb);
    t.emplace_back(2 * i + 1, 2 * i + 1, V2(x) + absorb);
    t.emplace_back(2 * i, 2 * i + 1, h * vr0);
    t.emplace_back(2 * i + 1, 2 * i, h * vr0 - h * h * vdr1);
  }
  SpMat H(2 * N, 2 * N);
  H.setFromTriplets(t.begin(), t.end());
  H.makeCompressed();
  return H;
}

// Shift-invert iterations, then Rayleigh-quotient refinement of the shift.
cplx eigen_near(const SpMat& H, cplx sigma, Vec& v, const CapSpec& cap) {
  const int n = static_cast<int>(H.rows());
  SpMat I(n, n);
  I.setIdentity();
  cplx lam = sigma, shift = sigma;
  for (int outer = 0; outer < 8; ++outer) {
    Eigen::SparseLU<SpMat> lu;
    lu.compute(H - shift * I);
    if (lu.info() != Eigen::Success) throw ConvergenceError("CAP factorization failed");
    cplx prev = lam;
    for (int it = 0; it < cap.max_iter; ++it) {
      Vec w = lu.solve(v);
      v = w / w.norm();
      cplx nl = v.dot(H * v);  // v^H H v with |v| = 1
      bool done = std::abs(nl - lam) <= cap.tol * std::max(1.0, std::abs(nl));
      lam = nl;
      if (done || it >= 4) break;
    }
    Vec r = H * v - lam * v;
    if (r.norm() <= 1e-10 * std::max(1.0, std::abs(lam))) return lam;
    if (std::abs(lam - prev) <= cap.tol * std::max(1.0, std::abs(lam)) && outer > 0) return lam;
    shift = lam;
  }
  Vec r = H * v - lam * v;
  if (r.norm() > 1e-7 * std::max(1.0, std::abs(lam)))
    throw ConvergenceError("CAP eigen-iteration did not converge");
  return lam;
}

}  // namespace

std::vector<ResonanceMeasurement> cap_resonances(const ValidatedProblem& p, double h, int grid_n,
                                                 const CapSpec& cap, std::vector<double> targets) {
  if (grid_n < 800) throw std::invalid_argument("grid_n must be >= 800");
  if (cap.eta_grid.size() < 3) throw std::invalid_argument("eta grid needs >= 3 values");
  if (targets.empty())
    for (const auto& l : bohr_sommerfeld(p, h)) targets.push_back(l.E);
  if (targets.empty()) targets.push_back(p.spec.E0);
  std::vector<SpMat> Hs;
  for (double eta : cap.eta_grid) Hs.push_back(assemble(p, h, grid_n, eta, cap));
  std::vector<ResonanceMeasurement> out;
  for (double E_t : targets) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Vec v(2 * grid_n);
    for (int i = 0; i < v.size(); ++i) v[i] = cplx(U(rng), U(rng));
    v /= v.norm();
    std::vector<cplx> Es;
    cplx sigma = E_t;
    for (const auto& H : Hs) {
      cplx e = eigen_near(H, sigma, v, cap);
      Es.push_back(e);
      sigma = e;
    }
    std::size_t best = 0;
    double best_rate = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < Es.size(); ++i) {
      double dl = std::log(cap.eta_grid[i + 1]) - std::log(cap.eta_grid[i - 1]);
      double rate = std::abs(Es[i + 1] - Es[i - 1]) / dl;
      if (rate < best_rate) {
        best_rate = rate;
        best = i;
      }
    }
    if (!std::isfinite(best_rate))
      throw ConvergenceError("no eta-stationary eigenvalue found within the search window");
    ResonanceMeasurement m;
    m.E = Es[best];
    m.residual = best_rate;
    m.method = Method::cap;
    m.h = h;
    m.iterations = static_cast<int>(best);
    char buf[64];
    std::snprintf(buf, sizeof buf, "eta=%.6g", cap.eta_grid[best]);
    m.note = buf;
    out.push_back(m);
  }
  return out;
}

}  // namespace crosswidth
