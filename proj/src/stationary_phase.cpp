#include "crosswidth/stationary_phase.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace crosswidth {

namespace {

constexpr double pi = std::numbers::pi;

struct GL8 {
  std::array<double, 8> x, w;
  GL8() {
    using G = boost::math::quadrature::gauss<double, 8>;
    const auto& ab = G::abscissa();
    const auto& wt = G::weights();
    for (int i = 0; i < 4; ++i) {
      x[i] = -ab[3 - i];
      w[i] = wt[3 - i];
      x[7 - i] = ab[3 - i];
      w[7 - i] = wt[3 - i];
    }
  }
};

const GL8& gl8() {
  static const GL8 g;
  return g;
}

// Neumaier-compensated complex accumulator.
struct Sum {
  double re = 0, im = 0, cre = 0, cim = 0;
  static void add1(double& s, double& c, double v) {
    double t = s + v;
    if (std::abs(s) >= std::abs(v))
      c += (s - t) + v;
    else
      c += (v - t) + s;
    s = t;
  }
  void add(cplx v) {
    add1(re, cre, v.real());
    add1(im, cim, v.imag());
  }
  cplx value() const { return {re + cre, im + cim}; }
};

std::vector<cplx> panels(const std::function<cplx(double)>& a,
                         const std::function<double(double)>& phi, double alpha,
                         const std::vector<double>& xs, double h, double panel_phase,
                         double max_panel) {
  const GL8& g = gl8();
  std::vector<cplx> out;
  out.reserve(xs.size());
  Sum s;
  double y = alpha, py = phi(alpha);
  double w = max_panel;
  for (double target : xs) {
    while (y < target) {
      w = std::min({w * 1.5, max_panel, target - y});
      double y1, p1;
      for (;;) {
        y1 = y + w;
        if (target - y1 < 1e-14 * (1.0 + std::abs(target))) y1 = target;
        double pm = phi(0.5 * (y + y1));
        p1 = phi(y1);
        double d = (std::abs(pm - py) + std::abs(p1 - pm)) / h;
        if (d <= panel_phase) break;
        w *= std::max(0.1, 0.9 * panel_phase / d);
      }
      double c = 0.5 * (y + y1), r = 0.5 * (y1 - y);
      cplx acc = 0.0;
      for (int i = 0; i < 8; ++i) {
        double t = c + r * g.x[i];
        double ph = phi(t) / h;
        acc += g.w[i] * a(t) * cplx(std::cos(ph), std::sin(ph));
      }
      s.add(acc * r);
      y = y1;
      py = p1;
    }
    out.push_back(s.value());
  }
  return out;
}

}  // namespace

cplx mu(int k, int m, double theta) {
  double s = (k % 2 == 0) ? 1.0 : -1.0;
  double e = ((m + 1) % 2 == 0) ? 1.0 : -1.0;
  return 0.5 * (std::polar(1.0, theta) + s * std::polar(1.0, e * theta));
}

double bump(double y, double R) {
  double t = y / R;
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

PhaseData phase_data(const Expr& a, const Expr& phi, int k, int m, double h) {
  auto pc = taylor_coefficients(phi, 0.0, m + 2);
  auto ac = taylor_coefficients(a, 0.0, k + 1);
  for (int j = 1; j <= m; ++j)
    if (std::abs(pc[j]) > 1e-12 * (1.0 + std::abs(pc[m + 1])))
      throw std::invalid_argument("phase derivative does not vanish to order m at 0");
  PhaseData d;
  d.k = k;
  d.m = m;
  d.phi_0 = pc[0];
  d.phi1_0 = (m + 1) * pc[m + 1];
  d.phi1p_0 = (m + 2) * pc[m + 2];
  d.a0_0 = ac[k];
  d.a0p_0 = ac[k + 1];
  d.h = h;
  if (d.phi1_0 == 0.0) throw std::invalid_argument("phi1(0) must be nonzero");
  return d;
}

cplx leading_general(const PhaseData& d) {
  double eps = d.phi1_0 > 0 ? 1.0 : -1.0;
  double p = double(d.k + 1) / (d.m + 1);
  cplx muv = mu(d.k, d.m, eps * (d.k + 1) * pi / (2.0 * (d.m + 1)));
  if (muv == 0.0) return 0.0;
  double mag = 2.0 / (d.m + 1) * std::tgamma(p) *
               std::pow((d.m + 1) / std::abs(d.phi1_0), p) * std::pow(d.h, p);
  return std::polar(1.0, d.phi_0 / d.h) * muv * mag * d.a0_0;
}

cplx leading_odd(const PhaseData& d, OddConvention conv) {
  double eps = d.phi1_0 > 0 ? 1.0 : -1.0;
  double p = double(d.k + 2) / (d.m + 1);
  int kk = conv.mu == MuInterpretation::shifted ? d.k + 1 : d.k;
  cplx muv = mu(kk, d.m, eps * (d.k + 2) * pi / (2.0 * (d.m + 1)));
  cplx bracket;
  if (conv.bracket == BracketForm::taylor)
    bracket = d.a0p_0 - double(d.k + 2) * d.phi1p_0 / ((d.m + 2) * d.phi1_0) * d.a0_0;
  else
    bracket = d.a0p_0 - 2.0 * (2 * d.k + 1) * d.phi1p_0 / ((d.m + 2) * std::abs(d.phi1_0)) * d.a0_0;
  double mag = 2.0 / (d.m + 1) * std::tgamma(p) *
               std::pow((d.m + 1) / std::abs(d.phi1_0), p) * std::pow(d.h, p);
  return std::polar(1.0, d.phi_0 / d.h) * muv * mag * bracket;
}

std::vector<cplx> oscillatory_integrals_fn(const std::function<cplx(double)>& a,
                                           const std::function<double(double)>& phi,
                                           double alpha, const std::vector<double>& xs, double h,
                                           const OscillatoryOptions& opt) {
  if (!(h >= opt.h_min)) throw std::invalid_argument("h below the brute-force floor");
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (!(xs[i] >= alpha) || (i && xs[i] < xs[i - 1]))
      throw std::invalid_argument("sample points must be ascending and >= alpha");
  auto coarse = panels(a, phi, alpha, xs, h, opt.panel_phase, opt.max_panel);
  if (!opt.refine) return coarse;
  auto fine = panels(a, phi, alpha, xs, h, 0.5 * opt.panel_phase, 0.5 * opt.max_panel);
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::abs(fine[i] - coarse[i]) > opt.rel_tol * (1.0 + std::abs(fine[i])))
      throw ConvergenceError("quadrature not converged");
  return fine;
}

std::vector<cplx> oscillatory_integrals(const Expr& a, const Expr& phi, double alpha,
                                        const std::vector<double>& xs, double h,
                                        const OscillatoryOptions& opt) {
  CompiledExpr ac(a), pc(phi);
  return oscillatory_integrals_fn([&](double y) { return cplx(ac(y)); },
                                  [&](double y) { return pc(y); }, alpha, xs, h, opt);
}

cplx oscillatory_integral(const Expr& a, const Expr& phi, double alpha, double x, double h,
                          const OscillatoryOptions& opt) {
  if (x < alpha) return -oscillatory_integral(a, phi, x, alpha, h, opt);
  return oscillatory_integrals(a, phi, alpha, {x}, h, opt)[0];
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line needs >= 2 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - f.intercept - f.slope * x[i];
    rss += r * r;
  }
  f.slope_sigma = n > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
  return f;
}

std::vector<double> geometric_grid(double hi, double lo, int n) {
  if (n < 2 || !(hi > 0) || !(lo > 0)) throw std::invalid_argument("geometric_grid");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = hi * std::pow(lo / hi, double(i) / (n - 1));
  return g;
}

RemainderReport remainder_order(const Expr& a0, const Expr& phi, int k, int m,
                                const std::vector<double>& h_grid, double R,
                                const OscillatoryOptions& opt) {
  if (h_grid.size() < 5) throw std::invalid_argument("remainder_order needs >= 5 h values");
  Expr x = Expr::x();
  Expr a = pow(x, k) * a0;
  CompiledExpr ac(a), pc(phi);
  RemainderReport rep;
  std::vector<double> lx, ly;
  for (double h : h_grid) {
    PhaseData d = phase_data(a, phi, k, m, h);
    cplx lead = leading_general(d);
    cplx I = oscillatory_integrals_fn([&](double y) { return cplx(ac(y) * bump(y, R)); },
                                      [&](double y) { return pc(y); }, -R, {R}, h, opt)[0];
    RemainderRow row{h, I, lead, std::abs(I - lead)};
    rep.rows.push_back(row);
    if (row.resid > 1e-13) {
      lx.push_back(std::log(h));
      ly.push_back(std::log(row.resid));
    }
  }
  if (lx.size() < 2) {
    rep.noise_floor = true;
    return rep;
  }
  LineFit f = fit_line(lx, ly);
  rep.slope = f.slope;
  rep.intercept = f.intercept;
  return rep;
}

BoundReport check_bound(const Expr& a0, const Expr& phi, int k, int m, double alpha, double beta,
                        const std::vector<double>& h_grid, int n_samples,
                        const OscillatoryOptions& opt) {
  if (!(alpha < 0 && beta > 0)) throw std::invalid_argument("interval must contain 0");
  Expr x = Expr::x();
  CompiledExpr a0c(a0), da0c(derivative(a0)), pc(phi), xk(pow(x, k));
  double a00 = a0(0.0);
  double n0 = 0, n1 = 0;
  for (int i = 0; i <= 4000; ++i) {
    double y = alpha + (beta - alpha) * i / 4000.0;
    n0 = std::max(n0, std::abs(a0c(y)));
    n1 = std::max(n1, std::abs(da0c(y)));
  }
  std::vector<double> xs(n_samples);
  for (int j = 0; j < n_samples; ++j) xs[j] = alpha + (beta - alpha) * (j + 1) / n_samples;
  double p1 = double(k + 1) / (m + 1), p2 = double(k + 2) / (m + 1);
  bool logcase = (m == k + 1);
  BoundReport rep;
  std::vector<double> lx, ly;
  for (double h : h_grid) {
    auto full = oscillatory_integrals_fn([&](double y) { return cplx(xk(y) * a0c(y)); },
                                         [&](double y) { return pc(y); }, alpha, xs, h, opt);
    auto part = oscillatory_integrals_fn(
        [&](double y) { return cplx(xk(y) * (a0c(y) - a00)); }, [&](double y) { return pc(y); },
        alpha, xs, h, opt);
    double sup = 0, rsup = 0;
    for (int j = 0; j < n_samples; ++j) {
      sup = std::max(sup, std::abs(full[j]));
      rsup = std::max(rsup, std::abs(part[j]));
    }
    double L = std::log(1.0 / h);
    double bound = std::pow(h, p1) * n0 + std::pow(h, p2) * n1 * (logcase ? L : 1.0);
    rep.h.push_back(h);
    rep.sup.push_back(sup);
    rep.C.push_back(sup / bound);
    rep.resid.push_back(rsup);
    lx.push_back(std::log(L));
    ly.push_back(std::log(rsup / std::pow(h, p2)));
  }
  rep.C_min = *std::min_element(rep.C.begin(), rep.C.end());
  rep.C_max = *std::max_element(rep.C.begin(), rep.C.end());
  rep.stable = rep.C_max <= 2.0 * rep.C_min;
  if (lx.size() >= 2) {
    rep.log_exponent = fit_line(lx, ly).slope;
    rep.log_flag = std::abs(rep.log_exponent - 1.0) <= 0.2;
  }
  return rep;
}

}  // namespace crosswidth
