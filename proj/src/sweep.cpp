#include "crosswidth/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "crosswidth/actions.hpp"
#include "crosswidth/format.hpp"

namespace crosswidth {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

GridPoint make_point(const ValidatedProblem& p, double A0, int n, const Conventions& conv,
                     double min_abs_cos) {
  GridPoint g;
  g.n = n;
  g.h = A0 / ((2.0 * n + 1.0) * std::numbers::pi);
  g.E_bs = p.spec.E0;
  ResonancePrediction pr = predict(p, g.E_bs, g.h, conv);
  if (!pr.has_prediction) {
    g.skip = true;
    g.reason = pr.note;
    return g;
  }
  g.cos_factor = pr.cos_factor;
  if (std::abs(g.cos_factor) < min_abs_cos) {
    g.skip = true;
    g.reason = "near node";
  }
  return g;
}

std::string csv_text(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

std::vector<GridPoint> h_grid_from_n(const ValidatedProblem& p, int n_lo, int n_hi,
                                     Conventions conv, double min_abs_cos) {
  if (n_lo < 0 || n_hi < n_lo) throw std::invalid_argument("bad n range");
  double A0 = action_A(p, p.spec.E0);
  std::vector<GridPoint> out;
  for (int n = n_lo; n <= n_hi; ++n) out.push_back(make_point(p, A0, n, conv, min_abs_cos));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.h > b.h; });
  return out;
}

std::vector<GridPoint> choose_h_grid(const ValidatedProblem& p, int n_points, double h_lo,
                                     double h_hi, Conventions conv, double min_abs_cos) {
  if (n_points < 4) throw std::invalid_argument("n_points must be >= 4");
  if (!(0.02 <= h_lo && h_lo < h_hi && h_hi <= 0.2))
    throw std::invalid_argument("h range must lie inside [0.02, 0.2]");
  double A0 = action_A(p, p.spec.E0);
  const double pi = std::numbers::pi;
  int n_lo = static_cast<int>(std::ceil((A0 / (pi * h_hi) - 1.0) / 2.0));
  int n_hi = static_cast<int>(std::floor((A0 / (pi * h_lo) - 1.0) / 2.0));
  n_lo = std::max(n_lo, 0);
  if (n_hi < n_lo) throw std::invalid_argument("empty feasible set: no Bohr-Sommerfeld h in range");
  std::vector<int> ns;
  int count = n_hi - n_lo + 1;
  if (count <= n_points) {
    for (int n = n_lo; n <= n_hi; ++n) ns.push_back(n);
  } else {
    for (int i = 0; i < n_points; ++i) {
      int n = n_lo + static_cast<int>(std::lround(double(i) * (count - 1) / (n_points - 1)));
      if (ns.empty() || ns.back() != n) ns.push_back(n);
    }
  }
  std::vector<GridPoint> out;
  bool any = false;
  for (int n : ns) {
    out.push_back(make_point(p, A0, n, conv, min_abs_cos));
    any = any || !out.back().skip;
  }
  if (!any) throw std::invalid_argument("empty feasible set");
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.h > b.h; });
  return out;
}

SweepReport run_sweep(const ValidatedProblem& p, const std::vector<GridPoint>& grid,
                      const SweepConfig& cfg) {
  SweepReport rep;
  rep.regime = regime_of(p.crossing);
  for (const GridPoint& g : grid) {
    SweepRow r;
    r.h = g.h;
    r.n = g.n;
    r.E_bs = g.E_bs;
    r.skipped = g.skip;
    r.reason = g.reason;
    ResonancePrediction pr = predict(p, g.E_bs, g.h, cfg.conv);
    r.regime = pr.regime;
    r.power_pred = pr.power_total.value();
    r.D = pr.D;
    r.cos_factor = pr.cos_factor;
    r.im_pred = pr.Im_z;
    if (!pr.has_prediction && !r.skipped) {
      r.skipped = true;
      r.reason = pr.note;
    }
    try {
      ResonanceMeasurement m = find_resonance(p, g.h, g.E_bs, cfg.shooting);
      r.im_meas = m.E.imag();
      r.re_meas = m.E.real();
      if (!m.note.empty() && !r.skipped) {
        r.skipped = true;
        r.reason = m.note;
      }
    } catch (const std::exception& e) {
      r.im_meas = nan;
      r.re_meas = nan;
      r.skipped = true;
      r.reason = std::string("oracle: ") + e.what();
    }
    r.ratio = r.im_pred != 0.0 ? r.im_meas / r.im_pred : nan;
    rep.rows.push_back(r);
  }
  std::stable_sort(rep.rows.begin(), rep.rows.end(),
                   [](const auto& a, const auto& b) { return a.h > b.h; });
  try {
    rep.fit = fit_exponent(rep.rows, cfg.min_decades);
  } catch (const std::exception& e) {
    rep.fit_error = e.what();
  }
  return rep;
}

ExponentFit fit_exponent(const std::vector<SweepRow>& rows, double min_decades) {
  std::vector<double> x, y;
  double hmin = std::numeric_limits<double>::infinity(), hmax = 0.0;
  for (const auto& r : rows) {
    if (r.skipped) continue;
    if (!(r.im_meas < 0) || !(r.D > 0) || !(r.h > 0)) continue;
    x.push_back(std::log(r.h));
    y.push_back(std::log(-r.im_meas / r.D));
    hmin = std::min(hmin, r.h);
    hmax = std::max(hmax, r.h);
  }
  if (x.size() < 4) throw std::invalid_argument("insufficient rows for exponent fit (need >= 4)");
  if (std::log10(hmax / hmin) < min_decades)
    throw std::invalid_argument("rows span less than the required range of h");
  LineFit f = fit_line(x, y);
  ExponentFit e;
  e.p_hat = f.slope;
  e.p_sigma = f.slope_sigma;
  e.C_hat = std::exp(f.intercept);
  e.rows_used = static_cast<int>(x.size());
  return e;
}

std::string sweep_csv(const SweepReport& rep) {
  std::ostringstream o;
  o << kSweepHeader << "\n";
  for (const auto& r : rep.rows) {
    o << num(r.h) << ',' << r.n << ',' << num(r.E_bs) << ',' << regime_name(r.regime) << ','
      << num(r.power_pred) << ',' << num(r.D) << ',' << num(r.cos_factor) << ','
      << num(r.im_pred) << ',' << num(r.im_meas) << ',' << num(r.re_meas) << ','
      << num(r.ratio) << ',' << (r.skipped ? 1 : 0) << ',' << csv_text(r.reason) << "\n";
  }
  return o.str();
}

std::string sweep_svg(const SweepReport& rep) {
  const double W = 640, H = 480, ml = 80, mr = 20, mt = 30, mb = 60;
  double hmin = std::numeric_limits<double>::infinity(), hmax = 0;
  double ymin = std::numeric_limits<double>::infinity(), ymax = 0;
  for (const auto& r : rep.rows) {
    for (double v : {std::abs(r.im_meas), std::abs(r.im_pred)}) {
      if (!(v > 0) || !std::isfinite(v)) continue;
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
    hmin = std::min(hmin, r.h);
    hmax = std::max(hmax, r.h);
  }
  if (!(hmax > 0) || !(ymax > 0)) {
    hmin = 0.01;
    hmax = 0.1;
    ymin = 1e-6;
    ymax = 1e-3;
  }
  double lx0 = std::log10(hmin) - 0.05, lx1 = std::log10(hmax) + 0.05;
  double ly0 = std::log10(ymin) - 0.2, ly1 = std::log10(ymax) + 0.2;
  auto X = [&](double h) { return ml + (std::log10(h) - lx0) / (lx1 - lx0) * (W - ml - mr); };
  auto Y = [&](double v) { return H - mb - (std::log10(v) - ly0) / (ly1 - ly0) * (H - mt - mb); };
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
    << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\""
    << H - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int d = static_cast<int>(std::ceil(ly0)); d <= static_cast<int>(std::floor(ly1)); ++d) {
    double y = Y(std::pow(10.0, d));
    o << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << ml - 5 << "\" y2=\"" << y
      << "\" stroke=\"black\"/><text x=\"" << ml - 8 << "\" y=\"" << y + 4
      << "\" font-size=\"12\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    double lh = lx0 + (lx1 - lx0) * k / 4.0;
    double x = X(std::pow(10.0, lh));
    char lab[32];
    std::snprintf(lab, sizeof lab, "%.3g", std::pow(10.0, lh));
    o << "<line x1=\"" << x << "\" y1=\"" << H - mb << "\" x2=\"" << x << "\" y2=\""
      << H - mb + 5 << "\" stroke=\"black\"/><text x=\"" << x << "\" y=\"" << H - mb + 20
      << "\" font-size=\"12\" text-anchor=\"middle\">" << lab << "</text>\n";
  }
  o << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 15
    << "\" font-size=\"14\" text-anchor=\"middle\">h</text>\n"
    << "<text x=\"20\" y=\"" << (mt + H - mb) / 2 << "\" font-size=\"14\" transform=\"rotate(-90 20 "
    << (mt + H - mb) / 2 << ")\" text-anchor=\"middle\">|Im E|</text>\n";
  if (rep.fit) {
    double lD = 0;
    int nD = 0;
    for (const auto& r : rep.rows)
      if (!r.skipped && r.D > 0) {
        lD += std::log(r.D);
        ++nD;
      }
    double Dg = nD ? std::exp(lD / nD) : 1.0;
    auto f = [&](double h) { return rep.fit->C_hat * Dg * std::pow(h, rep.fit->p_hat); };
    o << "<line x1=\"" << X(hmin) << "\" y1=\"" << Y(f(hmin)) << "\" x2=\"" << X(hmax)
      << "\" y2=\"" << Y(f(hmax)) << "\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n";
    char lab[96];
    std::snprintf(lab, sizeof lab, "fit: p = %.3f +- %.3f", rep.fit->p_hat, rep.fit->p_sigma);
    o << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 18 << "\" font-size=\"13\">" << lab
      << "</text>\n";
  }
  for (const auto& r : rep.rows) {
    double m = std::abs(r.im_meas), pr = std::abs(r.im_pred);
    if (m > 0 && std::isfinite(m))
      o << "<circle cx=\"" << X(r.h) << "\" cy=\"" << Y(m) << "\" r=\"4\" "
        << (r.skipped ? "fill=\"none\" stroke=\"gray\"" : "fill=\"black\"") << "/>\n";
    if (pr > 0 && std::isfinite(pr)) {
      double x = X(r.h), y = Y(pr);
      o << "<path d=\"M" << x - 4 << ' ' << y - 4 << " L" << x + 4 << ' ' << y + 4 << " M"
        << x - 4 << ' ' << y + 4 << " L" << x + 4 << ' ' << y - 4
        << "\" stroke=\"firebrick\"/>\n";
    }
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace crosswidth
