#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crosswidth/actions.hpp"
#include "crosswidth/asymptotics.hpp"
#include "crosswidth/errors.hpp"
#include "crosswidth/format.hpp"
#include "crosswidth/oracle.hpp"
#include "crosswidth/problem.hpp"
#include "crosswidth/stationary_phase.hpp"
#include "crosswidth/sweep.hpp"

using namespace crosswidth;

namespace {

struct Args {
  std::string problem;
  double h = 0, E = 0, h_min = 0, h_max = 0;
  int n = 8;
  std::string method = "shooting";
  std::string svg, out;
  int k = 0, m = 1;
  std::string h_grid = "1e-2,3e-3,1e-3,3e-4,1e-4";
  std::string mu_interp = "shifted", odd_bracket = "taylor", width_norm = "flux";
  std::string a0 = "1 + x/2", phi;
  int grid_n = 1600;
};

Conventions conventions(const Args& a) {
  Conventions c;
  c.odd.mu = a.mu_interp == "verbatim" ? MuInterpretation::verbatim : MuInterpretation::shifted;
  c.odd.bracket = a.odd_bracket == "verbatim" ? BracketForm::verbatim : BracketForm::taylor;
  c.width = a.width_norm == "verbatim" ? WidthNormalization::verbatim : WidthNormalization::flux;
  return c;
}

ValidatedProblem load(const Args& a) { return validate(load_problem(a.problem)); }

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t pos = 0;
    double d = std::stod(tok, &pos);
    if (!(d > 0)) throw CLI::ValidationError("--h-grid", "entries must be positive");
    v.push_back(d);
  }
  if (v.size() < 2) throw CLI::ValidationError("--h-grid", "need at least two values");
  return v;
}

std::string cmd_validate(const Args& a) {
  ValidatedProblem p = load(a);
  const CrossingData& c = p.crossing;
  nlohmann::ordered_json j;
  j["m"] = c.m;
  j["k"] = c.k;
  j["coupled"] = c.coupled;
  j["a"] = p.a;
  j["b"] = p.b;
  j["a_prime"] = p.a_prime;
  j["v_m"] = c.v_m;
  j["v_m1"] = c.v_m1;
  j["r_k"] = c.r_k;
  j["r_k1"] = c.r_k1;
  j["r1_k"] = c.r1_k;
  j["r1_k1"] = c.r1_k1;
  j["dV1_0"] = c.dV1_0;
  j["dV2_0"] = c.dV2_0;
  j["E0"] = c.E0;
  j["regime"] = regime_name(regime_of(c));
  j["width_power"] = width_power(c);
  return j.dump(2) + "\n";
}

std::string cmd_actions(const Args& a) {
  ValidatedProblem p = load(a);
  ActionTable t = action_table(p, a.E);
  std::ostringstream o;
  o << "E,A,dAdE,S,a,b,a_prime\n"
    << num(t.E) << ',' << num(t.A) << ',' << num(t.dAdE) << ',' << num(t.S) << ',' << num(t.a)
    << ',' << num(t.b) << ',' << num(t.a_prime) << "\n";
  return o.str();
}

std::string cmd_bs(const Args& a) {
  ValidatedProblem p = load(a);
  std::ostringstream o;
  o << "n,E\n";
  for (const auto& l : bohr_sommerfeld(p, a.h)) o << l.n << ',' << num(l.E) << "\n";
  return o.str();
}

std::string cmd_predict(const Args& a) {
  ValidatedProblem p = load(a);
  Conventions conv = conventions(a);
  std::ostringstream o;
  o << "n,E_bs,h,regime,power_total,D,cos_factor,Im_z,S,arg_omega,re_omega,im_omega,note\n";
  for (const auto& l : bohr_sommerfeld(p, a.h)) {
    ResonancePrediction r = predict(p, l.E, a.h, conv);
    o << l.n << ',' << num(r.E_bs) << ',' << num(r.h) << ',' << regime_name(r.regime) << ','
      << r.power_total.num << '/' << r.power_total.den << ',' << num(r.D) << ','
      << num(r.cos_factor) << ',' << num(r.Im_z) << ',' << num(r.S) << ',' << num(r.arg_omega)
      << ',' << num(r.omega.real()) << ',' << num(r.omega.imag()) << ',' << r.note << "\n";
  }
  return o.str();
}

std::string cmd_oracle(const Args& a) {
  ValidatedProblem p = load(a);
  std::vector<ResonanceMeasurement> ms;
  if (a.method == "cap") {
    ms = cap_resonances(p, a.h, a.grid_n);
  } else {
    for (const auto& l : bohr_sommerfeld(p, a.h)) ms.push_back(find_resonance(p, a.h, l.E));
  }
  std::ostringstream o;
  o << "method,h,re_E,im_E,residual,iterations,note\n";
  for (const auto& m : ms)
    o << method_name(m.method) << ',' << num(m.h) << ',' << num(m.E.real()) << ','
      << num(m.E.imag()) << ',' << num(m.residual) << ',' << m.iterations << ',' << m.note
      << "\n";
  return o.str();
}

std::string cmd_sweep(const Args& a, std::string& svg) {
  ValidatedProblem p = load(a);
  SweepConfig cfg;
  cfg.conv = conventions(a);
  auto grid = choose_h_grid(p, a.n, a.h_min, a.h_max, cfg.conv);
  SweepReport r = run_sweep(p, grid, cfg);
  if (!a.svg.empty()) svg = sweep_svg(r);
  if (r.fit) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "p_hat = %.6f +- %.6f over %d rows\n", r.fit->p_hat,
                  r.fit->p_sigma, r.fit->rows_used);
    std::cerr << buf;
  } else {
    std::cerr << "no exponent fit: " << r.fit_error << "\n";
  }
  return sweep_csv(r);
}

std::string cmd_sp_check(const Args& a) {
  if (a.k < 0 || a.m < 1 || a.k >= a.m) throw CLI::ValidationError("--k/--m", "need 0 <= k < m");
  std::vector<double> hs = parse_list(a.h_grid);
  for (double h : hs)
    if (h < 1e-6) throw CLI::ValidationError("--h-grid", "h below the 1e-6 floor");
  std::string phi_text = a.phi;
  if (phi_text.empty()) {
    phi_text = "x^" + std::to_string(a.m + 1) + "/" + std::to_string(a.m + 1) + " + 0.1*x^" +
               std::to_string(a.m + 2);
  }
  Expr a0 = parse_expr(a.a0), phi = parse_expr(phi_text);
  RemainderReport rep = remainder_order(a0, phi, a.k, a.m, hs);
  std::ostringstream o;
  o << "k,m,h,re_num,im_num,re_lead,im_lead,abs_resid,fitted_slope\n";
  for (const auto& r : rep.rows)
    o << a.k << ',' << a.m << ',' << num(r.h) << ',' << num(r.I_num.real()) << ','
      << num(r.I_num.imag()) << ',' << num(r.I_lead.real()) << ',' << num(r.I_lead.imag()) << ','
      << num(r.resid) << ',' << num(rep.slope) << "\n";
  return o.str();
}

void emit(const Args& a, const std::string& cmd, const std::string& data,
          const std::string& config) {
  if (a.out.empty()) {
    std::cout << data;
    return;
  }
  std::ofstream f(a.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + a.out);
  f << data;
  nlohmann::ordered_json meta;
  meta["tool"] = "crosswidth";
  meta["version"] = kVersion;
  meta["command"] = cmd;
  meta["config_hash"] = hex64(fnv1a(config));
  meta["data_hash"] = hex64(fnv1a(data));
  std::ofstream m(a.out + ".meta.json", std::ios::binary);
  m << meta.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonance widths at tangential crossings: asymptotics and numerical oracles"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1, 1);
  Args a;

  auto add_conv = [&](CLI::App* s) {
    s->add_option("--mu-interpretation", a.mu_interp)
        ->check(CLI::IsMember({"shifted", "verbatim"}));
    s->add_option("--odd-bracket", a.odd_bracket)->check(CLI::IsMember({"taylor", "verbatim"}));
    s->add_option("--width-normalization", a.width_norm)
        ->check(CLI::IsMember({"flux", "verbatim"}));
  };
  auto add_common = [&](CLI::App* s) {
    s->add_option("problem", a.problem, "problem JSON")->required()->check(CLI::ExistingFile);
    s->add_option("--out", a.out, "write data here (plus a .meta.json)");
  };

  auto* v = app.add_subcommand("validate", "check assumptions, print crossing data");
  add_common(v);
  auto* ac = app.add_subcommand("actions", "A, A', S at an energy");
  add_common(ac);
  ac->add_option("--E", a.E)->required();
  auto* bs = app.add_subcommand("bs", "Bohr-Sommerfeld energies");
  add_common(bs);
  bs->add_option("--h", a.h)->required()->check(CLI::PositiveNumber);
  auto* pr = app.add_subcommand("predict", "leading-order widths at the BS energies");
  add_common(pr);
  pr->add_option("--h", a.h)->required()->check(CLI::PositiveNumber);
  add_conv(pr);
  auto* orc = app.add_subcommand("oracle", "numerical resonances near the BS energies");
  add_common(orc);
  orc->add_option("--h", a.h)->required()->check(CLI::PositiveNumber);
  orc->add_option("--method", a.method)->check(CLI::IsMember({"shooting", "cap"}));
  orc->add_option("--grid-n", a.grid_n);
  auto* sw = app.add_subcommand("sweep", "predicted vs measured widths over an h grid");
  add_common(sw);
  sw->add_option("--h-min", a.h_min)->required();
  sw->add_option("--h-max", a.h_max)->required();
  sw->add_option("--n", a.n);
  sw->add_option("--svg", a.svg);
  add_conv(sw);
  auto* sp = app.add_subcommand("sp-check", "brute-force vs leading stationary phase");
  sp->add_option("--k", a.k);
  sp->add_option("--m", a.m);
  sp->add_option("--h-grid", a.h_grid, "comma list");
  sp->add_option("--a0", a.a0);
  sp->add_option("--phi", a.phi);
  sp->add_option("--out", a.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  std::string config;
  for (int i = 1; i < argc; ++i) config += std::string(argv[i]) + '\x1f';
  if (!a.problem.empty()) {
    std::ifstream f(a.problem, std::ios::binary);
    config += std::string(std::istreambuf_iterator<char>(f), {});
  }

  CLI::App* s = app.get_subcommands().front();
  const std::string cmd = s->get_name();
  try {
    std::string data, svg;
    if (cmd == "validate") data = cmd_validate(a);
    else if (cmd == "actions") data = cmd_actions(a);
    else if (cmd == "bs") data = cmd_bs(a);
    else if (cmd == "predict") data = cmd_predict(a);
    else if (cmd == "oracle") data = cmd_oracle(a);
    else if (cmd == "sweep") data = cmd_sweep(a, svg);
    else data = cmd_sp_check(a);
    emit(a, cmd, data, config);
    if (!svg.empty()) {
      std::ofstream f(a.svg, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + a.svg);
      f << svg;
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation failed: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "not converged: " << e.what() << "\n";
    return 3;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::out_of_range& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
