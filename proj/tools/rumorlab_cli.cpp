// rumorlab: command-line front end for the truth/rumor diffusion laboratory.
//
// Subcommands: steady, equilibrium, trajectory, abm, region-map, sweep,
// partisan-check.  Exit codes: 0 success, 1 validation failure, 2 solver
// non-convergence, 3 oracle disagreement.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rumor/rumor.hpp"

namespace {

using namespace rumor;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;
constexpr int kExitDisagreement = 3;

struct CommonOpts {
  RunSetup setup;
  std::string config_path;
  CLI::Option* o_k = nullptr;
  CLI::Option* o_nu = nullptr;
  CLI::Option* o_delta = nullptr;
  CLI::Option* o_beta = nullptr;
  CLI::Option* o_y = nullptr;
  CLI::Option* o_c = nullptr;
  CLI::Option* o_gamma = nullptr;
  CLI::Option* o_xbar = nullptr;
  CLI::Option* o_fn = nullptr;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "flat key=value configuration file");
    o_k = app->add_option("--k", setup.params.k, "meetings per instant");
    o_nu = app->add_option("--nu", setup.params.nu, "transmission rate per meeting");
    o_delta = app->add_option("--delta", setup.params.delta, "death rate");
    o_beta = app->add_option("--beta", setup.params.beta, "homophily");
    o_y = app->add_option("--y", setup.params.y, "prior strength");
    o_c = app->add_option("--c", setup.params.c, "marginal verification cost");
    o_gamma = app->add_option("--gamma", setup.params.gamma, "partisan fraction");
    o_xbar = app->add_option("--xbar", setup.xbar, "verification cap");
    o_fn = app->add_option("--fn", setup.fn, "verification family (exp_cap)");
  }

  // Config file values apply first; explicitly passed flags win.
  RunSetup resolve() const {
    RunSetup out = setup;
    if (!config_path.empty()) {
      RunSetup from_file = load_config(config_path);
      RunSetup merged = from_file;
      if (o_k->count()) merged.params.k = setup.params.k;
      if (o_nu->count()) merged.params.nu = setup.params.nu;
      if (o_delta->count()) merged.params.delta = setup.params.delta;
      if (o_beta->count()) merged.params.beta = setup.params.beta;
      if (o_y->count()) merged.params.y = setup.params.y;
      if (o_c->count()) merged.params.c = setup.params.c;
      if (o_gamma->count()) merged.params.gamma = setup.params.gamma;
      if (o_xbar->count()) merged.xbar = setup.xbar;
      if (o_fn->count()) merged.fn = setup.fn;
      out = merged;
    }
    out.params.validate();
    return out;
  }
};

std::unique_ptr<std::ofstream> open_out(const std::string& path, std::ostream*& os) {
  if (path.empty() || path == "-") {
    os = &std::cout;
    return nullptr;
  }
  auto file = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*file) throw std::invalid_argument("cannot open output file: " + path);
  os = file.get();
  return file;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

struct SweepAxis {
  std::string name;
  double lo = 0.0, hi = 0.0;
  int n = 0;
};

SweepAxis parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  const auto c1 = text.find(':', eq);
  const auto c2 = text.find(':', c1 + 1);
  if (eq == std::string::npos || c1 == std::string::npos || c2 == std::string::npos)
    throw std::invalid_argument("sweep spec must look like name=lo:hi:n");
  SweepAxis ax;
  ax.name = text.substr(0, eq);
  ax.lo = std::stod(text.substr(eq + 1, c1 - eq - 1));
  ax.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  ax.n = std::stoi(text.substr(c2 + 1));
  if (ax.n < 2) throw std::invalid_argument("sweep resolution must be >= 2");
  return ax;
}

void apply_axis(RunSetup& s, const std::string& name, double v) {
  if (name == "k") s.params.k = static_cast<int>(std::lround(v));
  else if (name == "nu") s.params.nu = v;
  else if (name == "delta") s.params.delta = v;
  else if (name == "beta") s.params.beta = v;
  else if (name == "y") s.params.y = v;
  else if (name == "c") s.params.c = v;
  else if (name == "gamma") s.params.gamma = v;
  else if (name == "xbar") s.xbar = v;
  else throw std::invalid_argument("unknown sweep parameter: " + name);
}

int cmd_steady(const CommonOpts& common, double l, double h, const std::string& out_path) {
  const RunSetup setup = common.resolve();
  const SteadyState ss = setup.params.gamma > 0.0
                             ? partisan_steady_prevalence(l, h, setup.params)
                             : steady_prevalence(l, h, setup.params);
  const StabilityReport st = stability_classify(setup.params, l, h);
  std::ostream* os = nullptr;
  auto file = open_out(out_path, os);
  *os << "l,h,beta,gamma,lambda_k,iota,rho0,rho1,rho00,rho01,rho11,ttr,stable_regime\n";
  *os << format_double(l) << ',' << format_double(h) << ','
      << format_double(setup.params.beta) << ',' << format_double(setup.params.gamma) << ','
      << format_double(setup.params.lambda_k()) << ',' << format_double(ss.iota) << ','
      << format_double(ss.rho0) << ',' << format_double(ss.rho1) << ','
      << format_double(ss.state.rho00) << ',' << format_double(ss.state.rho01) << ','
      << format_double(ss.state.rho11) << ',' << format_double(ss.ttr) << ','
      << (st.kind == StabilityKind::ZeroStable ? "zero" : "positive") << '\n';
  return kExitOk;
}

int cmd_equilibrium(const CommonOpts& common, const std::string& out_path) {
  const RunSetup setup = common.resolve();
  const VerificationFunction fn = setup.technology();
  const EquilibriumSolution sol = setup.params.gamma > 0.0
                                      ? solve_partisan_equilibrium(setup.params, fn)
                                      : solve_equilibrium(setup.params, fn);
  std::ostream* os = nullptr;
  auto file = open_out(out_path, os);
  for (const auto& fp : sol.fixed_points)
    *os << "# fixed_point l=" << format_double(fp[0]) << " h=" << format_double(fp[1])
        << "\n";
  if (sol.gamma > 0.0)
    *os << "# individual rates l=" << format_double(sol.l_individual)
        << " h=" << format_double(sol.h_individual)
        << (sol.cap_conflict ? " (exceeds cap)" : "") << "\n";
  if (!sol.note.empty()) *os << "# note: " << sol.note << "\n";
  *os << solution_csv_header() << '\n'
      << solution_csv_row(sol, setup.params, setup.xbar) << '\n';
  return kExitOk;
}

int cmd_trajectory(const CommonOpts& common, double l, double h, double horizon, double dt,
                   double seed00, double seed01, double seed11,
                   const std::string& out_path) {
  const RunSetup setup = common.resolve();
  const PrevalenceState s0{seed00, seed01, seed11};
  const auto res = integrate(s0, setup.params, l, h, horizon, dt);
  std::ostream* os = nullptr;
  auto file = open_out(out_path, os);
  *os << "# converged=" << (res.converged ? 1 : 0) << " t_end=" << format_double(res.t_end)
      << " clip_events=" << res.clip_events << "\n";
  write_trajectory_csv(*os, res);
  return kExitOk;
}

int cmd_abm(const CommonOpts& common, double l, double h, int n, double dt, double horizon,
            const std::string& seeds_text, const std::string& out_path,
            const std::string& summary_path) {
  const RunSetup setup = common.resolve();
  std::vector<uint64_t> seeds;
  for (double v : parse_list(seeds_text)) seeds.push_back(static_cast<uint64_t>(v));
  if (seeds.empty()) throw std::invalid_argument("need at least one seed");
  const auto runs = run_abm_ensemble(setup.params, l, h, n, dt, horizon, seeds);
  for (const auto& r : runs)
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  {
    std::ostream* os = nullptr;
    auto file = open_out(out_path, os);
    write_abm_csv(*os, runs, setup.params, n);
  }
  if (!summary_path.empty()) {
    std::ostream* os = nullptr;
    auto file = open_out(summary_path, os);
    write_abm_summary_csv(*os, summarize(runs));
  }
  return kExitOk;
}

int cmd_region_map(const CommonOpts& common, double cmin, double cmax, double ymin,
                   double ymax, int nc, int ny, const std::string& out_path,
                   const std::string& ppm_path) {
  const RunSetup setup = common.resolve();
  if (setup.fn != "exp_cap")
    throw std::invalid_argument("region-map supports only the exp_cap family");
  if (nc < 2 || ny < 2) throw std::invalid_argument("grid resolutions must be >= 2");
  const VerificationFunction fn = setup.technology();

  struct Cell {
    RegionClassification rc;
    double sl = 0.0, sh = 0.0;
    EquilibriumKind skind = EquilibriumKind::NoVerification;
    bool agree = true;
    bool boundary = false;
  };
  std::vector<Cell> cells(static_cast<size_t>(nc) * ny);

  parallel_for(cells.size(), [&](size_t idx) {
    const int iy = static_cast<int>(idx) / nc;
    const int ic = static_cast<int>(idx) % nc;
    const double c = cmin + (cmax - cmin) * ic / (nc - 1);
    const double y = ymin + (ymax - ymin) * iy / (ny - 1);
    Cell& cell = cells[idx];
    cell.rc = classify_and_solve(c, y, setup.params.beta, setup.xbar);
    ModelParams q = setup.params;
    q.c = c;
    q.y = y;
    const EquilibriumSolution sol = solve_equilibrium(q, fn);
    cell.sl = sol.l;
    cell.sh = sol.h;
    cell.skind = sol.kind;
    cell.agree = std::abs(cell.rc.l - sol.l) <= 1e-6 && std::abs(cell.rc.h - sol.h) <= 1e-6;
    const ExpThresholds& t = cell.rc.thresholds;
    const double band = 1e-3;
    auto near_c = [&](double thr) { return std::isfinite(thr) && std::abs(c - thr) < band; };
    auto near_y = [&](double thr) { return std::isfinite(thr) && std::abs(y - thr) < band; };
    cell.boundary = near_c(t.c_bar) || near_c(t.c1) || near_c(t.c3) || near_c(t.c4) ||
                    near_c(t.c_l_on) || near_y(t.ybar2) || near_y(t.ybar3) ||
                    near_y(t.ybar4) || near_y(t.ybar5) || near_y(t.ybar6) ||
                    near_y(setup.params.beta);
  });

  long comparable = 0, disagree = 0;
  {
    std::ostream* os = nullptr;
    auto file = open_out(out_path, os);
    *os << "c,y,beta,xbar,case,l,h,ttr,solver_l,solver_h,solver_kind,agree\n";
    for (int iy = 0; iy < ny; ++iy) {
      for (int ic = 0; ic < nc; ++ic) {
        const Cell& cell = cells[static_cast<size_t>(iy) * nc + ic];
        const double c = cmin + (cmax - cmin) * ic / (nc - 1);
        const double y = ymin + (ymax - ymin) * iy / (ny - 1);
        *os << format_double(c) << ',' << format_double(y) << ','
            << format_double(setup.params.beta) << ',' << format_double(setup.xbar) << ','
            << to_string(cell.rc.kase) << ',' << format_double(cell.rc.l) << ','
            << format_double(cell.rc.h) << ',' << format_double(cell.rc.ttr) << ','
            << format_double(cell.sl) << ',' << format_double(cell.sh) << ','
            << to_string(cell.skind) << ',' << (cell.agree ? 1 : 0) << '\n';
        if (!cell.boundary && cell.rc.kase != ExpCase::Invalid) {
          ++comparable;
          disagree += cell.agree ? 0 : 1;
        }
      }
    }
  }
  if (!ppm_path.empty()) {
    std::ofstream ppm(ppm_path, std::ios::binary);
    if (!ppm) throw std::invalid_argument("cannot open ppm output: " + ppm_path);
    std::vector<Rgb> pixels(cells.size());
    for (int iy = 0; iy < ny; ++iy)
      for (int ic = 0; ic < nc; ++ic)  // image top row = highest prior
        pixels[static_cast<size_t>(ny - 1 - iy) * nc + ic] =
            case_color(cells[static_cast<size_t>(iy) * nc + ic].rc.kase,
                       cells[static_cast<size_t>(iy) * nc + ic].rc.gap);
    write_ppm(ppm, nc, ny, pixels);
  }
  const double frac = comparable > 0 ? static_cast<double>(disagree) / comparable : 0.0;
  std::cerr << "region-map: " << comparable << " comparable cells, " << disagree
            << " disagreements (" << format_double(100.0 * frac, 3) << "%)\n";
  return frac > 0.01 ? kExitDisagreement : kExitOk;
}

int cmd_sweep(const CommonOpts& common, const std::vector<std::string>& specs,
              const std::string& out_path) {
  if (specs.empty() || specs.size() > 2)
    throw std::invalid_argument("sweep takes one or two name=lo:hi:n specs");
  const RunSetup base = common.resolve();
  std::vector<SweepAxis> axes;
  for (const auto& s : specs) axes.push_back(parse_sweep(s));

  const int n_outer = axes[0].n;
  const int n_inner = axes.size() > 1 ? axes[1].n : 1;
  const size_t n_rows = static_cast<size_t>(n_outer) * n_inner;
  std::vector<std::string> rows(n_rows);
  std::vector<std::string> errors(n_rows);
  parallel_for(n_rows, [&](size_t idx) {
    const int i = static_cast<int>(idx) / n_inner;
    const int j = static_cast<int>(idx) % n_inner;
    RunSetup s = base;
    apply_axis(s, axes[0].name, axes[0].lo + (axes[0].hi - axes[0].lo) * i / (n_outer - 1));
    if (axes.size() > 1)
      apply_axis(s, axes[1].name,
                 axes[1].lo + (axes[1].hi - axes[1].lo) * j / (n_inner - 1));
    std::string row;
    try {
      s.params.validate();
      const VerificationFunction fn = s.technology();
      const EquilibriumSolution sol = s.params.gamma > 0.0
                                          ? solve_partisan_equilibrium(s.params, fn)
                                          : solve_equilibrium(s.params, fn);
      row = solution_csv_row(sol, s.params, s.xbar);
    } catch (const std::exception& e) {
      row = format_double(s.params.y) + "," + format_double(s.params.c) + "," +
            format_double(s.params.beta) + "," + format_double(s.params.gamma) + "," +
            format_double(s.xbar) + ",nan,nan,Error,nan,nan,nan,0,nan,0";
      errors[idx] = e.what();
    }
    rows[idx] = format_double(s.params.lambda()) + "," + std::to_string(s.params.k) + "," +
                row;
  });
  for (size_t i = 0; i < n_rows; ++i)
    if (!errors[i].empty()) std::cerr << "sweep row " << i << " failed: " << errors[i] << "\n";
  std::ostream* os = nullptr;
  auto file = open_out(out_path, os);
  *os << "lambda,k," << solution_csv_header() << '\n';
  for (const auto& row : rows) *os << row << '\n';
  return kExitOk;
}

int cmd_partisan_check(const CommonOpts& common, const std::string& gammas_text,
                       const std::string& out_path) {
  const RunSetup base = common.resolve();
  const std::vector<double> gammas = parse_list(gammas_text);
  if (gammas.empty()) throw std::invalid_argument("need at least one gamma");
  std::ostream* os = nullptr;
  auto file = open_out(out_path, os);
  *os << "gamma,l,h,l_individual,h_individual,cap_conflict,rho0,rho1,ttr\n";
  double ttr_min = std::numeric_limits<double>::infinity();
  double ttr_max = -std::numeric_limits<double>::infinity();
  bool any_unconflicted = false;
  for (double g : gammas) {
    RunSetup s = base;
    s.params.gamma = g;
    s.params.validate();
    const EquilibriumSolution sol = solve_partisan_equilibrium(s.params, s.technology());
    *os << format_double(g) << ',' << format_double(sol.l) << ',' << format_double(sol.h)
        << ',' << format_double(sol.l_individual) << ',' << format_double(sol.h_individual)
        << ',' << (sol.cap_conflict ? 1 : 0) << ',' << format_double(sol.rho0) << ','
        << format_double(sol.rho1) << ',' << format_double(sol.ttr) << '\n';
    if (!sol.cap_conflict) {
      any_unconflicted = true;
      ttr_min = std::min(ttr_min, sol.ttr);
      ttr_max = std::max(ttr_max, sol.ttr);
    }
  }
  if (any_unconflicted) {
    const double spread = ttr_max - ttr_min;
    std::cerr << "partisan-check: ttr spread " << format_double(spread) << "\n";
    if (spread > 1e-8) return kExitDisagreement;
  } else {
    std::cerr << "partisan-check: all gammas conflict with the cap\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"truth/rumor diffusion laboratory"};
  app.require_subcommand(1);
  // keep -h free for the opposing-message verification rate
  app.set_help_flag("--help", "print help and exit");

  auto add_sub = [&app](const char* name, const char* desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->set_help_flag("--help", "print help and exit");
    return sub;
  };

  // steady
  auto* steady = add_sub("steady", "closed-form steady state at given rates");
  CommonOpts steady_common;
  steady_common.attach(steady);
  double s_l = 0.0, s_h = 0.0;
  std::string s_out;
  steady->add_option("--l", s_l, "aligned-message verification rate");
  steady->add_option("--h", s_h, "opposing-message verification rate");
  steady->add_option("--out", s_out, "output CSV (default stdout)");

  // equilibrium
  auto* equi = add_sub("equilibrium", "solve the verification equilibrium");
  CommonOpts equi_common;
  equi_common.attach(equi);
  std::string e_out;
  equi->add_option("--out", e_out, "output CSV (default stdout)");

  // trajectory
  auto* traj = add_sub("trajectory", "integrate the mean-field dynamics");
  CommonOpts traj_common;
  traj_common.attach(traj);
  double t_l = 0.0, t_h = 0.0, t_horizon = 0.0, t_dt = 0.0;
  double t_s00 = 0.01, t_s01 = 0.005, t_s11 = 0.005;
  std::string t_out;
  traj->add_option("--l", t_l, "aligned-message verification rate");
  traj->add_option("--h", t_h, "opposing-message verification rate");
  traj->add_option("--horizon", t_horizon, "time horizon")->required();
  traj->add_option("--dt", t_dt, "step size (default 0.01/delta)");
  traj->add_option("--rho00", t_s00, "seed prevalence, opinion 0 group 0");
  traj->add_option("--rho01", t_s01, "seed prevalence, opinion 0 group 1");
  traj->add_option("--rho11", t_s11, "seed prevalence, opinion 1 group 1");
  traj->add_option("--out", t_out, "output CSV (default stdout)");

  // abm
  auto* abm = add_sub("abm", "finite-population stochastic simulation");
  CommonOpts abm_common;
  abm_common.attach(abm);
  double a_l = 0.0, a_h = 0.0, a_dt = 0.0, a_horizon = 0.0;
  int a_n = 20000;
  std::string a_seeds = "1,2,3,4,5";
  std::string a_out, a_summary;
  abm->add_option("--l", a_l, "aligned-message verification rate");
  abm->add_option("--h", a_h, "opposing-message verification rate");
  abm->add_option("--n", a_n, "population size (even)");
  abm->add_option("--dt", a_dt, "step size")->required();
  abm->add_option("--horizon", a_horizon, "time horizon")->required();
  abm->add_option("--seeds", a_seeds, "comma-separated RNG seeds");
  abm->add_option("--out", a_out, "per-seed CSV (default stdout)");
  abm->add_option("--summary", a_summary, "across-seed summary CSV");

  // region-map
  auto* region = add_sub("region-map",
                                    "classify equilibrium cases on a (c,y) grid");
  CommonOpts region_common;
  region_common.attach(region);
  double r_cmin = 0.0025, r_cmax = 0.4975, r_ymin = 0.505, r_ymax = 0.995;
  int r_nc = 100, r_ny = 100;
  std::string r_out, r_ppm;
  region->add_option("--cmin", r_cmin, "lower cost bound");
  region->add_option("--cmax", r_cmax, "upper cost bound");
  region->add_option("--ymin", r_ymin, "lower prior bound");
  region->add_option("--ymax", r_ymax, "upper prior bound");
  region->add_option("--nc", r_nc, "cost resolution");
  region->add_option("--ny", r_ny, "prior resolution");
  region->add_option("--out", r_out, "output CSV (default stdout)");
  region->add_option("--ppm", r_ppm, "optional P6 raster heatmap");

  // sweep
  auto* sweep = add_sub("sweep", "equilibrium rows across parameter ranges");
  CommonOpts sweep_common;
  sweep_common.attach(sweep);
  std::vector<std::string> w_specs;
  std::string w_out;
  sweep->add_option("--sweep", w_specs, "axis spec name=lo:hi:n (repeatable, max 2)")
      ->required();
  sweep->add_option("--out", w_out, "output CSV (default stdout)");

  // partisan-check
  auto* pcheck = add_sub("partisan-check",
                                    "equilibrium invariance across partisan fractions");
  CommonOpts pcheck_common;
  pcheck_common.attach(pcheck);
  std::string p_gammas = "0,0.25,0.5";
  std::string p_out;
  pcheck->add_option("--gammas", p_gammas, "comma-separated partisan fractions");
  pcheck->add_option("--out", p_out, "output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (steady->parsed()) return cmd_steady(steady_common, s_l, s_h, s_out);
    if (equi->parsed()) return cmd_equilibrium(equi_common, e_out);
    if (traj->parsed())
      return cmd_trajectory(traj_common, t_l, t_h, t_horizon, t_dt, t_s00, t_s01, t_s11,
                            t_out);
    if (abm->parsed())
      return cmd_abm(abm_common, a_l, a_h, a_n, a_dt, a_horizon, a_seeds, a_out, a_summary);
    if (region->parsed())
      return cmd_region_map(region_common, r_cmin, r_cmax, r_ymin, r_ymax, r_nc, r_ny,
                            r_out, r_ppm);
    if (sweep->parsed()) return cmd_sweep(sweep_common, w_specs, w_out);
    if (pcheck->parsed()) return cmd_partisan_check(pcheck_common, p_gammas, p_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitValidation;
}
