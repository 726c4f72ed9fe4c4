#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rumor/abm.hpp"
#include "rumor/closed_forms.hpp"
#include "rumor/dynamics.hpp"
#include "rumor/equilibrium.hpp"
#include "rumor/params.hpp"
#include "rumor/verification.hpp"

namespace rumor {

/// Model parameters plus the technology selection, as stored in flat
/// key=value configuration files (keys: k, nu, delta, beta, y, c, gamma,
/// xbar, fn).
struct RunSetup {
  ModelParams params;
  double xbar = 1.0;
  std::string fn = "exp_cap";

  VerificationFunction technology() const {
    if (fn != "exp_cap")
      throw std::invalid_argument("unknown verification family: " + fn);
    return make_exponential_capped(xbar);
  }
};

inline std::string format_double(double v, int precision = 12) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

inline RunSetup parse_config(std::istream& in) {
  RunSetup setup;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    auto as_double = [&] {
      size_t used = 0;
      const double d = std::stod(val, &used);
      if (used != val.size())
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": bad number '" + val + "'");
      return d;
    };
    if (key == "k") setup.params.k = static_cast<int>(as_double());
    else if (key == "nu") setup.params.nu = as_double();
    else if (key == "delta") setup.params.delta = as_double();
    else if (key == "beta") setup.params.beta = as_double();
    else if (key == "y") setup.params.y = as_double();
    else if (key == "c") setup.params.c = as_double();
    else if (key == "gamma") setup.params.gamma = as_double();
    else if (key == "xbar") setup.xbar = as_double();
    else if (key == "fn") setup.fn = val;
    else
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
  }
  return setup;
}

inline RunSetup load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  return parse_config(in);
}

inline std::string write_config(const RunSetup& s) {
  std::ostringstream out;
  out << "k = " << s.params.k << "\n"
      << "nu = " << format_double(s.params.nu, 17) << "\n"
      << "delta = " << format_double(s.params.delta, 17) << "\n"
      << "beta = " << format_double(s.params.beta, 17) << "\n"
      << "y = " << format_double(s.params.y, 17) << "\n"
      << "c = " << format_double(s.params.c, 17) << "\n"
      << "gamma = " << format_double(s.params.gamma, 17) << "\n"
      << "xbar = " << format_double(s.xbar, 17) << "\n"
      << "fn = " << s.fn << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// CSV emission.  All files are UTF-8 with LF line endings and a fixed header.

inline void write_trajectory_csv(std::ostream& out,
                                 const IntegrationResult<PrevalenceState>& res) {
  out << "t,rho00,rho01,rho11,rho0,rho1,iota\n";
  for (const auto& pt : res.trajectory) {
    const Aggregates a = aggregate(pt.state);
    out << format_double(pt.t) << ',' << format_double(pt.state.rho00) << ','
        << format_double(pt.state.rho01) << ',' << format_double(pt.state.rho11) << ','
        << format_double(a.rho0) << ',' << format_double(a.rho1) << ','
        << format_double(a.iota) << '\n';
  }
}

inline const char* solution_csv_header() {
  return "y,c,beta,gamma,xbar,l,h,kind,ttr,L,H,cond_y_ok,residual,multiplicity";
}

inline std::string solution_csv_row(const EquilibriumSolution& s, const ModelParams& p,
                                    double xbar) {
  std::ostringstream out;
  out << format_double(p.y) << ',' << format_double(p.c) << ',' << format_double(p.beta)
      << ',' << format_double(s.gamma) << ',' << format_double(xbar) << ','
      << format_double(s.l) << ',' << format_double(s.h) << ',' << to_string(s.kind) << ','
      << format_double(s.ttr) << ',' << format_double(s.L) << ',' << format_double(s.H)
      << ',' << (s.cond_y_ok ? 1 : 0) << ',' << format_double(s.residual) << ','
      << s.fixed_points.size();
  return out.str();
}

inline void write_abm_csv(std::ostream& out, const std::vector<AbmResult>& runs,
                          const ModelParams& p, int n) {
  out << "# abm rng=xoshiro256** n=" << n << " gamma=" << format_double(p.gamma)
      << " seeds=";
  for (size_t i = 0; i < runs.size(); ++i) out << (i ? " " : "") << runs[i].seed;
  out << "\n";
  out << "t,rho0,rho1,iota,seed\n";
  for (const auto& r : runs)
    for (const auto& pt : r.series)
      out << format_double(pt.t) << ',' << format_double(pt.rho0) << ','
          << format_double(pt.rho1) << ',' << format_double(pt.iota) << ',' << r.seed
          << '\n';
}

inline void write_abm_summary_csv(std::ostream& out, const std::vector<AbmSummaryRow>& rows) {
  out << "t,rho0_mean,rho0_sd,rho1_mean,rho1_sd,iota_mean,iota_sd,n_seeds\n";
  for (const auto& r : rows)
    out << format_double(r.t) << ',' << format_double(r.rho0_mean) << ','
        << format_double(r.rho0_sd) << ',' << format_double(r.rho1_mean) << ','
        << format_double(r.rho1_sd) << ',' << format_double(r.iota_mean) << ','
        << format_double(r.iota_sd) << ',' << r.n_seeds << '\n';
}

// ---------------------------------------------------------------------------
// Binary PPM (P6) raster for region maps.

struct Rgb {
  uint8_t r = 0, g = 0, b = 0;
};

inline Rgb case_color(ExpCase c, bool gap = false) {
  if (gap) return {255, 0, 255};
  switch (c) {
    case ExpCase::I: return {173, 216, 230};   // light blue: no verification
    case ExpCase::II: return {70, 130, 180};   // blue: opposing only
    case ExpCase::III: return {25, 60, 120};   // dark blue: opposing capped
    case ExpCase::IV: return {147, 112, 219};  // purple: both interior
    case ExpCase::V: return {200, 120, 60};    // orange: aligned interior, h capped
    case ExpCase::VI: return {120, 60, 20};    // brown: both capped
    case ExpCase::Invalid: return {255, 255, 255};
  }
  return {0, 0, 0};
}

inline void write_ppm(std::ostream& out, int width, int height,
                      const std::vector<Rgb>& pixels) {
  if (static_cast<size_t>(width) * height != pixels.size())
    throw std::invalid_argument("write_ppm: pixel count does not match dimensions");
  out << "P6\n" << width << " " << height << "\n255\n";
  for (const Rgb& px : pixels) {
    out.put(static_cast<char>(px.r));
    out.put(static_cast<char>(px.g));
    out.put(static_cast<char>(px.b));
  }
}

}  // namespace rumor
