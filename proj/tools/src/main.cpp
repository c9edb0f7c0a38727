// Command-line front end for the nonlocal-plasmonics library.
//
// Subcommands:
//   spectrum    plasmonic eigenvalue tables (sphere) or contour-solver pole
//               tables (triangulated mesh)
//   absorption  far-field absorption spectra along the Drude trajectory
//   nearfield   dipole near-field response spectra (sphere)
//   validate    self-check suite with a machine-readable pass/fail report
//
// All data outputs are TSV files with a '#'-prefixed header line, 17
// significant digits and LF line endings, so identical configurations
// produce byte-identical files.
//
// Exit codes: 0 success, 1 configuration error, 2 validation failure,
// 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "nlpbem/bem_assemble.hpp"
#include "nlpbem/bem_pencil.hpp"
#include "nlpbem/bem_scatter.hpp"
#include "nlpbem/dump.hpp"
#include "nlpbem/errors.hpp"
#include "nlpbem/lapack.hpp"
#include "nlpbem/medium.hpp"
#include "nlpbem/mesh.hpp"
#include "nlpbem/nep_beyn.hpp"
#include "nlpbem/specfun.hpp"
#include "nlpbem/sphere_oracle.hpp"
#include "nlpbem/sweep.hpp"

namespace fs = std::filesystem;
using nlpbem::cplx;
using nlpbem::ConfigError;
using nlpbem::DrudeParams;
using nlpbem::SweepTable;

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void note(const std::string& msg) { std::cerr << msg << "\n"; }

// ---------------------------------------------------------------------------
// Option plumbing: every scalar option is carried as a raw string together
// with its origin ("option --h" or "config file foo:3") so that parse errors
// can name their exact source.
// ---------------------------------------------------------------------------

struct Slot {
  std::string text;
  std::string origin;
  bool set = false;
};

struct RawOptions {
  std::string config_path;
  std::string h, gamma, lmax, geometry, contour, omega, d, out, perturb;
  bool skip_bem = false;
  bool dump_operators = false;

  CLI::Option* o_config = nullptr;
  CLI::Option* o_h = nullptr;
  CLI::Option* o_gamma = nullptr;
  CLI::Option* o_lmax = nullptr;
  CLI::Option* o_geometry = nullptr;
  CLI::Option* o_contour = nullptr;
  CLI::Option* o_omega = nullptr;
  CLI::Option* o_d = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_perturb = nullptr;
  CLI::Option* o_skip_bem = nullptr;
  CLI::Option* o_dump = nullptr;
};

struct Slots {
  Slot h, gamma, lmax, geometry, contour, omega, d, out, perturb;
  Slot skip_bem, dump_operators;
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_real(const std::string& text, const std::string& origin) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError(origin + ": expected a number, got ''");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(v))
    throw ConfigError(origin + ": expected a finite number, got '" + t + "'");
  return v;
}

long parse_int(const std::string& text, const std::string& origin) {
  const std::string t = trim(text);
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size())
    throw ConfigError(origin + ": expected an integer, got '" + t + "'");
  return v;
}

bool parse_bool(const std::string& text, const std::string& origin) {
  const std::string t = trim(text);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigError(origin + ": expected a boolean, got '" + t + "'");
}

// Flat key=value configuration file.  CLI flags take precedence; file values
// fill only the slots not given on the command line.  Errors carry
// path:line locations.
void apply_config_file(const std::string& path, Slots& s) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string origin = path + ":" + std::to_string(lineno);
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    Slot* slot = nullptr;
    if (key == "h") slot = &s.h;
    else if (key == "gamma") slot = &s.gamma;
    else if (key == "lmax") slot = &s.lmax;
    else if (key == "geometry") slot = &s.geometry;
    else if (key == "contour") slot = &s.contour;
    else if (key == "omega") slot = &s.omega;
    else if (key == "d") slot = &s.d;
    else if (key == "out") slot = &s.out;
    else if (key == "perturb-kstar") slot = &s.perturb;
    else if (key == "skip-bem") slot = &s.skip_bem;
    else if (key == "dump-operators") slot = &s.dump_operators;
    else throw ConfigError(origin + ": unknown key '" + key + "'");
    if (!slot->set) *slot = {value, "config file " + origin, true};
  }
}

Slots gather_slots(const RawOptions& raw) {
  Slots s;
  auto take = [](Slot& slot, CLI::Option* opt, const std::string& text,
                 const char* name) {
    if (opt != nullptr && opt->count() > 0) slot = {text, std::string("option ") + name, true};
  };
  take(s.h, raw.o_h, raw.h, "--h");
  take(s.gamma, raw.o_gamma, raw.gamma, "--gamma");
  take(s.lmax, raw.o_lmax, raw.lmax, "--lmax");
  take(s.geometry, raw.o_geometry, raw.geometry, "--geometry");
  take(s.contour, raw.o_contour, raw.contour, "--contour");
  take(s.omega, raw.o_omega, raw.omega, "--omega");
  take(s.d, raw.o_d, raw.d, "--d");
  take(s.out, raw.o_out, raw.out, "--out");
  take(s.perturb, raw.o_perturb, raw.perturb, "--perturb-kstar");
  if (raw.o_skip_bem != nullptr && raw.o_skip_bem->count() > 0)
    s.skip_bem = {"true", "option --skip-bem", true};
  if (raw.o_dump != nullptr && raw.o_dump->count() > 0)
    s.dump_operators = {"true", "option --dump-operators", true};
  if (raw.o_config != nullptr && raw.o_config->count() > 0)
    apply_config_file(raw.config_path, s);
  return s;
}

// ---------------------------------------------------------------------------
// Resolved, fully typed run configuration.
// ---------------------------------------------------------------------------

struct TokenValue {
  std::string token;  // verbatim spelling, reused in output file names
  double value = 0.0;
};

struct OmegaGrid {
  double lo = 0.0, hi = 0.0;
  int n = 0;
  std::vector<double> points() const {
    std::vector<double> g(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      g[static_cast<size_t>(i)] = lo + (hi - lo) * i / (n - 1.0);
    return g;
  }
};

struct ContourSpec {
  bool given = false;
  bool imag_axis = true;
  double lo = 0.0, hi = 0.0;
};

struct Resolved {
  std::vector<TokenValue> h_list;
  DrudeParams drude;
  int lmax = 0;
  bool lmax_given = false;
  std::string geometry = "sphere";
  ContourSpec contour;
  OmegaGrid omega;
  std::vector<TokenValue> d_list;
  fs::path out = ".";
  double perturb_kstar = 0.0;
  bool skip_bem = false;
  bool dump_operators = false;
};

std::vector<TokenValue> parse_positive_list(const Slot& slot,
                                            const char* what) {
  std::vector<TokenValue> out;
  for (const std::string& piece : split(slot.text, ',')) {
    const std::string tok = trim(piece);
    TokenValue tv;
    tv.token = tok;
    tv.value = parse_real(tok, slot.origin);
    if (!(tv.value > 0.0))
      throw ConfigError(slot.origin + ": " + what + " must be > 0, got '" +
                        tok + "'");
    if (tok.find('/') != std::string::npos)
      throw ConfigError(slot.origin + ": '" + tok + "' is not a valid token");
    out.push_back(tv);
  }
  return out;
}

OmegaGrid parse_omega(const Slot& slot) {
  const auto parts = split(trim(slot.text), ':');
  if (parts.size() != 3)
    throw ConfigError(slot.origin + ": expected lo:hi:n, got '" + slot.text +
                      "'");
  OmegaGrid g;
  g.lo = parse_real(parts[0], slot.origin);
  g.hi = parse_real(parts[1], slot.origin);
  g.n = static_cast<int>(parse_int(parts[2], slot.origin));
  if (!(g.lo > 0.0) || !(g.hi <= 2.0) || !(g.lo < g.hi))
    throw ConfigError(slot.origin +
                      ": frequency range must satisfy 0 < lo < hi <= 2");
  if (g.n < 2) throw ConfigError(slot.origin + ": need at least 2 grid points");
  return g;
}

ContourSpec parse_contour(const Slot& slot) {
  const auto parts = split(trim(slot.text), ':');
  if (parts.size() != 3)
    throw ConfigError(slot.origin + ": expected axis:lo:hi, got '" +
                      slot.text + "'");
  ContourSpec c;
  c.given = true;
  const std::string axis = trim(parts[0]);
  if (axis == "imag") c.imag_axis = true;
  else if (axis == "real") c.imag_axis = false;
  else
    throw ConfigError(slot.origin + ": axis must be 'imag' or 'real', got '" +
                      axis + "'");
  c.lo = parse_real(parts[1], slot.origin);
  c.hi = parse_real(parts[2], slot.origin);
  if (!(c.lo < c.hi))
    throw ConfigError(slot.origin + ": contour needs lo < hi");
  return c;
}

Resolved resolve_common(const Slots& s, const std::string& default_h,
                        const OmegaGrid& default_omega) {
  Resolved r;
  {
    Slot hslot = s.h;
    if (!hslot.set) hslot = {default_h, "default", true};
    r.h_list = parse_positive_list(hslot, "h");
  }
  r.drude.gamma_hat =
      s.gamma.set ? parse_real(s.gamma.text, s.gamma.origin) : 0.1;
  if (r.drude.gamma_hat < 0.0)
    throw ConfigError(s.gamma.origin + ": gamma must be >= 0");
  if (s.lmax.set) {
    r.lmax = static_cast<int>(parse_int(s.lmax.text, s.lmax.origin));
    if (r.lmax < 1) throw ConfigError(s.lmax.origin + ": lmax must be >= 1");
    r.lmax_given = true;
  } else {
    r.lmax = 60;
  }
  if (s.geometry.set) r.geometry = trim(s.geometry.text);
  if (s.contour.set) r.contour = parse_contour(s.contour);
  r.omega = s.omega.set ? parse_omega(s.omega) : default_omega;
  {
    Slot dslot = s.d;
    if (!dslot.set) dslot = {"0.1", "default", true};
    r.d_list = parse_positive_list(dslot, "d");
  }
  if (s.out.set) r.out = trim(s.out.text);
  if (s.perturb.set)
    r.perturb_kstar = parse_real(s.perturb.text, s.perturb.origin);
  if (s.skip_bem.set)
    r.skip_bem = parse_bool(s.skip_bem.text, s.skip_bem.origin);
  if (s.dump_operators.set)
    r.dump_operators =
        parse_bool(s.dump_operators.text, s.dump_operators.origin);
  return r;
}

void write_table(const SweepTable& t, const fs::path& path) {
  nlpbem::write_tsv(t, path);
  note("wrote " + path.string());
}

const char* kind_name(nlpbem::nep::PoleKind k) {
  switch (k) {
    case nlpbem::nep::PoleKind::Surface: return "surface";
    case nlpbem::nep::PoleKind::Bulk: return "bulk";
    case nlpbem::nep::PoleKind::Scattering: return "scattering";
    default: return "artifact";
  }
}

void write_pole_tsv(const std::vector<nlpbem::nep::Pole>& poles,
                    const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw nlpbem::Error("cannot open output file " + path.string());
  out << "# re_z\tim_z\tre_eps\tim_eps\tkind\tdegeneracy\n";
  for (const auto& p : poles) {
    cplx eps(std::numeric_limits<double>::quiet_NaN(),
             std::numeric_limits<double>::quiet_NaN());
    try {
      eps = nlpbem::eps_from_z(p.z);
    } catch (const nlpbem::PoleError&) {
    }
    out << fmt17(p.z.real()) << '\t' << fmt17(p.z.imag()) << '\t'
        << fmt17(eps.real()) << '\t' << fmt17(eps.imag()) << '\t'
        << kind_name(p.kind) << '\t' << p.degeneracy << '\n';
  }
  note("wrote " + path.string());
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

int cmd_spectrum(const Resolved& r) {
  fs::create_directories(r.out);
  namespace sph = nlpbem::sphere;
  if (r.geometry == "sphere") {
    for (const TokenValue& h : r.h_list) {
      const auto entries = sph::eigenvalue_table(h.value, r.lmax);
      SweepTable t;
      t.columns = {"index", "eps"};
      for (const auto& e : entries) t.add_row(e.index, {e.eps});
      write_table(t, r.out / ("eps_nonlocal_" + h.token + ".tsv"));
    }
    const auto local = sph::local_eigenvalue_table(r.lmax);
    SweepTable t;
    t.columns = {"index", "eps"};
    for (const auto& e : local) t.add_row(e.index, {e.eps});
    write_table(t, r.out / "eps_local.tsv");
    return 0;
  }

  // Mesh geometry: run the contour eigensolver.
  if (!r.contour.given)
    throw ConfigError(
        "spectrum: a mesh geometry needs --contour <axis:lo:hi> to select "
        "the search window");
  const nlpbem::bem::TriMesh mesh = nlpbem::bem::load_mesh(r.geometry);
  bool dumped = false;
  for (const TokenValue& h : r.h_list) {
    auto ev = std::make_shared<nlpbem::bem::PencilEvaluator>(mesh, h.value,
                                                             r.perturb_kstar);
    if (r.dump_operators && !dumped) {
      nlpbem::write_operator(ev->S().cast<cplx>(), r.out / "S.bin");
      nlpbem::write_operator(ev->Kstar().cast<cplx>(), r.out / "Kstar.bin");
      note("wrote " + (r.out / "S.bin").string());
      note("wrote " + (r.out / "Kstar.bin").string());
      dumped = true;
    }
    nlpbem::bem::BemPencil pencil(ev);
    nlpbem::nep::ContourRect rect;
    const double half_width = 0.15;
    if (r.contour.imag_axis) {
      rect = {-half_width, half_width, r.contour.lo, r.contour.hi};
    } else {
      rect = {r.contour.lo, r.contour.hi, -half_width, half_width};
    }
    nlpbem::nep::BeynParams params;
    params.axis_tol = 1e-3;
    params.dedup_tol = 1e-3 * rect.diameter();
    const auto poles = nlpbem::nep::beyn_solve(pencil, rect, params);
    write_pole_tsv(poles, r.out / ("poles_" + h.token + ".tsv"));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// absorption
// ---------------------------------------------------------------------------

// Quasi-static local-medium dipole moment of a mesh under a unit uniform
// drive along x3, via the adjoint-double-layer resonance representation.
cplx local_mesh_dipole_moment(const nlpbem::bem::TriMesh& mesh,
                              const Eigen::MatrixXd& kstar, cplx eps) {
  const Eigen::Index n = mesh.n();
  const cplx c = (1.0 + eps) / (2.0 * (1.0 - eps));
  Eigen::MatrixXcd a = kstar.cast<cplx>();
  a.diagonal().array() += c;
  Eigen::VectorXcd rhs = -mesh.normals.col(2).cast<cplx>();
  const nlpbem::la::ComplexLU lu(std::move(a));
  const Eigen::VectorXcd phi = lu.solve(rhs);
  cplx mu = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    mu += phi(i) * mesh.centroids(i, 2) * mesh.areas(i);
  return mu / (4.0 * M_PI);
}

int cmd_absorption(const Resolved& r) {
  fs::create_directories(r.out);
  if (r.h_list.size() != 1)
    throw ConfigError("absorption: expected a single --h value");
  const double h = r.h_list.front().value;
  const std::vector<double> grid = r.omega.points();
  if (r.geometry == "sphere") {
    write_table(nlpbem::sphere::absorption_spectrum(h, r.drude, grid),
                r.out / "ffext_nonlocal.tsv");
    write_table(nlpbem::sphere::absorption_spectrum_local(r.drude, grid),
                r.out / "ffext_local.tsv");
    return 0;
  }
  const nlpbem::bem::TriMesh mesh = nlpbem::bem::load_mesh(r.geometry);
  auto ev = std::make_shared<nlpbem::bem::PencilEvaluator>(mesh, h,
                                                           r.perturb_kstar);
  SweepTable tn, tl;
  tn.columns = tl.columns = {"omega_hat", "absorption"};
  for (double w : grid) {
    const auto sp = nlpbem::make_spectral_point(w, r.drude, h);
    const auto sol = nlpbem::bem::solve_scattering(
        ev, sp.z, nlpbem::bem::ExternalField::uniform_z());
    tn.add_row(w, {w * sol.dipole_moment.imag()});
    const cplx mu_loc = local_mesh_dipole_moment(mesh, ev->Kstar(), sp.eps);
    tl.add_row(w, {w * mu_loc.imag()});
  }
  write_table(tn, r.out / "ffext_nonlocal.tsv");
  write_table(tl, r.out / "ffext_local.tsv");
  return 0;
}

// ---------------------------------------------------------------------------
// nearfield
// ---------------------------------------------------------------------------

int auto_degree_cutoff(double d) {
  // Terms decay like (1+d)^{-2l}; pick the degree where the tail drops
  // below 1e-9 of the leading scale, with margin.
  const double rho = 1.0 / ((1.0 + d) * (1.0 + d));
  const int lmax =
      static_cast<int>(std::ceil(std::log(1e-9) / std::log(rho))) + 5;
  return std::clamp(lmax, 8, 400);
}

int cmd_nearfield(const Resolved& r) {
  fs::create_directories(r.out);
  if (r.geometry != "sphere")
    throw ConfigError("nearfield: only the sphere geometry is supported");
  if (r.h_list.size() != 1)
    throw ConfigError("nearfield: expected a single --h value");
  const double h = r.h_list.front().value;
  const std::vector<double> grid = r.omega.points();
  for (const TokenValue& d : r.d_list) {
    const int lmax = r.lmax_given ? r.lmax : auto_degree_cutoff(d.value);
    const auto nl =
        nlpbem::sphere::near_field_response(d.value, h, r.drude, grid, lmax);
    if (nl.truncated)
      note("warning: degree cutoff " + std::to_string(lmax) +
           " leaves a relative tail of " + fmt17(nl.worst_tail_fraction) +
           " at d = " + d.token);
    write_table(nl.table, r.out / ("nfext_nonlocal_" + d.token + ".tsv"));
    const auto loc =
        nlpbem::sphere::near_field_response_local(d.value, r.drude, grid, lmax);
    write_table(loc.table, r.out / ("nfext_local_" + d.token + ".tsv"));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

void run_analytic_checks(std::vector<Check>& checks) {
  namespace sf = nlpbem::specfun;
  namespace sph = nlpbem::sphere;
  auto push = [&checks](const std::string& name, double value,
                        double threshold) {
    checks.push_back({name, value, threshold, value <= threshold});
    note("check " + name + ": " + fmt17(value) + " (threshold " +
         fmt17(threshold) + ")");
  };

  {  // Cross-product identity of the radial basis pair: j l' h - j h l' = i/x^2.
    const std::vector<cplx> xs = {cplx(0.37, 0.0),  cplx(1.3, 0.0),
                                  cplx(4.2, 0.0),   cplx(2.0, 1.5),
                                  cplx(0.4, 3.0),   cplx(8.0, -2.0)};
    double worst = 0.0;
    for (int ell = 0; ell <= 6; ++ell) {
      for (const cplx& x : xs) {
        const auto cp = sf::jh_cross_products(ell, x);
        const cplx w = cp.hpj - cp.hjp;
        const cplx expect = cplx(0.0, 1.0) / (x * x);
        worst = std::max(worst, std::abs(w - expect) / std::abs(expect));
      }
    }
    push("wronskian", worst, 1e-10);
  }

  {  // Spectral-map round trip eps -> z -> eps.
    const std::vector<cplx> samples = {cplx(-2.0, 0.0), cplx(-0.5, 0.3),
                                       cplx(4.0, 0.0),  cplx(0.25, 0.0),
                                       cplx(-10.0, 2.0), cplx(0.9, 0.1)};
    double worst = 0.0;
    for (const cplx& e : samples) {
      const cplx z = nlpbem::z_from_eps(e);
      worst = std::max(worst, std::abs(nlpbem::eps_from_z(z) - e) /
                                  std::max(1.0, std::abs(e)));
    }
    push("drude_roundtrip", worst, 1e-12);
  }

  {  // Small-h decay rates of the dynamic operator deviations.
    const std::vector<double> hs = {0.1, 0.05, 0.025, 0.0125};
    double worst_s = 0.0, worst_k = 0.0;
    for (int ell = 0; ell <= 2; ++ell) {
      const auto res = sph::asymptotic_residual(ell, cplx(0.0, 1.0), hs);
      for (size_t i = 0; i + 1 < res.size(); ++i) {
        // At degree 0 the quadratic term of the single-layer deviation
        // vanishes identically (the remainder is exponentially small), so the
        // halving ratio is only meaningful from degree 1 up.
        if (ell >= 1)
          worst_s = std::max(worst_s,
                             std::abs(res[i].err_S / res[i + 1].err_S - 4.0));
        worst_k = std::max(worst_k,
                           std::abs(res[i].err_K / res[i + 1].err_K - 2.0));
      }
    }
    push("rate_single_layer", worst_s, 0.5);
    push("rate_double_layer", worst_k, 0.2);
  }

  {  // Surface-mode census shrinks strictly as the screening length grows.
    const std::vector<double> hs = {1e-2, 2e-2, 5e-2};
    std::vector<int> counts;
    for (double h : hs) {
      int count = 0, missing = 0;
      for (int ell = 1; missing < 3 && ell < 4000; ++ell) {
        bool found = false;
        for (const auto& root : sph::dispersion_roots(ell, h))
          if (root.kind == sph::RootKind::Surface) found = true;
        if (found) {
          ++count;
          missing = 0;
        } else {
          ++missing;
        }
      }
      counts.push_back(count);
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < counts.size(); ++i)
      worst = std::max(worst, double(counts[i + 1] - counts[i]));
    push("census_monotone", worst, -1.0);
  }

  {  // First-order root shift stays within a fixed band of the true shift.
    double worst = 0.0;
    for (int ell = 1; ell <= 3; ++ell) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (double h : {0.01, 0.005, 0.0025}) {
        double eps_root = 0.0;
        for (const auto& root : sph::dispersion_roots(ell, h))
          if (root.kind == sph::RootKind::Surface)
            eps_root = root.eps_root.real();
        const double eps_pred = sph::perturbation_shift(ell, h);
        const double ratio = std::abs(eps_root - eps_pred) / (h * h);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
      worst = std::max(worst, hi / lo);
    }
    push("perturbation_band", worst, 3.0);
  }

  {  // Bulk roots increase monotonically toward the accumulation value 1.
    double worst = -std::numeric_limits<double>::infinity();
    for (int ell : {1, 3}) {
      std::vector<double> bulk;
      for (const auto& root : sph::dispersion_roots(ell, 0.05))
        if (root.kind == sph::RootKind::Bulk)
          bulk.push_back(root.eps_root.real());
      for (size_t i = 0; i + 1 < bulk.size(); ++i)
        worst = std::max(worst, bulk[i] - bulk[i + 1]);
      if (!bulk.empty()) worst = std::max(worst, bulk.back() - 1.0);
    }
    push("bulk_monotone", worst, 0.0);
  }

  {  // Contour solver against the one-dimensional root bracketing.
    const std::vector<int> labels = {1, 2, 3, 4};
    const double h = 0.05;
    nlpbem::nep::DiagonalPencil pencil(labels, h, &sph::lambda_ell,
                                       &sph::lambda_ell_dz);
    const nlpbem::nep::ContourRect rect{-0.05, 0.05, 0.1, 2.0};
    const auto poles = nlpbem::nep::beyn_solve(pencil, rect, {});
    double worst = 0.0;
    if (poles.size() != labels.size()) {
      worst = 1.0;
    } else {
      for (int ell : labels) {
        cplx oracle = 0.0;
        for (const auto& root : sph::dispersion_roots(ell, h))
          if (root.kind == sph::RootKind::Surface) oracle = root.z_root;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : poles) best = std::min(best, std::abs(p.z - oracle));
        worst = std::max(worst, best);
      }
    }
    push("beyn_vs_oracle", worst, 1e-10);
  }
}

void run_bem_checks(std::vector<Check>& checks, double perturb_kstar) {
  namespace bem = nlpbem::bem;
  namespace sph = nlpbem::sphere;
  auto push = [&checks](const std::string& name, double value,
                        double threshold) {
    checks.push_back({name, value, threshold, value <= threshold});
    note("check " + name + ": " + fmt17(value) + " (threshold " +
         fmt17(threshold) + ")");
  };

  {  // Adjoint-double-layer spectrum of the refined sphere discretization.
    const bem::TriMesh mesh = bem::build_icosphere(3);
    const auto ops = bem::assemble_static(mesh);
    const auto eig = nlpbem::la::real_eigs(ops.Kstar);
    std::vector<double> vals(static_cast<size_t>(eig.values.size()));
    for (Eigen::Index i = 0; i < eig.values.size(); ++i)
      vals[static_cast<size_t>(i)] = eig.values(i).real();
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    double worst_eig = 0.0, worst_eps = 0.0;
    size_t pos = 0;
    for (int ell = 0; ell <= 3; ++ell) {
      const double predicted = 1.0 / (2.0 * (2.0 * ell + 1.0));
      for (int m = 0; m < 2 * ell + 1; ++m, ++pos) {
        const double lam = vals.at(pos);
        worst_eig = std::max(worst_eig, std::abs(lam - predicted));
        if (ell >= 1) {
          const double eps_mapped = (2.0 * lam + 1.0) / (2.0 * lam - 1.0);
          worst_eps = std::max(
              worst_eps, std::abs(eps_mapped - sph::local_eigenvalue(ell)));
        }
      }
    }
    push("kstar_eigenvalues", worst_eig, 2e-2);
    push("eps_map", worst_eps, 5e-2);

    // Weighted-adjoint commutation of the static pair.
    const Eigen::VectorXd w = mesh.areas;
    Eigen::MatrixXd lhs = ops.Kstar.transpose() * (w.asDiagonal() * ops.S);
    lhs.array().colwise() /= w.array();
    const Eigen::MatrixXd rhs = ops.S * ops.Kstar;
    const double rel = (lhs - rhs).norm() / (ops.S.norm() * ops.Kstar.norm());
    push("symmetrization", rel, 5e-3);
  }

  {  // Quadratic-scaling identity between the full and reduced pencils.
    const bem::TriMesh mesh = bem::build_icosphere(2);
    double worst = 0.0;
    for (double h : {0.05, 0.2}) {
      const bem::PencilEvaluator ev(mesh, h, perturb_kstar);
      const std::vector<cplx> zs = {cplx(0.3, 0.7), cplx(-0.4, 1.2),
                                    cplx(1.5, 0.1), cplx(0.2, -0.6)};
      for (const cplx& z : zs) {
        const Eigen::MatrixXcd full = ev.lambda_full(z);
        const Eigen::MatrixXcd reduced = ev.lambda_tilde(z);
        const double rel =
            (z * z * reduced - full).norm() / full.norm();
        worst = std::max(worst, rel);
      }
    }
    push("pencil_identity", worst, 1e-10);
  }

  {  // Contour solver on the discretized sphere against the analytic root.
    const double h = 0.05;
    auto ev = std::make_shared<bem::PencilEvaluator>(bem::build_icosphere(2),
                                                     h, perturb_kstar);
    bem::BemPencil pencil(ev);
    const nlpbem::nep::ContourRect rect{-0.15, 0.15, 0.72, 0.92};
    nlpbem::nep::BeynParams params;
    params.axis_tol = 1e-3;
    params.dedup_tol = 1e-3 * rect.diameter();
    const auto poles = nlpbem::nep::beyn_solve(pencil, rect, params);
    cplx oracle = 0.0;
    for (const auto& root : sph::dispersion_roots(1, h))
      if (root.kind == sph::RootKind::Surface) oracle = root.z_root;
    double value = 1.0;
    if (!poles.empty()) {
      const auto best = std::min_element(
          poles.begin(), poles.end(),
          [&oracle](const auto& a, const auto& b) {
            return std::abs(a.z - oracle) < std::abs(b.z - oracle);
          });
      value = std::abs(best->z - oracle);
      if (best->degeneracy != 3) value += 1.0;
    }
    push("beyn_dipole_pole", value, 1e-1);
  }
}

int cmd_validate(const Resolved& r) {
  if (r.geometry != "sphere")
    throw ConfigError("validate: only the sphere geometry is supported");
  std::vector<Check> checks;
  run_analytic_checks(checks);
  if (!r.skip_bem) run_bem_checks(checks, r.perturb_kstar);

  std::ostringstream report;
  report << "# check\tvalue\tthreshold\tstatus\n";
  bool all_pass = true;
  for (const Check& c : checks) {
    report << c.name << '\t' << fmt17(c.value) << '\t' << fmt17(c.threshold)
           << '\t' << (c.pass ? "pass" : "fail") << '\n';
    all_pass = all_pass && c.pass;
  }
  std::cout << report.str();
  if (r.out != ".") {
    fs::create_directories(r.out);
    std::ofstream f(r.out / "validate_report.tsv", std::ios::binary);
    f << report.str();
    note("wrote " + (r.out / "validate_report.tsv").string());
  }
  return all_pass ? 0 : 2;
}

// ---------------------------------------------------------------------------

void add_common_options(CLI::App* sub, RawOptions& raw) {
  // The short help alias would collide with the screening-length flag --h.
  sub->set_help_flag("--help", "Print this help message and exit");
  raw.o_config = sub->add_option("--config", raw.config_path,
                                 "Flat key=value configuration file; "
                                 "command-line flags take precedence");
  raw.o_h = sub->add_option(
      "--h", raw.h, "Screening length(s), comma separated (e.g. 5e-4,1e-2)");
  raw.o_gamma =
      sub->add_option("--gamma", raw.gamma, "Drude damping rate (default 0.1)");
  raw.o_lmax = sub->add_option("--lmax", raw.lmax,
                               "Maximum spherical-harmonic degree");
  raw.o_geometry = sub->add_option(
      "--geometry", raw.geometry,
      "'sphere' (analytic) or a path to an OFF surface mesh (default sphere)");
  raw.o_out = sub->add_option("--out", raw.out,
                              "Output directory (default current directory)");
  raw.o_perturb = sub->add_option(
      "--perturb-kstar", raw.perturb,
      "Test hook: additively shift the adjoint double layer inside the "
      "reduced pencil by this amount");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Nonlocal plasmonic spectra of nanoparticles: quasi-static "
      "hydrodynamic Drude model via boundary-integral operator pencils"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  RawOptions raw_spectrum, raw_absorption, raw_nearfield, raw_validate;

  CLI::App* sub_spectrum = app.add_subcommand(
      "spectrum",
      "Plasmonic eigenvalue tables: writes eps_nonlocal_<h>.tsv per h plus "
      "eps_local.tsv (sphere), or a contour-solver pole table poles_<h>.tsv "
      "(mesh geometry)");
  add_common_options(sub_spectrum, raw_spectrum);
  raw_spectrum.o_contour = sub_spectrum->add_option(
      "--contour", raw_spectrum.contour,
      "Pole-search window <axis:lo:hi> with axis 'imag' (surface modes) or "
      "'real' (bulk modes); required for mesh geometries");
  raw_spectrum.o_dump = sub_spectrum->add_flag(
      "--dump-operators", raw_spectrum.dump_operators,
      "Also write the static boundary operators S.bin and Kstar.bin "
      "(mesh geometry)");

  CLI::App* sub_absorption = app.add_subcommand(
      "absorption",
      "Far-field absorption spectrum along the Drude trajectory: writes "
      "ffext_nonlocal.tsv and ffext_local.tsv (omega_hat TAB absorption), "
      "default grid 0.3:1.5:600");
  add_common_options(sub_absorption, raw_absorption);
  raw_absorption.o_omega = sub_absorption->add_option(
      "--omega", raw_absorption.omega, "Frequency grid <lo:hi:n>");

  CLI::App* sub_nearfield = app.add_subcommand(
      "nearfield",
      "Near-field response of a sphere to an exterior point dipole at "
      "standoff d: writes nfext_nonlocal_<d>.tsv and nfext_local_<d>.tsv "
      "with the radial derivative of the scattered potential at the dipole, "
      "default grid 0.4:1.0:600");
  add_common_options(sub_nearfield, raw_nearfield);
  raw_nearfield.o_omega = sub_nearfield->add_option(
      "--omega", raw_nearfield.omega, "Frequency grid <lo:hi:n>");
  raw_nearfield.o_d = sub_nearfield->add_option(
      "--d", raw_nearfield.d,
      "Dipole standoff distance(s) from the surface, comma separated "
      "(default 0.1)");

  CLI::App* sub_validate = app.add_subcommand(
      "validate",
      "Self-check suite; prints a TSV report (check, value, threshold, "
      "status) and exits 2 if any check fails");
  add_common_options(sub_validate, raw_validate);
  raw_validate.o_skip_bem = sub_validate->add_flag(
      "--skip-bem", raw_validate.skip_bem,
      "Run only the fast analytic subset (no mesh assembly)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (sub_spectrum->parsed()) {
      Resolved r = resolve_common(gather_slots(raw_spectrum),
                                  "5e-4,1e-2,2e-2,5e-2",
                                  OmegaGrid{0.3, 1.5, 600});
      return cmd_spectrum(r);
    }
    if (sub_absorption->parsed()) {
      Resolved r = resolve_common(gather_slots(raw_absorption), "2e-2",
                                  OmegaGrid{0.3, 1.5, 600});
      return cmd_absorption(r);
    }
    if (sub_nearfield->parsed()) {
      Resolved r = resolve_common(gather_slots(raw_nearfield), "2e-2",
                                  OmegaGrid{0.4, 1.0, 600});
      return cmd_nearfield(r);
    }
    Resolved r = resolve_common(gather_slots(raw_validate), "2e-2",
                                OmegaGrid{0.3, 1.5, 600});
    return cmd_validate(r);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const nlpbem::MeshError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const nlpbem::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const nlpbem::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
