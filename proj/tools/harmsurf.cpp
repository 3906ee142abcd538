// harmsurf command-line front end: build harmonic-surface fields from a JSON
// config, run the verification suite, compute multipole expansions, decompose
// Weierstrass data, and export meshes/CSVs.
//
// Exit codes: 0 success, 2 config/expression parse error, 3 verification
// check failed, 4 I/O error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "harmsurf/harmsurf.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace harmsurf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCheck = 3;
constexpr int kExitIo = 4;

struct ConfigError : Error {
  using Error::Error;
};

struct OutputSpec {
  std::optional<std::string> obj;
  std::optional<std::string> csv;
  bool unwrap = false;
  int layers = 0;
  double layer_spacing = 0.0;
  bool layer_spacing_set = false;
};

struct MultipoleSpec {
  int K = 8;
  Cplx center{0.0, 0.0};
  std::vector<double> eval_radii;
};

struct BuiltField {
  EnneperImmersion X;
  std::string name;
  std::optional<MotifConfiguration> motifs;
  std::optional<TgbParams> tgb;   // set for the single grain boundary
  double default_layer_spacing = 1.0;
  bool nonharmonic_hook = false;  // test hook: verify against a non-harmonic field
};

struct Config {
  BuiltField field;
  GridSpec grid{64, 64};
  OutputSpec output;
  MultipoleSpec multipole;
  unsigned seed = 0;
};

double get_num(const json& j, const std::string& section, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError("config: " + section + "." + key + " must be a number");
  return j[key].get<double>();
}

Cplx get_point(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError("config: " + what + " must be [x, y]");
  return Cplx(j[0].get<double>(), j[1].get<double>());
}

Domain parse_domain(const json& cfg, const Domain& fallback) {
  if (!cfg.contains("domain")) return fallback;
  const json& d = cfg["domain"];
  const std::string kind = d.value("kind", "rectangle");
  if (kind == "rectangle") {
    if (!d.contains("bounds") || !d["bounds"].is_array() || d["bounds"].size() != 4)
      throw ConfigError("config: domain.bounds must be [x0, x1, y0, y1]");
    const auto& b = d["bounds"];
    const double x0 = b[0].get<double>(), x1 = b[1].get<double>();
    const double y0 = b[2].get<double>(), y1 = b[3].get<double>();
    if (!(x0 < x1) || !(y0 < y1))
      throw ConfigError("config: domain.bounds must satisfy x0 < x1 and y0 < y1");
    return Domain::rectangle(x0, x1, y0, y1);
  }
  if (kind == "annulus") {
    const Cplx c = d.contains("center") ? get_point(d["center"], "domain.center") : Cplx(0, 0);
    const double r_in = get_num(d, "domain", "r_in");
    const double r_out = get_num(d, "domain", "r_out");
    if (!(r_in >= 0.0) || !(r_out > r_in))
      throw ConfigError("config: domain needs 0 <= r_in < r_out");
    return Domain::annulus(c, r_in, r_out);
  }
  throw ConfigError("config: domain.kind must be 'rectangle' or 'annulus'");
}

BuiltField build_field(const json& cfg) {
  const int sources = cfg.contains("motifs") + cfg.contains("tgb") + cfg.contains("tgb_pi2") +
                      cfg.contains("utgb");
  if (sources != 1)
    throw ConfigError("config: exactly one field source (motifs | tgb | tgb_pi2 | utgb) required");

  BuiltField out;
  const double exclusion = cfg.contains("domain") && cfg["domain"].contains("exclusion")
                               ? cfg["domain"]["exclusion"].get<double>()
                               : -1.0;

  if (cfg.contains("motifs")) {
    const json& ms = cfg["motifs"];
    if (!ms.is_array() || ms.empty())
      throw ConfigError("config: motifs must be a non-empty array");
    std::vector<Motif> motifs;
    for (const auto& m : ms) {
      const double pitch = get_num(m, "motifs[]", "pitch");
      if (pitch == 0.0) throw ConfigError("config: motifs[].pitch must be nonzero");
      motifs.push_back({pitch, get_point(m.at("center"), "motifs[].center")});
    }
    MotifConfiguration mc =
        cfg.contains("domain")
            ? MotifConfiguration::make(motifs, parse_domain(cfg, Domain::rectangle(-1, 1, -1, 1)),
                                       exclusion)
            : MotifConfiguration::make(motifs, exclusion);
    out.X = motif_field(mc);
    out.motifs = std::move(mc);
    out.name = "motifs";
    double total = 0.0;
    for (const auto& m : motifs) total += std::abs(m.pitch);
    out.default_layer_spacing = total > 0.0 ? 2.0 * kPi * total : 1.0;
  } else if (cfg.contains("tgb")) {
    const json& t = cfg["tgb"];
    TgbParams p{get_num(t, "tgb", "b"), get_num(t, "tgb", "lambda"), get_num(t, "tgb", "d")};
    if (!(p.d > 0.0)) throw ConfigError("config: tgb.d must be > 0");
    if (p.lambda == 0.0) throw ConfigError("config: tgb.lambda must be nonzero");
    out.X = cfg.contains("domain") ? tgb_single(p, parse_domain(cfg, Domain::rectangle(-1, 1, -1, 1)))
                                   : tgb_single(p);
    out.tgb = p;
    out.name = "tgb";
    out.default_layer_spacing = 1.0 / std::abs(p.lambda);
  } else if (cfg.contains("tgb_pi2")) {
    const json& t = cfg["tgb_pi2"];
    const double k = get_num(t, "tgb_pi2", "k");
    if (!(k > 0.0) || !(k < 1.0)) throw ConfigError("config: tgb_pi2.k must satisfy 0 < k < 1");
    Pi2TgbParams p{get_num(t, "tgb_pi2", "b"), get_num(t, "tgb_pi2", "lambda"),
                   get_num(t, "tgb_pi2", "theta"), get_num(t, "tgb_pi2", "psi"),
                   EllipticModulus(k)};
    if (!(p.theta_scale > 0.0) || !(p.psi_scale > 0.0))
      throw ConfigError("config: tgb_pi2.theta and tgb_pi2.psi must be > 0");
    if (p.lambda == 0.0) throw ConfigError("config: tgb_pi2.lambda must be nonzero");
    out.X = cfg.contains("domain") ? tgb_pi2(p, parse_domain(cfg, Domain::rectangle(-1, 1, -1, 1)))
                                   : tgb_pi2(p);
    out.name = "tgb_pi2";
    out.default_layer_spacing = 1.0 / std::abs(p.lambda);
  } else {
    const json& t = cfg["utgb"];
    const double pitch = get_num(t, "utgb", "pitch");
    const double d = get_num(t, "utgb", "d");
    if (!(d > 0.0)) throw ConfigError("config: utgb.d must be > 0");
    if (pitch == 0.0) throw ConfigError("config: utgb.pitch must be nonzero");
    out.X = cfg.contains("domain")
                ? utgb(pitch, d, parse_domain(cfg, Domain::rectangle(-1, 1, -1, 1)))
                : utgb(pitch, d);
    out.name = "utgb";
    out.default_layer_spacing = 2.0 * kPi * std::abs(pitch);
  }

  if (cfg.contains("_test_hooks"))
    out.nonharmonic_hook = cfg["_test_hooks"].value("nonharmonic", false);
  return out;
}

Config load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config '" + path + "'");
  json cfg;
  try {
    cfg = json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  Config out;
  out.field = build_field(cfg);
  if (cfg.contains("grid")) {
    out.grid.nx = static_cast<int>(get_num(cfg["grid"], "grid", "nx"));
    out.grid.ny = static_cast<int>(get_num(cfg["grid"], "grid", "ny"));
    if (out.grid.nx < 2 || out.grid.ny < 2)
      throw ConfigError("config: grid.nx and grid.ny must be >= 2");
  }
  if (cfg.contains("output")) {
    const json& o = cfg["output"];
    if (o.contains("obj")) out.output.obj = o["obj"].get<std::string>();
    if (o.contains("csv")) out.output.csv = o["csv"].get<std::string>();
    out.output.unwrap = o.value("unwrap", false);
    if (o.contains("layers")) {
      out.output.layers = static_cast<int>(get_num(o["layers"], "output.layers", "count"));
      if (o["layers"].contains("spacing")) {
        out.output.layer_spacing = o["layers"]["spacing"].get<double>();
        out.output.layer_spacing_set = true;
      }
    }
  }
  if (cfg.contains("multipole")) {
    const json& m = cfg["multipole"];
    if (m.contains("K")) out.multipole.K = static_cast<int>(get_num(m, "multipole", "K"));
    if (out.multipole.K < 0) throw ConfigError("config: multipole.K must be >= 0");
    if (m.contains("center")) out.multipole.center = get_point(m["center"], "multipole.center");
    if (m.contains("eval_radii"))
      for (const auto& r : m["eval_radii"]) out.multipole.eval_radii.push_back(r.get<double>());
  }
  if (cfg.contains("seed")) out.seed = cfg["seed"].get<unsigned>();
  return out;
}

// --- verification suite ----------------------------------------------------

std::function<bool(Cplx)> safe_predicate(const Domain& d, double clearance) {
  return [&d, clearance](Cplx z) {
    return d.in_box(z) && d.puncture_clearance(z) > clearance;
  };
}

void harmonicity_reports(const BuiltField& f, unsigned seed,
                         std::vector<VerificationReport>& out) {
  const Domain& d = f.X.domain;
  ProbeSpec spec;
  spec.seed = seed;
  spec.n_random = 30;
  const std::vector<Cplx> candidates = probe_points(d, spec);
  // Size the stencil to the clearance actually available: fields with dense
  // singularity lattices get a finer delta instead of an empty probe set.
  std::vector<double> clear;
  for (Cplx z : candidates) clear.push_back(d.puncture_clearance(z));
  std::vector<double> sorted = clear;
  std::sort(sorted.begin(), sorted.end());
  const double c80 = sorted.empty() ? 0.0 : sorted[sorted.size() * 4 / 5];
  const double delta0 =
      std::max(1e-5, std::min(0.01 * std::min(d.width(), d.height()), c80 / 35.0));
  std::vector<Cplx> pts;
  for (size_t i = 0; i < candidates.size(); ++i) {
    const Cplx z = candidates[i];
    if (clear[i] > 30.0 * delta0 && z.real() > d.x0 + 5 * delta0 &&
        z.real() < d.x1 - 5 * delta0 && z.imag() > d.y0 + 5 * delta0 &&
        z.imag() < d.y1 - 5 * delta0)
      pts.push_back(z);
  }
  if (pts.size() < 3) {
    out.push_back({"harmonicity", f.name + "/insufficient-probes", 1.0, 0.0, false});
    return;
  }
  const auto safe = safe_predicate(d, 10.0 * delta0);
  const std::string tag = f.name + "/seed" + std::to_string(seed);
  if (f.nonharmonic_hook) {
    // Deliberately broken height for exercising the failure path.
    const auto bad = [](Cplx z) { return z.real() * z.real(); };
    const auto r = richardson_laplacian(std::function<double(Cplx)>(bad), pts, delta0, safe);
    const double drop = r.residuals[2] / std::max(r.residuals[0], 1e-300);
    out.push_back({"harmonicity", tag + "/hooked", drop, 0.13, drop <= 0.13});
    return;
  }
  const auto r = richardson_laplacian(f.X.h, pts, delta0, safe);
  if (r.stencil_exact) {
    out.push_back({"harmonicity", tag + "/stencil-exact", r.residuals[2], 1e-9, true});
    return;
  }
  const double drop = r.residuals[2] / std::max(r.residuals[0], 1e-300);
  out.push_back({"harmonicity", tag, drop, 0.13, drop <= 0.13});
}

void mask_reports(const BuiltField& f, unsigned seed, std::vector<VerificationReport>& out) {
  ProbeSpec spec;
  spec.seed = seed;
  const std::vector<Cplx> pts = probe_points(f.X.domain, spec);
  const auto mask = immersion_map(f.X, pts);
  size_t bad = 0;
  for (bool ok : mask)
    if (!ok) ++bad;
  const std::string tag = f.name + "/seed" + std::to_string(seed);
  out.push_back({"immersion-mask", tag,
                 static_cast<double>(bad) / std::max<size_t>(mask.size(), 1), 0.0, bad == 0});
  bool graph = false;
  try {
    graph = is_harmonic_graph(f.X, pts);
  } catch (const Error&) {
  }
  out.push_back({"graph-univalence", tag, graph ? 0.0 : 1.0, 0.0, graph});
}

void winding_reports(const BuiltField& f, std::vector<VerificationReport>& out) {
  const Domain& d = f.X.domain;
  const auto centers = f.X.h.winding_centers(d.x0, d.x1, d.y0, d.y1);
  int idx = 0;
  for (const auto& [pos, pitch] : centers) {
    double nearest = std::min({pos.real() - d.x0, d.x1 - pos.real(), pos.imag() - d.y0,
                               d.y1 - pos.imag()});
    for (const auto& [other, p2] : centers)
      if (other != pos) nearest = std::min(nearest, 0.5 * std::abs(other - pos));
    const double radius = 0.8 * nearest;
    if (!(radius > 1e-6)) continue;
    char spec[64];
    std::snprintf(spec, sizeof spec, "%s/s%02d", f.name.c_str(), idx);
    try {
      const auto w = winding_check(f.X.h, Loop{pos, radius, 4096});
      const double err = std::abs(w.value - pitch);
      out.push_back({"winding", spec, err, 1e-8, err <= 1e-8 && w.converged});
    } catch (const LoopHitsSingularity&) {
      out.push_back({"winding", spec, 1.0, 1e-8, false});
    }
    ++idx;
  }
  if (f.motifs) {
    // Net charge over a loop enclosing every motif, if it fits the domain.
    const Cplx c = d.center();
    double rmax = 0.0;
    for (const auto& m : f.motifs->motifs) rmax = std::max(rmax, std::abs(m.center - c));
    const double fit = 0.9 * std::min({c.real() - d.x0, d.x1 - c.real(), c.imag() - d.y0,
                                       d.y1 - c.imag()});
    if (fit > 1.2 * rmax && rmax > 0.0) {
      const auto w = winding_check(f.X.h, Loop{c, std::max(1.2 * rmax, 0.5 * fit), 4096});
      const double err = std::abs(w.value - f.motifs->total_pitch());
      out.push_back({"net-charge", f.name, err, 1e-8, err <= 1e-8 && w.converged});
    }
  }
}

void scherk_reports(const BuiltField& f, std::vector<VerificationReport>& out) {
  if (!f.tgb) return;
  const TgbParams& p = *f.tgb;
  const Cplx z = p.d * Cplx(0.3, 0.4);
  const double period = std::abs(p.b / p.lambda);
  for (int N : {1, 10, 100, 1000}) {
    const auto r = scherk_row_check(p, N, z);
    char spec[32];
    std::snprintf(spec, sizeof spec, "N=%d", N);
    const double tol = N == 1000 ? 1e-3 * period : period;
    out.push_back({"scherk-row", spec, r.gap, tol, r.gap <= tol});
  }
}

std::vector<VerificationReport> run_suite(const BuiltField& f, unsigned seed) {
  std::vector<VerificationReport> reports;
  harmonicity_reports(f, seed, reports);
  mask_reports(f, seed, reports);
  winding_reports(f, reports);
  scherk_reports(f, reports);
  return reports;
}

// --- outputs -----------------------------------------------------------------

void write_field_outputs(const Config& cfg, const fs::path& out_dir, bool unwrap_flag) {
  const BuiltField& f = cfg.field;
  MeshOptions mo;
  mo.unwrap = cfg.output.unwrap || unwrap_flag;
  if (cfg.output.obj) {
    SurfaceMesh mesh = sample_graph(f.X, cfg.grid, mo);
    if (cfg.output.layers > 0) {
      const double spacing = cfg.output.layer_spacing_set ? cfg.output.layer_spacing
                                                          : f.default_layer_spacing;
      mesh = with_layer_stack(std::move(mesh), cfg.output.layers, spacing);
    }
    export_obj(mesh, (out_dir / *cfg.output.obj).string());
  }
  if (cfg.output.csv) {
    std::vector<std::vector<double>> rows;
    const detail::ParamMap pm{f.X.domain, cfg.grid.nx, cfg.grid.ny};
    for (int j = 0; j < cfg.grid.ny; ++j)
      for (int i = 0; i < cfg.grid.nx; ++i) {
        const Cplx z = pm(i, j);
        if (!f.X.domain.contains(z)) continue;
        try {
          const double h = f.X.height(z);
          if (std::isfinite(h)) rows.push_back({z.real(), z.imag(), h});
        } catch (const Error&) {
        }
      }
    export_csv((out_dir / *cfg.output.csv).string(), {"x", "y", "value"}, rows);
  }
}

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + out + "'");
  return dir;
}

// --- subcommands -------------------------------------------------------------

int cmd_build(const std::string& config_path, const std::string& out, GridSpec* grid_override,
              unsigned* seed_override, bool unwrap_flag) {
  Config cfg = load_config(config_path);
  if (grid_override) cfg.grid = *grid_override;
  if (seed_override) cfg.seed = *seed_override;
  const fs::path out_dir = prepare_out_dir(out);

  const auto reports = run_suite(cfg.field, cfg.seed);
  std::cout << format_reports(reports);
  if (!all_pass(reports)) {
    std::cerr << "build: mandatory checks failed\n";
    return kExitCheck;
  }
  write_field_outputs(cfg, out_dir, unwrap_flag);
  std::cout << "build: ok (" << cfg.field.name << ")\n";
  return kExitOk;
}

int cmd_verify(const std::string& config_path, const std::string& out,
               unsigned* seed_override) {
  Config cfg = load_config(config_path);
  if (seed_override) cfg.seed = *seed_override;
  const fs::path out_dir = prepare_out_dir(out);
  const auto reports = run_suite(cfg.field, cfg.seed);
  std::cout << format_reports(reports);
  write_reports_csv((out_dir / "verify_report.csv").string(), reports);
  return all_pass(reports) ? kExitOk : kExitCheck;
}

int cmd_multipole(const std::string& config_path, const std::string& out, int K_flag,
                  const std::vector<double>& radii_flag) {
  Config cfg = load_config(config_path);
  if (!cfg.field.motifs)
    throw ConfigError("multipole: config must use the 'motifs' field source");
  const MotifConfiguration& mc = *cfg.field.motifs;
  const int K = K_flag >= 0 ? K_flag : cfg.multipole.K;
  if (K < 0) throw ConfigError("multipole: K must be >= 0");
  const fs::path out_dir = prepare_out_dir(out);

  const MultipoleExpansion e = multipole_coeffs(mc, K, cfg.multipole.center);
  std::printf("p = %.15g\n", e.p);
  std::printf("r_min = %.15g\n", e.r_min);
  for (int k = 1; k <= K; ++k)
    std::printf("c_%d = %.15g %+.15gi\n", k, e.c[k - 1].real(), e.c[k - 1].imag());

  std::vector<double> radii = radii_flag.empty() ? cfg.multipole.eval_radii : radii_flag;
  if (radii.empty()) {
    const double base = std::max(e.r_min, 0.5);
    radii = {2.5 * base, 5.0 * base, 10.0 * base, 20.0 * base};
  }
  std::vector<std::vector<double>> rows;
  for (double r : radii) {
    if (!(r > 1.05 * e.r_min))
      throw ConfigError("multipole: eval radius " + std::to_string(r) +
                        " not outside 1.05 * r_min");
    const double bound = truncation_error_estimate(e, mc, r);
    for (int a = 0; a < 64; ++a) {
      const double theta = 2.0 * kPi * a / 64.0;
      const Cplx z = e.center + std::polar(r, theta);
      rows.push_back({r, theta, motif_field_far_gauge(mc, z, e.center), multipole_eval(e, z),
                      bound});
    }
  }
  export_csv((out_dir / "multipole.csv").string(), {"r", "theta", "h_exact", "h_K", "bound"},
             rows);
  return kExitOk;
}

int cmd_decompose(const std::string& datum, const std::string& f_expr, const std::string& g_expr,
                  const std::string& out, GridSpec grid, bool maximal) {
  WeierstrassData w;
  if (!datum.empty()) {
    w = weierstrass_catalog(datum);  // throws OutOfRange for unknown names
  } else {
    if (f_expr.empty() || g_expr.empty())
      throw ConfigError("decompose: give a catalog name or both --F and --G");
    w.F = parse_expression(f_expr);
    w.G = parse_expression(g_expr);
    w.domain = Domain::rectangle(-1.0, 1.0, -1.0, 1.0);
  }
  const fs::path out_dir = prepare_out_dir(out);
  const HarmonicPair pair = maximal ? decompose_maximal(w) : decompose_minimal(w);

  const auto direct = [&](Cplx z) {
    return maximal ? weierstrass_maximal(w, z) : weierstrass_minimal(w, z);
  };
  const std::string main_name = maximal ? "xmax" : "xmin";
  export_obj(sample_map([&](Cplx z) { return pair.recompose(z); }, w.domain, grid, -1.0,
                        main_name),
             (out_dir / (main_name + ".obj")).string());
  export_obj(sample_map([&](Cplx z) { return pair.X1.point(z); }, w.domain, grid, -1.0, "x1"),
             (out_dir / "x1.obj").string());
  export_obj(sample_map([&](Cplx z) { return pair.X2.point(z); }, w.domain, grid, -1.0, "x2"),
             (out_dir / "x2.obj").string());

  // Recomposition residual + conformality on a probe grid, written as rows of
  // the surface CSV and summarized in a report.
  double max_resid = 0.0, max_conf = 0.0;
  std::vector<std::vector<double>> rows;
  const EnneperImmersion recomposed = pair.recompose_enneper();
  for (Cplx z : probe_points(w.domain, ProbeSpec{15, 15, 0, 0})) {
    try {
      const Vec3 a = pair.recompose(z);
      const Vec3 b = direct(z);
      const double resid = norm_inf(a - b);
      const Cplx conf = maximal ? lorentz_conformality(recomposed, z)
                                : euclidean_conformality(recomposed, z);
      max_resid = std::max(max_resid, resid);
      max_conf = std::max(max_conf, std::abs(conf));
      rows.push_back({z.real(), z.imag(), a[0], a[1], a[2], resid});
    } catch (const Error&) {
    }
  }
  export_csv((out_dir / (main_name + ".csv")).string(), {"x", "y", "sx", "sy", "sz", "residual"},
             rows);
  std::vector<VerificationReport> reports;
  reports.push_back(VerificationReport::make("recomposition", main_name, max_resid, 1e-9));
  reports.push_back(VerificationReport::make(
      maximal ? "lorentz-conformality" : "euclid-conformality", main_name, max_conf, 1e-10));
  std::cout << format_reports(reports);
  write_reports_csv((out_dir / "decompose_report.csv").string(), reports);
  return all_pass(reports) ? kExitOk : kExitCheck;
}

int cmd_mesh(const std::string& config_path, const std::string& out, GridSpec* grid_override,
             bool unwrap_flag) {
  Config cfg = load_config(config_path);
  if (grid_override) cfg.grid = *grid_override;
  if (!cfg.output.obj && !cfg.output.csv) cfg.output.obj = cfg.field.name + ".obj";
  write_field_outputs(cfg, prepare_out_dir(out), unwrap_flag);
  std::cout << "mesh: ok (" << cfg.field.name << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"harmonic-surface construction, verification and meshing"};
  app.require_subcommand(1);

  std::string config_path, out = ".";
  std::string grid_str, datum, f_expr, g_expr;
  std::vector<double> radii;
  int K = -1;
  unsigned seed = 0;
  bool seed_set = false, unwrap = false, maximal = false;

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config)
      sub->add_option("config", config_path, "JSON config file")->required();
    sub->add_option("--out", out, "output directory (default .)");
    sub->add_option("--grid", grid_str, "grid as NX,NY");
    sub->add_option("--seed", seed, "probe RNG seed")->each([&](const std::string&) {
      seed_set = true;
    });
  };

  CLI::App* build = app.add_subcommand("build", "build a field, run checks, write outputs");
  add_common(build, true);
  build->add_flag("--unwrap", unwrap, "unwrap angular terms in meshes");

  CLI::App* verify = app.add_subcommand("verify", "run the verification suite");
  add_common(verify, true);

  CLI::App* multipole = app.add_subcommand("multipole", "multipole coefficients and far field");
  add_common(multipole, true);
  multipole->add_option("--K", K, "truncation order (overrides config)");
  multipole->add_option("--radii", radii, "evaluation radii");

  CLI::App* decompose = app.add_subcommand("decompose", "split Weierstrass data into harmonic parts");
  decompose->add_option("datum", datum, "catalog name (enneper | catenoid | helicoid)");
  decompose->add_option("--F", f_expr, "F expression");
  decompose->add_option("--G", g_expr, "G expression");
  decompose->add_option("--out", out, "output directory (default .)");
  decompose->add_option("--grid", grid_str, "grid as NX,NY");
  decompose->add_flag("--maximal", maximal, "emit the maximal-surface recomposition");

  CLI::App* mesh = app.add_subcommand("mesh", "mesh a field without verification");
  add_common(mesh, true);
  mesh->add_flag("--unwrap", unwrap, "unwrap angular terms in meshes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  GridSpec grid{64, 64};
  GridSpec* grid_ptr = nullptr;
  if (!grid_str.empty()) {
    if (std::sscanf(grid_str.c_str(), "%d,%d", &grid.nx, &grid.ny) != 2 || grid.nx < 2 ||
        grid.ny < 2) {
      std::cerr << "error: --grid must be NX,NY with both >= 2\n";
      return kExitConfig;
    }
    grid_ptr = &grid;
  }
  unsigned* seed_ptr = seed_set ? &seed : nullptr;

  try {
    if (build->parsed()) return cmd_build(config_path, out, grid_ptr, seed_ptr, unwrap);
    if (verify->parsed()) return cmd_verify(config_path, out, seed_ptr);
    if (multipole->parsed()) return cmd_multipole(config_path, out, K, radii);
    if (decompose->parsed())
      return cmd_decompose(datum, f_expr, g_expr, out, grid_ptr ? *grid_ptr : GridSpec{48, 48},
                           maximal);
    if (mesh->parsed()) return cmd_mesh(config_path, out, grid_ptr, unwrap);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const OutOfRange& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheck;
  }
  return kExitConfig;
}
