#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dbound/audit.hpp"
#include "dbound/criteria.hpp"
#include "dbound/doubling.hpp"
#include "dbound/generators.hpp"
#include "dbound/mesh_io.hpp"
#include "dbound/spatial.hpp"
#include "dbound/teardrop.hpp"

namespace dbound::cli {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

ordered_json num(double x) { return std::isfinite(x) ? ordered_json(round12(x)) : ordered_json(nullptr); }

ordered_json vec3(const Point3& p) { return {num(p.x()), num(p.y()), num(p.z())}; }

struct Config {
  int threads = 0;
  std::uint64_t seed = 1;
  std::string output;
  std::string format = "json";
};

// Writes to -o when given, otherwise to `out`.
void emit(const Config& cfg, std::ostream& out, const std::string& text) {
  if (cfg.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.output, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + cfg.output);
  f << text;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string table_text(const Table& t, const std::string& format) {
  return format == "csv" ? t.to_csv() : t.to_text();
}

SurfaceMesh load_mesh(const std::string& path) { return SurfaceMesh::from_raw(read_mesh_file(path)); }

// ---------------------------------------------------------------- verify-bound

int cmd_verify_bound(const Config& cfg, const std::string& path, const std::string& mode, std::ostream& out) {
  const SurfaceMesh mesh = load_mesh(path);
  const int threads = resolve_threads(cfg.threads);
  ordered_json j;
  j["file"] = fs::path(path).filename().string();
  j["dimension"] = mesh.dimension();
  j["vertices"] = mesh.vertex_count();
  j["triangles"] = mesh.triangle_count();
  j["closed"] = mesh.closed();
  j["boundary_loops"] = mesh.boundary_loops().size();
  ordered_json checks = ordered_json::array();
  std::vector<BoundMode> modes;
  if (mode == "proven" || mode == "both") modes.push_back(BoundMode::kProven);
  if (mode == "conjectural" || mode == "both") modes.push_back(BoundMode::kConjectural);
  for (BoundMode m : modes) {
    const BoundCheck b = verify_bound(mesh, m, threads);
    if (checks.empty()) {
      j["diameter"] = num(b.diameter);
      j["total_mean_curvature"] = num(b.total_h);
      j["boundary_length"] = num(b.boundary_length);
    }
    ordered_json c;
    c["mode"] = m == BoundMode::kProven ? "proven" : "conjectural";
    c["rigorous"] = m == BoundMode::kProven;
    c["ct"] = num(b.ct);
    c["rhs"] = num(b.rhs);
    c["margin"] = num(b.margin);
    c["holds"] = b.holds();
    if (b.closed) {
      c["ratio"] = num(b.ratio);
      c["ratio_at_least_ct"] = b.ratio >= b.ct;
    }
    checks.push_back(c);
  }
  j["checks"] = checks;
  emit(cfg, out, dump(j));
  return 0;
}

// ---------------------------------------------------------------- double

int cmd_double(const Config& cfg, const std::string& path, const std::vector<int>& ks, std::optional<double> epsilon,
               const std::string& export_dir, std::ostream& out) {
  const SurfaceMesh mesh = load_mesh(path);
  if (mesh.closed()) throw std::invalid_argument("doubling needs a mesh with boundary");
  const int threads = resolve_threads(cfg.threads);
  const auto rows = convergence_table(mesh, ks, threads, epsilon);
  if (!export_dir.empty()) {
    fs::create_directories(export_dir);
    const std::string ext = mesh.dimension() == 3 ? ".obj" : ".mesh.json";
    for (int k : ks) {
      const DoubledSurface d = build_double(mesh, k, epsilon);
      write_mesh_file(fs::path(export_dir) / ("sigma_k" + std::to_string(k) + ext), d.sigma.raw());
    }
  }
  if (cfg.format != "json") {
    emit(cfg, out, table_text(convergence_report(rows), cfg.format));
    return 0;
  }
  ordered_json j;
  j["file"] = fs::path(path).filename().string();
  j["euler_characteristic"] = mesh.euler_characteristic();
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json o;
    o["k"] = r.k;
    o["epsilon"] = num(r.epsilon);
    o["curvature"] = num(r.curvature);
    o["target_curvature"] = num(r.target_curvature);
    o["curvature_error"] = num(r.curvature_error());
    o["diameter"] = num(r.diameter);
    o["target_diameter"] = num(r.target_diameter);
    o["diameter_error"] = num(r.diameter_error());
    o["diameter_bound"] = num(4.0 * r.epsilon);
    o["euler_characteristic"] = r.euler;
    o["closed"] = r.closed;
    o["connected"] = r.connected;
    arr.push_back(o);
  }
  j["rows"] = arr;
  emit(cfg, out, dump(j));
  return 0;
}

// ---------------------------------------------------------------- teardrop

int cmd_teardrop(const Config& cfg, const std::vector<int>& ks, int samples, const std::string& curve_dir,
                 std::ostream& out) {
  std::vector<TeardropCurve> curves(ks.size());
  parallel_for(ks.size(), resolve_threads(cfg.threads), [&](std::size_t i) {
    curves[i] = build_teardrop(ks[i], samples > 0 ? samples : default_samples_per_unit(ks[i]));
  });
  if (!curve_dir.empty()) {
    fs::create_directories(curve_dir);
    for (const auto& c : curves) {
      std::ofstream f(fs::path(curve_dir) / ("teardrop_k" + std::to_string(c.k) + ".txt"));
      write_teardrop(f, c);
    }
  }
  Table t({"k", "length", "samples", "total_abs_curvature", "error", "max_radius"});
  ordered_json arr = ordered_json::array();
  for (const auto& c : curves) {
    const double tc = c.total_abs_curvature();
    t.add_row({std::to_string(c.k), fmt12(c.total_length), std::to_string(c.samples.size()), fmt12(tc),
               fmt12(std::abs(tc - kPi)), fmt12(c.max_radius())});
    ordered_json o;
    o["k"] = c.k;
    o["length"] = num(c.total_length);
    o["samples"] = c.samples.size();
    o["total_abs_curvature"] = num(tc);
    o["error"] = num(std::abs(tc - kPi));
    o["max_radius"] = num(c.max_radius());
    arr.push_back(o);
  }
  if (cfg.format == "json")
    emit(cfg, out, dump(ordered_json{{"rows", arr}}));
  else
    emit(cfg, out, table_text(t, cfg.format));
  return 0;
}

// ---------------------------------------------------------------- check-contour

ordered_json entry_json(const CriterionEntry& e) {
  ordered_json o;
  o["criterion"] = e.criterion;
  o["verdict"] = to_string(e.verdict);
  o["rigorous"] = e.rigorous;
  o["margin"] = num(e.margin);
  o["normalized_margin"] = num(e.normalized_margin);
  ordered_json m = ordered_json::object();
  for (const auto& [k, v] : e.measured) m[k] = num(v);
  o["measured"] = m;
  if (!e.partition.empty()) {
    const auto a = std::count(e.partition.begin(), e.partition.end(), std::uint8_t{1});
    o["partition_sizes"] = {a, static_cast<long>(e.partition.size()) - a};
    if (e.partition.size() <= 64) o["partition"] = e.partition;
  }
  if (e.cone) {
    o["cone"] = {{"apex", vec3(e.cone->apex)}, {"axis", vec3(e.cone->axis)}, {"tau", num(e.cone->tau)},
                 {"margin", num(e.cone->margin)}};
  }
  if (!e.note.empty()) o["note"] = e.note;
  return o;
}

int cmd_check_contour(const Config& cfg, const std::string& path, int budget, bool conjectural, std::ostream& out) {
  const Contour c = read_contour_file(path);
  AnalyzeOptions opt;
  opt.threads = resolve_threads(cfg.threads);
  opt.conjectural = conjectural;
  opt.cone.budget = budget;
  const CriterionReport rep = analyze(c, opt);
  ordered_json j;
  j["file"] = fs::path(path).filename().string();
  j["components"] = rep.components;
  j["points"] = c.point_count();
  j["diameter"] = num(rep.diameter);
  j["length"] = num(rep.length);
  ordered_json entries = ordered_json::array();
  for (const auto& e : rep.entries) entries.push_back(entry_json(e));
  j["entries"] = entries;
  j["fired"] = rep.fired;
  j["disagreement"] = rep.disagreement;
  j["nonexistence_certified"] = rep.nonexistence_certified();
  emit(cfg, out, dump(j));
  return rep.nonexistence_certified() ? kExitCertified : 0;
}

// ---------------------------------------------------------------- gen

int cmd_gen(const Config& cfg, const std::string& name, const std::vector<std::string>& params, std::ostream& out) {
  ShapeParams p;
  for (const auto& kv : params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("parameter '" + kv + "' is not key=value");
    std::size_t used = 0;
    const std::string value = kv.substr(eq + 1);
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) throw std::invalid_argument("parameter '" + kv + "' has a non-numeric value");
    p[kv.substr(0, eq)] = v;
  }
  const Shape shape = shape_library(name, p, resolve_threads(cfg.threads));
  std::ostringstream doc;
  ordered_json summary;
  summary["shape"] = name;
  if (const auto* mesh = std::get_if<SurfaceMesh>(&shape)) {
    if (!cfg.output.empty()) write_mesh_file(cfg.output, mesh->raw());
    else write_mesh_json(doc, mesh->raw());
    summary["dimension"] = mesh->dimension();
    summary["vertices"] = mesh->vertex_count();
    summary["triangles"] = mesh->triangle_count();
  } else {
    const auto& c = std::get<Contour>(shape);
    if (!cfg.output.empty()) write_contour_file(cfg.output, c);
    else write_contour(doc, c);
    summary["components"] = c.components.size();
    summary["points"] = c.point_count();
  }
  if (cfg.output.empty()) {
    out << doc.str();
  } else {
    summary["file"] = fs::path(cfg.output).filename().string();
    out << summary.dump() << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- audit

int cmd_audit(const Config& cfg, AuditOptions opt, std::ostream& out) {
  opt.seed = cfg.seed;
  opt.threads = resolve_threads(cfg.threads);
  const AuditReport rep = run_audit(opt);
  if (cfg.format != "json") {
    emit(cfg, out, table_text(audit_table(rep), cfg.format));
    return 0;
  }
  ordered_json j;
  j["delta"] = num(kDelta);
  j["sigma"] = num(kSigma);
  j["seed"] = cfg.seed;
  ordered_json shapes = ordered_json::array();
  for (const auto& s : rep.shapes) {
    ordered_json o;
    o["shape"] = s.shape;
    ordered_json ms = ordered_json::array();
    for (const auto& m : s.michael_simon)
      ms.push_back({{"function", m.function}, {"lhs", num(m.lhs)}, {"gradient", num(m.gradient)},
                    {"curvature", num(m.curvature)}, {"rhs", num(m.rhs)}, {"ratio", num(m.ratio)},
                    {"margin", num(m.margin)}, {"holds", m.holds()}});
    o["michael_simon"] = ms;
    ordered_json balls = ordered_json::array();
    for (std::size_t i = 0; i < s.balls.size(); ++i) {
      const auto& b = s.balls[i];
      balls.push_back({{"vertex", s.probes[i]}, {"m", num(b.m)}, {"kappa", num(b.kappa)},
                       {"smallest_ratio", num(b.smallest_ratio)}, {"refinement_change", num(b.refinement_change)},
                       {"saturated", b.saturated}, {"dichotomy", b.dichotomy()}});
    }
    o["m_kappa"] = balls;
    o["covering"] = {{"d_int", num(s.covering.d_int)}, {"total_mean_curvature", num(s.covering.total_h)},
                     {"bound", num(s.covering.bound)}, {"margin", num(s.covering.margin)},
                     {"ratio", num(s.covering.ratio)}, {"exact", s.covering.exact}, {"sources", s.covering.sources}};
    o["topping_ratio"] = {{"diameter", num(s.bound.diameter)}, {"ratio", num(s.bound.ratio)},
                          {"ct", num(ct_constants(3))}, {"holds", s.bound.ratio >= ct_constants(3)}};
    shapes.push_back(o);
  }
  j["shapes"] = shapes;
  j["identity"] = {{"coefficient", num(rep.identity.coefficient)},
                   {"max_grid_residual", num(rep.identity.max_grid_residual)},
                   {"perturbed_delta", num(rep.perturbed.delta)},
                   {"perturbed_coefficient", num(rep.perturbed.coefficient)}};
  j["passed"] = rep.passed();
  emit(cfg, out, dump(j));
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diameter bounds, boundary doubling and Plateau nonexistence criteria", "dbound"};
  app.require_subcommand(1);
  Config cfg;
  app.add_option("--threads", cfg.threads, "Worker threads (0: DBOUND_THREADS or 1)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", cfg.seed, "Seed for randomised probes");

  auto add_output = [&](CLI::App* sub, bool with_format) {
    sub->add_option("-o,--output", cfg.output, "Write the report to a file");
    if (with_format) sub->add_option("--format", cfg.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
  };
  auto positive_k = CLI::Range(1, 1 << 20);

  std::string mesh_path, mode = "both";
  auto* verify = app.add_subcommand("verify-bound", "Check d <= (2 int|H| + pi/2 l) / C_T for a mesh");
  verify->add_option("mesh", mesh_path, ".obj or .mesh.json")->required()->check(CLI::ExistingFile);
  verify->add_option("--mode", mode, "proven, conjectural or both")->check(CLI::IsMember({"proven", "conjectural", "both"}));
  add_output(verify, false);

  std::vector<int> ks;
  std::optional<double> epsilon;
  std::string export_dir;
  auto* dbl = app.add_subcommand("double", "Double a mesh with boundary along teardrop tubes");
  dbl->add_option("mesh", mesh_path, ".obj or .mesh.json")->required()->check(CLI::ExistingFile);
  dbl->add_option("--k", ks, "Comma-separated k values")->delimiter(',')->check(positive_k)->default_str("10,50,100");
  dbl->add_option("--epsilon", epsilon, "Fixed tube scale")->check(CLI::PositiveNumber);
  dbl->add_option("--export-dir", export_dir, "Write each doubled surface here");
  add_output(dbl, true);

  int samples = 0;
  std::string curve_dir;
  auto* tear = app.add_subcommand("teardrop", "Teardrop curves and their total curvature");
  tear->add_option("--k", ks, "Comma-separated k values")->delimiter(',')->check(positive_k);
  tear->add_option("--samples", samples, "Samples per unit length (default scales with k)")->check(CLI::Range(100, 1 << 24));
  tear->add_option("--curve-dir", curve_dir, "Write `s x y` samples per k here");
  add_output(tear, true);

  std::string contour_path;
  int budget = 400;
  bool no_conjectural = false;
  auto* check = app.add_subcommand("check-contour", "Run the nonexistence criteria on a contour");
  check->add_option("contour", contour_path, ".contour.json")->required()->check(CLI::ExistingFile);
  check->add_option("--budget", budget, "Cone search evaluations per start")->check(CLI::Range(1, 1 << 24));
  check->add_flag("--no-conjectural", no_conjectural, "Skip the conjectural diameter/length entry");
  add_output(check, false);

  std::string shape;
  std::vector<std::string> params;
  auto* gen = app.add_subcommand("gen", "Generate a library mesh or contour");
  gen->add_option("shape", shape, "Shape name")->required()->check(CLI::IsMember(shape_names()));
  gen->add_option("--param", params, "key=value overrides")->take_all();
  gen->add_option("-o,--output", cfg.output, ".obj, .mesh.json or .contour.json");

  AuditOptions audit_opt;
  auto* audit = app.add_subcommand("audit", "Michael-Simon, m/kappa, identity and covering checks");
  audit->add_option("--shapes", audit_opt.shapes, "Closed library shapes")->delimiter(',');
  audit->add_option("--probes", audit_opt.probes, "Probe vertices per shape")->check(CLI::Range(1, 100000));
  audit->add_option("--radius", audit_opt.probe_radius, "Probe radius R")->check(CLI::PositiveNumber);
  audit->add_option("--r-samples", audit_opt.r_samples, "Radius grid size")->check(CLI::Range(50, 100000));
  add_output(audit, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*verify) return cmd_verify_bound(cfg, mesh_path, mode, out);
    if (*dbl) {
      if (ks.empty()) ks = {10, 50, 100};
      return cmd_double(cfg, mesh_path, ks, epsilon, export_dir, out);
    }
    if (*tear) {
      if (ks.empty()) ks = {10, 100, 1000};
      return cmd_teardrop(cfg, ks, samples, curve_dir, out);
    }
    if (*check) return cmd_check_contour(cfg, contour_path, budget, !no_conjectural, out);
    if (*gen) return cmd_gen(cfg, shape, params, out);
    if (*audit) return cmd_audit(cfg, audit_opt, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace dbound::cli
