#include "dbound/audit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dbound/generators.hpp"
#include "dbound/spatial.hpp"

namespace dbound {

double ct_constants(int n, BoundMode mode) {
  if (n < 3) throw std::invalid_argument("Topping constant needs ambient dimension n >= 3");
  if (mode == BoundMode::kConjectural) return kPi;
  return n <= 4 ? kPi / 16.0 : kPi / 32.0;
}

BoundCheck verify_bound(const SurfaceMesh& mesh, BoundMode mode, int threads) {
  BoundCheck b;
  b.diameter = extrinsic_diameter(mesh.vertices(), DiameterMethod::kBranchAndBound, threads);
  b.total_h = total_mean_curvature(mesh);
  b.boundary_length = boundary_length(mesh);
  b.ct = ct_constants(mesh.dimension(), mode);
  b.rhs = (2.0 * b.total_h + 0.5 * kPi * b.boundary_length) / b.ct;
  b.margin = b.rhs - b.diameter;
  b.closed = mesh.closed();
  b.ratio = b.total_h / b.diameter;
  return b;
}

// ---------------------------------------------------------------- Michael-Simon

MichaelSimonRecord michael_simon_check(const SurfaceMesh& mesh, const MeanCurvatureField& field,
                                       const TestFunction& f) {
  const auto& v = f.values;
  if (v.size() != mesh.vertex_count()) throw std::invalid_argument("test function needs one value per vertex");
  for (double x : v)
    if (!(x >= 0.0)) throw std::invalid_argument("test function must be nonnegative");

  NeumaierSum l2, grad, curv;
  for (std::size_t i = 0; i < v.size(); ++i) {
    l2.add(v[i] * v[i] * field.area[i]);
    if (!field.boundary[i]) curv.add(field.magnitude(i) * v[i] * field.area[i]);
  }
  const auto verts = mesh.vertices();
  const auto tris = mesh.triangles();
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& tri = tris[t];
    const Vec e1 = verts[tri[1]] - verts[tri[0]];
    const Vec e2 = verts[tri[2]] - verts[tri[0]];
    const double df1 = v[tri[1]] - v[tri[0]], df2 = v[tri[2]] - v[tri[0]];
    if (df1 == 0.0 && df2 == 0.0) continue;
    // Gram system for the in-plane gradient g = a e1 + b e2.
    Eigen::Matrix2d gram;
    gram << e1.dot(e1), e1.dot(e2), e1.dot(e2), e2.dot(e2);
    const Eigen::Vector2d rhs(df1, df2);
    const Eigen::Vector2d ab = gram.ldlt().solve(rhs);
    grad.add(std::sqrt(std::max(0.0, ab.dot(rhs))) * mesh.triangle_area(t));
  }
  MichaelSimonRecord r;
  r.function = f.description;
  r.lhs = kSigma * std::sqrt(l2.value());
  r.gradient = grad.value();
  r.curvature = curv.value();
  r.rhs = r.gradient + 2.0 * r.curvature;
  r.ratio = r.lhs / r.rhs;
  r.margin = r.rhs * (1.0 + kMichaelSimonSlack) - r.lhs;
  return r;
}

MichaelSimonRecord michael_simon_check(const SurfaceMesh& mesh, const TestFunction& f) {
  return michael_simon_check(mesh, mean_curvature_field(mesh), f);
}

TestFunction cutoff_function(const SurfaceMesh& mesh, Index p, double r, double mu) {
  if (!(r >= 0.0) || !(mu > 0.0)) throw std::invalid_argument("cutoff needs r >= 0 and mu > 0");
  const auto dist = geodesic_distances(mesh, p, GeodesicMethod::kFastMarching);
  TestFunction f;
  f.description = "cutoff p=" + std::to_string(p) + " r=" + fmt12(r) + " mu=" + fmt12(mu);
  f.values.resize(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) f.values[i] = std::clamp(1.0 - (dist[i] - r) / mu, 0.0, 1.0);
  return f;
}

std::vector<TestFunction> michael_simon_library(const SurfaceMesh& mesh, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t n = mesh.vertex_count();
  auto pick = [&] { return static_cast<Index>(std::min<std::size_t>(n - 1, uniform01(rng) * n)); };
  const double d = extrinsic_diameter(mesh.vertices());

  std::vector<TestFunction> lib;
  for (double c : {1.0, 3.5}) lib.push_back({"constant " + fmt12(c), std::vector<double>(n, c)});
  for (auto [r, mu] : {std::pair{1.0, 0.3}, {0.5, 0.2}, {0.25 * d, 0.1 * d}}) lib.push_back(cutoff_function(mesh, pick(), r, mu));
  const auto verts = mesh.vertices();
  for (int k = 0; k < 3; ++k) {
    struct Bump { Vec c; double a, s; };
    std::vector<Bump> bumps;
    for (int j = 0; j < 3; ++j) bumps.push_back({verts[pick()], 0.5 + uniform01(rng), (0.05 + 0.2 * uniform01(rng)) * d});
    TestFunction f;
    f.description = "bumps #" + std::to_string(k);
    f.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (const auto& b : bumps) s += b.a * std::exp(-(verts[i] - b.c).squaredNorm() / (2.0 * b.s * b.s));
      f.values[i] = s;
    }
    lib.push_back(std::move(f));
  }
  return lib;
}

// ---------------------------------------------------------------- m / kappa

namespace {

struct GridExtrema {
  double m = 0.0, kappa = kInfinity, argmax_m = 0.0, argmin_kappa = 0.0, first_ratio = 0.0;
};

GridExtrema scan(const IntrinsicBalls& balls, std::span<const double> density, double R, int n) {
  GridExtrema g;
  for (int j = 1; j <= n; ++j) {
    const double r = R * j / n;
    const double mr = balls.integrate(density, r) / r;
    const double kr = balls.volume(r) / (r * r);
    if (j == 1) g.first_ratio = kr;
    if (mr > g.m) {
      g.m = mr;
      g.argmax_m = r;
    }
    if (kr < g.kappa) {
      g.kappa = kr;
      g.argmin_kappa = r;
    }
  }
  return g;
}

}  // namespace

MKappa m_kappa(const IntrinsicBalls& balls, std::span<const double> density, double R, int r_samples) {
  if (!(R > 0.0)) throw std::invalid_argument("m/kappa radius must be positive");
  if (r_samples < 50) throw std::invalid_argument("m/kappa needs at least 50 radius samples");
  const GridExtrema g = scan(balls, density, R, r_samples);
  const GridExtrema fine = scan(balls, density, R, 2 * r_samples);
  MKappa out;
  out.m = g.m;
  out.kappa = g.kappa;
  out.argmax_m = g.argmax_m;
  out.argmin_kappa = g.argmin_kappa;
  out.smallest_ratio = g.first_ratio;
  out.refinement_change = std::abs(std::max(fine.m, fine.kappa) - std::max(g.m, g.kappa));
  out.saturated = R > balls.eccentricity();
  return out;
}

MKappa m_kappa(const SurfaceMesh& mesh, Index p, double R, int r_samples) {
  const auto density = triangle_curvature_density(mesh, mean_curvature_field(mesh));
  return m_kappa(IntrinsicBalls(mesh, p), density, R, r_samples);
}

std::vector<Index> probe_vertices(const SurfaceMesh& mesh, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t n = mesh.vertex_count();
  std::vector<Index> out(count);
  for (auto& p : out) p = static_cast<Index>(std::min<std::size_t>(n - 1, uniform01(rng) * n));
  return out;
}

// ---------------------------------------------------------------- identity

IdentityRecord comparison_identity_check(double delta, std::size_t grid_points) {
  using L = long double;
  const L pi = 3.141592653589793238462643383279502884L;
  const L sigma = 2.0L * std::sqrt(pi);
  // pi/4 is recognised and rebuilt in extended precision.
  const L dl = delta == kDelta ? pi / 4.0L : static_cast<L>(delta);
  IdentityRecord rec;
  rec.delta = delta;
  rec.coefficient = static_cast<double>(4.0L * dl - sigma * std::sqrt(dl));
  rec.grid_points = grid_points;
  L worst = 0.0L;
  for (std::size_t i = 1; i <= grid_points; ++i) {
    const L r = 10.0L * static_cast<L>(i) / static_cast<L>(grid_points);
    const L v = dl * r * r;
    const L dv = 2.0L * dl * r;
    worst = std::max(worst, std::abs(dv + 2.0L * dl * r - sigma * std::sqrt(v)));
  }
  rec.max_grid_residual = static_cast<double>(worst);
  return rec;
}

// ---------------------------------------------------------------- covering

CoveringRecord covering_bound_check(const SurfaceMesh& mesh, int threads, std::size_t exact_limit,
                                    std::size_t samples) {
  if (!mesh.closed()) throw std::invalid_argument("covering bound needs a closed mesh");
  if (!mesh.connected()) throw std::invalid_argument("covering bound needs a connected mesh");
  const std::size_t n = mesh.vertex_count();
  std::vector<Index> sources;
  CoveringRecord rec;
  rec.exact = n <= exact_limit;
  if (rec.exact) {
    sources.resize(n);
    for (std::size_t i = 0; i < n; ++i) sources[i] = static_cast<Index>(i);
  } else {
    for (std::size_t i = 0; i < samples; ++i) sources.push_back(static_cast<Index>(i * n / samples));
    // Double sweep: the vertex farthest from vertex 0 is a near-peripheral source.
    const auto d0 = geodesic_distances(mesh, 0);
    sources.push_back(static_cast<Index>(std::max_element(d0.begin(), d0.end()) - d0.begin()));
  }
  std::vector<double> ecc(sources.size());
  parallel_for(sources.size(), threads, [&](std::size_t i) {
    const auto d = geodesic_distances(mesh, sources[i]);
    ecc[i] = *std::max_element(d.begin(), d.end());
  });
  rec.sources = sources.size();
  rec.d_int = *std::max_element(ecc.begin(), ecc.end());
  rec.total_h = total_mean_curvature(mesh);
  rec.bound = 4.0 / kDelta * rec.total_h;
  rec.margin = rec.bound - rec.d_int;
  rec.ratio = rec.total_h / rec.d_int;
  return rec;
}

// ---------------------------------------------------------------- suite

bool AuditReport::passed() const {
  for (const auto& s : shapes) {
    for (const auto& m : s.michael_simon)
      if (!m.holds()) return false;
    for (const auto& b : s.balls)
      if (!b.dichotomy()) return false;
    if (!s.covering.holds() || s.bound.ratio < ct_constants(3)) return false;
  }
  return std::abs(identity.coefficient) <= 1e-12 && identity.max_grid_residual <= 1e-12 &&
         std::abs(perturbed.coefficient) > 1e-3;
}

AuditReport run_audit(const AuditOptions& options) {
  AuditReport report;
  for (std::size_t k = 0; k < options.shapes.size(); ++k) {
    const Shape shape = shape_library(options.shapes[k], {}, options.threads);
    const auto* mesh = std::get_if<SurfaceMesh>(&shape);
    if (!mesh || !mesh->closed()) throw std::invalid_argument("audit shape '" + options.shapes[k] + "' is not a closed mesh");
    ShapeAudit sa;
    sa.shape = options.shapes[k];
    const std::uint64_t seed = options.seed + 1000003ull * k;
    const MeanCurvatureField field = mean_curvature_field(*mesh);

    const auto library = michael_simon_library(*mesh, seed);
    sa.michael_simon.resize(library.size());
    parallel_for(library.size(), options.threads,
                 [&](std::size_t i) { sa.michael_simon[i] = michael_simon_check(*mesh, field, library[i]); });

    const auto density = triangle_curvature_density(*mesh, field);
    sa.probes = probe_vertices(*mesh, options.probes, seed ^ 0x5eedull);
    sa.balls.resize(sa.probes.size());
    parallel_for(sa.probes.size(), options.threads, [&](std::size_t i) {
      sa.balls[i] = m_kappa(IntrinsicBalls(*mesh, sa.probes[i]), density, options.probe_radius, options.r_samples);
    });

    sa.covering = covering_bound_check(*mesh, options.threads);
    sa.bound = verify_bound(*mesh, BoundMode::kProven, options.threads);
    report.shapes.push_back(std::move(sa));
  }
  report.identity = comparison_identity_check();
  report.perturbed = comparison_identity_check(kPi / 3.0);
  return report;
}

Table audit_table(const AuditReport& report) {
  Table t({"shape", "check", "item", "lhs", "rhs", "margin", "ok"});
  auto yes = [](bool b) { return std::string(b ? "yes" : "no"); };
  for (const auto& s : report.shapes) {
    for (const auto& m : s.michael_simon)
      t.add_row({s.shape, "michael_simon", m.function, fmt12(m.lhs), fmt12(m.rhs), fmt12(m.margin), yes(m.holds())});
    for (std::size_t i = 0; i < s.balls.size(); ++i) {
      const auto& b = s.balls[i];
      const double best = std::max(b.m, b.kappa);
      t.add_row({s.shape, "m_kappa", "p=" + std::to_string(s.probes[i]) + " m=" + fmt12(b.m) + " kappa=" + fmt12(b.kappa),
                 fmt12(best), fmt12(kDelta), fmt12(best - kDelta), yes(b.dichotomy())});
    }
    t.add_row({s.shape, "covering", "d_int", fmt12(s.covering.d_int), fmt12(s.covering.bound), fmt12(s.covering.margin),
               yes(s.covering.holds())});
    t.add_row({s.shape, "topping_ratio", "int|H|/d", fmt12(s.bound.ratio), fmt12(ct_constants(3)),
               fmt12(s.bound.ratio - ct_constants(3)), yes(s.bound.ratio >= ct_constants(3))});
  }
  t.add_row({"-", "identity", "delta=pi/4", fmt12(report.identity.coefficient), "0",
             fmt12(report.identity.max_grid_residual), yes(std::abs(report.identity.coefficient) <= 1e-12)});
  t.add_row({"-", "identity", "delta=pi/3", fmt12(report.perturbed.coefficient), "0", fmt12(report.perturbed.coefficient),
             yes(std::abs(report.perturbed.coefficient) > 1e-3)});
  return t;
}

}  // namespace dbound
