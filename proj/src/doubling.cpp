#include "dbound/doubling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include <Eigen/Geometry>

#include "dbound/curvature.hpp"
#include "dbound/numeric.hpp"
#include "dbound/spatial.hpp"

namespace dbound {

namespace {

Vec normalized_or_throw(const Vec& v, const char* what) {
  const double n = v.norm();
  if (!(n > 0.0)) throw std::invalid_argument(what);
  return v / n;
}

Vec project_out(Vec v, const Vec& a) { return v - v.dot(a) * a; }

// Fourth vector completing (a, b, c) to a positively oriented frame of R^4.
Vec complete4(const Vec& a, const Vec& b, const Vec& c) {
  Vec out;
  for (int i = 0; i < 4; ++i) {
    Eigen::Matrix3d m;
    for (int col = 0, k = 0; col < 4; ++col) {
      if (col == i) continue;
      m(0, k) = a[col];
      m(1, k) = b[col];
      m(2, k) = c[col];
      ++k;
    }
    out[i] = ((i % 2) ? 1.0 : -1.0) * m.determinant();
  }
  return out;
}

// Unit vector orthogonal to e1 and e2 built from the ambient basis vector
// with the largest residual (lowest index on ties).
Vec seed_normal(const Vec& e1, const Vec& e2, int dimension) {
  Vec best = Vec::Zero();
  double best_norm = -1.0;
  for (int i = 0; i < dimension; ++i) {
    const Vec r = project_out(project_out(Vec::Unit(i), e1), e2);
    if (r.norm() > best_norm + 1e-12) {
      best = r;
      best_norm = r.norm();
    }
  }
  return best / best_norm;
}

Vec cross3(const Vec& a, const Vec& b) {
  const Eigen::Vector3d c = a.head<3>().cross(b.head<3>());
  return {c.x(), c.y(), c.z(), 0.0};
}

}  // namespace

double BoundaryFrame::orthonormality_error() const {
  double err = 0.0;
  for (std::size_t j = 0; j < size(); ++j) {
    err = std::max({err, std::abs(e1[j].dot(e2[j])), std::abs(e1[j].dot(e3[j])), std::abs(e2[j].dot(e3[j]))});
    err = std::max({err, std::abs(e1[j].norm() - 1.0), std::abs(e2[j].norm() - 1.0), std::abs(e3[j].norm() - 1.0)});
  }
  return err;
}

std::vector<BoundaryFrame> build_boundary_frames(const SurfaceMesh& mesh) {
  if (mesh.closed()) throw std::invalid_argument("boundary frames need a mesh with boundary");
  const auto verts = mesh.vertices();
  const auto tris = mesh.triangles();

  // Directed boundary edge -> opposite vertex, and per-vertex triangle centroid sums.
  std::unordered_map<std::uint64_t, Index> opposite;
  std::vector<Vec> centroid_sum(mesh.vertex_count(), Vec::Zero());
  std::vector<int> centroid_count(mesh.vertex_count(), 0);
  auto key = [](Index a, Index b) { return (static_cast<std::uint64_t>(a) << 32) | b; };
  for (const auto& loop : mesh.boundary_loops())
    for (std::size_t j = 0; j < loop.vertex_indices.size(); ++j)
      opposite.emplace(key(loop.vertex_indices[j], loop.vertex_indices[(j + 1) % loop.vertex_indices.size()]), 0);
  for (const auto& t : tris) {
    const Vec centroid = (verts[t[0]] + verts[t[1]] + verts[t[2]]) / 3.0;
    for (int i = 0; i < 3; ++i) {
      auto it = opposite.find(key(t[i], t[(i + 1) % 3]));
      if (it != opposite.end()) it->second = t[(i + 2) % 3];
      centroid_sum[t[i]] += centroid;
      ++centroid_count[t[i]];
    }
  }

  std::vector<BoundaryFrame> frames;
  for (const auto& loop : mesh.boundary_loops()) {
    BoundaryFrame f;
    const auto& ids = loop.vertex_indices;
    const std::size_t n = ids.size();
    f.vertex_indices = ids;
    f.c.resize(n);
    f.sigma.resize(n);
    for (std::size_t j = 0; j < n; ++j) f.c[j] = verts[ids[j]];
    NeumaierSum run;
    for (std::size_t j = 0; j < n; ++j) {
      f.sigma[j] = run.value();
      const double seg = (f.c[(j + 1) % n] - f.c[j]).norm();
      if (!(seg > 0.0)) throw std::invalid_argument("degenerate boundary tangent: duplicate boundary points");
      run.add(seg);
    }
    f.length = run.value();

    // Outward conormal of each boundary edge j -> j+1.
    std::vector<Vec> conormal(n);
    for (std::size_t j = 0; j < n; ++j) {
      const Vec& a = f.c[j];
      const Vec& b = f.c[(j + 1) % n];
      const Vec& o = verts[opposite.at(key(ids[j], ids[(j + 1) % n]))];
      const Vec t = (b - a).normalized();
      conormal[j] = -normalized_or_throw(project_out(o - a, t), "degenerate boundary triangle");
    }
    f.e1.resize(n);
    f.e2.resize(n);
    f.e3.resize(n);
    f.min_outwardness = kInfinity;
    for (std::size_t j = 0; j < n; ++j) {
      f.e1[j] = normalized_or_throw(f.c[(j + 1) % n] - f.c[(j + n - 1) % n], "degenerate boundary tangent");
      f.e2[j] = normalized_or_throw(project_out(conormal[(j + n - 1) % n] + conormal[j], f.e1[j]),
                                    "conormal parallel to tangent");
      const Vec b = centroid_sum[ids[j]] / centroid_count[ids[j]];
      f.min_outwardness = std::min(f.min_outwardness, f.e2[j].dot(f.c[j] - b));
    }

    if (mesh.dimension() == 3) {
      for (std::size_t j = 0; j < n; ++j) f.e3[j] = cross3(f.e1[j], f.e2[j]).normalized();
    } else {
      // Discrete parallel transport of a normal vector, then undo the holonomy
      // linearly in arclength.
      auto to_complement = [&](const Vec& v, std::size_t j) {
        return project_out(project_out(v, f.e1[j]), f.e2[j]);
      };
      std::vector<Vec> t(n);
      t[0] = seed_normal(f.e1[0], f.e2[0], 4);
      for (std::size_t j = 1; j < n; ++j) {
        Vec p = to_complement(t[j - 1], j);
        if (p.norm() < 1e-6) {
          p = seed_normal(f.e1[j], f.e2[j], 4);
          ++f.reseeded;
        }
        p = to_complement(p.normalized(), j);
        t[j] = p.normalized();
      }
      const Vec back = to_complement(t[n - 1], 0).normalized();
      const Vec e4_0 = complete4(f.e1[0], f.e2[0], t[0]);
      f.holonomy = std::atan2(back.dot(e4_0), back.dot(t[0]));
      for (std::size_t j = 0; j < n; ++j) {
        const double alpha = -f.holonomy * f.sigma[j] / f.length;
        const Vec e4 = complete4(f.e1[j], f.e2[j], t[j]);
        f.e3[j] = (std::cos(alpha) * t[j] + std::sin(alpha) * e4).normalized();
      }
      // Continue the corrected field across the closing edge and compare.
      const Vec q = to_complement(f.e3[n - 1], 0).normalized();
      const Vec e4c = complete4(f.e1[0], f.e2[0], f.e3[0]);
      const double beta = std::atan2(q.dot(e4c), q.dot(f.e3[0]));
      const double expected = f.holonomy * (f.length - f.sigma[n - 1]) / f.length;
      f.periodicity_defect = std::abs(std::remainder(beta - expected, 2.0 * kPi));
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

FrameRates frame_rates(const BoundaryFrame& f) {
  FrameRates r;
  const std::size_t n = f.size();
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t prev = (j + n - 1) % n, next = (j + 1) % n;
    double span = f.sigma[next] - f.sigma[prev];
    if (span <= 0.0) span += f.length;
    r.e2 = std::max(r.e2, (f.e2[next] - f.e2[prev]).norm() / span);
    r.e3 = std::max(r.e3, (f.e3[next] - f.e3[prev]).norm() / span);
  }
  return r;
}

double regularity_threshold(const BoundaryFrame& frame, const TeardropCurve& teardrop) {
  if (teardrop.max_radius() > 2.0) throw std::invalid_argument("teardrop leaves the radius-2 disk");
  const FrameRates r = frame_rates(frame);
  const double rate = std::max(r.e2, r.e3);
  if (rate <= 0.0) return kMaxRegularity;
  return std::min(kMaxRegularity, 0.5 / (2.0 * rate));
}

namespace {

// Tube positions for teardrop rows 1..N-1 (rows 0 and N are the loop itself).
std::vector<Vec> tube_interior(const BoundaryFrame& f, const TeardropCurve& td, double eps) {
  const std::size_t rows = td.samples.size(), n = f.size();
  std::vector<Vec> pts;
  pts.reserve((rows - 2) * n);
  for (std::size_t m = 1; m + 1 < rows; ++m) {
    const double x = eps * td.samples[m].x, y = eps * td.samples[m].y;
    for (std::size_t j = 0; j < n; ++j) pts.push_back(f.c[j] + x * f.e2[j] + y * f.e3[j]);
  }
  return pts;
}

// Quad (m, j) -> triangles [B, A, D], [B, D, C] with A = (m, j), B = (m, j+1),
// C = (m+1, j+1), D = (m+1, j). `id(m, j)` maps grid nodes to vertex ids.
template <class Id>
void tube_triangles(std::size_t rows, std::size_t n, Id id, std::vector<Triangle>& out) {
  for (std::size_t m = 0; m + 1 < rows; ++m)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t jn = (j + 1) % n;
      const Index a = id(m, j), b = id(m, jn), c = id(m + 1, jn), d = id(m + 1, j);
      out.push_back({b, a, d});
      out.push_back({b, d, c});
    }
}

void check_epsilon(double eps, double threshold) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(eps < threshold))
    throw std::invalid_argument("epsilon " + fmt12(eps) + " is not below the regularity threshold " + fmt12(threshold));
}

constexpr double kDegenerateCell = 1e-14;

void check_cells(const RawMesh& raw, std::size_t first) {
  for (std::size_t t = first; t < raw.triangles.size(); ++t) {
    const auto& tri = raw.triangles[t];
    if (triangle_area(raw.vertices[tri[0]], raw.vertices[tri[1]], raw.vertices[tri[2]]) < kDegenerateCell)
      throw std::invalid_argument("degenerate tube cell at triangle " + std::to_string(t));
  }
}

}  // namespace

SurfaceMesh build_tube(const BoundaryFrame& frame, const TeardropCurve& teardrop, double epsilon) {
  check_epsilon(epsilon, regularity_threshold(frame, teardrop));
  const std::size_t rows = teardrop.samples.size(), n = frame.size();
  RawMesh raw;
  raw.dimension = 4;
  for (const auto& c : frame.c) raw.vertices.push_back(c);
  for (const auto& p : tube_interior(frame, teardrop, epsilon)) raw.vertices.push_back(p);
  for (const auto& c : frame.c) raw.vertices.push_back(c);
  const bool planar = std::all_of(raw.vertices.begin(), raw.vertices.end(), [](const Vec& v) { return v[3] == 0.0; });
  if (planar) raw.dimension = 3;
  tube_triangles(rows, n, [n](std::size_t m, std::size_t j) { return static_cast<Index>(m * n + j); }, raw.triangles);
  check_cells(raw, 0);
  return SurfaceMesh::from_raw(std::move(raw));
}

double auto_epsilon(double threshold, int k) { return std::min(0.5 * threshold, 1.0 / (2.0 * k)); }

DoubledSurface build_double(const SurfaceMesh& mesh, int k, std::optional<double> epsilon) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  const auto frames = build_boundary_frames(mesh);
  const TeardropCurve td = build_teardrop(k, default_samples_per_unit(k));
  double threshold = kMaxRegularity;
  for (const auto& f : frames) threshold = std::min(threshold, regularity_threshold(f, td));
  const double eps = epsilon ? *epsilon : auto_epsilon(threshold, k);
  check_epsilon(eps, threshold);

  const RawMesh& src = mesh.raw();
  const auto nv = static_cast<Index>(src.vertices.size());
  RawMesh raw;
  raw.dimension = src.dimension;
  raw.vertices = src.vertices;
  raw.vertices.insert(raw.vertices.end(), src.vertices.begin(), src.vertices.end());
  raw.triangles = src.triangles;
  for (const auto& t : src.triangles) raw.triangles.push_back({t[0] + nv, t[2] + nv, t[1] + nv});

  DoubledSurface out;
  out.part.assign(src.triangles.size(), SigmaPart::kCopy);
  out.part.resize(2 * src.triangles.size(), SigmaPart::kMirror);
  out.tube_index.assign(2 * src.triangles.size(), -1);

  const std::size_t rows = td.samples.size();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    const std::size_t n = f.size();
    const auto base = static_cast<Index>(raw.vertices.size());
    for (const auto& p : tube_interior(f, td, eps)) raw.vertices.push_back(p);
    const std::size_t first = raw.triangles.size();
    tube_triangles(rows, n, [&](std::size_t m, std::size_t j) -> Index {
      if (m == 0) return f.vertex_indices[j];
      if (m + 1 == rows) return f.vertex_indices[j] + nv;
      return static_cast<Index>(base + (m - 1) * n + j);
    }, raw.triangles);
    check_cells(raw, first);
    out.part.resize(raw.triangles.size(), SigmaPart::kTube);
    out.tube_index.resize(raw.triangles.size(), static_cast<std::int32_t>(i));
  }
  if (raw.dimension == 3)
    for (const auto& v : raw.vertices)
      if (v[3] != 0.0) throw std::logic_error("3D doubling produced a 4D vertex");

  out.sigma = SurfaceMesh::from_raw(std::move(raw));
  out.epsilon = eps;
  out.threshold = threshold;
  out.k = k;
  return out;
}

std::vector<ConvergenceRow> convergence_table(const SurfaceMesh& mesh, const std::vector<int>& ks, int threads,
                                              std::optional<double> epsilon) {
  const double target_curvature = 2.0 * total_mean_curvature(mesh) + 0.5 * kPi * boundary_length(mesh);
  const double target_diameter = extrinsic_diameter(mesh.vertices());
  std::vector<ConvergenceRow> rows(ks.size());
  parallel_for(ks.size(), threads, [&](std::size_t i) {
    const DoubledSurface d = build_double(mesh, ks[i], epsilon);
    auto& r = rows[i];
    r.k = ks[i];
    r.epsilon = d.epsilon;
    r.curvature = total_mean_curvature(d.sigma);
    r.diameter = extrinsic_diameter(d.sigma.vertices());
    r.target_curvature = target_curvature;
    r.target_diameter = target_diameter;
    r.euler = d.sigma.euler_characteristic();
    r.closed = d.sigma.closed();
    r.connected = d.sigma.connected();
  });
  return rows;
}

Table convergence_report(const std::vector<ConvergenceRow>& rows) {
  Table t({"k", "epsilon", "curvature", "target_curvature", "curvature_error", "diameter", "target_diameter",
           "diameter_error", "diameter_bound", "euler", "closed", "connected"});
  for (const auto& r : rows)
    t.add_row({std::to_string(r.k), fmt12(r.epsilon), fmt12(r.curvature), fmt12(r.target_curvature),
               fmt12(r.curvature_error()), fmt12(r.diameter), fmt12(r.target_diameter), fmt12(r.diameter_error()),
               fmt12(4.0 * r.epsilon), std::to_string(r.euler), r.closed ? "true" : "false",
               r.connected ? "true" : "false"});
  return t;
}

}  // namespace dbound
