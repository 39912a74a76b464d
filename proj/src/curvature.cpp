#include "dbound/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dbound/numeric.hpp"

namespace dbound {

namespace {

// cot of the angle at `apex` in triangle (apex, p, q).
double cotangent(const Vec& apex, const Vec& p, const Vec& q, std::size_t& clamped) {
  const Vec u = p - apex, v = q - apex;
  const double w = wedge_norm(u, v);
  const double c = u.dot(v);
  if (w <= std::abs(c) / kCotangentClamp) {
    ++clamped;
    return c >= 0.0 ? kCotangentClamp : -kCotangentClamp;
  }
  return c / w;
}

}  // namespace

MeanCurvatureField mean_curvature_field(const SurfaceMesh& mesh) {
  const auto verts = mesh.vertices();
  const auto tris = mesh.triangles();
  const std::size_t nv = mesh.vertex_count();

  MeanCurvatureField field;
  field.h.assign(nv, Vec::Zero());
  field.area.assign(nv, 0.0);
  field.boundary.assign(nv, 0);
  for (Index v = 0; v < nv; ++v) field.boundary[v] = mesh.is_boundary_vertex(v) ? 1 : 0;

  std::vector<Vec> laplace(nv, Vec::Zero());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& tri = tris[t];
    const Vec& x0 = verts[tri[0]];
    const Vec& x1 = verts[tri[1]];
    const Vec& x2 = verts[tri[2]];
    const double cot0 = cotangent(x0, x1, x2, field.clamped_cotangents);
    const double cot1 = cotangent(x1, x2, x0, field.clamped_cotangents);
    const double cot2 = cotangent(x2, x0, x1, field.clamped_cotangents);
    // Edge opposite corner i carries cot_i.
    laplace[tri[1]] += cot0 * (x1 - x2);
    laplace[tri[2]] += cot0 * (x2 - x1);
    laplace[tri[2]] += cot1 * (x2 - x0);
    laplace[tri[0]] += cot1 * (x0 - x2);
    laplace[tri[0]] += cot2 * (x0 - x1);
    laplace[tri[1]] += cot2 * (x1 - x0);

    // Mixed Voronoi area (obtuse-safe).
    const double area = mesh.triangle_area(t);
    const double l01 = (x1 - x0).squaredNorm(), l12 = (x2 - x1).squaredNorm(), l20 = (x0 - x2).squaredNorm();
    const bool obtuse0 = cot0 < 0.0, obtuse1 = cot1 < 0.0, obtuse2 = cot2 < 0.0;
    if (obtuse0 || obtuse1 || obtuse2) {
      field.area[tri[0]] += obtuse0 ? area / 2.0 : area / 4.0;
      field.area[tri[1]] += obtuse1 ? area / 2.0 : area / 4.0;
      field.area[tri[2]] += obtuse2 ? area / 2.0 : area / 4.0;
    } else {
      field.area[tri[0]] += (l01 * cot2 + l20 * cot1) / 8.0;
      field.area[tri[1]] += (l01 * cot2 + l12 * cot0) / 8.0;
      field.area[tri[2]] += (l12 * cot0 + l20 * cot1) / 8.0;
    }
  }
  for (std::size_t v = 0; v < nv; ++v)
    if (field.area[v] > 0.0) field.h[v] = laplace[v] / (4.0 * field.area[v]);
  return field;
}

double total_mean_curvature(const MeanCurvatureField& field) {
  NeumaierSum sum;
  for (std::size_t v = 0; v < field.h.size(); ++v)
    if (!field.boundary[v]) sum.add(field.magnitude(v) * field.area[v]);
  return sum.value();
}

double total_mean_curvature(const SurfaceMesh& mesh) { return total_mean_curvature(mean_curvature_field(mesh)); }

std::vector<double> triangle_curvature_density(const SurfaceMesh& mesh, const MeanCurvatureField& field) {
  const auto tris = mesh.triangles();
  std::vector<double> density(tris.size(), 0.0);
  for (std::size_t t = 0; t < tris.size(); ++t) {
    double s = 0.0;
    for (Index v : tris[t])
      if (!field.boundary[v]) s += field.magnitude(v);
    density[t] = s / 3.0;
  }
  return density;
}

double angle_between(const Vec& a, const Vec& b) {
  const double na = a.norm(), nb = b.norm();
  const Vec p = nb * a, q = na * b;
  return 2.0 * std::atan2((p - q).norm(), (p + q).norm());
}

double total_abs_curvature(std::span<const Vec> points, bool closed) {
  const std::size_t n = points.size();
  if (n < 3) throw std::invalid_argument("curvature of a polyline needs at least 3 samples");
  const std::size_t segments = closed ? n : n - 1;
  std::vector<Vec> dir(segments);
  for (std::size_t i = 0; i < segments; ++i) {
    dir[i] = points[(i + 1) % n] - points[i];
    if (dir[i].squaredNorm() == 0.0)
      throw std::invalid_argument("duplicate consecutive samples at index " + std::to_string(i));
  }
  NeumaierSum sum;
  for (std::size_t i = 1; i < segments; ++i) sum.add(angle_between(dir[i - 1], dir[i]));
  if (closed) sum.add(angle_between(dir[segments - 1], dir[0]));
  return sum.value();
}

}  // namespace dbound
