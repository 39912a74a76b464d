#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dbound/mesh.hpp"

namespace dbound {

inline constexpr double kCotangentClamp = 1e6;

/// Per-vertex mean curvature vectors, normalised so that |H| = 1 on the unit
/// sphere (H is the average of the principal curvatures, not their sum).
struct MeanCurvatureField {
  std::vector<Vec> h;
  std::vector<double> area;            // mixed-Voronoi area A_v
  std::vector<std::uint8_t> boundary;  // boundary vertices are excluded from integrals
  std::size_t clamped_cotangents = 0;

  double magnitude(std::size_t v) const { return h[v].norm(); }
};

/// Cotangent Laplacian of the embedding, valid in any codimension:
///   H_v = 1/(4 A_v) * sum_w (cot a_vw + cot b_vw) (x_v - x_w).
MeanCurvatureField mean_curvature_field(const SurfaceMesh& mesh);

/// Sum over interior vertices of |H_v| A_v.
double total_mean_curvature(const SurfaceMesh& mesh);
double total_mean_curvature(const MeanCurvatureField& field);

/// Per-triangle |H| density: mean of the corner magnitudes, with boundary
/// corners contributing zero.
std::vector<double> triangle_curvature_density(const SurfaceMesh& mesh, const MeanCurvatureField& field);

/// Sum of unsigned turning angles of a polyline (any dimension). For closed
/// curves the turns at the first and last samples are included.
/// Throws std::invalid_argument on fewer than 3 samples or repeated samples.
double total_abs_curvature(std::span<const Vec> points, bool closed);

/// Angle between two nonzero vectors, accurate for tiny and near-pi angles.
double angle_between(const Vec& a, const Vec& b);

}  // namespace dbound
