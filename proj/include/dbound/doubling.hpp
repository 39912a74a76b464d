#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dbound/mesh.hpp"
#include "dbound/report.hpp"
#include "dbound/teardrop.hpp"

namespace dbound {

/// Orthonormal frame sampled at the vertices of one boundary loop:
/// e1 tangent, e2 outward conormal, e3 completes the frame in the normal
/// bundle (cross product in R^3, transported section in R^4).
struct BoundaryFrame {
  std::vector<Index> vertex_indices;
  std::vector<double> sigma;  // cumulative arclength, sigma[0] = 0
  double length = 0.0;
  std::vector<Vec> c, e1, e2, e3;

  double holonomy = 0.0;            // transport rotation measured before correction
  double periodicity_defect = 0.0;  // residual after correction (radians)
  std::size_t reseeded = 0;         // samples where transport collapsed
  double min_outwardness = 0.0;     // min_j e2 . (c_j - b_j)

  std::size_t size() const { return c.size(); }
  /// max |e_a . e_b| (a != b) and max | |e_a| - 1 |.
  double orthonormality_error() const;
};

std::vector<BoundaryFrame> build_boundary_frames(const SurfaceMesh& mesh);

struct FrameRates {
  double e2 = 0.0;  // max |d e2 / d sigma|
  double e3 = 0.0;
};
FrameRates frame_rates(const BoundaryFrame& frame);

inline constexpr double kMaxRegularity = 0.5;

/// 0.5 / (2 max(|e2'|, |e3'|)), capped at kMaxRegularity.
double regularity_threshold(const BoundaryFrame& frame, const TeardropCurve& teardrop);

/// Tube S(sigma, s) = c + eps x(s) e2 + eps y(s) e3 as a standalone annulus
/// (teardrop rows x loop columns). Throws std::invalid_argument when eps is
/// not below the threshold or a cell degenerates.
SurfaceMesh build_tube(const BoundaryFrame& frame, const TeardropCurve& teardrop, double epsilon);

enum class SigmaPart : std::uint8_t { kCopy, kMirror, kTube };

struct DoubledSurface {
  SurfaceMesh sigma;
  double epsilon = 0.0;
  double threshold = 0.0;
  int k = 0;
  std::vector<SigmaPart> part;           // per triangle
  std::vector<std::int32_t> tube_index;  // per triangle; -1 off the tubes
};

/// eps_k = min(threshold / 2, 1 / (2k)).
double auto_epsilon(double threshold, int k);

/// M, an identical copy M' with reversed orientation, and one tube per
/// boundary loop. Without epsilon, auto_epsilon is used.
DoubledSurface build_double(const SurfaceMesh& mesh, int k, std::optional<double> epsilon = std::nullopt);

struct ConvergenceRow {
  int k = 0;
  double epsilon = 0.0;
  double curvature = 0.0;
  double diameter = 0.0;
  double target_curvature = 0.0;
  double target_diameter = 0.0;
  long euler = 0;
  bool closed = false;
  bool connected = false;

  double curvature_error() const { return std::abs(curvature - target_curvature) / target_curvature; }
  double diameter_error() const { return std::abs(diameter - target_diameter); }
};

/// One row per k, built concurrently; a fixed epsilon overrides auto_epsilon.
std::vector<ConvergenceRow> convergence_table(const SurfaceMesh& mesh, const std::vector<int>& ks, int threads = 1,
                                              std::optional<double> epsilon = std::nullopt);
Table convergence_report(const std::vector<ConvergenceRow>& rows);

}  // namespace dbound
