#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Core>

namespace dbound {

/// Exponential-bump transition on [0,1]: 0 at t <= 0, 1 at t >= 1, C-infinity,
/// phi(t) + phi(1 - t) = 1.
double smooth_step(double t);
double smooth_step_derivative(double t);

/// Transition profile f used by the teardrop graphs: f = 0 on [0, 0.05],
/// f = 1 on [0.95, 1], monotone and C-infinity. It is the normalised integral
/// of a plateau (1 on [0.1, 0.9], smooth_step ramps on either side), which
/// keeps max f' = 1/0.85. Throws std::domain_error outside [0,1].
double transition_function(double x);
double transition_derivative(double x);
inline constexpr double kTransitionMaxSlope = 1.0 / 0.85;

namespace detail {
class GraphArclength;
}

struct TeardropSample {
  double s;
  double x;
  double y;
};

/// Unit-speed planar curve from the origin along y = f(x)/k, around the
/// half-circle (x - 1)^2 + y^2 = 1/k^2 (x >= 1), and back along y = -f(x)/k.
struct TeardropCurve {
  int k = 0;
  double total_length = 0.0;
  double graph_length = 0.0;  // arclength of each graph piece
  std::vector<TeardropSample> samples;
  std::size_t half_circle_samples = 0;
  std::shared_ptr<const detail::GraphArclength> graph;

  /// Exact point / unit tangent at arclength s in [0, total_length].
  Eigen::Vector2d point(double s) const;
  Eigen::Vector2d tangent(double s) const;
  double max_radius() const;
  /// Sum of turning angles of the sampled polyline.
  double total_abs_curvature() const;
};

inline constexpr int kMinHalfCircleSamples = 32;

/// Samples the curve at uniform arclength with ceil(L * samples_per_unit)
/// segments. Throws std::invalid_argument for k < 1, samples_per_unit < 100,
/// or fewer than 32 samples on the half-circle.
TeardropCurve build_teardrop(int k, int samples_per_unit);

/// Density keeping ~48 samples on the half-circle.
int default_samples_per_unit(int k);

/// `s x y` rows.
void write_teardrop(std::ostream& out, const TeardropCurve& curve);

}  // namespace dbound
