#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "dbound/contour.hpp"
#include "dbound/mesh.hpp"

namespace dbound {

// ---------------------------------------------------------------- meshes

/// Flat disk in the z = 0 plane: concentric rings around a centre vertex,
/// `segments` vertices on the boundary circle. rings = 0 picks a ring count
/// giving roughly equilateral triangles.
SurfaceMesh make_disk(double radius, int segments, int rings = 0);
/// Same disk embedded in the x-y plane of R^4.
SurfaceMesh make_disk4(double radius, int segments, int rings = 0);
/// Graph of (x, y) -> a (x + iy)^2 over the unit disk, a minimal surface in R^4.
SurfaceMesh make_holomorphic_graph(double a, int segments, int rings = 0);
/// Unit-square grid [0,1]^2 with n x n cells.
SurfaceMesh make_square(int n);
/// Subdivided icosahedron projected to the sphere.
SurfaceMesh make_icosphere(int subdivisions, double radius = 1.0);
/// Upper hemisphere with `segments` vertices on the equator.
SurfaceMesh make_hemisphere(double radius, int segments);
/// Lateral surface of a cylinder (open at both ends), axis z.
SurfaceMesh make_open_cylinder(double radius, double length, int segments, int rows);
/// Cylinder with hemispherical caps; total extent along z is length + 2 radius.
SurfaceMesh make_capped_cylinder(double radius, double length, double spacing);
SurfaceMesh make_torus(double major, double minor, int segments_major, int segments_minor);

// ---------------------------------------------------------------- contours

Polyline make_circle(const Point3& center, const Point3& normal, double radius, int segments);
/// Two straight sides of length a joined by semicircles of radius r.
Contour make_stadium(double a, double r, int arc_segments = 64);
/// Circles of the given radius in the planes z = +-half_gap, centred on the z axis.
Contour make_coaxial_circles(double radius, double half_gap, int segments);

// ---------------------------------------------------------------- sphere nets

struct SphericalPointSet {
  std::vector<Point3> points;
  double packing_radius = 0.0;   // half the min pairwise geodesic distance
  double covering_radius = 0.0;  // dense-sample estimate
  std::size_t covering_resolution = 0;
};

/// Geodesic distance on the unit sphere from a chord length.
double chord_to_arc(double chord);

std::vector<Point3> fibonacci_points(std::size_t n);
double packing_radius(const std::vector<Point3>& points);

struct CoveringEstimate {
  double radius = 0.0;
  /// Nominal spacing of the sample, sqrt(4 pi / resolution). The estimate is
  /// a max over samples, so it never exceeds the true covering radius and
  /// falls short by at most the sample's own covering radius (~ this value).
  double sample_spacing = 0.0;
  bool stopped_early = false;
};

/// Max over a Fibonacci sample of size `resolution` (>= 1e4) of the geodesic
/// distance to the nearest point of X. When `stop_above` is finite, returns as
/// soon as one sample exceeds it.
CoveringEstimate covering_radius_estimate(const std::vector<Point3>& points, std::size_t resolution,
                                          double stop_above = kInfinity, int threads = 1);

/// Smallest Fibonacci set (doubling then bisection on the count) whose
/// estimated covering radius is at most eps and packing radius at least eps/4.
SphericalPointSet fibonacci_net(double eps, int threads = 1);

/// Boundary circles of the geodesic caps of radius `radius` about each point.
Contour sphere_circles(const SphericalPointSet& x, double radius, int segments);
Contour sphere_circles(const std::vector<Point3>& centers, double radius, int segments);

/// Two geodesic circles of radius eps about the poles.
Contour antipodal_circles(double eps, int segments);
/// Circles of radius eps^(5/2) about a Fibonacci eps-net.
Contour net_circles(double eps, int segments, int threads = 1);

// ---------------------------------------------------------------- library

using ShapeParams = std::map<std::string, double>;
using Shape = std::variant<SurfaceMesh, Contour>;

/// Named generators with defaults; unknown names or parameters throw
/// std::invalid_argument.
Shape shape_library(const std::string& name, const ShapeParams& params = {}, int threads = 1);
std::vector<std::string> shape_names();

}  // namespace dbound
