#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace dbound {

using Point3 = Eigen::Vector3d;
using Polyline = std::vector<Point3>;  // closed implicitly

class ContourError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Disjoint union of closed polylines in R^3.
struct Contour {
  std::vector<Polyline> components;

  std::size_t point_count() const;
  std::vector<Point3> all_points() const;
};

struct ContourValidation {
  bool valid = false;
  double min_component_distance = 0.0;  // +inf for a single component
  std::vector<std::string> issues;
};

inline constexpr double kContourDisjointTolerance = 1e-9;

ContourValidation validate(const Contour& contour, int threads = 1);
/// Throws ContourError listing the issues.
void require_valid(const Contour& contour, int threads = 1);

double polyline_length(const Polyline& poly);
double contour_length(const Contour& contour);
double contour_diameter(const Contour& contour, int threads = 1);

/// Exact Euclidean distance between segments [p0,p1] and [q0,q1].
double segment_distance(const Point3& p0, const Point3& p1, const Point3& q0, const Point3& q1);

/// Min segment-segment distance between two closed polylines.
double polyline_distance(const Polyline& a, const Polyline& b);

/// Bounding sphere (centroid of vertices, max vertex distance) used for pruning.
struct BoundingSphere {
  Point3 center;
  double radius;
};
BoundingSphere bounding_sphere(const Polyline& poly);

/// Symmetric matrix of polyline distances; zero diagonal. Throws on < 2 components.
Eigen::MatrixXd component_distance_matrix(const Contour& contour, int threads = 1);

/// `{dimension: 3, components: [{vertices: [[x,y,z],...]}]}`.
Contour read_contour(std::istream& in);
void write_contour(std::ostream& out, const Contour& contour);
Contour read_contour_file(const std::filesystem::path& path);
void write_contour_file(const std::filesystem::path& path, const Contour& contour);

}  // namespace dbound
