#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dbound {

/// Points are stored in R^4; 3D data keeps the last coordinate at zero.
using Vec = Eigen::Vector4d;
using Index = std::uint32_t;
using Triangle = std::array<Index, 3>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kDegenerateArea = 1e-12;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unvalidated triangle soup as read from disk or produced by a generator.
struct RawMesh {
  int dimension = 3;
  std::vector<Vec> vertices;
  std::vector<Triangle> triangles;
};

enum class MeshIssue {
  kBadDimension,
  kBadIndex,
  kUnreferencedVertex,
  kDegenerateTriangle,
  kNonManifoldEdge,
  kInconsistentOrientation,
  kBoundaryNotSimple,
};

const char* to_string(MeshIssue issue);

struct ValidationIssue {
  MeshIssue kind;
  std::size_t index = 0;          // triangle or vertex index, depending on kind
  std::array<Index, 2> edge{0, 0};  // offending edge where applicable
  std::string message;
};

struct ValidationReport {
  bool valid = false;
  bool closed = false;
  bool connected = false;
  std::size_t boundary_loop_count = 0;
  long euler_characteristic = 0;
  std::vector<ValidationIssue> issues;

  std::string summary() const;
};

ValidationReport validate(const RawMesh& raw);

struct BoundaryLoop {
  std::vector<Index> vertex_indices;  // cyclic, follows the triangles' edge direction
  double length = 0.0;
};

/// Validated, immutable triangle mesh with derived topology.
class SurfaceMesh {
 public:
  SurfaceMesh() = default;  // empty
  /// Throws MeshError carrying the validation summary when `raw` is invalid.
  static SurfaceMesh from_raw(RawMesh raw);

  int dimension() const { return raw_.dimension; }
  const RawMesh& raw() const { return raw_; }
  std::span<const Vec> vertices() const { return raw_.vertices; }
  std::span<const Triangle> triangles() const { return raw_.triangles; }
  std::size_t vertex_count() const { return raw_.vertices.size(); }
  std::size_t triangle_count() const { return raw_.triangles.size(); }

  const std::vector<BoundaryLoop>& boundary_loops() const { return loops_; }
  bool closed() const { return loops_.empty(); }
  bool connected() const { return connected_; }
  bool is_boundary_vertex(Index v) const { return boundary_flag_[v] != 0; }
  long euler_characteristic() const { return euler_; }

  /// Undirected edges (a < b), sorted.
  const std::vector<std::array<Index, 2>>& edges() const { return edges_; }
  /// CSR vertex adjacency built from edges().
  std::span<const Index> neighbors(Index v) const {
    return {adjacency_.data() + adjacency_offsets_[v],
            adjacency_offsets_[v + 1] - adjacency_offsets_[v]};
  }

  double triangle_area(std::size_t t) const;
  double area() const;

 private:
  RawMesh raw_;
  std::vector<BoundaryLoop> loops_;
  std::vector<std::uint8_t> boundary_flag_;
  std::vector<std::array<Index, 2>> edges_;
  std::vector<Index> adjacency_;
  std::vector<std::size_t> adjacency_offsets_;
  bool connected_ = false;
  long euler_ = 0;
};

inline ValidationReport validate(const SurfaceMesh& mesh) { return validate(mesh.raw()); }

/// Area of the triangle spanned by three points in R^4 (Lagrange identity).
double triangle_area(const Vec& a, const Vec& b, const Vec& c);

/// |u ∧ v|, stable for nearly parallel vectors.
double wedge_norm(const Vec& u, const Vec& v);

enum class DiameterMethod { kBruteForce, kBranchAndBound };

/// Exact max pairwise Euclidean distance. Both methods evaluate the same
/// squared-distance kernel, so they agree bit for bit. For piecewise-linear
/// bodies the maximum over the body is attained at vertices.
double extrinsic_diameter(std::span<const Vec> points,
                          DiameterMethod method = DiameterMethod::kBranchAndBound,
                          int threads = 1);

/// Sum of boundary loop lengths; 0 for closed meshes.
double boundary_length(const SurfaceMesh& mesh);

enum class GeodesicMethod {
  kEdgeGraph,    // Dijkstra on the edge graph; biased upward
  kFastMarching  // Dijkstra-ordered triangle unfolding updates
};

/// Shortest-path distances from `source`; unreachable vertices get +inf.
std::vector<double> geodesic_distances(const SurfaceMesh& mesh, Index source,
                                       GeodesicMethod method = GeodesicMethod::kEdgeGraph);

/// Intrinsic balls about a fixed centre. Inside each triangle the squared
/// distance is modelled as |x - s|^2 + c (a virtual point source), which is
/// exact on flat regions and reduces to |x - p| on the centre's one-ring.
class IntrinsicBalls {
 public:
  IntrinsicBalls(const SurfaceMesh& mesh, Index centre);

  /// Area of B(p, r). Nondecreasing in r.
  double volume(double r) const;
  /// Integral of a per-triangle constant density over B(p, r).
  double integrate(std::span<const double> triangle_density, double r) const;
  /// Largest finite vertex distance from the centre.
  double eccentricity() const { return eccentricity_; }
  std::span<const double> distances() const { return distance_; }

 private:
  struct LocalTriangle {
    double area = 0.0;
    double max_distance = 0.0;
    double min_distance = 0.0;
    std::array<Eigen::Vector2d, 3> corners;
    Eigen::Vector2d source;
    double offset = 0.0;  // d^2(x) = |x - source|^2 + offset
    bool reachable = false;
  };

  double covered_fraction(const LocalTriangle& t, double r) const;

  std::vector<double> distance_;
  std::vector<LocalTriangle> local_;
  double eccentricity_ = 0.0;
};

/// V(p, r). Throws std::invalid_argument for r <= 0.
double intrinsic_ball_volume(const SurfaceMesh& mesh, Index p, double r);

}  // namespace dbound
