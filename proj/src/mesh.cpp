#include "dbound/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "dbound/numeric.hpp"

namespace dbound {

namespace {

std::uint64_t edge_key(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

struct EdgeUse {
  int count = 0;
  int forward = 0;  // traversals a->b with a < b
  int backward = 0;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

// Everything validate() and SurfaceMesh need, computed in one pass.
struct Topology {
  ValidationReport report;
  std::vector<BoundaryLoop> loops;
  std::vector<std::uint8_t> boundary_flag;
  std::vector<std::array<Index, 2>> edges;
};

Topology analyse(const RawMesh& raw) {
  Topology topo;
  auto& rep = topo.report;
  auto issue = [&](MeshIssue kind, std::size_t index, std::array<Index, 2> edge, std::string msg) {
    rep.issues.push_back({kind, index, edge, std::move(msg)});
  };

  if (raw.dimension != 3 && raw.dimension != 4) {
    issue(MeshIssue::kBadDimension, 0, {0, 0},
          "dimension must be 3 or 4, got " + std::to_string(raw.dimension));
    return topo;
  }
  const std::size_t nv = raw.vertices.size();
  for (std::size_t t = 0; t < raw.triangles.size(); ++t) {
    const auto& tri = raw.triangles[t];
    if (tri[0] >= nv || tri[1] >= nv || tri[2] >= nv || tri[0] == tri[1] || tri[1] == tri[2] ||
        tri[0] == tri[2]) {
      issue(MeshIssue::kBadIndex, t, {0, 0}, "triangle " + std::to_string(t) + " has invalid indices");
    }
  }
  if (!rep.issues.empty()) return topo;
  if (raw.triangles.empty()) {
    issue(MeshIssue::kBadIndex, 0, {0, 0}, "mesh has no triangles");
    return topo;
  }

  std::vector<std::uint8_t> used(nv, 0);
  for (const auto& tri : raw.triangles)
    for (Index v : tri) used[v] = 1;
  for (std::size_t v = 0; v < nv; ++v)
    if (!used[v]) issue(MeshIssue::kUnreferencedVertex, v, {0, 0}, "vertex " + std::to_string(v) + " is unreferenced");

  for (std::size_t t = 0; t < raw.triangles.size(); ++t) {
    const auto& tri = raw.triangles[t];
    const double a = triangle_area(raw.vertices[tri[0]], raw.vertices[tri[1]], raw.vertices[tri[2]]);
    if (!(a >= kDegenerateArea)) {
      std::ostringstream os;
      os << "triangle " << t << " is degenerate (area " << a << ")";
      issue(MeshIssue::kDegenerateTriangle, t, {0, 0}, os.str());
    }
  }

  std::unordered_map<std::uint64_t, EdgeUse> uses;
  uses.reserve(raw.triangles.size() * 2);
  for (const auto& tri : raw.triangles) {
    for (int e = 0; e < 3; ++e) {
      const Index a = tri[e], b = tri[(e + 1) % 3];
      auto& u = uses[edge_key(a, b)];
      ++u.count;
      (a < b ? u.forward : u.backward) += 1;
    }
  }

  topo.edges.reserve(uses.size());
  for (const auto& [key, u] : uses) {
    const Index a = static_cast<Index>(key >> 32), b = static_cast<Index>(key & 0xffffffffu);
    topo.edges.push_back({a, b});
    if (u.count > 2) {
      issue(MeshIssue::kNonManifoldEdge, 0, {a, b},
            "edge (" + std::to_string(a) + "," + std::to_string(b) + ") is shared by " +
                std::to_string(u.count) + " triangles");
    } else if (u.count == 2 && (u.forward != 1 || u.backward != 1)) {
      issue(MeshIssue::kInconsistentOrientation, 0, {a, b},
            "edge (" + std::to_string(a) + "," + std::to_string(b) +
                ") is traversed in the same direction by both triangles");
    }
  }
  std::sort(topo.edges.begin(), topo.edges.end());
  std::sort(rep.issues.begin(), rep.issues.end(), [](const auto& x, const auto& y) {
    if (x.kind != y.kind) return x.kind < y.kind;
    if (x.index != y.index) return x.index < y.index;
    return x.edge < y.edge;
  });

  // Boundary: directed edges whose reverse is absent.
  constexpr Index kNone = std::numeric_limits<Index>::max();
  std::vector<Index> next(nv, kNone);
  topo.boundary_flag.assign(nv, 0);
  bool simple = true;
  for (const auto& tri : raw.triangles) {
    for (int e = 0; e < 3; ++e) {
      const Index a = tri[e], b = tri[(e + 1) % 3];
      if (uses[edge_key(a, b)].count != 1) continue;
      if (next[a] != kNone) {
        simple = false;
        issue(MeshIssue::kBoundaryNotSimple, a, {a, b},
              "boundary passes through vertex " + std::to_string(a) + " more than once");
      }
      next[a] = b;
      topo.boundary_flag[a] = 1;
      topo.boundary_flag[b] = 1;
    }
  }
  if (simple) {
    std::vector<std::uint8_t> seen(nv, 0);
    for (Index start = 0; start < nv; ++start) {
      if (next[start] == kNone || seen[start]) continue;
      BoundaryLoop loop;
      Index v = start;
      bool closed_ok = true;
      while (!seen[v]) {
        seen[v] = 1;
        loop.vertex_indices.push_back(v);
        if (next[v] == kNone) {
          closed_ok = false;
          break;
        }
        v = next[v];
      }
      if (!closed_ok || v != start) {
        issue(MeshIssue::kBoundaryNotSimple, start, {start, start},
              "boundary edges starting at vertex " + std::to_string(start) + " do not close into a loop");
        continue;
      }
      const auto& ids = loop.vertex_indices;
      NeumaierSum len;
      for (std::size_t i = 0; i < ids.size(); ++i)
        len.add((raw.vertices[ids[(i + 1) % ids.size()]] - raw.vertices[ids[i]]).norm());
      loop.length = len.value();
      topo.loops.push_back(std::move(loop));
    }
  }

  UnionFind uf(raw.triangles.size());
  std::unordered_map<std::uint64_t, std::size_t> first_owner;
  first_owner.reserve(uses.size());
  for (std::size_t t = 0; t < raw.triangles.size(); ++t) {
    const auto& tri = raw.triangles[t];
    for (int e = 0; e < 3; ++e) {
      auto [it, inserted] = first_owner.emplace(edge_key(tri[e], tri[(e + 1) % 3]), t);
      if (!inserted) uf.unite(it->second, t);
    }
  }
  rep.connected = true;
  for (std::size_t t = 0; t < raw.triangles.size(); ++t)
    if (uf.find(t) != 0) rep.connected = false;

  rep.valid = rep.issues.empty();
  rep.boundary_loop_count = topo.loops.size();
  rep.closed = rep.valid && topo.loops.empty();
  rep.euler_characteristic = static_cast<long>(nv) - static_cast<long>(topo.edges.size()) +
                             static_cast<long>(raw.triangles.size());
  return topo;
}

}  // namespace

const char* to_string(MeshIssue issue) {
  switch (issue) {
    case MeshIssue::kBadDimension: return "bad-dimension";
    case MeshIssue::kBadIndex: return "bad-index";
    case MeshIssue::kUnreferencedVertex: return "unreferenced-vertex";
    case MeshIssue::kDegenerateTriangle: return "degenerate-triangle";
    case MeshIssue::kNonManifoldEdge: return "non-manifold-edge";
    case MeshIssue::kInconsistentOrientation: return "inconsistent-orientation";
    case MeshIssue::kBoundaryNotSimple: return "boundary-not-simple";
  }
  return "unknown";
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  if (valid) {
    os << "valid mesh: " << (closed ? "closed" : "with boundary") << ", "
       << (connected ? "connected" : "disconnected") << ", " << boundary_loop_count
       << " boundary loop(s), chi = " << euler_characteristic;
    return os.str();
  }
  os << "invalid mesh (" << issues.size() << " issue(s))";
  const std::size_t shown = std::min<std::size_t>(issues.size(), 5);
  for (std::size_t i = 0; i < shown; ++i) os << "\n  [" << to_string(issues[i].kind) << "] " << issues[i].message;
  if (issues.size() > shown) os << "\n  ...";
  return os.str();
}

ValidationReport validate(const RawMesh& raw) { return analyse(raw).report; }

SurfaceMesh SurfaceMesh::from_raw(RawMesh raw) {
  Topology topo = analyse(raw);
  if (!topo.report.valid) throw MeshError(topo.report.summary());

  SurfaceMesh mesh;
  mesh.raw_ = std::move(raw);
  if (mesh.raw_.dimension == 3)
    for (auto& v : mesh.raw_.vertices) v[3] = 0.0;
  mesh.loops_ = std::move(topo.loops);
  mesh.boundary_flag_ = std::move(topo.boundary_flag);
  mesh.edges_ = std::move(topo.edges);
  mesh.connected_ = topo.report.connected;
  mesh.euler_ = topo.report.euler_characteristic;

  const std::size_t nv = mesh.raw_.vertices.size();
  std::vector<std::size_t> degree(nv + 1, 0);
  for (const auto& e : mesh.edges_) {
    ++degree[e[0]];
    ++degree[e[1]];
  }
  mesh.adjacency_offsets_.assign(nv + 1, 0);
  for (std::size_t v = 0; v < nv; ++v) mesh.adjacency_offsets_[v + 1] = mesh.adjacency_offsets_[v] + degree[v];
  mesh.adjacency_.resize(mesh.adjacency_offsets_[nv]);
  std::vector<std::size_t> fill(mesh.adjacency_offsets_.begin(), mesh.adjacency_offsets_.end() - 1);
  for (const auto& e : mesh.edges_) {
    mesh.adjacency_[fill[e[0]]++] = e[1];
    mesh.adjacency_[fill[e[1]]++] = e[0];
  }
  return mesh;
}

double SurfaceMesh::triangle_area(std::size_t t) const {
  const auto& tri = raw_.triangles[t];
  return dbound::triangle_area(raw_.vertices[tri[0]], raw_.vertices[tri[1]], raw_.vertices[tri[2]]);
}

double SurfaceMesh::area() const {
  NeumaierSum sum;
  for (std::size_t t = 0; t < raw_.triangles.size(); ++t) sum.add(triangle_area(t));
  return sum.value();
}

double wedge_norm(const Vec& u, const Vec& v) {
  double s = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      const double m = u[a] * v[b] - u[b] * v[a];
      s += m * m;
    }
  return std::sqrt(s);
}

double triangle_area(const Vec& a, const Vec& b, const Vec& c) { return 0.5 * wedge_norm(b - a, c - a); }

double boundary_length(const SurfaceMesh& mesh) {
  NeumaierSum sum;
  for (const auto& loop : mesh.boundary_loops()) sum.add(loop.length);
  return sum.value();
}

namespace {

using QueueEntry = std::pair<double, Index>;
using MinQueue = std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>>;

std::vector<double> edge_graph_distances(const SurfaceMesh& mesh, Index source) {
  const auto verts = mesh.vertices();
  std::vector<double> dist(mesh.vertex_count(), kInfinity);
  dist[source] = 0.0;
  MinQueue queue;
  queue.push({0.0, source});
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (Index w : mesh.neighbors(v)) {
      const double nd = d + (verts[w] - verts[v]).norm();
      if (nd < dist[w]) {
        dist[w] = nd;
        queue.push({nd, w});
      }
    }
  }
  return dist;
}

// Planar update of `target` from the accepted edge (a, b): unfold the triangle,
// place the virtual source consistent with d_a and d_b on the far side of the
// edge, and accept the straight-line distance only when the ray crosses the edge.
double unfolded_update(const Vec& pa, const Vec& pb, const Vec& pt, double da, double db) {
  const Vec e = pb - pa;
  const double l = e.norm();
  if (l <= 0.0) return kInfinity;
  const Vec u = e / l;
  const Vec rel = pt - pa;
  const double tx = rel.dot(u);
  const double ty = std::sqrt(std::max(0.0, rel.squaredNorm() - tx * tx));
  if (ty <= 0.0) return kInfinity;
  const double sx = (da * da - db * db + l * l) / (2.0 * l);
  const double sy2 = da * da - sx * sx;
  if (sy2 < 0.0) return kInfinity;
  const double sy = -std::sqrt(sy2);
  const double cross_x = sx + (tx - sx) * (-sy) / (ty - sy);
  if (cross_x < 0.0 || cross_x > l) return kInfinity;
  return std::hypot(tx - sx, ty - sy);
}

std::vector<double> fast_marching_distances(const SurfaceMesh& mesh, Index source) {
  const auto verts = mesh.vertices();
  const auto tris = mesh.triangles();
  const std::size_t nv = mesh.vertex_count();

  std::vector<std::size_t> offset(nv + 1, 0);
  for (const auto& t : tris)
    for (Index v : t) ++offset[v + 1];
  for (std::size_t v = 0; v < nv; ++v) offset[v + 1] += offset[v];
  std::vector<Index> incident(offset[nv]);
  std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
  for (std::size_t t = 0; t < tris.size(); ++t)
    for (Index v : tris[t]) incident[fill[v]++] = static_cast<Index>(t);

  std::vector<double> dist(nv, kInfinity);
  std::vector<std::uint8_t> done(nv, 0);
  dist[source] = 0.0;
  MinQueue queue;
  queue.push({0.0, source});
  auto relax = [&](Index w, double nd) {
    if (nd < dist[w]) {
      dist[w] = nd;
      queue.push({nd, w});
    }
  };
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (done[v] || d > dist[v]) continue;
    done[v] = 1;
    for (Index w : mesh.neighbors(v))
      if (!done[w]) relax(w, d + (verts[w] - verts[v]).norm());
    for (std::size_t k = offset[v]; k < offset[v + 1]; ++k) {
      const auto& tri = tris[incident[k]];
      for (int i = 0; i < 3; ++i) {
        const Index a = tri[i], b = tri[(i + 1) % 3], c = tri[(i + 2) % 3];
        // (a, b) accepted with v among them, c pending.
        if ((a != v && b != v) || !done[a] || !done[b] || done[c]) continue;
        relax(c, unfolded_update(verts[a], verts[b], verts[c], dist[a], dist[b]));
      }
    }
  }
  return dist;
}

// Signed area of disk(0, r) intersected with triangle (0, a, b).
double disk_wedge_area(Eigen::Vector2d a, Eigen::Vector2d b, double r) {
  auto cross = [](const Eigen::Vector2d& p, const Eigen::Vector2d& q) { return p.x() * q.y() - p.y() * q.x(); };
  auto piece = [&](const Eigen::Vector2d& p, const Eigen::Vector2d& q) {
    const Eigen::Vector2d mid = 0.5 * (p + q);
    if (mid.squaredNorm() <= r * r) return 0.5 * cross(p, q);
    return 0.5 * r * r * std::atan2(cross(p, q), p.dot(q));
  };
  const Eigen::Vector2d d = b - a;
  const double A = d.squaredNorm();
  if (A == 0.0) return 0.0;
  const double B = a.dot(d);
  const double C = a.squaredNorm() - r * r;
  const double disc = B * B - A * C;
  if (disc <= 0.0) return piece(a, b);
  const double sq = std::sqrt(disc);
  double t1 = (-B - sq) / A, t2 = (-B + sq) / A;
  t1 = std::clamp(t1, 0.0, 1.0);
  t2 = std::clamp(t2, 0.0, 1.0);
  const Eigen::Vector2d p1 = a + t1 * d, p2 = a + t2 * d;
  return piece(a, p1) + piece(p1, p2) + piece(p2, b);
}

}  // namespace

std::vector<double> geodesic_distances(const SurfaceMesh& mesh, Index source, GeodesicMethod method) {
  if (source >= mesh.vertex_count()) throw std::out_of_range("geodesic source vertex out of range");
  return method == GeodesicMethod::kEdgeGraph ? edge_graph_distances(mesh, source)
                                              : fast_marching_distances(mesh, source);
}

IntrinsicBalls::IntrinsicBalls(const SurfaceMesh& mesh, Index centre)
    : distance_(geodesic_distances(mesh, centre, GeodesicMethod::kFastMarching)) {
  for (double d : distance_)
    if (std::isfinite(d)) eccentricity_ = std::max(eccentricity_, d);

  const auto verts = mesh.vertices();
  const auto tris = mesh.triangles();
  local_.resize(tris.size());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    auto& lt = local_[t];
    const auto& tri = tris[t];
    const double d0 = distance_[tri[0]], d1 = distance_[tri[1]], d2 = distance_[tri[2]];
    lt.area = mesh.triangle_area(t);
    lt.reachable = std::isfinite(d0) && std::isfinite(d1) && std::isfinite(d2);
    if (!lt.reachable) continue;
    lt.min_distance = std::min({d0, d1, d2});
    lt.max_distance = std::max({d0, d1, d2});

    const Vec e1 = verts[tri[1]] - verts[tri[0]];
    const Vec e2 = verts[tri[2]] - verts[tri[0]];
    const double l1 = e1.norm();
    const Vec u = e1 / l1;
    const double cx = e2.dot(u);
    const double cy = std::sqrt(std::max(0.0, e2.squaredNorm() - cx * cx));
    lt.corners = {Eigen::Vector2d(0, 0), Eigen::Vector2d(l1, 0), Eigen::Vector2d(cx, cy)};
    // d^2(x) = |x|^2 + g0 + g.x, fitted to the three corner values.
    const double g0 = d0 * d0;
    const double g1 = (d1 * d1 - l1 * l1 - g0) / l1;
    const double g2 = (d2 * d2 - (cx * cx + cy * cy) - g0 - g1 * cx) / cy;
    lt.source = Eigen::Vector2d(-0.5 * g1, -0.5 * g2);
    lt.offset = g0 - lt.source.squaredNorm();
  }
}

double IntrinsicBalls::covered_fraction(const LocalTriangle& t, double r) const {
  if (!t.reachable) return 0.0;
  if (r >= t.max_distance) return 1.0;
  const double rho2 = r * r - t.offset;
  if (rho2 <= 0.0) return 0.0;
  const double rho = std::sqrt(rho2);
  double covered = 0.0;
  for (int i = 0; i < 3; ++i)
    covered += disk_wedge_area(t.corners[i] - t.source, t.corners[(i + 1) % 3] - t.source, rho);
  const double planar = 0.5 * std::abs((t.corners[1] - t.corners[0]).x() * (t.corners[2] - t.corners[0]).y() -
                                       (t.corners[1] - t.corners[0]).y() * (t.corners[2] - t.corners[0]).x());
  return std::clamp(std::abs(covered) / planar, 0.0, 1.0);
}

double IntrinsicBalls::volume(double r) const {
  NeumaierSum sum;
  for (const auto& t : local_) sum.add(t.area * covered_fraction(t, r));
  return sum.value();
}

double IntrinsicBalls::integrate(std::span<const double> triangle_density, double r) const {
  if (triangle_density.size() != local_.size())
    throw std::invalid_argument("density must have one value per triangle");
  NeumaierSum sum;
  for (std::size_t t = 0; t < local_.size(); ++t) {
    if (triangle_density[t] == 0.0) continue;
    sum.add(triangle_density[t] * local_[t].area * covered_fraction(local_[t], r));
  }
  return sum.value();
}

double intrinsic_ball_volume(const SurfaceMesh& mesh, Index p, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("ball radius must be positive");
  return IntrinsicBalls(mesh, p).volume(r);
}

}  // namespace dbound
