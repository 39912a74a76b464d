#include "dbound/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "dbound/numeric.hpp"
#include "dbound/spatial.hpp"

namespace dbound {

namespace {

// Surface of revolution about the z axis. Profile points with rho == 0 at
// either end become poles; ring i carries counts[i] vertices.
struct Ring {
  double rho;
  double z;
  int count;
};

RawMesh revolve(const std::vector<Ring>& rings) {
  RawMesh mesh;
  std::vector<std::vector<Index>> ids(rings.size());
  for (std::size_t i = 0; i < rings.size(); ++i) {
    const Ring& r = rings[i];
    if (r.rho == 0.0) {
      ids[i].push_back(static_cast<Index>(mesh.vertices.size()));
      mesh.vertices.emplace_back(0.0, 0.0, r.z, 0.0);
      continue;
    }
    for (int k = 0; k < r.count; ++k) {
      const double phi = 2.0 * kPi * k / r.count;
      ids[i].push_back(static_cast<Index>(mesh.vertices.size()));
      mesh.vertices.emplace_back(r.rho * std::cos(phi), r.rho * std::sin(phi), r.z, 0.0);
    }
  }
  for (std::size_t i = 0; i + 1 < rings.size(); ++i) {
    const auto& a = ids[i];
    const auto& b = ids[i + 1];
    const std::size_t na = a.size(), nb = b.size();
    if (na == 1) {
      for (std::size_t k = 0; k < nb; ++k) mesh.triangles.push_back({a[0], b[k], b[(k + 1) % nb]});
      continue;
    }
    if (nb == 1) {
      for (std::size_t k = 0; k < na; ++k) mesh.triangles.push_back({a[k], b[0], a[(k + 1) % na]});
      continue;
    }
    // Zip the two rings together by angle.
    std::size_t ia = 0, ib = 0;
    while (ia < na || ib < nb) {
      const bool advance_a = ib == nb || (ia < na && (ia + 1) * nb < (ib + 1) * na);
      if (advance_a) {
        mesh.triangles.push_back({a[ia % na], b[ib % nb], a[(ia + 1) % na]});
        ++ia;
      } else {
        mesh.triangles.push_back({a[ia % na], b[ib % nb], b[(ib + 1) % nb]});
        ++ib;
      }
    }
  }
  return mesh;
}

RawMesh disk_raw(double radius, int segments, int rings) {
  if (!(radius > 0.0) || segments < 6) throw std::invalid_argument("disk needs radius > 0 and >= 6 segments");
  if (rings <= 0) rings = std::max(1, static_cast<int>(std::lround(segments / (2.0 * kPi))));
  std::vector<Ring> profile{{0.0, 0.0, 1}};
  for (int i = 1; i <= rings; ++i) {
    const int count = i == rings ? segments : std::max(6, static_cast<int>(std::lround(static_cast<double>(segments) * i / rings)));
    profile.push_back({radius * i / rings, 0.0, count});
  }
  return revolve(profile);
}

SurfaceMesh finish(RawMesh raw) { return SurfaceMesh::from_raw(std::move(raw)); }

}  // namespace

SurfaceMesh make_disk(double radius, int segments, int rings) { return finish(disk_raw(radius, segments, rings)); }

SurfaceMesh make_disk4(double radius, int segments, int rings) {
  RawMesh raw = disk_raw(radius, segments, rings);
  raw.dimension = 4;
  return finish(std::move(raw));
}

SurfaceMesh make_holomorphic_graph(double a, int segments, int rings) {
  RawMesh raw = disk_raw(1.0, segments, rings);
  raw.dimension = 4;
  for (auto& v : raw.vertices) {
    const double x = v[0], y = v[1];
    v[2] = a * (x * x - y * y);
    v[3] = a * 2.0 * x * y;
  }
  return finish(std::move(raw));
}

SurfaceMesh make_square(int n) {
  if (n < 1) throw std::invalid_argument("square needs n >= 1");
  RawMesh raw;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) raw.vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n, 0.0, 0.0);
  auto id = [n](int i, int j) { return static_cast<Index>(j * (n + 1) + i); };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      // Alternate diagonals so the grid has no preferred direction.
      if ((i + j) % 2 == 0) {
        raw.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
        raw.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      } else {
        raw.triangles.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
        raw.triangles.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
      }
    }
  return finish(std::move(raw));
}

SurfaceMesh make_icosphere(int subdivisions, double radius) {
  if (subdivisions < 0 || subdivisions > 8) throw std::invalid_argument("icosphere subdivisions must be in [0, 8]");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                                    {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<Triangle> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                             {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<Index, Index>, Index> midpoint;
    auto mid = [&](Index a, Index b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const Index id = static_cast<Index>(v.size());
      v.push_back((0.5 * (v[a] + v[b])).normalized());
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Triangle> next;
    next.reserve(f.size() * 4);
    for (const auto& tri : f) {
      const Index ab = mid(tri[0], tri[1]), bc = mid(tri[1], tri[2]), ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  RawMesh raw;
  for (const auto& p : v) raw.vertices.emplace_back(radius * p.x(), radius * p.y(), radius * p.z(), 0.0);
  raw.triangles = std::move(f);
  return finish(std::move(raw));
}

SurfaceMesh make_hemisphere(double radius, int segments) {
  if (!(radius > 0.0) || segments < 8) throw std::invalid_argument("hemisphere needs radius > 0 and >= 8 segments");
  const int steps = std::max(2, segments / 4);
  std::vector<Ring> profile{{0.0, radius, 1}};
  for (int i = 1; i <= steps; ++i) {
    const double theta = 0.5 * kPi * i / steps;
    const int count = i == steps ? segments : std::max(6, static_cast<int>(std::lround(segments * std::sin(theta))));
    profile.push_back({radius * std::sin(theta), i == steps ? 0.0 : radius * std::cos(theta), count});
  }
  return finish(revolve(profile));
}

SurfaceMesh make_open_cylinder(double radius, double length, int segments, int rows) {
  if (!(radius > 0.0) || !(length > 0.0) || segments < 3 || rows < 1)
    throw std::invalid_argument("cylinder needs positive radius/length, >= 3 segments, >= 1 row");
  std::vector<Ring> profile;
  for (int i = 0; i <= rows; ++i) profile.push_back({radius, -0.5 * length + length * i / rows, segments});
  return finish(revolve(profile));
}

SurfaceMesh make_capped_cylinder(double radius, double length, double spacing) {
  if (!(radius > 0.0) || !(length > 0.0) || !(spacing > 0.0))
    throw std::invalid_argument("capped cylinder needs positive radius, length and spacing");
  const int arc = std::max(2, static_cast<int>(std::ceil(0.5 * kPi * radius / spacing)));
  const int straight = std::max(1, static_cast<int>(std::ceil(length / spacing)));
  auto count = [&](double rho) { return std::max(6, static_cast<int>(std::lround(2.0 * kPi * rho / spacing))); };
  const double h = 0.5 * length;
  std::vector<Ring> profile{{0.0, -h - radius, 1}};
  for (int i = 1; i <= arc; ++i) {
    const double a = 0.5 * kPi * i / arc;
    const double rho = i == arc ? radius : radius * std::sin(a);
    profile.push_back({rho, i == arc ? -h : -h - radius * std::cos(a), count(rho)});
  }
  for (int i = 1; i < straight; ++i) profile.push_back({radius, -h + length * i / straight, count(radius)});
  for (int i = arc; i >= 1; --i) {
    const double a = 0.5 * kPi * i / arc;
    const double rho = i == arc ? radius : radius * std::sin(a);
    profile.push_back({rho, i == arc ? h : h + radius * std::cos(a), count(rho)});
  }
  profile.push_back({0.0, h + radius, 1});
  return finish(revolve(profile));
}

SurfaceMesh make_torus(double major, double minor, int segments_major, int segments_minor) {
  if (!(minor > 0.0) || !(major > minor) || segments_major < 3 || segments_minor < 3)
    throw std::invalid_argument("torus needs major > minor > 0 and >= 3 segments each way");
  RawMesh raw;
  for (int i = 0; i < segments_major; ++i) {
    const double u = 2.0 * kPi * i / segments_major;
    for (int j = 0; j < segments_minor; ++j) {
      const double v = 2.0 * kPi * j / segments_minor;
      const double rho = major + minor * std::cos(v);
      raw.vertices.emplace_back(rho * std::cos(u), rho * std::sin(u), minor * std::sin(v), 0.0);
    }
  }
  auto id = [&](int i, int j) {
    return static_cast<Index>(((i + segments_major) % segments_major) * segments_minor + (j + segments_minor) % segments_minor);
  };
  for (int i = 0; i < segments_major; ++i)
    for (int j = 0; j < segments_minor; ++j) {
      raw.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      raw.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return finish(std::move(raw));
}

// ---------------------------------------------------------------- contours

Polyline make_circle(const Point3& center, const Point3& normal, double radius, int segments) {
  if (segments < 3 || !(radius > 0.0)) throw std::invalid_argument("circle needs radius > 0 and >= 3 segments");
  const Point3 n = normal.normalized();
  int axis = 0;
  n.cwiseAbs().minCoeff(&axis);
  const Point3 u = (Point3::Unit(axis) - n[axis] * n).normalized();
  const Point3 v = n.cross(u);
  Polyline poly;
  poly.reserve(segments);
  for (int k = 0; k < segments; ++k) {
    const double phi = 2.0 * kPi * k / segments;
    poly.push_back(center + radius * (std::cos(phi) * u + std::sin(phi) * v));
  }
  return poly;
}

Contour make_stadium(double a, double r, int arc_segments) {
  if (!(a > 0.0) || !(r > 0.0) || arc_segments < 4) throw std::invalid_argument("stadium needs a, r > 0 and >= 4 arc segments");
  const double h = kPi * r / arc_segments;
  const int straight = std::max(1, static_cast<int>(std::lround(a / h)));
  Polyline poly;
  for (int i = 0; i < straight; ++i) poly.emplace_back(-0.5 * a + a * i / straight, -r, 0.0);
  for (int i = 0; i < arc_segments; ++i) {
    const double t = -0.5 * kPi + kPi * i / arc_segments;
    poly.emplace_back(0.5 * a + r * std::cos(t), r * std::sin(t), 0.0);
  }
  for (int i = 0; i < straight; ++i) poly.emplace_back(0.5 * a - a * i / straight, r, 0.0);
  for (int i = 0; i < arc_segments; ++i) {
    const double t = 0.5 * kPi + kPi * i / arc_segments;
    poly.emplace_back(-0.5 * a + r * std::cos(t), r * std::sin(t), 0.0);
  }
  return Contour{{std::move(poly)}};
}

Contour make_coaxial_circles(double radius, double half_gap, int segments) {
  if (!(half_gap > 0.0)) throw std::invalid_argument("coaxial circles need a positive gap");
  const Point3 z = Point3::UnitZ();
  return Contour{{make_circle(half_gap * z, z, radius, segments), make_circle(-half_gap * z, z, radius, segments)}};
}

// ---------------------------------------------------------------- sphere nets

double chord_to_arc(double chord) { return 2.0 * std::asin(std::min(1.0, 0.5 * chord)); }

std::vector<Point3> fibonacci_points(std::size_t n) {
  if (n == 0) throw std::invalid_argument("fibonacci set needs at least one point");
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  std::vector<Point3> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / static_cast<double>(n);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    pts[i] = Point3(rho * std::cos(phi), rho * std::sin(phi), z);
  }
  return pts;
}

namespace {

double nominal_spacing(std::size_t n) { return std::sqrt(4.0 * kPi / static_cast<double>(n)); }

}  // namespace

double packing_radius(const std::vector<Point3>& points) {
  if (points.size() < 2) return kInfinity;
  PointGrid grid(points, nominal_spacing(points.size()));
  double best = kInfinity;
  for (std::size_t i = 0; i < points.size(); ++i) best = std::min(best, grid.nearest(points[i], i).distance);
  return 0.5 * chord_to_arc(best);
}

CoveringEstimate covering_radius_estimate(const std::vector<Point3>& points, std::size_t resolution, double stop_above,
                                          int threads) {
  if (points.empty()) throw std::invalid_argument("covering radius of an empty set");
  if (resolution < 10000) throw std::invalid_argument("covering estimate needs resolution >= 1e4");
  PointGrid grid(points, nominal_spacing(points.size()));
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  const int workers = std::max(1, threads);
  std::vector<double> local(workers, 0.0);
  std::vector<char> stopped(workers, 0);
  const double stop_chord = std::isfinite(stop_above) ? 2.0 * std::sin(0.5 * std::min(stop_above, kPi)) : kInfinity;
  parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t w) {
    const std::size_t begin = resolution * w / workers, end = resolution * (w + 1) / workers;
    double worst = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / static_cast<double>(resolution);
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * static_cast<double>(i);
      const double d = grid.nearest(Point3(rho * std::cos(phi), rho * std::sin(phi), z)).distance;
      worst = std::max(worst, d);
      if (worst > stop_chord) {
        stopped[w] = 1;
        break;
      }
    }
    local[w] = worst;
  });
  CoveringEstimate est;
  est.radius = chord_to_arc(*std::max_element(local.begin(), local.end()));
  est.sample_spacing = nominal_spacing(resolution);
  est.stopped_early = std::find(stopped.begin(), stopped.end(), 1) != stopped.end();
  return est;
}

SphericalPointSet fibonacci_net(double eps, int threads) {
  if (!(eps > 0.0) || eps > 0.5) throw std::invalid_argument("net target must lie in (0, 0.5]");
  constexpr std::size_t kCap = 1000000;
  const auto resolution =
      static_cast<std::size_t>(std::clamp(std::ceil(1250.0 / (eps * eps)), 1e4, 2e6));
  auto covers = [&](std::size_t n) {
    return !covering_radius_estimate(fibonacci_points(n), resolution, eps, threads).stopped_early;
  };
  std::size_t hi = 2;
  while (!covers(hi)) {
    hi *= 2;
    if (hi > kCap) throw std::runtime_error("net target infeasible below 1e6 points");
  }
  std::size_t lo = hi / 2;
  while (hi - lo > std::max<std::size_t>(1, hi / 64)) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (covers(mid) ? hi : lo) = mid;
  }
  SphericalPointSet net;
  net.points = fibonacci_points(hi);
  net.packing_radius = packing_radius(net.points);
  const auto est = covering_radius_estimate(net.points, resolution, kInfinity, threads);
  net.covering_radius = est.radius;
  net.covering_resolution = resolution;
  if (net.packing_radius < eps / 4.0)
    throw std::runtime_error("net packing radius " + fmt12(net.packing_radius) + " below eps/4");
  return net;
}

Contour sphere_circles(const std::vector<Point3>& centers, double radius, int segments) {
  if (segments < 16) throw std::invalid_argument("sphere circles need >= 16 segments");
  if (!(radius > 0.0)) throw std::invalid_argument("sphere circle radius must be positive");
  Contour c;
  c.components.reserve(centers.size());
  for (const auto& p : centers) {
    const Point3 n = p.normalized();
    c.components.push_back(make_circle(std::cos(radius) * n, n, std::sin(radius), segments));
  }
  return c;
}

Contour sphere_circles(const SphericalPointSet& x, double radius, int segments) {
  const double r = x.packing_radius > 0.0 ? x.packing_radius : packing_radius(x.points);
  if (!(radius < r))
    throw std::invalid_argument("circle radius " + fmt12(radius) + " must be below the packing radius " + fmt12(r));
  return sphere_circles(x.points, radius, segments);
}

Contour antipodal_circles(double eps, int segments) {
  SphericalPointSet poles;
  poles.points = {Point3::UnitZ(), -Point3::UnitZ()};
  poles.packing_radius = 0.5 * kPi;
  return sphere_circles(poles, eps, segments);
}

Contour net_circles(double eps, int segments, int threads) {
  return sphere_circles(fibonacci_net(eps, threads), std::pow(eps, 2.5), segments);
}

// ---------------------------------------------------------------- library

namespace {

class Params {
 public:
  Params(const std::string& shape, const ShapeParams& p) : shape_(shape), p_(p) {}
  double get(const std::string& key, double fallback) {
    used_.push_back(key);
    auto it = p_.find(key);
    return it == p_.end() ? fallback : it->second;
  }
  int count(const std::string& key, int fallback) { return static_cast<int>(std::lround(get(key, fallback))); }
  void finish() const {
    for (const auto& [k, v] : p_)
      if (std::find(used_.begin(), used_.end(), k) == used_.end())
        throw std::invalid_argument("shape '" + shape_ + "' has no parameter '" + k + "'");
  }

 private:
  std::string shape_;
  const ShapeParams& p_;
  std::vector<std::string> used_;
};

}  // namespace

std::vector<std::string> shape_names() {
  return {"disk",     "disk4",   "holomorphic_graph", "square",          "icosphere", "hemisphere",
          "cylinder", "capped_cylinder", "torus",     "stadium",         "coaxial_circles",
          "antipodal_circles", "net_circles"};
}

Shape shape_library(const std::string& name, const ShapeParams& params, int threads) {
  Params p(name, params);
  auto done = [&](auto shape) -> Shape {
    p.finish();
    return shape;
  };
  if (name == "disk") return done(make_disk(p.get("radius", 1.0), p.count("segments", 128), p.count("rings", 0)));
  if (name == "disk4") return done(make_disk4(p.get("radius", 1.0), p.count("segments", 128), p.count("rings", 0)));
  if (name == "holomorphic_graph")
    return done(make_holomorphic_graph(p.get("a", 0.5), p.count("segments", 128), p.count("rings", 0)));
  if (name == "square") return done(make_square(p.count("n", 64)));
  if (name == "icosphere") return done(make_icosphere(p.count("subdivisions", 4), p.get("radius", 1.0)));
  if (name == "hemisphere") return done(make_hemisphere(p.get("radius", 1.0), p.count("segments", 128)));
  if (name == "cylinder")
    return done(make_open_cylinder(p.get("radius", 1.0), p.get("length", 4.0), p.count("segments", 64), p.count("rows", 40)));
  if (name == "capped_cylinder")
    return done(make_capped_cylinder(p.get("radius", 1.0), p.get("length", 20.0), p.get("spacing", 0.1)));
  if (name == "torus")
    return done(make_torus(p.get("major", 2.0), p.get("minor", 0.5), p.count("segments_major", 96), p.count("segments_minor", 32)));
  if (name == "stadium") return done(make_stadium(p.get("a", 10.0), p.get("r", 1.0), p.count("arc_segments", 64)));
  if (name == "coaxial_circles")
    return done(make_coaxial_circles(p.get("radius", 1.0), p.get("half_gap", 2.0), p.count("segments", 64)));
  if (name == "antipodal_circles") return done(antipodal_circles(p.get("eps", 0.01), p.count("segments", 64)));
  if (name == "net_circles") return done(net_circles(p.get("eps", 0.1), p.count("segments", 16), threads));
  throw std::invalid_argument("unknown shape '" + name + "'");
}

}  // namespace dbound
