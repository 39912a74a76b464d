#include "dbound/contour.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "dbound/mesh.hpp"
#include "dbound/numeric.hpp"
#include "dbound/spatial.hpp"

namespace dbound {

std::size_t Contour::point_count() const {
  std::size_t n = 0;
  for (const auto& c : components) n += c.size();
  return n;
}

std::vector<Point3> Contour::all_points() const {
  std::vector<Point3> pts;
  pts.reserve(point_count());
  for (const auto& c : components) pts.insert(pts.end(), c.begin(), c.end());
  return pts;
}

double polyline_length(const Polyline& poly) {
  NeumaierSum sum;
  for (std::size_t i = 0; i < poly.size(); ++i) sum.add((poly[(i + 1) % poly.size()] - poly[i]).norm());
  return sum.value();
}

double contour_length(const Contour& contour) {
  NeumaierSum sum;
  for (const auto& c : contour.components) sum.add(polyline_length(c));
  return sum.value();
}

double contour_diameter(const Contour& contour, int threads) {
  std::vector<Vec> pts;
  pts.reserve(contour.point_count());
  for (const auto& c : contour.components)
    for (const auto& p : c) pts.emplace_back(p.x(), p.y(), p.z(), 0.0);
  return extrinsic_diameter(pts, DiameterMethod::kBranchAndBound, threads);
}

double segment_distance(const Point3& p0, const Point3& p1, const Point3& q0, const Point3& q1) {
  const Point3 d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a <= 0.0 && e <= 0.0) return r.norm();
  if (a <= 0.0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 0.0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p0 + s * d1) - (q0 + t * d2)).norm();
}

double polyline_distance(const Polyline& a, const Polyline& b) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Point3& p0 = a[i];
    const Point3& p1 = a[(i + 1) % a.size()];
    for (std::size_t j = 0; j < b.size(); ++j) best = std::min(best, segment_distance(p0, p1, b[j], b[(j + 1) % b.size()]));
  }
  return best;
}

BoundingSphere bounding_sphere(const Polyline& poly) {
  Point3 c = Point3::Zero();
  for (const auto& p : poly) c += p;
  c /= static_cast<double>(poly.size());
  double r = 0.0;
  for (const auto& p : poly) r = std::max(r, (p - c).norm());
  return {c, r};
}

ContourValidation validate(const Contour& contour, int threads) {
  ContourValidation out;
  const auto& comps = contour.components;
  if (comps.empty()) out.issues.push_back("contour has no components");
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto& c = comps[i];
    if (c.size() < 3) {
      out.issues.push_back("component " + std::to_string(i) + " has fewer than 3 points");
      continue;
    }
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (!c[j].allFinite()) out.issues.push_back("component " + std::to_string(i) + " has a non-finite point");
      if (c[j] == c[(j + 1) % c.size()])
        out.issues.push_back("component " + std::to_string(i) + " repeats point " + std::to_string(j));
    }
  }
  out.min_component_distance = kInfinity;
  if (out.issues.empty() && comps.size() > 1) {
    // Only pairs whose bounding spheres come close need the exact test.
    std::vector<BoundingSphere> spheres(comps.size());
    std::vector<Point3> centers(comps.size());
    double max_r = 0.0;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      spheres[i] = bounding_sphere(comps[i]);
      centers[i] = spheres[i].center;
      max_r = std::max(max_r, spheres[i].radius);
    }
    // Nearest-centre distances give the reported minimum without O(N^2) work.
    double typical = kInfinity;
    PointGrid grid(centers, std::max(max_r * 4.0, 1e-6));
    for (std::size_t i = 0; i < comps.size(); ++i) typical = std::min(typical, grid.nearest(centers[i], i).distance);
    const double reach = typical + 4.0 * max_r;
    std::vector<double> local(comps.size(), kInfinity);
    parallel_for(comps.size(), threads, [&](std::size_t i) {
      grid.for_each_within(centers[i], reach, [&](std::size_t j) {
        if (j <= i) return;
        const double lb = (centers[i] - centers[j]).norm() - spheres[i].radius - spheres[j].radius;
        if (lb >= local[i]) return;
        local[i] = std::min(local[i], polyline_distance(comps[i], comps[j]));
      });
    });
    out.min_component_distance = *std::min_element(local.begin(), local.end());
    if (!(out.min_component_distance > kContourDisjointTolerance))
      out.issues.push_back("components are not disjoint (min distance " + fmt12(out.min_component_distance) + ")");
  }
  out.valid = out.issues.empty();
  return out;
}

void require_valid(const Contour& contour, int threads) {
  const auto v = validate(contour, threads);
  if (v.valid) return;
  std::string msg = "invalid contour:";
  for (const auto& issue : v.issues) msg += " " + issue + ";";
  throw ContourError(msg);
}

Eigen::MatrixXd component_distance_matrix(const Contour& contour, int threads) {
  const std::size_t n = contour.components.size();
  if (n < 2) throw ContourError("distance matrix needs at least two components");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) m(i, j) = polyline_distance(contour.components[i], contour.components[j]);
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m(j, i) = m(i, j);
  return m;
}

Contour read_contour(std::istream& in) {
  Contour contour;
  try {
    nlohmann::json doc;
    in >> doc;
    if (doc.at("dimension").get<int>() != 3) throw ContourError("contours must be 3-dimensional");
    for (const auto& comp : doc.at("components")) {
      Polyline poly;
      for (const auto& row : comp.at("vertices")) {
        if (row.size() != 3) throw ContourError("contour vertices need 3 coordinates");
        poly.emplace_back(row[0].get<double>(), row[1].get<double>(), row[2].get<double>());
      }
      contour.components.push_back(std::move(poly));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ContourError(std::string("contour document: ") + e.what());
  }
  return contour;
}

void write_contour(std::ostream& out, const Contour& contour) {
  nlohmann::json doc;
  doc["dimension"] = 3;
  auto& comps = doc["components"] = nlohmann::json::array();
  for (const auto& c : contour.components) {
    auto verts = nlohmann::json::array();
    for (const auto& p : c) verts.push_back({round12(p.x()), round12(p.y()), round12(p.z())});
    comps.push_back({{"vertices", std::move(verts)}});
  }
  out << doc.dump() << '\n';
}

Contour read_contour_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ContourError("cannot open " + path.string());
  return read_contour(in);
}

void write_contour_file(const std::filesystem::path& path, const Contour& contour) {
  std::ofstream out(path);
  if (!out) throw ContourError("cannot write " + path.string());
  write_contour(out, contour);
}

}  // namespace dbound
