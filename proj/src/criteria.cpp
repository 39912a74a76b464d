#include "dbound/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "dbound/generators.hpp"
#include "dbound/numeric.hpp"
#include "dbound/optimize.hpp"
#include "dbound/spatial.hpp"

namespace dbound {

// ---------------------------------------------------------------- tau

namespace {

double tau_residual(double t) { return std::cosh(t) - t * std::sinh(t); }

}  // namespace

TauRoot tau_root() {
  TauRoot r;
  double t = 1.2;
  for (r.iterations = 0; r.iterations < 50; ++r.iterations) {
    const double g = tau_residual(t);
    if (std::abs(g) <= 1e-12) {
      // One more step polishes the last bits without changing the residual test.
      t -= g / (-t * std::cosh(t));
      r.tau = t;
      r.sinh2 = std::sinh(t) * std::sinh(t);
      r.residual = tau_residual(t);
      return r;
    }
    t -= g / (-t * std::cosh(t));
  }
  throw std::runtime_error("tau Newton iteration did not converge");
}

double tau_bisection(double lo, double hi, double tolerance) {
  if (!(tau_residual(lo) > 0.0 && tau_residual(hi) < 0.0)) throw std::invalid_argument("tau bracket does not change sign");
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (tau_residual(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kCertified: return "nonexistence-certified";
    case Verdict::kNotTriggered: return "not-triggered";
    case Verdict::kNoCertificate: return "no-certificate-found";
    case Verdict::kInapplicable: return "inapplicable";
  }
  return "?";
}

double CriterionEntry::value(const std::string& key) const {
  for (const auto& [k, v] : measured)
    if (k == key) return v;
  throw std::out_of_range("criterion entry has no measurement '" + key + "'");
}

// ---------------------------------------------------------------- diameter / length

CriterionEntry diameter_length_check(const Contour& c, BoundMode mode, int threads) {
  const double d = contour_diameter(c, threads);
  const double l = contour_length(c);
  const bool proven = mode == BoundMode::kProven;
  const double factor = proven ? 8.0 : 0.5;
  CriterionEntry e;
  e.criterion = proven ? "diameter_length" : "diameter_length_conjectural";
  e.rigorous = proven;
  e.margin = d - factor * l;
  e.normalized_margin = e.margin / d;
  e.verdict = e.normalized_margin > kCertifyMargin ? Verdict::kCertified : Verdict::kNotTriggered;
  e.measured = {{"d", d}, {"l", l}, {"factor", factor}};
  if (!proven) e.note = "conjectural constant; not a proof";
  return e;
}

// ---------------------------------------------------------------- White

namespace {

// Argument order fixed so every caller sees bit-identical values.
double component_distance(const Contour& c, std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  return polyline_distance(c.components[i], c.components[j]);
}

}  // namespace

WhiteOptimum white_optimum(const Contour& c, int threads) {
  const std::size_t n = c.components.size();
  if (n < 2) throw ContourError("White's criterion needs at least two components");
  std::vector<BoundingSphere> sph(n);
  for (std::size_t i = 0; i < n; ++i) sph[i] = bounding_sphere(c.components[i]);

  // Prim with lazy exact distances: a pair is evaluated only when its
  // bounding-sphere lower bound could improve the key.
  std::vector<double> key(n, kInfinity);
  std::vector<std::size_t> parent(n, 0);
  std::vector<std::uint8_t> in_tree(n, 0);
  std::size_t u = 0;
  in_tree[0] = 1;
  std::vector<std::pair<std::size_t, std::size_t>> tree_edges;
  std::vector<double> tree_weight;
  const int workers = n > 256 ? threads : 1;
  for (std::size_t step = 1; step < n; ++step) {
    parallel_for(n, workers, [&](std::size_t v) {
      if (in_tree[v]) return;
      const double lb = (sph[u].center - sph[v].center).norm() - sph[u].radius - sph[v].radius;
      if (lb >= key[v]) return;
      const double d = component_distance(c, u, v);
      if (d < key[v]) {
        key[v] = d;
        parent[v] = u;
      }
    });
    std::size_t next = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!in_tree[v] && (next == n || key[v] < key[next])) next = v;
    in_tree[next] = 1;
    tree_edges.emplace_back(parent[next], next);
    tree_weight.push_back(key[next]);
    u = next;
  }
  const std::size_t longest =
      static_cast<std::size_t>(std::max_element(tree_weight.begin(), tree_weight.end()) - tree_weight.begin());

  WhiteOptimum out;
  out.distance = tree_weight[longest];
  out.bottleneck = tree_edges[longest];
  // Sides: components reachable from the bottleneck's first end without it.
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t e = 0; e < tree_edges.size(); ++e) {
    if (e == longest) continue;
    adj[tree_edges[e].first].push_back(tree_edges[e].second);
    adj[tree_edges[e].second].push_back(tree_edges[e].first);
  }
  out.side.assign(n, 0);
  std::vector<std::size_t> stack{out.bottleneck.first};
  out.side[out.bottleneck.first] = 1;
  while (!stack.empty()) {
    const std::size_t x = stack.back();
    stack.pop_back();
    for (std::size_t y : adj[x])
      if (!out.side[y]) {
        out.side[y] = 1;
        stack.push_back(y);
      }
  }
  return out;
}

double white_bruteforce_oracle(const Contour& c) {
  const std::size_t n = c.components.size();
  if (n < 2 || n > 12) throw std::invalid_argument("brute-force oracle needs 2..12 components");
  const Eigen::MatrixXd d = component_distance_matrix(c);
  double best = 0.0;
  // Component 0 always on side A; masks over the rest, excluding "all in A".
  const std::uint32_t full = (1u << (n - 1)) - 1;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    double cross = kInfinity;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const bool si = i > 0 && (mask >> (i - 1)) & 1u;
        const bool sj = (mask >> (j - 1)) & 1u;
        if (si != sj) cross = std::min(cross, d(i, j));
      }
    best = std::max(best, cross);
  }
  return best;
}

CriterionEntry white_check(const Contour& c, int threads) {
  CriterionEntry e;
  e.criterion = "white";
  const double l = contour_length(c);
  if (c.components.size() < 2) {
    e.verdict = Verdict::kInapplicable;
    e.note = "single component: no decomposition exists";
    e.measured = {{"l", l}};
    return e;
  }
  const double d = contour_diameter(c, threads);
  const WhiteOptimum w = white_optimum(c, threads);
  const double threshold = l / kPi;
  e.margin = w.distance - threshold;
  e.normalized_margin = e.margin / d;
  e.verdict = e.normalized_margin > kCertifyMargin ? Verdict::kCertified : Verdict::kNoCertificate;
  e.measured = {{"best_distance", w.distance}, {"threshold", threshold}, {"l", l}, {"ratio", w.distance / l}};
  e.partition = w.side;
  e.note = "components kept whole in the decomposition";
  return e;
}

// ---------------------------------------------------------------- cone

namespace {

struct ConeGeometry {
  double sinh_tau, cosh_tau;
};

// sin(alpha - theta): positive iff p lies strictly inside the requested nappe.
double cone_slack(const Point3& p, const Point3& apex, const Point3& axis, bool upper, const ConeGeometry& g) {
  const Point3 v = p - apex;
  const double r = v.norm();
  if (r == 0.0) return -1.0;
  const double z = v.dot(axis);
  const double rho = (v - z * axis).norm();
  const double zs = upper ? z : -z;
  return (zs * g.sinh_tau - rho) / (r * g.cosh_tau);
}

struct Workspace {
  std::vector<Point3> centroids;               // per component, normalised frame
  std::vector<std::vector<Point3>> proxies;    // per component
};

}  // namespace

std::optional<double> verify_cone(const Contour& c, const ConeSeparator& sep) {
  using L = long double;
  const L sh = std::sinh(static_cast<L>(sep.tau));
  const L sh2 = sh * sh;
  const L alpha = std::atan(sh);
  L axis[3] = {sep.axis.x(), sep.axis.y(), sep.axis.z()};
  const L an = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  for (auto& a : axis) a /= an;
  if (sep.upper.size() != c.components.size()) return std::nullopt;
  bool any_upper = false, any_lower = false;
  L worst = 1.0L;
  for (std::size_t i = 0; i < c.components.size(); ++i) {
    const bool upper = sep.upper[i] != 0;
    (upper ? any_upper : any_lower) = true;
    for (const auto& p : c.components[i]) {
      const L v[3] = {static_cast<L>(p.x()) - sep.apex.x(), static_cast<L>(p.y()) - sep.apex.y(),
                      static_cast<L>(p.z()) - sep.apex.z()};
      const L z = v[0] * axis[0] + v[1] * axis[1] + v[2] * axis[2];
      L rho2 = 0.0L;
      for (int k = 0; k < 3; ++k) rho2 += (v[k] - z * axis[k]) * (v[k] - z * axis[k]);
      if (upper ? !(z > 0.0L) : !(z < 0.0L)) return std::nullopt;
      if (!(rho2 < z * z * sh2)) return std::nullopt;
      worst = std::min(worst, std::sin(alpha - std::atan2(std::sqrt(rho2), std::abs(z))));
    }
  }
  if (!any_upper || !any_lower) return std::nullopt;
  return static_cast<double>(worst);
}

CriterionEntry cone_check(const Contour& c, const ConeOptions& options) {
  if (options.budget <= 0) throw std::invalid_argument("cone search budget must be positive");
  CriterionEntry e;
  e.criterion = "cone";
  const std::size_t n = c.components.size();
  if (n < 2) {
    e.verdict = Verdict::kInapplicable;
    e.note = "single component: no decomposition exists";
    return e;
  }
  const TauRoot tau = tau_root();
  const ConeGeometry geom{std::sinh(tau.tau), std::cosh(tau.tau)};

  // Normalise to unit diameter about the point centroid.
  const double d = contour_diameter(c, options.threads);
  Point3 center = Point3::Zero();
  std::size_t total = 0;
  for (const auto& comp : c.components)
    for (const auto& p : comp) {
      center += p;
      ++total;
    }
  center /= static_cast<double>(total);
  const double scale = 1.0 / d;
  Workspace ws;
  ws.centroids.resize(n);
  ws.proxies.resize(n);
  const std::size_t stride = std::max<std::size_t>(1, (total + options.proxy_points - 1) / options.proxy_points);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    Point3 acc = Point3::Zero();
    const auto& comp = c.components[i];
    for (std::size_t j = 0; j < comp.size(); ++j) {
      const Point3 q = (comp[j] - center) * scale;
      acc += q;
      cov += q * q.transpose();
      if (j % stride == 0) ws.proxies[i].push_back(q);
    }
    ws.centroids[i] = acc / static_cast<double>(comp.size());
  }

  // Start axes: icosahedral directions plus principal axes.
  std::vector<Point3> axes;
  const SurfaceMesh ico = make_icosphere(1);
  for (const auto& v : ico.vertices()) axes.emplace_back(v.x(), v.y(), v.z());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> pca(cov);
  for (int i = 2; i >= 0; --i) axes.push_back(pca.eigenvectors().col(i).normalized());

  struct Start {
    double margin = -kInfinity;
    Point3 apex, axis;
    int evaluations = 0;
  };
  std::vector<Start> results(axes.size());
  parallel_for(axes.size(), options.threads, [&](std::size_t s) {
    const Point3 n0 = axes[s];
    int ax = 0;
    n0.cwiseAbs().minCoeff(&ax);
    const Point3 u = (Point3::Unit(ax) - n0[ax] * n0).normalized();
    const Point3 w = n0.cross(u);
    auto decode = [&](const Eigen::VectorXd& x, Point3& apex, Point3& axis) {
      apex = x.head<3>();
      axis = (n0 + x[3] * u + x[4] * w).normalized();
    };
    auto margin_at = [&](const Eigen::VectorXd& x) {
      Point3 apex, axis;
      decode(x, apex, axis);
      std::size_t up = 0;
      std::vector<std::uint8_t> side(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double z = (ws.centroids[i] - apex).dot(axis);
        if (z == 0.0) return -2.0;
        side[i] = z > 0.0;
        up += side[i];
      }
      if (up == 0 || up == n) return -1.5;
      double m = 1.0;
      for (std::size_t i = 0; i < n; ++i)
        for (const auto& p : ws.proxies[i]) m = std::min(m, cone_slack(p, apex, axis, side[i] != 0, geom));
      return m;
    };
    // Apex at the middle of the widest gap between projected centroids.
    std::vector<double> proj(n);
    for (std::size_t i = 0; i < n; ++i) proj[i] = ws.centroids[i].dot(n0);
    std::sort(proj.begin(), proj.end());
    double gap = -1.0, t = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (proj[i + 1] - proj[i] > gap) {
        gap = proj[i + 1] - proj[i];
        t = 0.5 * (proj[i] + proj[i + 1]);
      }
    Eigen::VectorXd x0(5);
    x0 << t * n0.x(), t * n0.y(), t * n0.z(), 0.0, 0.0;
    Eigen::VectorXd steps(5);
    steps << 0.1, 0.1, 0.1, 0.2, 0.2;
    const SimplexResult r =
        nelder_mead([&](const Eigen::VectorXd& x) { return -margin_at(x); }, x0, steps, options.budget);
    Start& out = results[s];
    out.margin = -r.value;
    out.evaluations = r.evaluations;
    decode(r.x, out.apex, out.axis);
  });

  std::size_t best = 0;
  int evaluations = 0;
  for (std::size_t s = 0; s < results.size(); ++s) {
    evaluations += results[s].evaluations;
    if (results[s].margin > results[best].margin) best = s;
  }
  const Start& b = results[best];
  ConeSeparator sep;
  sep.apex = center + b.apex / scale;
  sep.axis = b.axis;
  sep.tau = tau.tau;
  sep.upper.resize(n);
  for (std::size_t i = 0; i < n; ++i) sep.upper[i] = (ws.centroids[i] - b.apex).dot(b.axis) > 0.0;

  e.measured = {{"search_margin", b.margin},
                {"starts", static_cast<double>(results.size())},
                {"evaluations", static_cast<double>(evaluations)},
                {"tau", tau.tau}};
  const auto verified = b.margin > 0.0 ? verify_cone(c, sep) : std::nullopt;
  if (verified && *verified > kCertifyMargin) {
    sep.margin = *verified;
    e.verdict = Verdict::kCertified;
    e.margin = *verified;
    e.normalized_margin = *verified;
    e.cone = sep;
    e.note = "separator re-verified on every contour point";
  } else {
    e.verdict = Verdict::kNoCertificate;
    e.margin = b.margin;
    e.normalized_margin = b.margin;
    e.note = "no separating cone found; this does not prove that none exists (components kept whole)";
  }
  return e;
}

// ---------------------------------------------------------------- analyze

CriterionReport analyze(const Contour& c, const AnalyzeOptions& options) {
  require_valid(c, options.threads);
  CriterionReport rep;
  rep.diameter = contour_diameter(c, options.threads);
  rep.length = contour_length(c);
  rep.components = c.components.size();
  rep.entries.push_back(diameter_length_check(c, BoundMode::kProven, options.threads));
  if (options.conjectural) rep.entries.push_back(diameter_length_check(c, BoundMode::kConjectural, options.threads));
  rep.entries.push_back(white_check(c, options.threads));
  ConeOptions cone = options.cone;
  cone.threads = options.threads;
  rep.entries.push_back(cone_check(c, cone));

  std::size_t applicable = 0;
  for (const auto& e : rep.entries) {
    if (!e.rigorous || e.verdict == Verdict::kInapplicable) continue;
    ++applicable;
    if (e.certified()) rep.fired.push_back(e.criterion);
  }
  rep.disagreement = !rep.fired.empty() && rep.fired.size() < applicable;
  return rep;
}

}  // namespace dbound
