#include "dbound/teardrop.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "dbound/curvature.hpp"
#include "dbound/mesh.hpp"
#include "dbound/numeric.hpp"

namespace dbound {

namespace {

constexpr std::array<double, 8> kGaussNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                               0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                                 0.2223810344533745, 0.1012285362903763};

template <class F>
double gauss(F&& fn, double a, double b) {
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < kGaussNodes.size(); ++i) s += kGaussWeights[i] * fn(mid + half * kGaussNodes[i]);
  return half * s;
}

template <class F>
double composite_gauss(F&& fn, double a, double b, int panels) {
  double s = 0.0;
  for (int i = 0; i < panels; ++i) s += gauss(fn, a + (b - a) * i / panels, a + (b - a) * (i + 1) / panels);
  return s;
}

double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

constexpr double kFlat = 0.05;   // f vanishes on [0, kFlat]
constexpr double kRamp = 0.05;   // width of each plateau ramp
constexpr double kNorm = 0.85;   // integral of the plateau

// Integral of smooth_step over [0, u], u in [0, 1].
double ramp_integral(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 0.5;
  return composite_gauss(smooth_step, 0.0, u, 16);
}

double plateau(double x) {
  if (x < 0.5) return smooth_step((x - kFlat) / kRamp);
  return smooth_step((1.0 - kFlat - x) / kRamp);
}

}  // namespace

// Arclength of the upper graph y = f(x)/k from 0 to x, tabulated.
class detail::GraphArclength {
 public:
  explicit GraphArclength(int k) : k_(k), table_(kPanels + 1, 0.0) {
    for (int i = 0; i < kPanels; ++i)
      table_[i + 1] = table_[i] + gauss([&](double x) { return speed(x); }, node(i), node(i + 1));
  }
  double speed(double x) const {
    const double slope = transition_derivative(std::clamp(x, 0.0, 1.0)) / k_;
    return std::sqrt(1.0 + slope * slope);
  }
  double length() const { return table_.back(); }
  double at(double x) const {
    const int i = std::clamp(static_cast<int>(x * kPanels), 0, kPanels - 1);
    return table_[i] + gauss([&](double t) { return speed(t); }, node(i), x);
  }
  double inverse(double s) const {
    double x = std::clamp(s, 0.0, 1.0);
    for (int it = 0; it < 60; ++it) {
      const double dx = (at(x) - s) / speed(x);
      x = std::clamp(x - dx, 0.0, 1.0);
      if (std::abs(dx) < 1e-16) break;
    }
    return x;
  }

 private:
  static constexpr int kPanels = 2048;
  static double node(int i) { return static_cast<double>(i) / kPanels; }
  int k_;
  std::vector<double> table_;
};

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = bump(t), b = bump(1.0 - t);
  return a / (a + b);
}

double smooth_step_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = bump(t), b = bump(1.0 - t);
  const double da = a / (t * t), db = -b / ((1.0 - t) * (1.0 - t));
  const double s = a + b;
  return (da * s - a * (da + db)) / (s * s);
}

double transition_function(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("transition argument outside [0,1]");
  if (x > 0.5) return 1.0 - transition_function(1.0 - x);
  const double head = kRamp * ramp_integral((x - kFlat) / kRamp);
  const double body = std::max(0.0, x - (kFlat + kRamp));
  return (head + body) / kNorm;
}

double transition_derivative(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("transition argument outside [0,1]");
  return plateau(x) / kNorm;
}

Eigen::Vector2d TeardropCurve::point(double s) const {
  const double r = 1.0 / k;
  if (!graph) throw std::logic_error("teardrop curve was not built");
  s = std::clamp(s, 0.0, total_length);
  if (s <= graph_length) {
    const double x = graph->inverse(s);
    return {x, transition_function(x) * r};
  }
  if (s >= total_length - graph_length) {
    const double x = graph->inverse(total_length - s);
    return {x, -transition_function(x) * r};
  }
  const double theta = 0.5 * kPi - (s - graph_length) / r;
  return {1.0 + r * std::cos(theta), r * std::sin(theta)};
}

Eigen::Vector2d TeardropCurve::tangent(double s) const {
  const double r = 1.0 / k;
  s = std::clamp(s, 0.0, total_length);
  auto graph_tangent = [&](double x, double sign) {
    Eigen::Vector2d t(1.0, sign * transition_derivative(x) * r);
    return t.normalized();
  };
  if (s <= graph_length || s >= total_length - graph_length) {
    const bool upper = s <= graph_length;
    const Eigen::Vector2d p = point(s);
    const Eigen::Vector2d t = graph_tangent(p.x(), upper ? 1.0 : -1.0);
    return upper ? t : Eigen::Vector2d(-t);
  }
  const double theta = 0.5 * kPi - (s - graph_length) / r;
  return {std::sin(theta), -std::cos(theta)};
}

double TeardropCurve::max_radius() const {
  double m = 0.0;
  for (const auto& p : samples) m = std::max(m, std::hypot(p.x, p.y));
  return m;
}

double TeardropCurve::total_abs_curvature() const {
  std::vector<Vec> pts;
  pts.reserve(samples.size());
  for (const auto& p : samples) pts.emplace_back(p.x, p.y, 0.0, 0.0);
  return dbound::total_abs_curvature(pts, false);
}

int default_samples_per_unit(int k) { return std::max(100, static_cast<int>(std::ceil(48.0 * k / kPi))); }

TeardropCurve build_teardrop(int k, int samples_per_unit) {
  if (k < 1) throw std::invalid_argument("teardrop needs k >= 1");
  if (samples_per_unit < 100) throw std::invalid_argument("teardrop needs samples_per_unit >= 100");
  TeardropCurve c;
  c.k = k;
  c.graph = std::make_shared<const detail::GraphArclength>(k);
  const auto& graph = *c.graph;
  c.graph_length = graph.length();
  const double arc = kPi / k;
  c.total_length = 2.0 * c.graph_length + arc;
  const auto segments = static_cast<std::size_t>(std::ceil(c.total_length * samples_per_unit));
  const double ds = c.total_length / static_cast<double>(segments);
  c.half_circle_samples = static_cast<std::size_t>(std::floor(arc / ds));
  if (c.half_circle_samples < static_cast<std::size_t>(kMinHalfCircleSamples))
    throw std::invalid_argument("sampling density leaves only " + std::to_string(c.half_circle_samples) +
                                " samples on the half-circle (need " + std::to_string(kMinHalfCircleSamples) + ")");
  c.samples.resize(segments + 1);
  const double r = 1.0 / k;
  for (std::size_t m = 0; m <= segments; ++m) {
    const double s = m == segments ? c.total_length : static_cast<double>(m) * ds;
    c.samples[m].s = s;
  }
  // Upper graph, then mirror it onto the lower graph so the curve is exactly
  // symmetric under y -> -y with reversed traversal.
  for (std::size_t m = 0; m <= segments; ++m) {
    auto& p = c.samples[m];
    if (p.s <= c.graph_length) {
      const double x = graph.inverse(p.s);
      p.x = x;
      p.y = transition_function(x) * r;
    } else if (p.s < c.graph_length + arc) {
      const double theta = 0.5 * kPi - (p.s - c.graph_length) / r;
      p.x = 1.0 + r * std::cos(theta);
      p.y = r * std::sin(theta);
    }
  }
  for (std::size_t m = 0; m <= segments; ++m) {
    auto& p = c.samples[m];
    if (p.s >= c.graph_length + arc) {
      const auto& q = c.samples[segments - m];
      if (q.s <= c.graph_length) {
        p.x = q.x;
        p.y = -q.y;
      } else {
        const double x = graph.inverse(c.total_length - p.s);
        p.x = x;
        p.y = -transition_function(x) * r;
      }
    }
  }
  return c;
}

void write_teardrop(std::ostream& out, const TeardropCurve& curve) {
  out << "# s x y\n";
  for (const auto& p : curve.samples) out << fmt12(p.s) << ' ' << fmt12(p.x) << ' ' << fmt12(p.y) << '\n';
}

}  // namespace dbound
