#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dbound/contour.hpp"
#include "dbound/generators.hpp"
#include "dbound/numeric.hpp"

using namespace dbound;

namespace {

Contour transformed(const Contour& c, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  const Eigen::Matrix3d R = Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng)).normalized().toRotationMatrix();
  const Point3 shift(1.5, -2.0, 0.25);
  Contour out = c;
  for (auto& poly : out.components)
    for (auto& p : poly) p = scale * (R * p) + shift;
  return out;
}

double brute_polyline_distance(const Polyline& a, const Polyline& b) {
  double best = kInfinity;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      best = std::min(best, segment_distance(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()]));
  return best;
}

}  // namespace

TEST(SegmentDistance, SkewLines) {
  EXPECT_NEAR(segment_distance({-1, 0, 0}, {1, 0, 0}, {0, -1, 2}, {0, 1, 2}), 2.0, 1e-15);
}

TEST(SegmentDistance, ParallelAndEndpoint) {
  EXPECT_NEAR(segment_distance({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}), 1.0, 1e-15);
  EXPECT_NEAR(segment_distance({0, 0, 0}, {1, 0, 0}, {3, 0, 0}, {4, 0, 0}), 2.0, 1e-15);
  EXPECT_NEAR(segment_distance({0, 0, 0}, {1, 0, 0}, {2, 1, 0}, {3, 1, 0}), std::sqrt(2.0), 1e-15);
}

TEST(SegmentDistance, IntersectingAndDegenerate) {
  EXPECT_EQ(segment_distance({-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}), 0.0);
  EXPECT_NEAR(segment_distance({0, 0, 0}, {0, 0, 0}, {1, -1, 0}, {1, 1, 0}), 1.0, 1e-15);
  EXPECT_NEAR(segment_distance({0, 0, 0}, {0, 0, 0}, {0, 3, 4}, {0, 3, 4}), 5.0, 1e-15);
}

TEST(SegmentDistance, SymmetricAndBelowEndpointDistances) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 500; ++trial) {
    const Point3 a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng)), c(u(rng), u(rng), u(rng)),
        d(u(rng), u(rng), u(rng));
    const double s = segment_distance(a, b, c, d);
    EXPECT_NEAR(s, segment_distance(c, d, a, b), 1e-12);
    EXPECT_NEAR(s, segment_distance(b, a, d, c), 1e-12);
    // Dense sampling can only find larger values.
    double sampled = kInfinity;
    for (int i = 0; i <= 40; ++i)
      for (int j = 0; j <= 40; ++j)
        sampled = std::min(sampled, ((a + (b - a) * (i / 40.0)) - (c + (d - c) * (j / 40.0))).norm());
    EXPECT_LE(s, sampled + 1e-12);
    EXPECT_GE(s, sampled - 0.1);
  }
}

TEST(Lengths, CircleAndStadium) {
  const auto circle = make_circle({0, 0, 0}, {0, 0, 1}, 2.0, 720);
  EXPECT_NEAR(polyline_length(circle), 720 * 4.0 * std::sin(kPi / 720), 1e-12);
  const auto stadium = make_stadium(3.0, 1.0, 256);
  EXPECT_NEAR(contour_length(stadium), 6.0 + 2 * kPi, 1e-3);
  EXPECT_NEAR(contour_diameter(stadium), 5.0, 1e-9);
}

TEST(Lengths, SumOverComponents) {
  const auto c = make_coaxial_circles(1.0, 0.5, 100);
  EXPECT_NEAR(contour_length(c), 2 * polyline_length(c.components[0]), 1e-12);
  EXPECT_EQ(c.point_count(), 200u);
  EXPECT_EQ(c.all_points().size(), 200u);
}

TEST(Diameter, AntipodalCirclesSpanTheSphere) {
  const auto c = antipodal_circles(0.01, 256);
  EXPECT_NEAR(contour_diameter(c), 2.0, 1e-12);
  for (const auto& poly : c.components)
    for (const auto& p : poly) EXPECT_NEAR(p.norm(), 1.0, 1e-12);
}

TEST(Diameter, CoaxialCircles) {
  const auto c = make_coaxial_circles(1.0, 2.0, 64);
  EXPECT_NEAR(contour_diameter(c), std::sqrt(4.0 + 16.0), 1e-12);
}

TEST(Diameter, ThreadsAgree) {
  const auto c = net_circles(0.2, 16);
  EXPECT_EQ(contour_diameter(c, 1), contour_diameter(c, 4));
}

TEST(DistanceMatrix, CoaxialGap) {
  const auto m = component_distance_matrix(make_coaxial_circles(1.0, 0.75, 64));
  ASSERT_EQ(m.rows(), 2);
  EXPECT_EQ(m(0, 0), 0.0);
  EXPECT_NEAR(m(0, 1), 1.5, 1e-12);
  EXPECT_EQ(m(0, 1), m(1, 0));
}

TEST(DistanceMatrix, MatchesBruteForceAndIsSymmetric) {
  const auto c = net_circles(0.3, 16);
  const auto m = component_distance_matrix(c, 2);
  const auto n = static_cast<Eigen::Index>(c.components.size());
  ASSERT_EQ(m.rows(), n);
  for (Eigen::Index i = 0; i < n; i += 7)
    for (Eigen::Index j = 0; j < n; j += 5) {
      EXPECT_EQ(m(i, j), m(j, i));
      if (i != j) EXPECT_NEAR(m(i, j), brute_polyline_distance(c.components[i], c.components[j]), 1e-12);
    }
}

TEST(DistanceMatrix, NeedsTwoComponents) {
  Contour c;
  c.components.push_back(make_circle({0, 0, 0}, {0, 0, 1}, 1.0, 8));
  EXPECT_THROW(component_distance_matrix(c), ContourError);
}

TEST(BoundingSphereTest, ContainsPolyline) {
  const auto poly = make_circle({1, 2, 3}, {1, 1, 0}, 0.5, 33);
  const auto s = bounding_sphere(poly);
  for (const auto& p : poly) EXPECT_LE((p - s.center).norm(), s.radius + 1e-15);
  EXPECT_NEAR((s.center - Point3(1, 2, 3)).norm(), 0.0, 1e-12);
}

TEST(Validation, AcceptsGeneratedContours) {
  for (const auto& c : {make_stadium(2.0, 1.0), make_coaxial_circles(1.0, 0.1, 64), antipodal_circles(0.01, 64),
                        net_circles(0.3, 16)}) {
    const auto v = validate(c);
    EXPECT_TRUE(v.valid);
    EXPECT_TRUE(v.issues.empty());
    EXPECT_NO_THROW(require_valid(c));
  }
  EXPECT_EQ(validate(make_stadium(2.0, 1.0)).min_component_distance, kInfinity);
  EXPECT_NEAR(validate(make_coaxial_circles(1.0, 0.1, 64)).min_component_distance, 0.2, 1e-12);
}

TEST(Validation, MinDistanceMatchesMatrixMinimum) {
  const auto c = net_circles(0.3, 16);
  const auto m = component_distance_matrix(c);
  double best = kInfinity;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) best = std::min(best, m(i, j));
  EXPECT_EQ(validate(c, 3).min_component_distance, best);
}

TEST(Validation, RejectsBrokenContours) {
  Contour empty;
  EXPECT_FALSE(validate(empty).valid);
  EXPECT_THROW(require_valid(empty), ContourError);

  Contour two_points;
  two_points.components.push_back({{0, 0, 0}, {1, 0, 0}});
  EXPECT_FALSE(validate(two_points).valid);

  Contour repeated;
  repeated.components.push_back({{0, 0, 0}, {1, 0, 0}, {1, 0, 0}, {0, 1, 0}});
  EXPECT_FALSE(validate(repeated).valid);

  Contour nonfinite;
  nonfinite.components.push_back({{0, 0, 0}, {1, 0, 0}, {0, std::nan(""), 0}});
  EXPECT_FALSE(validate(nonfinite).valid);

  Contour touching;
  touching.components.push_back(make_circle({0, 0, 0}, {0, 0, 1}, 1.0, 16));
  touching.components.push_back(make_circle({2, 0, 0}, {0, 0, 1}, 1.0, 16));
  const auto v = validate(touching);
  EXPECT_FALSE(v.valid);
  EXPECT_LE(v.min_component_distance, kContourDisjointTolerance);
}

TEST(ContourIo, RoundTrip) {
  const auto c = net_circles(0.3, 16);
  std::stringstream ss;
  write_contour(ss, c);
  const auto back = read_contour(ss);
  ASSERT_EQ(back.components.size(), c.components.size());
  for (std::size_t i = 0; i < c.components.size(); ++i)
    for (std::size_t j = 0; j < c.components[i].size(); ++j)
      EXPECT_LE((back.components[i][j] - c.components[i][j]).norm(), 1e-11);
  // Written values are already rounded, so a second pass is exact.
  std::stringstream again;
  write_contour(again, back);
  EXPECT_EQ(again.str(), [&] { std::stringstream s2; write_contour(s2, c); return s2.str(); }());
}

TEST(ContourIo, RejectsMalformed) {
  for (const char* doc : {"{", R"({"dimension": 4, "components": []})",
                          R"({"dimension": 3, "components": [{"vertices": [[0,0]]}]})",
                          R"({"dimension": 3})"}) {
    std::stringstream ss(doc);
    EXPECT_THROW(read_contour(ss), ContourError) << doc;
  }
  EXPECT_THROW(read_contour_file("/nonexistent/x.contour.json"), ContourError);
}

TEST(Invariance, RigidMotionAndScaling) {
  const auto c = net_circles(0.3, 16);
  const auto moved = transformed(c, 11, 1.0);
  const auto scaled = transformed(c, 12, 2.5);
  const double l = contour_length(c), d = contour_diameter(c);
  EXPECT_NEAR(contour_length(moved), l, 1e-10 * l);
  EXPECT_NEAR(contour_diameter(moved), d, 1e-10 * d);
  EXPECT_NEAR(contour_length(scaled), 2.5 * l, 1e-10 * l);
  EXPECT_NEAR(contour_diameter(scaled), 2.5 * d, 1e-10 * d);
  EXPECT_NEAR(validate(scaled).min_component_distance, 2.5 * validate(c).min_component_distance, 1e-9);
}
