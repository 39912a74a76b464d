#include <gtest/gtest.h>

#include <cmath>

#include "dbound/contour.hpp"
#include "dbound/curvature.hpp"
#include "dbound/generators.hpp"
#include "dbound/numeric.hpp"

using namespace dbound;

namespace {

double log_slope(double x0, double y0, double x1, double y1) { return std::log(y1 / y0) / std::log(x1 / x0); }

}  // namespace

// ---------------------------------------------------------------- meshes

TEST(Library, EveryShapeIsValid) {
  for (const auto& name : shape_names()) {
    ShapeParams p;
    if (name == "capped_cylinder") p = {{"length", 4.0}, {"spacing", 0.2}};
    if (name == "net_circles") p = {{"eps", 0.3}};
    const Shape s = shape_library(name, p);
    if (const auto* m = std::get_if<SurfaceMesh>(&s)) {
      EXPECT_TRUE(validate(*m).valid) << name;
    } else {
      EXPECT_TRUE(validate(std::get<Contour>(s)).valid) << name;
    }
  }
}

TEST(Library, UnknownNamesAndParametersThrow) {
  EXPECT_THROW(shape_library("catenoid"), std::invalid_argument);
  EXPECT_THROW(shape_library("disk", {{"radious", 1.0}}), std::invalid_argument);
  EXPECT_THROW(shape_library("disk", {{"radius", -1.0}}), std::invalid_argument);
  EXPECT_THROW(shape_library("icosphere", {{"subdivisions", -1.0}}), std::invalid_argument);
}

TEST(Library, DefaultsMatchDirectCalls) {
  const auto m = std::get<SurfaceMesh>(shape_library("disk"));
  EXPECT_EQ(m.vertex_count(), make_disk(1.0, 128).vertex_count());
  const auto c = std::get<Contour>(shape_library("stadium", {{"a", 4.0}}));
  EXPECT_EQ(contour_length(c), contour_length(make_stadium(4.0, 1.0, 64)));
}

TEST(Shapes, TopologyOfMeshes) {
  EXPECT_EQ(make_disk(1.0, 32).euler_characteristic(), 1);
  EXPECT_EQ(make_icosphere(3).euler_characteristic(), 2);
  EXPECT_EQ(make_torus(2.0, 0.5, 24, 12).euler_characteristic(), 0);
  EXPECT_EQ(make_open_cylinder(1.0, 2.0, 24, 6).boundary_loops().size(), 2u);
  EXPECT_TRUE(make_capped_cylinder(1.0, 4.0, 0.2).closed());
  EXPECT_EQ(make_hemisphere(1.0, 48).boundary_loops().size(), 1u);
  EXPECT_EQ(make_disk4(1.0, 32).dimension(), 4);
  EXPECT_EQ(make_holomorphic_graph(0.5, 32).dimension(), 4);
}

TEST(Shapes, IcosphereVerticesOnSphere) {
  const auto m = make_icosphere(3, 2.5);
  EXPECT_EQ(m.vertex_count(), 642u);
  for (const auto& v : m.vertices()) EXPECT_NEAR(v.norm(), 2.5, 1e-12);
}

TEST(Shapes, IcosphereCurvatureOverDiameter) {
  const auto m = make_icosphere(4);
  EXPECT_NEAR(total_mean_curvature(m) / extrinsic_diameter(m.vertices()), 2 * kPi, 0.02 * 2 * kPi);
}

TEST(Shapes, CappedCylinderCurvatureOverDiameter) {
  const auto m = make_capped_cylinder(1.0, 20.0, 0.1);
  const double target = kPi * 24.0 / 22.0;
  EXPECT_NEAR(extrinsic_diameter(m.vertices()), 22.0, 1e-9);
  EXPECT_NEAR(total_mean_curvature(m) / 22.0, target, 0.03 * target);
}

TEST(Shapes, HemisphereGeometry) {
  const auto m = make_hemisphere(1.0, 96);
  EXPECT_NEAR(m.area(), 2 * kPi, 0.01 * 2 * kPi);
  EXPECT_NEAR(boundary_length(m), 2 * kPi, 0.001 * 2 * kPi);
  for (const auto& v : m.vertices()) EXPECT_GE(v.z(), -1e-15);
}

// ---------------------------------------------------------------- contours

TEST(Stadium, LengthOverDiameterDecreasesTowardTwo) {
  const auto c = make_stadium(10.0, 1.0, 256);
  const double ratio = contour_length(c) / contour_diameter(c);
  EXPECT_NEAR(ratio, (20.0 + 2 * kPi) / 12.0, 1e-4);
  EXPECT_NEAR(ratio, 2.19, 0.01);
  double prev = kInfinity;
  for (double a : {1.0, 10.0, 100.0, 1000.0}) {
    const auto s = make_stadium(a, 1.0, 256);
    const double r = contour_length(s) / contour_diameter(s);
    EXPECT_LT(r, prev) << a;
    EXPECT_GE(r, 2.0) << a;
    prev = r;
  }
  EXPECT_LT(prev, 2.01);
}

TEST(CoaxialCircles, Placement) {
  const auto c = make_coaxial_circles(1.5, 0.3, 40);
  ASSERT_EQ(c.components.size(), 2u);
  for (const auto& p : c.components[0]) {
    EXPECT_NEAR(p.z(), 0.3, 1e-15);
    EXPECT_NEAR(p.head<2>().norm(), 1.5, 1e-12);
  }
  for (const auto& p : c.components[1]) EXPECT_NEAR(p.z(), -0.3, 1e-15);
}

TEST(SphereCircles, PolesCapGeometry) {
  const std::vector<Point3> poles{{0, 0, 1}, {0, 0, -1}};
  const auto c = sphere_circles(poles, 0.1, 64);
  ASSERT_EQ(c.components.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i)
    for (const auto& p : c.components[i]) {
      EXPECT_NEAR(p.head<2>().norm(), std::sin(0.1), 1e-12);
      EXPECT_NEAR(p.dot(poles[i]), std::cos(0.1), 1e-12);
    }
  EXPECT_NEAR(contour_length(c), 2 * 2 * kPi * std::sin(0.1), 0.001 * contour_length(c));
}

TEST(SphereCircles, ShrinkingRadiusKeepsDiameterDropsLength) {
  const std::vector<Point3> poles{{0, 0, 1}, {0, 0, -1}};
  double prev_l = kInfinity;
  for (double eps : {0.1, 0.01, 0.001}) {
    const auto c = sphere_circles(poles, eps, 64);
    EXPECT_NEAR(contour_diameter(c), 2.0, 1e-12);
    const double l = contour_length(c);
    EXPECT_LT(l, prev_l);
    prev_l = l;
  }
  EXPECT_LT(prev_l, 0.013);
}

TEST(SphereCircles, RejectsOverlapAndCoarseSampling) {
  SphericalPointSet pts;
  pts.points = {{0, 0, 1}, {std::sin(0.2), 0, std::cos(0.2)}};
  EXPECT_NEAR(packing_radius(pts.points), 0.1, 1e-12);
  EXPECT_THROW(sphere_circles(pts, 0.15, 32), std::invalid_argument);
  EXPECT_THROW(sphere_circles(pts, 0.05, 8), std::invalid_argument);
  EXPECT_THROW(sphere_circles(pts, 0.0, 32), std::invalid_argument);
  EXPECT_NO_THROW(sphere_circles(pts, 0.05, 16));
}

// ---------------------------------------------------------------- nets

TEST(Packing, ExactHalfMinDistance) {
  const std::vector<Point3> pts{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  EXPECT_NEAR(packing_radius(pts), kPi / 4, 1e-15);
  EXPECT_NEAR(chord_to_arc(2.0), kPi, 1e-15);
  EXPECT_NEAR(chord_to_arc(std::sqrt(2.0)), kPi / 2, 1e-15);
}

TEST(Fibonacci, UnitPointsAndDeterminism) {
  const auto a = fibonacci_points(500), b = fibonacci_points(500);
  ASSERT_EQ(a.size(), 500u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a[i].norm(), 1.0, 1e-12);
    EXPECT_EQ(a[i], b[i]);
  }
}

TEST(Covering, OnePointIsPi) {
  const auto e = covering_radius_estimate({{0, 0, 1}}, 20000);
  EXPECT_LE(e.radius, kPi);
  EXPECT_GE(e.radius, kPi - e.sample_spacing);
}

TEST(Covering, AntipodalPairIsHalfPi) {
  const auto e = covering_radius_estimate({{0, 0, 1}, {0, 0, -1}}, 20000);
  EXPECT_NEAR(e.radius, kPi / 2, e.sample_spacing);
  EXPECT_LE(e.radius, kPi / 2 + 1e-12);
}

TEST(Covering, OctahedronFaceCentres) {
  const std::vector<Point3> oct{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  const auto e = covering_radius_estimate(oct, 40000, kInfinity, 2);
  const double truth = std::acos(1 / std::sqrt(3.0));
  EXPECT_NEAR(truth, 0.9553, 1e-4);
  EXPECT_LE(e.radius, truth + 1e-12);
  EXPECT_GE(e.radius, truth - e.sample_spacing);
  EXPECT_NEAR(e.sample_spacing, std::sqrt(4 * kPi / 40000), 1e-15);
}

TEST(Covering, EarlyStopAndErrors) {
  const auto e = covering_radius_estimate({{0, 0, 1}}, 20000, 1.0);
  EXPECT_TRUE(e.stopped_early);
  EXPECT_GT(e.radius, 1.0);
  EXPECT_THROW(covering_radius_estimate({}, 20000), std::invalid_argument);
  EXPECT_THROW(covering_radius_estimate({{0, 0, 1}}, 9999), std::invalid_argument);
}

TEST(Net, CoversAndPacks) {
  const auto net = fibonacci_net(0.2, 2);
  EXPECT_LE(net.covering_radius, 0.2);
  EXPECT_GE(net.packing_radius, 0.05);
  EXPECT_LT(net.packing_radius, net.covering_radius);
  EXPECT_EQ(net.packing_radius, packing_radius(net.points));
  for (const auto& p : net.points) EXPECT_NEAR(p.norm(), 1.0, 1e-12);
  EXPECT_THROW(fibonacci_net(0.0), std::invalid_argument);
  EXPECT_THROW(fibonacci_net(0.6), std::invalid_argument);
}

TEST(Net, CardinalityAndLengthScaling) {
  std::vector<double> eps{0.2, 0.1, 0.05}, card, length;
  for (double e : eps) {
    const auto net = fibonacci_net(e, 2);
    card.push_back(static_cast<double>(net.points.size()));
    length.push_back(contour_length(sphere_circles(net, std::pow(e, 2.5), 16)));
  }
  const double ratio = card[2] / card[1];
  EXPECT_GE(ratio, 3.0);
  EXPECT_LE(ratio, 5.0);
  EXPECT_NEAR(log_slope(eps[0], length[0], eps[2], length[2]), 0.5, 0.15);
  EXPECT_NEAR(log_slope(eps[0], card[0], eps[2], card[2]), -2.0, 0.3);
}

TEST(Net, AntipodalCircles) {
  const auto c = antipodal_circles(0.01, 64);
  ASSERT_EQ(c.components.size(), 2u);
  // Two inscribed 64-gons of circumradius sin(0.01).
  EXPECT_NEAR(contour_length(c), 2 * 64 * 2 * std::sin(0.01) * std::sin(kPi / 64), 1e-14);
}
