#include <gtest/gtest.h>

#include <cmath>

#include "dbound/audit.hpp"
#include "dbound/generators.hpp"
#include "dbound/numeric.hpp"

using namespace dbound;

namespace {

TestFunction constant(const SurfaceMesh& m, double c) { return {"constant", std::vector<double>(m.vertex_count(), c)}; }

}  // namespace

TEST(Constants, ToppingLowerBounds) {
  EXPECT_EQ(ct_constants(3), kPi / 16);
  EXPECT_EQ(ct_constants(4), kPi / 16);
  EXPECT_EQ(ct_constants(5), kPi / 32);
  EXPECT_EQ(ct_constants(12), kPi / 32);
  EXPECT_EQ(ct_constants(3, BoundMode::kConjectural), kPi);
  EXPECT_THROW(ct_constants(2), std::invalid_argument);
}

TEST(Constants, AuditParameters) {
  EXPECT_EQ(kDelta, kPi / 4);
  EXPECT_NEAR(kSigma * kSigma, 4 * kPi, 1e-14);
  std::mt19937_64 a(9), b(9);
  for (int i = 0; i < 100; ++i) {
    const double u = uniform01(a);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_EQ(u, uniform01(b));
  }
}

// ---------------------------------------------------------------- bound

TEST(Bound, IcosphereHoldsWithLargeMargin) {
  const auto b = verify_bound(make_icosphere(3), BoundMode::kProven);
  EXPECT_TRUE(b.closed);
  EXPECT_EQ(b.boundary_length, 0.0);
  EXPECT_NEAR(b.rhs, 2 * b.total_h * 16 / kPi, 1e-9);
  EXPECT_TRUE(b.holds());
  EXPECT_GE(b.ratio, kPi / 16);
}

TEST(Bound, FlatDiskUsesBoundaryTerm) {
  const auto b = verify_bound(make_disk(1.0, 128), BoundMode::kConjectural);
  EXPECT_FALSE(b.closed);
  EXPECT_EQ(b.ct, kPi);
  // (pi/2) 2 pi / pi = pi > 2.
  EXPECT_NEAR(b.rhs, kPi, 0.01);
  EXPECT_TRUE(b.holds());
}

TEST(Bound, FourDimensionalMeshUsesFourDimensionalConstant) {
  const auto b = verify_bound(make_holomorphic_graph(0.5, 48), BoundMode::kProven);
  EXPECT_EQ(b.ct, kPi / 16);
  EXPECT_TRUE(b.holds());
}

// ---------------------------------------------------------------- Michael-Simon

TEST(MichaelSimon, ConstantOnSphereHasRatioHalf) {
  const auto m = make_icosphere(4);
  const auto r = michael_simon_check(m, constant(m, 1.0));
  EXPECT_NEAR(r.lhs, kSigma * std::sqrt(m.area()), 1e-9);
  EXPECT_NEAR(r.lhs, 4 * kPi, 0.01 * 4 * kPi);
  EXPECT_NEAR(r.rhs, 8 * kPi, 0.02 * 8 * kPi);
  EXPECT_LE(r.gradient, 1e-12);
  EXPECT_NEAR(r.ratio, 0.5, 0.01);
  EXPECT_TRUE(r.holds());
}

TEST(MichaelSimon, ScaleInvariantInF) {
  const auto m = make_icosphere(3);
  const auto a = michael_simon_check(m, constant(m, 1.0));
  const auto b = michael_simon_check(m, constant(m, 3.5));
  EXPECT_NEAR(a.ratio, b.ratio, 1e-12);
}

TEST(MichaelSimon, CutoffOnSphereHolds) {
  const auto m = make_icosphere(4);
  const auto f = cutoff_function(m, 0, 1.0, 0.3);
  const auto r = michael_simon_check(m, f);
  EXPECT_GT(r.gradient, 0.0);
  EXPECT_TRUE(r.holds());
  EXPECT_GT(r.margin, 0.0);
}

TEST(MichaelSimon, CappedCylinderConstant) {
  const auto m = make_capped_cylinder(1.0, 20.0, 0.2);
  const auto r = michael_simon_check(m, constant(m, 1.0));
  EXPECT_NEAR(r.lhs, kSigma * std::sqrt(44 * kPi), 0.02 * r.lhs);
  EXPECT_NEAR(r.rhs, 2 * kPi * 24, 0.03 * r.rhs);
  EXPECT_TRUE(r.holds());
}

TEST(MichaelSimon, LibraryHoldsOnClosedShapes) {
  for (const auto& m : {make_icosphere(3), make_torus(2.0, 0.5, 48, 16), make_capped_cylinder(1.0, 4.0, 0.2)}) {
    const auto lib = michael_simon_library(m, 7);
    EXPECT_GE(lib.size(), 8u);
    const auto field = mean_curvature_field(m);
    for (const auto& f : lib) {
      const auto r = michael_simon_check(m, field, f);
      EXPECT_TRUE(r.holds()) << f.description << " ratio " << r.ratio;
    }
  }
}

TEST(MichaelSimon, LibraryIsSeeded) {
  const auto m = make_icosphere(2);
  const auto a = michael_simon_library(m, 3), b = michael_simon_library(m, 3), c = michael_simon_library(m, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].values, b[i].values);
  EXPECT_NE(a.back().values, c.back().values);
}

TEST(MichaelSimon, RejectsBadFunctions) {
  const auto m = make_icosphere(1);
  EXPECT_THROW(michael_simon_check(m, {"short", {1.0, 2.0}}), std::invalid_argument);
  auto f = constant(m, 1.0);
  f.values[3] = -0.1;
  EXPECT_THROW(michael_simon_check(m, f), std::invalid_argument);
  EXPECT_THROW(cutoff_function(m, 0, 1.0, 0.0), std::invalid_argument);
}

TEST(Cutoff, ShapeOfProfile) {
  const auto m = make_icosphere(4);
  const auto f = cutoff_function(m, 0, 0.5, 0.2);
  const auto d = geodesic_distances(m, 0, GeodesicMethod::kFastMarching);
  for (Index v = 0; v < m.vertex_count(); ++v) {
    EXPECT_GE(f.values[v], 0.0);
    EXPECT_LE(f.values[v], 1.0);
    if (d[v] <= 0.5) EXPECT_EQ(f.values[v], 1.0);
    if (d[v] >= 0.7) EXPECT_EQ(f.values[v], 0.0);
  }
}

// ---------------------------------------------------------------- m / kappa

TEST(MKappaTest, IcosphereCapAreas) {
  const auto m = make_icosphere(4);
  const auto r = m_kappa(m, 0, 1.0);
  EXPECT_NEAR(r.kappa, 2 * kPi * (1 - std::cos(1.0)), 0.08 * 2.888);
  EXPECT_TRUE(r.dichotomy());
  EXPECT_FALSE(r.saturated);
  EXPECT_GT(r.m, 0.0);
  EXPECT_LE(r.refinement_change, 0.05);
}

TEST(MKappaTest, FlatDiskCentre) {
  const auto m = make_disk(2.0, 256);
  const auto r = m_kappa(m, 0, 0.5);
  EXPECT_LE(r.m, 1e-9);
  EXPECT_NEAR(r.kappa, kPi, 0.05 * kPi);
  EXPECT_TRUE(r.dichotomy());
}

TEST(MKappaTest, SmallRadiusAreaRatioNearPi) {
  const auto m = make_icosphere(5);
  const auto r = m_kappa(m, 17, 2.0);
  EXPECT_NEAR(r.smallest_ratio, kPi, 0.1 * kPi);
}

TEST(MKappaTest, SaturatesBeyondEccentricity) {
  const auto r = m_kappa(make_icosphere(2), 0, 5.0);
  EXPECT_TRUE(r.saturated);
  EXPECT_TRUE(r.dichotomy());
}

TEST(MKappaTest, RejectsBadGrid) {
  const auto m = make_icosphere(1);
  EXPECT_THROW(m_kappa(m, 0, 0.0), std::invalid_argument);
  EXPECT_THROW(m_kappa(m, 0, 1.0, 49), std::invalid_argument);
}

TEST(Probes, SeededAndInRange) {
  const auto m = make_icosphere(3);
  const auto a = probe_vertices(m, 20, 5), b = probe_vertices(m, 20, 5);
  EXPECT_EQ(a, b);
  for (Index p : a) EXPECT_LT(p, m.vertex_count());
  EXPECT_NE(a, probe_vertices(m, 20, 6));
}

// ---------------------------------------------------------------- identity

TEST(Identity, VanishesAtQuarterPi) {
  const auto r = comparison_identity_check();
  EXPECT_LE(std::abs(r.coefficient), 1e-12);
  EXPECT_LE(r.max_grid_residual, 1e-12);
  EXPECT_EQ(r.grid_points, 1000u);
}

TEST(Identity, PerturbedDeltaDoesNot) {
  const auto r = comparison_identity_check(kPi / 3);
  const double expected = 4 * kPi / 3 - 2 * kPi / std::sqrt(3.0);
  EXPECT_NEAR(r.coefficient, expected, 1e-12);
  EXPECT_NEAR(r.coefficient, 0.5612, 1e-4);
  EXPECT_GT(r.max_grid_residual, 1.0);
}

// ---------------------------------------------------------------- covering

TEST(Covering, IcosphereIntrinsicDiameter) {
  const auto rec = covering_bound_check(make_icosphere(3));
  EXPECT_TRUE(rec.exact);
  EXPECT_GE(rec.d_int, kPi);
  EXPECT_LE(rec.d_int, 1.07 * kPi);
  EXPECT_NEAR(rec.bound, 16 / kPi * rec.total_h, 1e-9);
  EXPECT_TRUE(rec.holds());
  EXPECT_GE(rec.ratio, kPi / 16);
}

TEST(Covering, CappedCylinderSampled) {
  const auto m = make_capped_cylinder(1.0, 20.0, 0.2);
  const auto rec = covering_bound_check(m, 2, 1000, 16);
  EXPECT_FALSE(rec.exact);
  EXPECT_EQ(rec.sources, 17u);
  EXPECT_NEAR(rec.d_int, 20 + kPi, 0.08 * (20 + kPi));
  EXPECT_TRUE(rec.holds());
}

TEST(Covering, RejectsOpenMesh) {
  EXPECT_THROW(covering_bound_check(make_disk(1.0, 32)), std::invalid_argument);
}

// ---------------------------------------------------------------- suite

TEST(Suite, SmallAuditPasses) {
  AuditOptions o;
  o.shapes = {"icosphere"};
  o.probes = 5;
  const auto rep = run_audit(o);
  ASSERT_EQ(rep.shapes.size(), 1u);
  EXPECT_EQ(rep.shapes[0].balls.size(), 5u);
  EXPECT_TRUE(rep.passed());
  const auto t = audit_table(rep);
  EXPECT_FALSE(t.rows().empty());
}

TEST(Suite, FailingRecordFailsReport) {
  AuditReport rep;
  rep.identity = comparison_identity_check();
  rep.perturbed = comparison_identity_check(kPi / 3);
  ShapeAudit s;
  s.covering.margin = 1.0;
  s.bound.ratio = 1.0;
  MKappa weak;
  weak.m = 0.1;
  weak.kappa = 0.2;
  s.balls.push_back(weak);
  rep.shapes.push_back(s);
  EXPECT_FALSE(rep.passed());
  rep.shapes[0].balls[0].kappa = 3.0;
  EXPECT_TRUE(rep.passed());
  rep.perturbed.coefficient = 0.0;
  EXPECT_FALSE(rep.passed());
}

TEST(Suite, RejectsOpenShape) {
  AuditOptions o;
  o.shapes = {"disk"};
  EXPECT_THROW(run_audit(o), std::invalid_argument);
}
