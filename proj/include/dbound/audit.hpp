#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dbound/criteria.hpp"
#include "dbound/curvature.hpp"
#include "dbound/mesh.hpp"
#include "dbound/report.hpp"

namespace dbound {

inline const double kDelta = kPi / 4.0;
inline const double kSigma = 2.0 * std::sqrt(kPi);
inline constexpr double kMichaelSimonSlack = 0.05;

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Lower bound on the Topping constant in R^n (n >= 3), or pi in conjectural mode.
double ct_constants(int n, BoundMode mode = BoundMode::kProven);

// ---------------------------------------------------------------- bound

struct BoundCheck {
  double diameter = 0.0;
  double total_h = 0.0;
  double boundary_length = 0.0;
  double ct = 0.0;
  double rhs = 0.0;     // (2 int|H| + (pi/2) l) / C_T
  double margin = 0.0;  // rhs - d
  bool closed = false;
  double ratio = 0.0;   // int|H| / d, meaningful for closed meshes
  bool holds() const { return margin > 0.0; }
};

BoundCheck verify_bound(const SurfaceMesh& mesh, BoundMode mode, int threads = 1);

// ---------------------------------------------------------------- Michael-Simon

struct TestFunction {
  std::string description;
  std::vector<double> values;  // per vertex, nonnegative
};

struct MichaelSimonRecord {
  std::string function;
  double lhs = 0.0;       // sigma |f|_2
  double gradient = 0.0;  // |grad f|_1
  double curvature = 0.0; // |H f|_1
  double rhs = 0.0;       // gradient + 2 curvature
  double ratio = 0.0;     // lhs / rhs
  double margin = 0.0;    // rhs (1 + slack) - lhs
  bool holds() const { return margin >= 0.0; }
};

/// Vertex-lumped L2 norm, per-triangle linear gradients. Throws
/// std::invalid_argument for negative or mis-sized f.
MichaelSimonRecord michael_simon_check(const SurfaceMesh& mesh, const MeanCurvatureField& field,
                                       const TestFunction& f);
MichaelSimonRecord michael_simon_check(const SurfaceMesh& mesh, const TestFunction& f);

/// 1 on B(p, r), 0 outside B(p, r + mu), linear in the distance between.
TestFunction cutoff_function(const SurfaceMesh& mesh, Index p, double r, double mu);
/// Constants, cutoffs about seeded centres and seeded sums of Gaussian bumps.
std::vector<TestFunction> michael_simon_library(const SurfaceMesh& mesh, std::uint64_t seed);

// ---------------------------------------------------------------- m / kappa

struct MKappa {
  double m = 0.0;
  double kappa = 0.0;
  double argmax_m = 0.0;    // radius attaining m
  double argmin_kappa = 0.0;
  double smallest_ratio = 0.0;  // V(r_1) / r_1^2 at the first grid radius
  double refinement_change = 0.0;  // |max(m, kappa)| change when the grid is doubled
  bool saturated = false;  // R beyond the centre's eccentricity
  bool dichotomy() const { return std::max(m, kappa) > kDelta; }
};

/// sup / inf over r in {R j / n : j = 1..n}. Throws std::invalid_argument for
/// R <= 0 or n < 50.
MKappa m_kappa(const IntrinsicBalls& balls, std::span<const double> density, double R, int r_samples = 50);
MKappa m_kappa(const SurfaceMesh& mesh, Index p, double R, int r_samples = 50);

/// Seeded uniform vertex sample (with replacement).
std::vector<Index> probe_vertices(const SurfaceMesh& mesh, std::size_t count, std::uint64_t seed);

// ---------------------------------------------------------------- comparison identity

struct IdentityRecord {
  double delta = 0.0;
  double coefficient = 0.0;        // 4 delta - sigma sqrt(delta)
  double max_grid_residual = 0.0;  // over v = delta r^2, r in (0, 10]
  std::size_t grid_points = 0;
};

IdentityRecord comparison_identity_check(double delta = kDelta, std::size_t grid_points = 1000);

// ---------------------------------------------------------------- covering bound

struct CoveringRecord {
  double d_int = 0.0;
  double total_h = 0.0;
  double bound = 0.0;   // (4 / delta) int|H|
  double margin = 0.0;  // bound - d_int
  double ratio = 0.0;   // int|H| / d_int
  bool exact = false;   // all vertices used as sources
  std::size_t sources = 0;
  bool holds() const { return margin >= 0.0; }
};

/// Max edge-graph eccentricity; exact when V <= exact_limit, otherwise over
/// `samples` evenly spaced sources plus a double sweep.
CoveringRecord covering_bound_check(const SurfaceMesh& mesh, int threads = 1, std::size_t exact_limit = 5000,
                                    std::size_t samples = 64);

// ---------------------------------------------------------------- suite

struct AuditOptions {
  std::vector<std::string> shapes{"icosphere", "capped_cylinder", "torus"};
  std::size_t probes = 20;
  double probe_radius = 1.0;
  int r_samples = 50;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct ShapeAudit {
  std::string shape;
  std::vector<MichaelSimonRecord> michael_simon;
  std::vector<Index> probes;
  std::vector<MKappa> balls;
  CoveringRecord covering;
  BoundCheck bound;
};

struct AuditReport {
  std::vector<ShapeAudit> shapes;
  IdentityRecord identity;
  IdentityRecord perturbed;  // delta = pi / 3, must not vanish
  bool passed() const;
};

AuditReport run_audit(const AuditOptions& options);
Table audit_table(const AuditReport& report);

}  // namespace dbound
