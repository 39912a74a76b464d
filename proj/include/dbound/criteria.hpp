#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dbound/contour.hpp"

namespace dbound {

struct TauRoot {
  double tau = 0.0;
  double sinh2 = 0.0;     // sinh^2(tau)
  double residual = 0.0;  // cosh tau - tau sinh tau
  int iterations = 0;
};

/// Positive root of cosh t = t sinh t by Newton from t = 1.2. Throws
/// std::runtime_error if 50 iterations do not reach |residual| <= 1e-12.
TauRoot tau_root();
/// Bisection on [lo, hi] down to the given bracket width.
double tau_bisection(double lo = 1.0, double hi = 1.5, double tolerance = 1e-10);

enum class Verdict { kCertified, kNotTriggered, kNoCertificate, kInapplicable };
const char* to_string(Verdict v);

/// Margins normalised by the contour diameter must exceed this to certify.
inline constexpr double kCertifyMargin = 1e-9;

enum class BoundMode { kProven, kConjectural };

struct ConeSeparator {
  Point3 apex;
  Point3 axis;  // unit
  double tau = 0.0;
  std::vector<std::uint8_t> upper;  // per component: 1 = z > 0 nappe, 0 = z < 0
  double margin = 0.0;              // min over points of sin(alpha - angle to nappe axis)
};

struct CriterionEntry {
  std::string criterion;
  Verdict verdict = Verdict::kNotTriggered;
  bool rigorous = true;
  double margin = 0.0;             // natural units of the criterion
  double normalized_margin = 0.0;  // scale-free
  std::vector<std::pair<std::string, double>> measured;
  std::vector<std::uint8_t> partition;  // White certificate sides
  std::optional<ConeSeparator> cone;
  std::string note;

  bool certified() const { return verdict == Verdict::kCertified; }
  double value(const std::string& key) const;
};

/// d > 8 l (proven) or d > l / 2 (conjectural, not rigorous).
CriterionEntry diameter_length_check(const Contour& c, BoundMode mode, int threads = 1);

struct WhiteOptimum {
  double distance = 0.0;              // max over bipartitions of dist(G1, G2)
  std::vector<std::uint8_t> side;     // one optimal bipartition
  std::pair<std::size_t, std::size_t> bottleneck{0, 0};
};

/// Longest edge of the minimum spanning tree of the component-distance graph.
WhiteOptimum white_optimum(const Contour& c, int threads = 1);
/// Exhaustive max over the 2^(N-1) - 1 bipartitions; 2 <= N <= 12.
double white_bruteforce_oracle(const Contour& c);
/// dist(G1, G2) > l / pi for the optimal decomposition.
CriterionEntry white_check(const Contour& c, int threads = 1);

/// Min over every contour point of the normalised cone slack, with the
/// literal inequalities checked independently. Returns nullopt when some
/// point violates them.
std::optional<double> verify_cone(const Contour& c, const ConeSeparator& sep);

struct ConeOptions {
  int budget = 400;          // evaluations per start
  std::size_t proxy_points = 20000;
  int threads = 1;
};

/// Multistart Nelder-Mead over apex and axis. A found separator is a
/// certificate; failure to find one proves nothing.
CriterionEntry cone_check(const Contour& c, const ConeOptions& options = {});

struct AnalyzeOptions {
  ConeOptions cone;
  bool conjectural = true;
  int threads = 1;
};

struct CriterionReport {
  double diameter = 0.0;
  double length = 0.0;
  std::size_t components = 0;
  std::vector<CriterionEntry> entries;
  std::vector<std::string> fired;  // rigorous criteria that certified
  bool disagreement = false;       // some rigorous criteria fire, others do not

  bool nonexistence_certified() const { return !fired.empty(); }
};

CriterionReport analyze(const Contour& c, const AnalyzeOptions& options = {});

}  // namespace dbound
