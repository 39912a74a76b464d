#include "dbound/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "dbound/mesh.hpp"

namespace dbound {

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::clamp<std::size_t>(threads > 0 ? threads : 1, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t begin = count * w / workers, end = count * (w + 1) / workers;
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DBOUND_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

// ---------------------------------------------------------------- diameter

namespace {

inline double squared_distance(const Vec& p, const Vec& q) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double d = p[i] - q[i];
    s += d * d;
  }
  return s;
}

double brute_force_diameter2(std::span<const Vec> pts, int threads) {
  const std::size_t n = pts.size();
  std::vector<double> best(std::max(threads, 1), 0.0);
  const std::size_t workers = best.size();
  parallel_for(workers, threads, [&](std::size_t w) {
    double local = 0.0;
    // Interleaved rows balance the triangular loop.
    for (std::size_t i = w; i < n; i += workers)
      for (std::size_t j = i + 1; j < n; ++j) local = std::max(local, squared_distance(pts[i], pts[j]));
    best[w] = local;
  });
  return *std::max_element(best.begin(), best.end());
}

struct BoxNode {
  Vec lo, hi;
  std::size_t begin = 0, end = 0;
  int left = -1, right = -1;
};

class BoxTree {
 public:
  explicit BoxTree(std::span<const Vec> pts) : pts_(pts), order_(pts.size()) {
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    build(0, order_.size());
  }

  const std::vector<BoxNode>& nodes() const { return nodes_; }
  const Vec& point(std::size_t k) const { return pts_[order_[k]]; }

 private:
  static constexpr std::size_t kLeaf = 24;

  int build(std::size_t begin, std::size_t end) {
    BoxNode node;
    node.begin = begin;
    node.end = end;
    node.lo = Vec::Constant(std::numeric_limits<double>::infinity());
    node.hi = -node.lo;
    for (std::size_t k = begin; k < end; ++k) {
      node.lo = node.lo.cwiseMin(pts_[order_[k]]);
      node.hi = node.hi.cwiseMax(pts_[order_[k]]);
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (end - begin > kLeaf) {
      int axis = 0;
      (node.hi - node.lo).maxCoeff(&axis);
      const std::size_t mid = begin + (end - begin) / 2;
      std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                       [&](std::size_t a, std::size_t b) {
                         if (pts_[a][axis] != pts_[b][axis]) return pts_[a][axis] < pts_[b][axis];
                         return a < b;
                       });
      const int l = build(begin, mid);
      const int r = build(mid, end);
      nodes_[id].left = l;
      nodes_[id].right = r;
    }
    return id;
  }

  std::span<const Vec> pts_;
  std::vector<std::size_t> order_;
  std::vector<BoxNode> nodes_;
};

// Per-coordinate max separation of two boxes; with monotone rounding this
// never underestimates a realised pair distance.
double box_upper2(const BoxNode& a, const BoxNode& b) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double d = std::max(a.hi[i] - b.lo[i], b.hi[i] - a.lo[i]);
    s += d * d;
  }
  return s;
}

double branch_and_bound_diameter2(std::span<const Vec> pts) {
  BoxTree tree(pts);
  const auto& nodes = tree.nodes();

  // Seed with a double sweep.
  std::size_t far = 0;
  double best = 0.0;
  for (int sweep = 0; sweep < 2; ++sweep) {
    const Vec anchor = pts[far];
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = squared_distance(anchor, pts[i]);
      if (d > best) {
        best = d;
        far = i;
      }
    }
  }

  using Item = std::tuple<double, int, int>;
  std::priority_queue<Item> queue;
  queue.push({box_upper2(nodes[0], nodes[0]), 0, 0});
  while (!queue.empty()) {
    const auto [ub, ia, ib] = queue.top();
    queue.pop();
    if (ub <= best) break;
    const BoxNode& a = nodes[ia];
    const BoxNode& b = nodes[ib];
    const bool leaf_a = a.left < 0, leaf_b = b.left < 0;
    if (leaf_a && leaf_b) {
      for (std::size_t i = a.begin; i < a.end; ++i) {
        const std::size_t j0 = ia == ib ? i + 1 : b.begin;
        for (std::size_t j = j0; j < b.end; ++j) best = std::max(best, squared_distance(tree.point(i), tree.point(j)));
      }
      continue;
    }
    auto push = [&](int x, int y) {
      const double u = box_upper2(nodes[x], nodes[y]);
      if (u > best) queue.push({u, x, y});
    };
    if (ia == ib) {
      push(a.left, a.left);
      push(a.right, a.right);
      push(a.left, a.right);
    } else if (!leaf_a && (leaf_b || (a.end - a.begin) >= (b.end - b.begin))) {
      push(a.left, ib);
      push(a.right, ib);
    } else {
      push(ia, b.left);
      push(ia, b.right);
    }
  }
  return best;
}

}  // namespace

double extrinsic_diameter(std::span<const Vec> points, DiameterMethod method, int threads) {
  if (points.size() < 2) throw std::invalid_argument("diameter needs at least two points");
  const double d2 = method == DiameterMethod::kBruteForce ? brute_force_diameter2(points, threads)
                                                          : branch_and_bound_diameter2(points);
  return std::sqrt(d2);
}

// ---------------------------------------------------------------- PointGrid

PointGrid::PointGrid(std::span<const Eigen::Vector3d> points, double cell_size)
    : points_(points.begin(), points.end()), cell_(cell_size) {
  if (!(cell_size > 0.0)) throw std::invalid_argument("grid cell size must be positive");
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(0.0), hi = lo;
  if (!points_.empty()) {
    lo = hi = points_[0];
    for (const auto& p : points_) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
  origin_ = lo;
  auto size_grid = [&] {
    for (int a = 0; a < 3; ++a)
      dims_[a] = std::max<long>(1, static_cast<long>(std::floor((hi[a] - lo[a]) / cell_)) + 1);
  };
  size_grid();
  // Keep the table bounded for tiny cells.
  while (dims_[0] * dims_[1] * dims_[2] > 16L * 1024 * 1024) {
    cell_ *= 2.0;
    size_grid();
  }
  const std::size_t cells = static_cast<std::size_t>(dims_[0] * dims_[1] * dims_[2]);
  offsets_.assign(cells + 1, 0);
  std::vector<std::size_t> ids(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    ids[i] = cell_id(cell_coord(p.x(), 0), cell_coord(p.y(), 1), cell_coord(p.z(), 2));
    ++offsets_[ids[i] + 1];
  }
  for (std::size_t c = 0; c < cells; ++c) offsets_[c + 1] += offsets_[c];
  order_.resize(points_.size());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < points_.size(); ++i) order_[fill[ids[i]]++] = i;
}

long PointGrid::cell_coord(double x, int axis) const {
  const long c = static_cast<long>(std::floor((x - origin_[axis]) / cell_));
  return std::clamp<long>(c, 0, dims_[axis] - 1);
}

std::size_t PointGrid::cell_id(long i, long j, long k) const {
  return static_cast<std::size_t>((k * dims_[1] + j) * dims_[0] + i);
}

PointGrid::Hit PointGrid::nearest(const Eigen::Vector3d& q, std::size_t skip) const {
  Hit best{static_cast<std::size_t>(-1), std::numeric_limits<double>::infinity()};
  if (points_.empty()) return best;
  const long ci = cell_coord(q.x(), 0), cj = cell_coord(q.y(), 1), ck = cell_coord(q.z(), 2);
  // Distance from q to the outside of the (2r+1)^3 block around its cell.
  auto shell_clearance = [&](long r) {
    double m = std::numeric_limits<double>::infinity();
    const long c[3] = {ci, cj, ck};
    for (int a = 0; a < 3; ++a) {
      const double lo = origin_[a] + (c[a] - r) * cell_;
      const double hi = origin_[a] + (c[a] + r + 1) * cell_;
      if (c[a] - r > 0) m = std::min(m, q[a] - lo);
      if (c[a] + r + 1 < dims_[a]) m = std::min(m, hi - q[a]);
    }
    return m;
  };
  const long max_r = std::max({dims_[0], dims_[1], dims_[2]});
  for (long r = 0; r <= max_r; ++r) {
    for (long k = ck - r; k <= ck + r; ++k) {
      if (k < 0 || k >= dims_[2]) continue;
      for (long j = cj - r; j <= cj + r; ++j) {
        if (j < 0 || j >= dims_[1]) continue;
        for (long i = ci - r; i <= ci + r; ++i) {
          if (i < 0 || i >= dims_[0]) continue;
          if (std::max({std::abs(i - ci), std::abs(j - cj), std::abs(k - ck)}) != r) continue;
          const std::size_t c = cell_id(i, j, k);
          for (std::size_t s = offsets_[c]; s < offsets_[c + 1]; ++s) {
            const std::size_t idx = order_[s];
            if (idx == skip) continue;
            const double d = (points_[idx] - q).norm();
            if (d < best.distance || (d == best.distance && idx < best.index)) best = {idx, d};
          }
        }
      }
    }
    if (best.distance < shell_clearance(r)) break;
  }
  return best;
}

void PointGrid::for_each_within(const Eigen::Vector3d& q, double radius,
                                const std::function<void(std::size_t)>& fn) const {
  const long i0 = cell_coord(q.x() - radius, 0), i1 = cell_coord(q.x() + radius, 0);
  const long j0 = cell_coord(q.y() - radius, 1), j1 = cell_coord(q.y() + radius, 1);
  const long k0 = cell_coord(q.z() - radius, 2), k1 = cell_coord(q.z() + radius, 2);
  for (long k = k0; k <= k1; ++k)
    for (long j = j0; j <= j1; ++j)
      for (long i = i0; i <= i1; ++i) {
        const std::size_t c = cell_id(i, j, k);
        for (std::size_t s = offsets_[c]; s < offsets_[c + 1]; ++s)
          if ((points_[order_[s]] - q).norm() <= radius) fn(order_[s]);
      }
}

}  // namespace dbound
