#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace dbound {

/// Uniform bucket grid over 3D points for exact nearest-neighbour and
/// fixed-radius queries.
class PointGrid {
 public:
  PointGrid(std::span<const Eigen::Vector3d> points, double cell_size);

  struct Hit {
    std::size_t index;
    double distance;
  };

  /// Nearest stored point to q, optionally skipping one index.
  Hit nearest(const Eigen::Vector3d& q, std::size_t skip = static_cast<std::size_t>(-1)) const;

  /// Invokes fn(index) for every stored point with |p - q| <= radius.
  void for_each_within(const Eigen::Vector3d& q, double radius,
                       const std::function<void(std::size_t)>& fn) const;

  std::size_t size() const { return points_.size(); }

 private:
  long cell_coord(double x, int axis) const;
  std::size_t cell_id(long i, long j, long k) const;

  std::vector<Eigen::Vector3d> points_;
  double cell_ = 1.0;
  Eigen::Vector3d origin_;
  long dims_[3] = {1, 1, 1};
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> order_;
};

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Work is split
/// into contiguous blocks; callers write results by index.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

/// Worker count from a flag value, honouring DBOUND_THREADS when the flag is 0.
int resolve_threads(int requested);

}  // namespace dbound
