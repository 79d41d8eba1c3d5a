#pragma once

// Collocation grids, dense row-major fields and the deterministic RNG shared
// by every other module.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spikan {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// One axis of a factorizable grid: strictly increasing points inside [lo, hi].
struct Grid1D {
  std::vector<double> points;
  double lo = 0.0;
  double hi = 0.0;

  std::size_t size() const noexcept { return points.size(); }
  double operator[](std::size_t i) const { return points[i]; }
};

Grid1D linspace(double lo, double hi, std::size_t n);

// A single-point axis, used for boundary faces and off-grid evaluation. Not a
// valid collocation axis on its own (length < 2), hence the separate factory.
Grid1D singleton_axis(double x, double lo, double hi);

// Affine map between a physical axis [lo, hi] and the reference interval [-1, 1].
struct AxisMap {
  double scale = 1.0;  // (hi - lo) / 2
  double shift = 0.0;  // (hi + lo) / 2

  static AxisMap from_interval(double lo, double hi);

  double to_reference(double x) const noexcept { return (x - shift) / scale; }
  double to_physical(double xi) const noexcept { return xi * scale + shift; }

  // Factor applied to a reference-interval derivative of the given order to
  // obtain the physical-coordinate derivative: (1/scale)^order.
  double derivative_factor(int order) const noexcept;
};

std::pair<Grid1D, AxisMap> normalize_axis(const Grid1D& g);

struct FactorGrid {
  std::vector<Grid1D> axes;
  std::vector<std::string> axis_names;

  std::size_t dim() const noexcept { return axes.size(); }
  std::vector<std::size_t> shape() const;
  std::size_t point_count() const noexcept;
};

// Contiguous index window [begin, begin + count) along one grid axis.
struct AxisRange {
  std::size_t begin = 0;
  std::size_t count = 0;
};

// Full-axis ranges covering every point of the grid.
std::vector<AxisRange> full_ranges(const FactorGrid& g);

// Flat list of d-dimensional points, row-major (point-major).
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(std::size_t dim, std::vector<double> coords);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  const std::vector<double>& coords() const noexcept { return coords_; }

  void push_back(std::span<const double> p);

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

// Product-order enumeration with the last axis fastest.
PointCloud tensor_points(const FactorGrid& g);
PointCloud tensor_points(const FactorGrid& g, std::span<const AxisRange> ranges);

// Row-major multi-dimensional buffer of reals.
struct DenseField {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  DenseField() = default;
  explicit DenseField(std::vector<std::size_t> shape_, double fill = 0.0);

  std::size_t size() const noexcept { return values.size(); }
  bool all_finite() const noexcept;
};

std::size_t shape_product(std::span<const std::size_t> shape) noexcept;

// splitmix64: a scrambled 64-bit counter. The raw u64 stream is identical on
// every platform; the derived doubles only depend on IEEE arithmetic and libm.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed), seed_(seed) {}

  std::uint64_t next_u64() noexcept;
  double uniform() noexcept;  // [0, 1)
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal() noexcept;   // Box-Muller, standard normal

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t state_;
  std::uint64_t seed_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Runs fn(chunk, begin, end) over [0, n) split into `threads` contiguous
// chunks. Chunk boundaries depend only on (n, threads), so per-chunk partial
// results merged in chunk order are reproducible for a fixed thread count.
void parallel_chunks(std::size_t n, int threads,
                     const std::function<void(int, std::size_t, std::size_t)>& fn);

}  // namespace spikan
