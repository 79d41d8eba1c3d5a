#include "spikan/tensorgrid.hpp"

#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include "spikan/errors.hpp"

namespace spikan {

Grid1D linspace(double lo, double hi, std::size_t n) {
  if (n < 2) throw InvalidArgument("linspace: need at least 2 points");
  if (!(lo < hi)) throw InvalidArgument("linspace: require lo < hi");
  Grid1D g;
  g.lo = lo;
  g.hi = hi;
  g.points.resize(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g.points[i] = lo + step * static_cast<double>(i);
  g.points.back() = hi;
  return g;
}

Grid1D singleton_axis(double x, double lo, double hi) {
  Grid1D g;
  g.lo = lo;
  g.hi = hi;
  g.points = {x};
  return g;
}

AxisMap AxisMap::from_interval(double lo, double hi) {
  if (!(lo < hi)) throw InvalidArgument("AxisMap: require lo < hi");
  return AxisMap{0.5 * (hi - lo), 0.5 * (hi + lo)};
}

double AxisMap::derivative_factor(int order) const noexcept {
  double f = 1.0;
  for (int i = 0; i < order; ++i) f /= scale;
  return f;
}

std::pair<Grid1D, AxisMap> normalize_axis(const Grid1D& g) {
  const AxisMap map = AxisMap::from_interval(g.lo, g.hi);
  Grid1D out;
  out.lo = -1.0;
  out.hi = 1.0;
  out.points.reserve(g.size());
  for (double x : g.points) out.points.push_back(map.to_reference(x));
  return {std::move(out), map};
}

std::vector<std::size_t> FactorGrid::shape() const {
  std::vector<std::size_t> s;
  s.reserve(axes.size());
  for (const auto& a : axes) s.push_back(a.size());
  return s;
}

std::size_t FactorGrid::point_count() const noexcept {
  std::size_t n = axes.empty() ? 0 : 1;
  for (const auto& a : axes) n *= a.size();
  return n;
}

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0 || coords_.size() % dim_ != 0)
    throw InvalidArgument("PointCloud: coordinate count is not a multiple of dim");
}

void PointCloud::push_back(std::span<const double> p) {
  if (dim_ == 0) dim_ = p.size();
  if (p.size() != dim_) throw InvalidArgument("PointCloud: dimension mismatch");
  coords_.insert(coords_.end(), p.begin(), p.end());
}

std::vector<AxisRange> full_ranges(const FactorGrid& g) {
  std::vector<AxisRange> r;
  r.reserve(g.dim());
  for (const auto& a : g.axes) r.push_back({0, a.size()});
  return r;
}

PointCloud tensor_points(const FactorGrid& g) { return tensor_points(g, full_ranges(g)); }

PointCloud tensor_points(const FactorGrid& g, std::span<const AxisRange> ranges) {
  const std::size_t d = g.dim();
  if (d == 0) return {};
  if (ranges.size() != d) throw InvalidArgument("tensor_points: one range per axis required");
  std::size_t n = 1;
  for (std::size_t a = 0; a < d; ++a) {
    if (ranges[a].begin + ranges[a].count > g.axes[a].size())
      throw InvalidArgument("tensor_points: range exceeds axis length");
    n *= ranges[a].count;
  }
  std::vector<double> coords;
  coords.reserve(n * d);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t a = 0; a < d; ++a) coords.push_back(g.axes[a][ranges[a].begin + idx[a]]);
    for (std::size_t a = d; a-- > 0;) {
      if (++idx[a] < ranges[a].count) break;
      idx[a] = 0;
    }
  }
  return PointCloud(d, std::move(coords));
}

std::size_t shape_product(std::span<const std::size_t> shape) noexcept {
  std::size_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

DenseField::DenseField(std::vector<std::size_t> shape_, double fill)
    : shape(std::move(shape_)), values(shape_product(shape), fill) {}

bool DenseField::all_finite() const noexcept {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

std::uint64_t Rng::next_u64() noexcept {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double Rng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

void parallel_chunks(std::size_t n, int threads,
                     const std::function<void(int, std::size_t, std::size_t)>& fn) {
  const int t = std::max(1, threads);
  auto bounds = [&](int c) {
    return std::pair{n * static_cast<std::size_t>(c) / static_cast<std::size_t>(t),
                     n * static_cast<std::size_t>(c + 1) / static_cast<std::size_t>(t)};
  };
  if (t == 1) {
    fn(0, 0, n);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(t));
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(t - 1));
    for (int c = 1; c < t; ++c) {
      auto [b, e] = bounds(c);
      pool.emplace_back([&fn, &errors, c, b = b, e = e] {
        try {
          fn(c, b, e);
        } catch (...) {
          errors[static_cast<std::size_t>(c)] = std::current_exception();
        }
      });
    }
    auto [b0, e0] = bounds(0);
    try {
      fn(0, b0, e0);
    } catch (...) {
      errors[0] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace spikan
