#pragma once

// Non-separable baseline: one KAN over all d inputs, evaluated point by point
// on the dense tensor-product cloud.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spikan/kanet.hpp"
#include "spikan/tensorgrid.hpp"

namespace spikan {

class DenseModel {
 public:
  DenseModel(KanNetwork net, std::vector<AxisMap> axis_maps, std::vector<std::string> axis_names);

  // widths = [d, hidden..., fields].
  static DenseModel random(const std::vector<int>& widths, const SplineSpec& spec,
                           std::vector<AxisMap> axis_maps, std::vector<std::string> axis_names, Rng& rng);

  std::size_t dim() const noexcept { return maps_.size(); }
  int fields() const noexcept { return net_.output_width(); }
  const KanNetwork& net() const noexcept { return net_; }
  KanNetwork& net() noexcept { return net_; }
  const std::vector<AxisMap>& axis_maps() const noexcept { return maps_; }
  const std::vector<std::string>& axis_names() const noexcept { return names_; }

  std::size_t param_count() const noexcept { return net_.param_count(); }
  std::vector<std::span<double>> param_blocks() { return {net_.params()}; }

  // Full-network evaluations (forward or one directional jet each).
  std::uint64_t evaluations() const noexcept { return evaluations_; }
  void reset_evaluations() const noexcept { evaluations_ = 0; }
  void count_evaluations(std::uint64_t n) const noexcept { evaluations_ += n; }

  // Physical point -> reference-interval input vector.
  void normalize(std::span<const double> x, std::span<double> out) const;

  std::vector<NamedNetwork> named_networks() const { return {{"dense", net_}}; }

 private:
  KanNetwork net_;
  std::vector<AxisMap> maps_;
  std::vector<std::string> names_;
  mutable std::uint64_t evaluations_ = 0;
};

// Values at physical points, laid out [point][field].
std::vector<double> dense_eval(const DenseModel& model, const PointCloud& pts);

// d^order u / dx_axis^order at each point in physical coordinates, [point][field].
std::vector<double> dense_derivs(const DenseModel& model, const PointCloud& pts, int axis, int order);

// Gradient of one recorded evaluation, given cotangents on the physical-space
// value and derivatives along the tape's jet direction `axis` (ignored for
// value tapes).
void dense_accumulate(const DenseModel& model, const Tape& tape, int axis, std::span<const double> v_bar,
                      std::span<const double> d1_bar, std::span<const double> d2_bar, std::span<double> grad);

ParamGrad dense_backward(const DenseModel& model, const Tape& tape, int axis, std::span<const double> v_bar,
                         std::span<const double> d1_bar = {}, std::span<const double> d2_bar = {});

}  // namespace spikan
