#pragma once

// Separable KAN model: one univariate network per axis whose r*m outputs are
// combined as
//
//   u_o(x_1, ..., x_d) = sum_j prod_i f_i[j, o](x_i)
//
// Derivatives along one axis replace that axis' factor with its first or
// second derivative (product rule); every other axis keeps its value factor.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spikan/kanet.hpp"
#include "spikan/tensorgrid.hpp"

namespace spikan {

class SeparableModel {
 public:
  SeparableModel(std::vector<KanNetwork> nets, std::vector<AxisMap> axis_maps,
                 std::vector<std::string> axis_names, int rank, int fields);

  // widths = [1, hidden..., rank*fields]; networks are initialised in axis order.
  static SeparableModel random(const std::vector<int>& widths, const SplineSpec& spec, int rank,
                               int fields, std::vector<AxisMap> axis_maps,
                               std::vector<std::string> axis_names, Rng& rng);

  std::size_t dim() const noexcept { return nets_.size(); }
  int rank() const noexcept { return rank_; }
  int fields() const noexcept { return fields_; }
  const std::vector<KanNetwork>& nets() const noexcept { return nets_; }
  std::vector<KanNetwork>& nets() noexcept { return nets_; }
  const std::vector<AxisMap>& axis_maps() const noexcept { return maps_; }
  const std::vector<std::string>& axis_names() const noexcept { return names_; }

  std::size_t param_count() const noexcept;
  std::vector<std::span<double>> param_blocks();

  // Univariate network evaluations performed so far (one per axis point).
  std::uint64_t evaluations() const noexcept { return evaluations_; }
  void reset_evaluations() const noexcept { evaluations_ = 0; }
  void count_evaluations(std::uint64_t n) const noexcept { evaluations_ += n; }

  std::vector<NamedNetwork> named_networks() const;
  static SeparableModel from_networks(std::vector<NamedNetwork> nets, std::vector<AxisMap> axis_maps,
                                      int rank, int fields);

 private:
  std::vector<KanNetwork> nets_;
  std::vector<AxisMap> maps_;
  std::vector<std::string> names_;
  int rank_;
  int fields_;
  mutable std::uint64_t evaluations_ = 0;
};

// Per-axis factor matrices, each laid out [point][rank][field], with
// derivatives taken with respect to the physical coordinate.
struct AxisEval {
  struct Axis {
    std::size_t n = 0;
    std::vector<double> f, d1, d2;
  };
  int rank = 0;
  int fields = 0;
  std::vector<Axis> axes;

  static AxisEval zeros_like(const AxisEval& other);
  const std::vector<double>& factor(std::size_t axis, int order) const;
  std::vector<double>& factor(std::size_t axis, int order);
};

// Recorded evaluations for the reverse pass: tapes[axis][point].
struct AxisTapes {
  std::vector<std::vector<Tape>> tapes;
};

AxisEval eval_axes(const SeparableModel& model, const FactorGrid& grid, AxisTapes* tapes = nullptr);

// Assembles one output field on the sub-grid given by `ranges` (full grid when
// empty). orders[i] in {0, 1, 2} selects F, D1 or D2 for axis i.
DenseField combine(const AxisEval& ax, std::span<const int> orders, int field,
                   std::span<const AxisRange> ranges = {});

// All m fields at once, in field order.
std::vector<DenseField> combine(const AxisEval& ax, std::span<const int> orders);

// Adds the adjoint of combine(ax, orders, field, ranges) applied to `cotangent`
// into `adjoint` (which must be shaped like `ax`).
void backward_combine(const AxisEval& ax, std::span<const int> orders, int field,
                      std::span<const AxisRange> ranges, const DenseField& cotangent,
                      AxisEval& adjoint);

AxisEval backward_combine(const AxisEval& ax, std::span<const int> orders, int field,
                          const DenseField& cotangent);

// Pulls per-axis cotangents back through the recorded network evaluations.
// The result is laid out as the concatenation of the axis networks' params.
ParamGrad backward_axes(const SeparableModel& model, const AxisTapes& tapes, const AxisEval& adjoint);

// Off-grid evaluation; returns [point][field].
std::vector<double> eval_points(const SeparableModel& model, const PointCloud& pts);

}  // namespace spikan
