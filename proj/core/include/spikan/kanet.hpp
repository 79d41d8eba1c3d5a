#pragma once

// Kolmogorov-Arnold network layers built on B-spline edge activations.
//
// Each edge (i <- j) of a layer computes
//
//   phi_ij(u) = base_ij * silu(u) + scale_ij * sum_c coeff_ijc * B_c(u)
//
// and node i sums its incoming edges plus a bias. Hidden node values are
// squashed with tanh before they enter the next layer so that every spline
// sees an argument inside its knot interval [-1, 1].
//
// Parameters of a layer are laid out contiguously as
//   coeffs [n_out][n_in][g+k], base [n_out][n_in], scale [n_out][n_in], bias [n_out]
// and the layers are concatenated in order.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spikan/bspline.hpp"
#include "spikan/tensorgrid.hpp"

namespace spikan {

double silu(double x) noexcept;

template <class T>
struct LayerView {
  int n_in = 0;
  int n_out = 0;
  int n_basis = 0;
  std::span<T> coeffs;
  std::span<T> base;
  std::span<T> scale;
  std::span<T> bias;

  T& coeff(int i, int j, int c) const {
    return coeffs[(static_cast<std::size_t>(i) * n_in + j) * n_basis + c];
  }
  T& base_weight(int i, int j) const { return base[static_cast<std::size_t>(i) * n_in + j]; }
  T& spline_scale(int i, int j) const { return scale[static_cast<std::size_t>(i) * n_in + j]; }
};

using KanLayer = LayerView<double>;
using ConstKanLayer = LayerView<const double>;

std::size_t layer_param_count(int n_in, int n_out, int n_basis) noexcept;

class KanNetwork {
 public:
  // Zero coefficients, zero base weights, unit spline scales, zero biases.
  KanNetwork(std::vector<int> widths, SplineSpec spec);

  // Spline coefficients ~ N(0, 0.1/sqrt(g+k)), base weights ~ N(0, 1/sqrt(n_in)).
  static KanNetwork random(std::vector<int> widths, SplineSpec spec, Rng& rng);

  const std::vector<int>& widths() const noexcept { return widths_; }
  const SplineSpec& spline() const noexcept { return spec_; }
  int input_width() const noexcept { return widths_.front(); }
  int output_width() const noexcept { return widths_.back(); }
  std::size_t layer_count() const noexcept { return widths_.size() - 1; }

  KanLayer layer(std::size_t l);
  ConstKanLayer layer(std::size_t l) const;

  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }
  std::size_t param_count() const noexcept { return params_.size(); }
  std::size_t layer_offset(std::size_t l) const { return offsets_[l]; }

  bool same_shape(const KanNetwork& other) const noexcept {
    return widths_ == other.widths_ && spec_ == other.spec_;
  }

 private:
  std::vector<int> widths_;
  SplineSpec spec_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

// Value, first and second derivative of a vector with respect to one scalar
// input direction.
struct Jet2 {
  std::vector<double> v;
  std::vector<double> d1;
  std::vector<double> d2;
};

// One gradient entry per network parameter, in the network's layout.
struct ParamGrad {
  std::vector<double> values;

  ParamGrad() = default;
  explicit ParamGrad(std::size_t n) : values(n, 0.0) {}
  std::size_t size() const noexcept { return values.size(); }
};

// Intermediate state of one forward (or forward-jet) evaluation, reused across
// evaluations to avoid reallocations.
class Tape {
 public:
  bool has_derivatives() const noexcept { return derivs_; }
  std::span<const double> value() const noexcept { return out_v_; }
  std::span<const double> d1() const noexcept { return out_d1_; }
  std::span<const double> d2() const noexcept { return out_d2_; }
  Jet2 output() const { return {out_v_, out_d1_, out_d2_}; }

 private:
  friend void record(const KanNetwork&, std::span<const double>, int, Tape&);
  friend void accumulate_param_grad(const KanNetwork&, const Tape&, std::span<const double>,
                                    std::span<const double>, std::span<const double>,
                                    std::span<double>);

  struct LayerRecord {
    // Layer inputs after the squash, and their jets.
    std::vector<double> u, du, ddu;
    // Pre-squash jets (outputs of the previous layer); unused for layer 0.
    std::vector<double> h, dh, ddh;
    std::vector<LocalBasis> basis;
    std::vector<std::array<double, 4>> silu;
  };

  std::vector<int> widths_;
  int n_basis_ = 0;
  bool derivs_ = false;
  std::vector<LayerRecord> layers_;
  std::vector<double> out_v_, out_d1_, out_d2_;
};

// Records a forward evaluation at x. With dir in [0, w_in) the second-order jet
// along input x[dir] is propagated as well; dir < 0 records values only.
void record(const KanNetwork& net, std::span<const double> x, int dir, Tape& tape);

std::vector<double> forward(const KanNetwork& net, std::span<const double> x);
Jet2 forward_jet(const KanNetwork& net, std::span<const double> x, int dir);

// Adds d(loss)/d(params) to grad, given cotangents on the recorded outputs and
// (for jet tapes) on their first and second derivatives. Empty spans are zero.
void accumulate_param_grad(const KanNetwork& net, const Tape& tape, std::span<const double> v_bar,
                           std::span<const double> d1_bar, std::span<const double> d2_bar,
                           std::span<double> grad);

ParamGrad backward_params(const KanNetwork& net, const Tape& tape, std::span<const double> v_bar,
                          std::span<const double> d1_bar = {},
                          std::span<const double> d2_bar = {});

double edge_activation(const ConstKanLayer& layer, const SplineSpec& spec, int i, int j, double x);

// Named networks in the plain-text checkpoint container. Values are written in
// shortest round-trip decimal form, so save/load is bit-exact.
struct NamedNetwork {
  std::string name;
  KanNetwork net;
};

void save_checkpoint(std::ostream& os, std::span<const NamedNetwork> nets);
std::vector<NamedNetwork> load_checkpoint(std::istream& is);
void save_checkpoint(const std::string& path, std::span<const NamedNetwork> nets);
std::vector<NamedNetwork> load_checkpoint(const std::string& path);

}  // namespace spikan
