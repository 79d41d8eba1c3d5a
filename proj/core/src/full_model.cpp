#include "spikan/full_model.hpp"

#include "spikan/errors.hpp"

namespace spikan {

DenseModel::DenseModel(KanNetwork net, std::vector<AxisMap> axis_maps, std::vector<std::string> axis_names)
    : net_(std::move(net)), maps_(std::move(axis_maps)), names_(std::move(axis_names)) {
  if (static_cast<std::size_t>(net_.input_width()) != maps_.size())
    throw InvalidArgument("DenseModel: network input width must equal the problem dimension");
  if (names_.size() != maps_.size()) throw InvalidArgument("DenseModel: one name per axis");
}

DenseModel DenseModel::random(const std::vector<int>& widths, const SplineSpec& spec,
                              std::vector<AxisMap> axis_maps, std::vector<std::string> axis_names, Rng& rng) {
  return DenseModel(KanNetwork::random(widths, spec, rng), std::move(axis_maps), std::move(axis_names));
}

void DenseModel::normalize(std::span<const double> x, std::span<double> out) const {
  if (x.size() != maps_.size()) throw InvalidArgument("DenseModel: point dimension mismatch");
  for (std::size_t a = 0; a < x.size(); ++a) out[a] = maps_[a].to_reference(x[a]);
}

std::vector<double> dense_eval(const DenseModel& model, const PointCloud& pts) {
  const auto m = static_cast<std::size_t>(model.fields());
  std::vector<double> out(pts.size() * m);
  std::vector<double> xi(model.dim());
  Tape tape;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    model.normalize(pts[p], xi);
    record(model.net(), xi, -1, tape);
    std::copy(tape.value().begin(), tape.value().end(), out.begin() + static_cast<std::ptrdiff_t>(p * m));
  }
  model.count_evaluations(pts.size());
  return out;
}

std::vector<double> dense_derivs(const DenseModel& model, const PointCloud& pts, int axis, int order) {
  if (order < 1 || order > 2) throw Unsupported("dense_derivs: order must be 1 or 2");
  if (axis < 0 || static_cast<std::size_t>(axis) >= model.dim())
    throw InvalidArgument("dense_derivs: axis out of range");
  const auto m = static_cast<std::size_t>(model.fields());
  const double c = model.axis_maps()[static_cast<std::size_t>(axis)].derivative_factor(order);
  std::vector<double> out(pts.size() * m);
  std::vector<double> xi(model.dim());
  Tape tape;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    model.normalize(pts[p], xi);
    record(model.net(), xi, axis, tape);
    const auto d = order == 1 ? tape.d1() : tape.d2();
    for (std::size_t o = 0; o < m; ++o) out[p * m + o] = d[o] * c;
  }
  model.count_evaluations(pts.size());
  return out;
}

void dense_accumulate(const DenseModel& model, const Tape& tape, int axis, std::span<const double> v_bar,
                      std::span<const double> d1_bar, std::span<const double> d2_bar, std::span<double> grad) {
  if (!tape.has_derivatives() || (d1_bar.empty() && d2_bar.empty())) {
    accumulate_param_grad(model.net(), tape, v_bar, {}, {}, grad);
    return;
  }
  const AxisMap& map = model.axis_maps().at(static_cast<std::size_t>(axis));
  const double c1 = map.derivative_factor(1), c2 = map.derivative_factor(2);
  const auto m = static_cast<std::size_t>(model.fields());
  std::vector<double> b1(m, 0.0), b2(m, 0.0);
  for (std::size_t o = 0; o < m; ++o) {
    if (!d1_bar.empty()) b1[o] = d1_bar[o] * c1;
    if (!d2_bar.empty()) b2[o] = d2_bar[o] * c2;
  }
  accumulate_param_grad(model.net(), tape, v_bar, b1, b2, grad);
}

ParamGrad dense_backward(const DenseModel& model, const Tape& tape, int axis, std::span<const double> v_bar,
                         std::span<const double> d1_bar, std::span<const double> d2_bar) {
  ParamGrad g(model.param_count());
  dense_accumulate(model, tape, axis, v_bar, d1_bar, d2_bar, g.values);
  return g;
}

}  // namespace spikan
