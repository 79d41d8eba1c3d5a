#include "spikan/sep_model.hpp"

#include <algorithm>

#include "spikan/errors.hpp"

namespace spikan {

SeparableModel::SeparableModel(std::vector<KanNetwork> nets, std::vector<AxisMap> axis_maps,
                               std::vector<std::string> axis_names, int rank, int fields)
    : nets_(std::move(nets)),
      maps_(std::move(axis_maps)),
      names_(std::move(axis_names)),
      rank_(rank),
      fields_(fields) {
  if (nets_.size() < 2) throw InvalidArgument("SeparableModel: need at least two axes");
  if (rank_ < 1 || fields_ < 1) throw InvalidArgument("SeparableModel: rank and fields must be positive");
  if (maps_.size() != nets_.size() || names_.size() != nets_.size())
    throw InvalidArgument("SeparableModel: one axis map and name per network");
  for (const auto& n : nets_) {
    if (n.input_width() != 1) throw InvalidArgument("SeparableModel: axis networks take one input");
    if (n.output_width() != rank_ * fields_)
      throw InvalidArgument("SeparableModel: axis network output width must be rank*fields");
  }
}

SeparableModel SeparableModel::random(const std::vector<int>& widths, const SplineSpec& spec, int rank,
                                      int fields, std::vector<AxisMap> axis_maps,
                                      std::vector<std::string> axis_names, Rng& rng) {
  std::vector<KanNetwork> nets;
  for (std::size_t a = 0; a < axis_maps.size(); ++a) nets.push_back(KanNetwork::random(widths, spec, rng));
  return SeparableModel(std::move(nets), std::move(axis_maps), std::move(axis_names), rank, fields);
}

std::size_t SeparableModel::param_count() const noexcept {
  std::size_t n = 0;
  for (const auto& net : nets_) n += net.param_count();
  return n;
}

std::vector<std::span<double>> SeparableModel::param_blocks() {
  std::vector<std::span<double>> b;
  for (auto& net : nets_) b.push_back(net.params());
  return b;
}

std::vector<NamedNetwork> SeparableModel::named_networks() const {
  std::vector<NamedNetwork> out;
  for (std::size_t a = 0; a < nets_.size(); ++a) out.push_back({names_[a], nets_[a]});
  return out;
}

SeparableModel SeparableModel::from_networks(std::vector<NamedNetwork> nets, std::vector<AxisMap> axis_maps,
                                             int rank, int fields) {
  std::vector<KanNetwork> n;
  std::vector<std::string> names;
  for (auto& nn : nets) {
    names.push_back(nn.name);
    n.push_back(std::move(nn.net));
  }
  return SeparableModel(std::move(n), std::move(axis_maps), std::move(names), rank, fields);
}

AxisEval AxisEval::zeros_like(const AxisEval& other) {
  AxisEval z;
  z.rank = other.rank;
  z.fields = other.fields;
  for (const auto& a : other.axes) {
    Axis b;
    b.n = a.n;
    b.f.assign(a.f.size(), 0.0);
    b.d1.assign(a.d1.size(), 0.0);
    b.d2.assign(a.d2.size(), 0.0);
    z.axes.push_back(std::move(b));
  }
  return z;
}

const std::vector<double>& AxisEval::factor(std::size_t axis, int order) const {
  const Axis& a = axes.at(axis);
  switch (order) {
    case 0: return a.f;
    case 1: return a.d1;
    case 2: return a.d2;
    default: throw Unsupported("derivative order " + std::to_string(order) + " is not supported");
  }
}

std::vector<double>& AxisEval::factor(std::size_t axis, int order) {
  return const_cast<std::vector<double>&>(static_cast<const AxisEval&>(*this).factor(axis, order));
}

AxisEval eval_axes(const SeparableModel& model, const FactorGrid& grid, AxisTapes* tapes) {
  if (grid.dim() != model.dim())
    throw InvalidArgument("eval_axes: grid has " + std::to_string(grid.dim()) + " axes, model has " +
                          std::to_string(model.dim()));
  const int width = model.rank() * model.fields();
  AxisEval out;
  out.rank = model.rank();
  out.fields = model.fields();
  out.axes.resize(grid.dim());
  if (tapes) tapes->tapes.resize(grid.dim());

  Tape scratch;
  for (std::size_t a = 0; a < grid.dim(); ++a) {
    const Grid1D& axis = grid.axes[a];
    const AxisMap& map = model.axis_maps()[a];
    const double c1 = map.derivative_factor(1), c2 = map.derivative_factor(2);
    auto& A = out.axes[a];
    A.n = axis.size();
    A.f.resize(A.n * static_cast<std::size_t>(width));
    A.d1.resize(A.f.size());
    A.d2.resize(A.f.size());
    if (tapes) tapes->tapes[a].resize(A.n);
    for (std::size_t p = 0; p < A.n; ++p) {
      Tape& tape = tapes ? tapes->tapes[a][p] : scratch;
      const double xi = map.to_reference(axis[p]);
      record(model.nets()[a], std::span<const double>(&xi, 1), 0, tape);
      const auto v = tape.value(), g1 = tape.d1(), g2 = tape.d2();
      const std::size_t off = p * static_cast<std::size_t>(width);
      for (int q = 0; q < width; ++q) {
        A.f[off + q] = v[q];
        A.d1[off + q] = g1[q] * c1;
        A.d2[off + q] = g2[q] * c2;
      }
    }
    model.count_evaluations(A.n);
  }
  return out;
}

namespace {

// Contiguous [count][rank] factor matrices for one field and order selection.
struct Factors {
  std::vector<std::vector<double>> m;
  std::vector<std::size_t> n;
};

std::vector<AxisRange> resolve_ranges(const AxisEval& ax, std::span<const AxisRange> ranges) {
  std::vector<AxisRange> r;
  if (ranges.empty()) {
    for (const auto& a : ax.axes) r.push_back({0, a.n});
    return r;
  }
  if (ranges.size() != ax.axes.size()) throw InvalidArgument("combine: one range per axis required");
  for (std::size_t a = 0; a < ranges.size(); ++a)
    if (ranges[a].begin + ranges[a].count > ax.axes[a].n)
      throw InvalidArgument("combine: range exceeds axis length");
  return {ranges.begin(), ranges.end()};
}

void check_orders(const AxisEval& ax, std::span<const int> orders, int field) {
  if (orders.size() != ax.axes.size()) throw InvalidArgument("combine: one derivative order per axis required");
  for (int o : orders)
    if (o < 0 || o > 2) throw Unsupported("derivative order " + std::to_string(o) + " is not supported");
  if (field < 0 || field >= ax.fields) throw InvalidArgument("combine: field index out of range");
}

Factors gather(const AxisEval& ax, std::span<const int> orders, int field, std::span<const AxisRange> ranges) {
  const auto r = static_cast<std::size_t>(ax.rank);
  const auto m = static_cast<std::size_t>(ax.fields);
  Factors F;
  for (std::size_t a = 0; a < ax.axes.size(); ++a) {
    const auto& src = ax.factor(a, orders[a]);
    std::vector<double> mat(ranges[a].count * r);
    for (std::size_t p = 0; p < ranges[a].count; ++p)
      for (std::size_t j = 0; j < r; ++j)
        mat[p * r + j] = src[((ranges[a].begin + p) * r + j) * m + static_cast<std::size_t>(field)];
    F.m.push_back(std::move(mat));
    F.n.push_back(ranges[a].count);
  }
  return F;
}

struct CombineKernel {
  const Factors& F;
  std::size_t r;
  std::vector<std::vector<double>> prefix;  // one scratch row per depth

  void forward(std::size_t a, std::size_t base, const double* pre, double* out) {
    const std::size_t n = F.n[a];
    const double* M = F.m[a].data();
    if (a + 1 == F.n.size()) {
      for (std::size_t p = 0; p < n; ++p) {
        double s = 0.0;
        for (std::size_t j = 0; j < r; ++j) s += pre[j] * M[p * r + j];
        out[base * n + p] = s;
      }
      return;
    }
    double* tmp = prefix[a].data();
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t j = 0; j < r; ++j) tmp[j] = pre[j] * M[p * r + j];
      forward(a + 1, base * n + p, tmp, out);
    }
  }
};

struct AdjointKernel {
  const Factors& F;
  std::size_t r;
  const double* cot;
  std::vector<std::vector<double>>& adj;  // same layout as F.m
  std::vector<std::vector<double>> prefix, partial;

  // Returns in `acc` the sum over the subtree of cot * prod_{k >= a} M_k.
  void run(std::size_t a, std::size_t base, const double* pre, double* acc) {
    const std::size_t n = F.n[a];
    const double* M = F.m[a].data();
    double* A = adj[a].data();
    std::fill(acc, acc + r, 0.0);
    if (a + 1 == F.n.size()) {
      for (std::size_t p = 0; p < n; ++p) {
        const double c = cot[base * n + p];
        if (c == 0.0) continue;
        for (std::size_t j = 0; j < r; ++j) {
          A[p * r + j] += pre[j] * c;
          acc[j] += M[p * r + j] * c;
        }
      }
      return;
    }
    double* tmp = prefix[a].data();
    double* q = partial[a].data();
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t j = 0; j < r; ++j) tmp[j] = pre[j] * M[p * r + j];
      run(a + 1, base * n + p, tmp, q);
      for (std::size_t j = 0; j < r; ++j) {
        A[p * r + j] += pre[j] * q[j];
        acc[j] += M[p * r + j] * q[j];
      }
    }
  }
};

}  // namespace

DenseField combine(const AxisEval& ax, std::span<const int> orders, int field, std::span<const AxisRange> ranges) {
  check_orders(ax, orders, field);
  const auto rg = resolve_ranges(ax, ranges);
  const Factors F = gather(ax, orders, field, rg);
  DenseField out(F.n);
  const auto r = static_cast<std::size_t>(ax.rank);
  CombineKernel k{F, r, std::vector<std::vector<double>>(F.n.size(), std::vector<double>(r))};
  const std::vector<double> ones(r, 1.0);
  if (out.size() > 0) k.forward(0, 0, ones.data(), out.values.data());
  return out;
}

std::vector<DenseField> combine(const AxisEval& ax, std::span<const int> orders) {
  std::vector<DenseField> out;
  for (int o = 0; o < ax.fields; ++o) out.push_back(combine(ax, orders, o));
  return out;
}

void backward_combine(const AxisEval& ax, std::span<const int> orders, int field,
                      std::span<const AxisRange> ranges, const DenseField& cotangent, AxisEval& adjoint) {
  check_orders(ax, orders, field);
  const auto rg = resolve_ranges(ax, ranges);
  if (adjoint.axes.size() != ax.axes.size() || adjoint.rank != ax.rank || adjoint.fields != ax.fields)
    throw InvalidArgument("backward_combine: adjoint is not shaped like the axis evaluation");
  for (std::size_t a = 0; a < ax.axes.size(); ++a)
    if (adjoint.axes[a].n != ax.axes[a].n)
      throw InvalidArgument("backward_combine: adjoint is not shaped like the axis evaluation");
  const Factors F = gather(ax, orders, field, rg);
  if (cotangent.shape != F.n) throw InvalidArgument("backward_combine: cotangent shape mismatch");

  const auto r = static_cast<std::size_t>(ax.rank);
  const auto m = static_cast<std::size_t>(ax.fields);
  std::vector<std::vector<double>> adj;
  for (const auto& mat : F.m) adj.emplace_back(mat.size(), 0.0);
  const std::size_t d = F.n.size();
  AdjointKernel k{F, r, cotangent.values.data(), adj,
                  std::vector<std::vector<double>>(d, std::vector<double>(r)),
                  std::vector<std::vector<double>>(d, std::vector<double>(r))};
  const std::vector<double> ones(r, 1.0);
  std::vector<double> total(r);
  if (cotangent.size() > 0) k.run(0, 0, ones.data(), total.data());

  for (std::size_t a = 0; a < d; ++a) {
    auto& dst = adjoint.factor(a, orders[a]);
    for (std::size_t p = 0; p < rg[a].count; ++p)
      for (std::size_t j = 0; j < r; ++j)
        dst[((rg[a].begin + p) * r + j) * m + static_cast<std::size_t>(field)] += adj[a][p * r + j];
  }
}

AxisEval backward_combine(const AxisEval& ax, std::span<const int> orders, int field, const DenseField& cotangent) {
  AxisEval adj = AxisEval::zeros_like(ax);
  backward_combine(ax, orders, field, {}, cotangent, adj);
  return adj;
}

ParamGrad backward_axes(const SeparableModel& model, const AxisTapes& tapes, const AxisEval& adjoint) {
  if (tapes.tapes.size() != model.dim() || adjoint.axes.size() != model.dim())
    throw InvalidArgument("backward_axes: tapes/adjoint do not match the model");
  ParamGrad grad(model.param_count());
  const auto width = static_cast<std::size_t>(model.rank() * model.fields());
  std::vector<double> b1(width), b2(width);
  std::size_t offset = 0;
  for (std::size_t a = 0; a < model.dim(); ++a) {
    const KanNetwork& net = model.nets()[a];
    const auto& A = adjoint.axes[a];
    if (tapes.tapes[a].size() != A.n) throw InvalidArgument("backward_axes: tape count mismatch");
    const double c1 = model.axis_maps()[a].derivative_factor(1);
    const double c2 = model.axis_maps()[a].derivative_factor(2);
    std::span<double> g(grad.values.data() + offset, net.param_count());
    for (std::size_t p = 0; p < A.n; ++p) {
      const std::size_t off = p * width;
      bool any = false;
      for (std::size_t q = 0; q < width; ++q) {
        b1[q] = A.d1[off + q] * c1;
        b2[q] = A.d2[off + q] * c2;
        any = any || A.f[off + q] != 0.0 || b1[q] != 0.0 || b2[q] != 0.0;
      }
      if (!any) continue;
      accumulate_param_grad(net, tapes.tapes[a][p], std::span<const double>(A.f.data() + off, width), b1, b2, g);
    }
    offset += net.param_count();
  }
  return grad;
}

std::vector<double> eval_points(const SeparableModel& model, const PointCloud& pts) {
  if (pts.size() > 0 && pts.dim() != model.dim())
    throw InvalidArgument("eval_points: point dimension does not match the model");
  const auto r = static_cast<std::size_t>(model.rank());
  const auto m = static_cast<std::size_t>(model.fields());
  std::vector<double> out(pts.size() * m, 0.0);
  std::vector<Tape> tapes(model.dim());
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const auto x = pts[p];
    for (std::size_t a = 0; a < model.dim(); ++a) {
      const double xi = model.axis_maps()[a].to_reference(x[a]);
      record(model.nets()[a], std::span<const double>(&xi, 1), -1, tapes[a]);
    }
    for (std::size_t o = 0; o < m; ++o) {
      double s = 0.0;
      for (std::size_t j = 0; j < r; ++j) {
        double prod = 1.0;
        for (std::size_t a = 0; a < model.dim(); ++a) prod *= tapes[a].value()[j * m + o];
        s += prod;
      }
      out[p * m + o] = s;
    }
  }
  model.count_evaluations(pts.size() * model.dim());
  return out;
}

}  // namespace spikan
