#include "spikan/physics.hpp"

#include <algorithm>
#include <cmath>

#include "spikan/errors.hpp"

namespace spikan {

std::size_t Collocation::ic_count() const {
  std::size_t n = 0;
  for (const auto& f : faces)
    if (f.face.kind == FaceKind::Initial) n += f.count;
  return n;
}

std::size_t Collocation::bc_count() const {
  std::size_t n = 0;
  for (const auto& f : faces)
    if (f.face.kind == FaceKind::Boundary) n += f.count;
  return n;
}

Collocation make_collocation(const ProblemSpec& problem, std::span<const std::size_t> points_per_axis) {
  const auto dom = problem.domain();
  const std::size_t d = dom.size();
  if (points_per_axis.size() != d)
    throw InvalidArgument("collocation needs " + std::to_string(d) + " axis sizes, got " +
                          std::to_string(points_per_axis.size()));
  const int t_axis = problem.time_axis();
  Collocation c;
  c.grid.axis_names = problem.axis_names();
  for (std::size_t a = 0; a < d; ++a) {
    const std::size_t n = points_per_axis[a];
    const std::size_t min_n = static_cast<int>(a) == t_axis ? 2 : 3;
    if (n < min_n)
      throw InvalidArgument("axis " + c.grid.axis_names[a] + " needs at least " + std::to_string(min_n) +
                            " collocation points");
    c.grid.axes.push_back(linspace(dom[a].lo, dom[a].hi, n));
  }
  c.interior_count = 1;
  for (std::size_t a = 0; a < d; ++a) {
    const std::size_t n = points_per_axis[a];
    // The final time slice has no condition attached, so it stays interior.
    const AxisRange r = static_cast<int>(a) == t_axis ? AxisRange{1, n - 1} : AxisRange{1, n - 2};
    c.interior.push_back(r);
    c.interior_count *= r.count;
  }
  for (const auto& face : problem.faces()) {
    FaceGrid fg;
    fg.face = face;
    fg.ranges = full_ranges(c.grid);
    const auto a = static_cast<std::size_t>(face.axis);
    fg.ranges[a] = {face.upper ? points_per_axis[a] - 1 : 0, 1};
    fg.count = 1;
    for (const auto& r : fg.ranges) fg.count *= r.count;
    c.faces.push_back(std::move(fg));
  }
  return c;
}

namespace {

constexpr std::size_t kDenseBlock = 256;

std::vector<int> term_orders(const DerivKey& k, std::size_t d) {
  std::vector<int> o(d, 0);
  if (k.order > 0) o[static_cast<std::size_t>(k.axis)] = k.order;
  return o;
}

std::vector<double> face_targets(const ProblemSpec& problem, const FaceGrid& fg, const PointCloud& pts) {
  const std::size_t k = fg.face.fields.size();
  std::vector<double> t(pts.size() * k);
  for (std::size_t p = 0; p < pts.size(); ++p) problem.face_target(fg.face, pts[p], {t.data() + p * k, k});
  return t;
}

double face_weight(const LossWeights& w, const FaceGrid& fg) {
  return fg.face.kind == FaceKind::Initial ? w.ic : w.bc;
}

void finish(LossBreakdown& b, const Collocation& c) {
  const std::size_t nic = c.ic_count(), nbc = c.bc_count();
  b.l_ic /= nic > 0 ? static_cast<double>(nic) : 1.0;
  b.l_bc /= nbc > 0 ? static_cast<double>(nbc) : 1.0;
  b.total = b.weights.pde * b.l_pde + b.weights.ic * b.l_ic + b.weights.bc * b.l_bc;
}

double kind_count(const Collocation& c, const FaceGrid& fg) {
  const std::size_t n = fg.face.kind == FaceKind::Initial ? c.ic_count() : c.bc_count();
  return static_cast<double>(std::max<std::size_t>(n, 1));
}

}  // namespace

SeparableLoss::SeparableLoss(const ProblemSpec& problem, Collocation colloc)
    : problem_(problem), colloc_(std::move(colloc)), terms_(problem.pde_terms()) {
  const PointCloud interior = tensor_points(colloc_.grid, colloc_.interior);
  const auto eq = static_cast<std::size_t>(problem.equations());
  forcing_.resize(interior.size() * eq);
  for (std::size_t p = 0; p < interior.size(); ++p) problem.forcing(interior[p], {forcing_.data() + p * eq, eq});
  for (const auto& fg : colloc_.faces)
    targets_.push_back(face_targets(problem, fg, tensor_points(colloc_.grid, fg.ranges)));
}

LossResult SeparableLoss::operator()(const SeparableModel& model, const LossWeights& weights, bool want_grad) const {
  if (model.dim() != problem_.dim() || model.fields() != problem_.fields())
    throw InvalidArgument("model does not match problem " + problem_.name());
  const std::size_t d = model.dim();
  AxisTapes tapes;
  const AxisEval ax = eval_axes(model, colloc_.grid, want_grad ? &tapes : nullptr);
  AxisEval adjoint;
  if (want_grad) adjoint = AxisEval::zeros_like(ax);

  LossResult res;
  LossBreakdown& b = res.loss;
  b.weights = weights;

  // Interior residual.
  const std::size_t nt = terms_.size();
  const auto eq = static_cast<std::size_t>(problem_.equations());
  const std::size_t n = colloc_.interior_count;
  std::vector<DenseField> fields;
  std::vector<std::vector<int>> orders;
  for (const auto& k : terms_) {
    orders.push_back(term_orders(k, d));
    fields.push_back(combine(ax, orders.back(), k.field, colloc_.interior));
  }
  std::vector<DenseField> cot;
  if (want_grad)
    for (std::size_t t = 0; t < nt; ++t) cot.emplace_back(fields[t].shape);
  std::vector<double> dv(nt), r(eq), rb(eq), db(nt);
  double sumsq = 0.0;
  const double scale = n > 0 ? 2.0 * weights.pde / static_cast<double>(n) : 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t t = 0; t < nt; ++t) dv[t] = fields[t].values[p];
    problem_.residual(dv, {forcing_.data() + p * eq, eq}, r);
    for (std::size_t e = 0; e < eq; ++e) sumsq += r[e] * r[e];
    if (want_grad) {
      for (std::size_t e = 0; e < eq; ++e) rb[e] = scale * r[e];
      problem_.residual_vjp(dv, rb, db);
      for (std::size_t t = 0; t < nt; ++t) cot[t].values[p] = db[t];
    }
  }
  b.l_pde = n > 0 ? sumsq / static_cast<double>(n) : 0.0;
  if (want_grad)
    for (std::size_t t = 0; t < nt; ++t)
      backward_combine(ax, orders[t], terms_[t].field, colloc_.interior, cot[t], adjoint);

  // Faces.
  const std::vector<int> zero(d, 0);
  for (std::size_t f = 0; f < colloc_.faces.size(); ++f) {
    const FaceGrid& fg = colloc_.faces[f];
    const std::size_t k = fg.face.fields.size();
    const double fscale = 2.0 * face_weight(weights, fg) / kind_count(colloc_, fg);
    double fsum = 0.0;
    for (std::size_t q = 0; q < k; ++q) {
      const DenseField v = combine(ax, zero, fg.face.fields[q], fg.ranges);
      DenseField c;
      if (want_grad) c = DenseField(v.shape);
      for (std::size_t p = 0; p < v.size(); ++p) {
        const double err = v.values[p] - targets_[f][p * k + q];
        fsum += err * err;
        if (want_grad) c.values[p] = fscale * err;
      }
      if (want_grad) backward_combine(ax, zero, fg.face.fields[q], fg.ranges, c, adjoint);
    }
    const bool initial = fg.face.kind == FaceKind::Initial;
    (initial ? b.l_ic : b.l_bc) += fsum;
    b.faces.push_back({fg.face.name, initial, fg.count, fg.count > 0 ? fsum / static_cast<double>(fg.count) : 0.0});
  }
  finish(b, colloc_);
  if (want_grad) res.grad = backward_axes(model, tapes, adjoint);
  return res;
}

DenseLoss::DenseLoss(const ProblemSpec& problem, Collocation colloc, int threads)
    : problem_(problem), colloc_(std::move(colloc)), threads_(std::max(1, threads)), terms_(problem.pde_terms()) {
  for (const auto& k : terms_)
    if (k.order > 0 && std::find(directions_.begin(), directions_.end(), k.axis) == directions_.end())
      directions_.push_back(k.axis);
  std::sort(directions_.begin(), directions_.end());
  interior_ = tensor_points(colloc_.grid, colloc_.interior);
  const auto eq = static_cast<std::size_t>(problem.equations());
  forcing_.resize(interior_.size() * eq);
  for (std::size_t p = 0; p < interior_.size(); ++p) problem.forcing(interior_[p], {forcing_.data() + p * eq, eq});
  for (const auto& fg : colloc_.faces) {
    face_points_.push_back(tensor_points(colloc_.grid, fg.ranges));
    targets_.push_back(face_targets(problem, fg, face_points_.back()));
  }
}

LossResult DenseLoss::operator()(const DenseModel& model, const LossWeights& weights, bool want_grad) const {
  if (model.dim() != problem_.dim() || model.fields() != problem_.fields())
    throw InvalidArgument("model does not match problem " + problem_.name());
  const std::size_t d = model.dim();
  const auto m = static_cast<std::size_t>(model.fields());
  const auto eq = static_cast<std::size_t>(problem_.equations());
  const std::size_t nt = terms_.size();
  const std::size_t ndir = directions_.size();
  const std::size_t n = interior_.size();
  const KanNetwork& net = model.net();

  // Slot of each term's jet tape (0 for values, which come from the first tape).
  std::vector<std::size_t> slot(nt, 0);
  for (std::size_t t = 0; t < nt; ++t)
    if (terms_[t].order > 0)
      slot[t] = static_cast<std::size_t>(
          std::find(directions_.begin(), directions_.end(), terms_[t].axis) - directions_.begin());
  std::vector<double> c1(d), c2(d);
  for (std::size_t a = 0; a < d; ++a) {
    c1[a] = model.axis_maps()[a].derivative_factor(1);
    c2[a] = model.axis_maps()[a].derivative_factor(2);
  }

  LossResult res;
  LossBreakdown& b = res.loss;
  b.weights = weights;
  if (want_grad) res.grad = ParamGrad(model.param_count());

  // Fixed-size blocks merged in block order keep the result independent of the
  // thread count.
  const std::size_t nblocks = (n + kDenseBlock - 1) / kDenseBlock;
  std::vector<double> partial(nblocks, 0.0);
  std::vector<ParamGrad> grads(want_grad ? nblocks : 0);
  const double scale = n > 0 ? 2.0 * weights.pde / static_cast<double>(n) : 0.0;

  parallel_chunks(nblocks, static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads_), std::max<std::size_t>(nblocks, 1))),
                  [&](int, std::size_t block_begin, std::size_t block_end) {
    std::vector<Tape> tapes(std::max<std::size_t>(ndir, 1));
    std::vector<double> xi(d), dv(nt), r(eq), rb(eq), db(nt);
    std::vector<std::vector<double>> vb(tapes.size(), std::vector<double>(m)), b1 = vb, b2 = vb;
    for (std::size_t blk = block_begin; blk < block_end; ++blk) {
      ParamGrad g(want_grad ? model.param_count() : 0);
      double sumsq = 0.0;
      const std::size_t end = std::min(n, (blk + 1) * kDenseBlock);
      for (std::size_t p = blk * kDenseBlock; p < end; ++p) {
        model.normalize(interior_[p], xi);
        if (ndir == 0) {
          record(net, xi, -1, tapes[0]);
        } else {
          for (std::size_t s = 0; s < ndir; ++s) record(net, xi, directions_[s], tapes[s]);
        }
        for (std::size_t t = 0; t < nt; ++t) {
          const DerivKey& k = terms_[t];
          const Tape& tp = tapes[slot[t]];
          const auto f = static_cast<std::size_t>(k.field);
          if (k.order == 0) dv[t] = tp.value()[f];
          else if (k.order == 1) dv[t] = tp.d1()[f] * c1[static_cast<std::size_t>(k.axis)];
          else dv[t] = tp.d2()[f] * c2[static_cast<std::size_t>(k.axis)];
        }
        problem_.residual(dv, {forcing_.data() + p * eq, eq}, r);
        for (std::size_t e = 0; e < eq; ++e) sumsq += r[e] * r[e];
        if (!want_grad) continue;
        for (std::size_t e = 0; e < eq; ++e) rb[e] = scale * r[e];
        problem_.residual_vjp(dv, rb, db);
        for (std::size_t s = 0; s < tapes.size(); ++s) {
          std::fill(vb[s].begin(), vb[s].end(), 0.0);
          std::fill(b1[s].begin(), b1[s].end(), 0.0);
          std::fill(b2[s].begin(), b2[s].end(), 0.0);
        }
        for (std::size_t t = 0; t < nt; ++t) {
          const auto f = static_cast<std::size_t>(terms_[t].field);
          const int o = terms_[t].order;
          (o == 0 ? vb : o == 1 ? b1 : b2)[slot[t]][f] += db[t];
        }
        for (std::size_t s = 0; s < tapes.size(); ++s) {
          if (ndir == 0) dense_accumulate(model, tapes[s], 0, vb[s], {}, {}, g.values);
          else dense_accumulate(model, tapes[s], directions_[s], vb[s], b1[s], b2[s], g.values);
        }
      }
      partial[blk] = sumsq;
      if (want_grad) grads[blk] = std::move(g);
    }
  });
  model.count_evaluations(std::max<std::size_t>(ndir, 1) * n);

  double sumsq = 0.0;
  for (std::size_t blk = 0; blk < nblocks; ++blk) {
    sumsq += partial[blk];
    if (want_grad)
      for (std::size_t i = 0; i < res.grad.size(); ++i) res.grad.values[i] += grads[blk].values[i];
  }
  b.l_pde = n > 0 ? sumsq / static_cast<double>(n) : 0.0;

  Tape tape;
  std::vector<double> xi(d), vb(m);
  for (std::size_t f = 0; f < colloc_.faces.size(); ++f) {
    const FaceGrid& fg = colloc_.faces[f];
    const PointCloud& pts = face_points_[f];
    const std::size_t k = fg.face.fields.size();
    const double fscale = 2.0 * face_weight(weights, fg) / kind_count(colloc_, fg);
    double fsum = 0.0;
    for (std::size_t p = 0; p < pts.size(); ++p) {
      model.normalize(pts[p], xi);
      record(net, xi, -1, tape);
      std::fill(vb.begin(), vb.end(), 0.0);
      for (std::size_t q = 0; q < k; ++q) {
        const auto fld = static_cast<std::size_t>(fg.face.fields[q]);
        const double err = tape.value()[fld] - targets_[f][p * k + q];
        fsum += err * err;
        vb[fld] = fscale * err;
      }
      if (want_grad) dense_accumulate(model, tape, 0, vb, {}, {}, res.grad.values);
    }
    model.count_evaluations(pts.size());
    const bool initial = fg.face.kind == FaceKind::Initial;
    (initial ? b.l_ic : b.l_bc) += fsum;
    b.faces.push_back({fg.face.name, initial, fg.count, fg.count > 0 ? fsum / static_cast<double>(fg.count) : 0.0});
  }
  finish(b, colloc_);
  return res;
}

LossResult total_loss(const SeparableModel& model, const ProblemSpec& problem, const Collocation& colloc,
                      const LossWeights& weights, bool want_grad) {
  return SeparableLoss(problem, colloc)(model, weights, want_grad);
}

LossResult total_loss(const DenseModel& model, const ProblemSpec& problem, const Collocation& colloc,
                      const LossWeights& weights, bool want_grad) {
  return DenseLoss(problem, colloc)(model, weights, want_grad);
}

}  // namespace spikan
