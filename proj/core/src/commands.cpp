#include "spikan/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "spikan/errors.hpp"
#include "spikan/io.hpp"

namespace spikan {

namespace fs = std::filesystem;

namespace {

template <class T>
std::string join(std::span<const T> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void log_line(std::ostream* log, const std::string& s) {
  if (log) *log << s << '\n' << std::flush;
}

// Sub-block of a field: indices [begin, begin + count) along `axis`.
DenseField crop(const DenseField& f, std::size_t axis, std::size_t begin, std::size_t count) {
  std::size_t outer = 1, inner = 1;
  for (std::size_t a = 0; a < axis; ++a) outer *= f.shape[a];
  for (std::size_t a = axis + 1; a < f.shape.size(); ++a) inner *= f.shape[a];
  const std::size_t n = f.shape[axis];
  auto shape = f.shape;
  shape[axis] = count;
  DenseField out(shape);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t k = 0; k < inner; ++k)
        out.values[(o * count + i) * inner + k] = f.values[(o * n + begin + i) * inner + k];
  return out;
}

FactorGrid crop(const FactorGrid& g, std::size_t axis, std::size_t begin, std::size_t count) {
  FactorGrid out = g;
  auto& pts = out.axes[axis].points;
  pts = std::vector<double>(pts.begin() + static_cast<std::ptrdiff_t>(begin),
                            pts.begin() + static_cast<std::ptrdiff_t>(begin + count));
  return out;
}

double rms_interior(const DenseField& f) {
  DenseField c = f;
  for (std::size_t a = 0; a < f.shape.size(); ++a)
    if (c.shape[a] > 2) c = crop(c, a, 1, c.shape[a] - 2);
  double acc = 0.0;
  for (double v : c.values) acc += v * v;
  return c.size() ? std::sqrt(acc / static_cast<double>(c.size())) : 0.0;
}

ReferenceField make_field(const FactorGrid& grid, Provenance p, std::vector<std::string> names,
                          std::vector<DenseField> values, const std::string& problem) {
  ReferenceField f;
  f.grid = grid;
  f.provenance = p;
  f.field_names = std::move(names);
  f.values = std::move(values);
  f.meta = {{"problem", problem}};
  return f;
}

void add_time_metrics(RunReport& r, const DenseField& pred, const DenseField& ref, const FactorGrid& grid,
                      std::size_t time_axis, const std::string& problem, const std::string& out_dir) {
  const auto series = l2_over_time(pred, ref, time_axis);
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(series.size());
  r.set("l2_over_time", series);
  r.set("l2_over_time_mean", mean);
  if (!out_dir.empty()) {
    FactorGrid space = grid;
    space.axes.erase(space.axes.begin() + static_cast<std::ptrdiff_t>(time_axis));
    space.axis_names.erase(space.axis_names.begin() + static_cast<std::ptrdiff_t>(time_axis));
    save_field(path_in(out_dir, "time_mean_abs_error.field"),
               make_field(space, Provenance::Derived, {"u"}, {time_mean_abs_error(pred, ref, time_axis)}, problem));
  }
}

}  // namespace

// ---------------------------------------------------------------- AnyModel

AnyModel AnyModel::build(const TrainConfig& c, const ProblemSpec& problem) {
  Rng rng(c.seed);
  const SplineSpec spec(c.g, c.k);
  if (c.method == "separable")
    return AnyModel(SeparableModel::random(c.widths, spec, c.rank, problem.fields(), problem.axis_maps(),
                                           problem.axis_names(), rng));
  return AnyModel(DenseModel::random(c.widths, spec, problem.axis_maps(), problem.axis_names(), rng));
}

AnyModel AnyModel::restore(const TrainConfig& c, const ProblemSpec& problem, std::vector<NamedNetwork> nets) {
  if (c.method == "separable") {
    if (nets.size() != problem.dim())
      throw InvalidArgument("checkpoint holds " + std::to_string(nets.size()) + " networks, expected " +
                            std::to_string(problem.dim()));
    for (std::size_t a = 0; a < nets.size(); ++a)
      if (nets[a].name != problem.axis_names()[a] || nets[a].net.widths() != c.widths)
        throw InvalidArgument("checkpoint network '" + nets[a].name + "' does not match the configuration");
    return AnyModel(SeparableModel::from_networks(std::move(nets), problem.axis_maps(), c.rank, problem.fields()));
  }
  if (nets.size() != 1 || nets[0].net.widths() != c.widths)
    throw InvalidArgument("checkpoint does not hold the configured dense network");
  return AnyModel(DenseModel(std::move(nets[0].net), problem.axis_maps(), problem.axis_names()));
}

std::size_t AnyModel::param_count() const {
  return separable() ? sep().param_count() : dense().param_count();
}

std::vector<std::span<double>> AnyModel::param_blocks() {
  return separable() ? sep().param_blocks() : dense().param_blocks();
}

std::vector<NamedNetwork> AnyModel::named_networks() const {
  return separable() ? sep().named_networks() : dense().named_networks();
}

std::uint64_t AnyModel::evaluations() const {
  return separable() ? sep().evaluations() : dense().evaluations();
}

std::vector<DenseField> AnyModel::predict(const FactorGrid& grid) const {
  if (separable()) {
    const AxisEval ax = eval_axes(sep(), grid);
    const std::vector<int> zero(grid.dim(), 0);
    return combine(ax, zero);
  }
  const auto m = static_cast<std::size_t>(dense().fields());
  const auto flat = dense_eval(dense(), tensor_points(grid));
  std::vector<DenseField> out(m, DenseField(grid.shape()));
  for (std::size_t p = 0; p < flat.size() / m; ++p)
    for (std::size_t f = 0; f < m; ++f) out[f].values[p] = flat[p * m + f];
  return out;
}

DenseField AnyModel::derivative(const FactorGrid& grid, int field, int axis, int order) const {
  if (order == 0) return predict(grid).at(static_cast<std::size_t>(field));
  if (separable()) {
    const AxisEval ax = eval_axes(sep(), grid);
    std::vector<int> o(grid.dim(), 0);
    o.at(static_cast<std::size_t>(axis)) = order;
    return combine(ax, o, field);
  }
  const auto m = static_cast<std::size_t>(dense().fields());
  const auto flat = dense_derivs(dense(), tensor_points(grid), axis, order);
  DenseField out(grid.shape());
  for (std::size_t p = 0; p < out.size(); ++p) out.values[p] = flat[p * m + static_cast<std::size_t>(field)];
  return out;
}

std::vector<double> AnyModel::predict_points(const PointCloud& pts) const {
  return separable() ? eval_points(sep(), pts) : dense_eval(dense(), pts);
}

// ---------------------------------------------------------------- RunLoss

namespace {
std::variant<SeparableLoss, DenseLoss> make_loss(const TrainConfig& c, const ProblemSpec& problem) {
  Collocation colloc = make_collocation(problem, c.points);
  if (c.method == "separable") return SeparableLoss(problem, std::move(colloc));
  return DenseLoss(problem, std::move(colloc), c.threads);
}
}  // namespace

RunLoss::RunLoss(const TrainConfig& c, const ProblemSpec& problem) : loss_(make_loss(c, problem)) {}

LossResult RunLoss::operator()(const AnyModel& model, const LossWeights& weights, bool want_grad) const {
  if (const auto* s = std::get_if<SeparableLoss>(&loss_)) return (*s)(model.sep(), weights, want_grad);
  return std::get<DenseLoss>(loss_)(model.dense(), weights, want_grad);
}

const Collocation& RunLoss::collocation() const {
  return std::visit([](const auto& l) -> const Collocation& { return l.collocation(); }, loss_);
}

// ---------------------------------------------------------------- evaluation

FactorGrid eval_grid(const ProblemSpec& problem, std::span<const std::size_t> points) {
  const auto dom = problem.domain();
  if (points.size() != dom.size()) throw InvalidArgument("evaluation grid needs one count per axis");
  FactorGrid g;
  g.axis_names = problem.axis_names();
  for (std::size_t a = 0; a < dom.size(); ++a) g.axes.push_back(linspace(dom[a].lo, dom[a].hi, points[a]));
  return g;
}

RunReport evaluate_model(const TrainConfig& c, const ProblemSpec& problem, const AnyModel& model,
                         std::span<const std::size_t> eval_points, const std::string& out_dir) {
  RunReport r;
  if (!out_dir.empty()) fs::create_directories(out_dir);
  r.set("eval_points", join(eval_points));

  const RunLoss loss(c, problem);
  const LossBreakdown lb = loss(model, c.weights(), false).loss;
  r.set("loss_pde", lb.l_pde);
  r.set("loss_ic", lb.l_ic);
  r.set("loss_bc", lb.l_bc);
  r.set("loss_total", lb.total);
  for (const auto& f : lb.faces) r.set("face_mse_" + f.name, f.mse);

  const FactorGrid grid = eval_grid(problem, eval_points);
  std::vector<DenseField> pred = model.predict(grid);
  const auto names = problem.field_names();
  const int t_axis = problem.time_axis();

  if (problem.has_exact()) {
    const ReferenceField ref = analytic_reference(problem, grid);
    std::vector<DenseField> err;
    for (std::size_t f = 0; f < names.size(); ++f) {
      r.set("l2_" + names[f], relative_l2(pred[f], ref, f));
      err.push_back(error_field(pred[f], ref.values[f]));
    }
    if (t_axis >= 0) add_time_metrics(r, pred[0], ref.values[0], grid, static_cast<std::size_t>(t_axis), problem.name(), out_dir);
    if (!out_dir.empty()) save_field(path_in(out_dir, "error.field"), make_field(grid, Provenance::Derived, names, err, problem.name()));
  } else if (problem.name() == "allencahn1d1t") {
    const std::size_t res[] = {c.reference_nx, c.reference_nt};
    const ReferenceResult rr = cmd_reference(problem.name(), res, c.reference_dir);
    const ReferenceField ref = ac_sample(rr.field, grid);
    r.set("reference_checksum", rr.checksum);
    // The periodic reference is compared on interior x only; its deviation from
    // the Dirichlet value at x = +-1 is reported separately.
    const std::size_t nx = grid.axes[0].size();
    const DenseField pi = crop(pred[0], 0, 1, nx - 2), ri = crop(ref.values[0], 0, 1, nx - 2);
    r.set("l2_u", relative_l2(pi, ri));
    r.set("l2_u_full_grid", relative_l2(pred[0], ref.values[0]));
    double dev = 0.0;
    const std::size_t nt = grid.axes[1].size();
    for (std::size_t j = 0; j < nt; ++j)
      dev = std::max({dev, std::abs(ref.values[0].values[j] + 1.0), std::abs(ref.values[0].values[(nx - 1) * nt + j] + 1.0)});
    r.set("reference_boundary_max_dev", dev);
    add_time_metrics(r, pi, ri, crop(grid, 0, 1, nx - 2), 1, problem.name(), out_dir);
    if (!out_dir.empty())
      save_field(path_in(out_dir, "error.field"),
                 make_field(grid, Provenance::Derived, names, {error_field(pred[0], ref.values[0])}, problem.name()));
  } else if (problem.name() == "cavity2d") {
    CavityFields cf{model.derivative(grid, 0, 0, 0), model.derivative(grid, 0, 0, 1), model.derivative(grid, 0, 1, 1),
                    model.derivative(grid, 0, 0, 2), model.derivative(grid, 0, 1, 2), model.derivative(grid, 1, 0, 0),
                    model.derivative(grid, 1, 0, 1), model.derivative(grid, 1, 1, 1), model.derivative(grid, 1, 0, 2),
                    model.derivative(grid, 1, 1, 2), model.derivative(grid, 2, 0, 1), model.derivative(grid, 2, 1, 1)};
    const CavityResiduals res = cavity_residuals(cf);
    r.set("continuity_rms", rms_interior(res.continuity));
    r.set("momentum_x_rms", rms_interior(res.momentum_x));
    r.set("momentum_y_rms", rms_interior(res.momentum_y));
    pred.push_back(normalize_pressure(pred[2]));
    if (!c.external_profiles.empty()) {
      const CenterlineProfile ext = load_external_profiles(c.external_profiles);
      CenterlineProfile mine;
      PointCloud pu(2, {}), pv(2, {});
      for (double y : ext.u_vs_y.coord) pu.push_back(std::vector<double>{0.5, y});
      for (double x : ext.v_vs_x.coord) pv.push_back(std::vector<double>{x, 0.5});
      const auto vu = model.predict_points(pu), vv = model.predict_points(pv);
      mine.u_vs_y.coord = ext.u_vs_y.coord;
      mine.v_vs_x.coord = ext.v_vs_x.coord;
      double du = 0.0, dv = 0.0;
      for (std::size_t i = 0; i < pu.size(); ++i) {
        mine.u_vs_y.value.push_back(vu[i * 3]);
        du += std::pow(vu[i * 3] - ext.u_vs_y.value[i], 2);
      }
      for (std::size_t i = 0; i < pv.size(); ++i) {
        mine.v_vs_x.value.push_back(vv[i * 3 + 1]);
        dv += std::pow(vv[i * 3 + 1] - ext.v_vs_x.value[i], 2);
      }
      if (pu.size()) r.set("profile_u_rms_diff", std::sqrt(du / static_cast<double>(pu.size())));
      if (pv.size()) r.set("profile_v_rms_diff", std::sqrt(dv / static_cast<double>(pv.size())));
      if (!out_dir.empty()) write_profiles(path_in(out_dir, "profiles_model.csv"), mine);
    }
  }

  if (!out_dir.empty()) {
    auto out_names = names;
    if (pred.size() > names.size()) out_names.push_back("p_normalized");
    save_field(path_in(out_dir, "prediction.field"),
               make_field(grid, Provenance::Prediction, out_names, pred, problem.name()));
  }
  return r;
}

// ---------------------------------------------------------------- commands

RunReport cmd_train(const TrainConfig& c, std::ostream* log) {
  validate_config(c);
  const auto problem = make_problem(c.problem);
  fs::create_directories(c.output);
  io::write_file(path_in(c.output, "config.txt"), config_to_string(c));

  AnyModel model = AnyModel::build(c, *problem);
  const RunLoss loss(c, *problem);
  const Collocation& colloc = loss.collocation();
  log_line(log, "training " + c.problem + " (" + c.method + "), " + std::to_string(model.param_count()) +
                    " parameters, " + std::to_string(colloc.interior_count) + " interior points");

  auto save = [&](int epoch) {
    const std::string name = epoch == c.epochs ? "checkpoint.txt" : "checkpoint_" + std::to_string(epoch) + ".txt";
    save_checkpoint(path_in(c.output, name), model.named_networks());
  };
  TrainOptions opt;
  opt.epochs = c.epochs;
  opt.adam = c.adam();
  opt.warmup = c.warmup;
  opt.checkpoint_every = c.checkpoint_every;
  opt.on_checkpoint = [&](int epoch) {
    save(epoch);
    if (log && epoch != c.epochs) log_line(log, "checkpoint at epoch " + std::to_string(epoch));
  };
  opt.evaluation_counter = [&] { return model.evaluations(); };
  const LossFunction f = [&](bool want_grad) { return loss(model, c.weights(), want_grad); };
  const auto blocks = model.param_blocks();
  const TrainTrace trace = train(blocks, f, opt);
  write_trace_csv(path_in(c.output, "trace.csv"), trace);

  RunReport r;
  r.set("artifact", std::string(kArtifactStamp));
  std::istringstream cfg(config_to_string(c));
  for (std::string line; std::getline(cfg, line);) {
    const auto eq = line.find(" = ");
    r.set("config." + line.substr(0, eq), line.substr(eq + 3));
  }
  r.set("param_count", static_cast<long long>(model.param_count()));
  r.set("n_interior", static_cast<long long>(colloc.interior_count));
  r.set("n_bc", static_cast<long long>(colloc.bc_count()));
  r.set("n_ic", static_cast<long long>(colloc.ic_count()));
  r.set("ms_mean", trace.mean_ms());
  r.set("ms_std", trace.std_ms());
  r.set("ms_warmup_excluded", static_cast<long long>(std::min(trace.warmup, trace.epochs())));
  r.set("evaluations_per_epoch", static_cast<long long>(trace.evaluations.back()));
  if (model.separable()) {
    long long n = 0;
    for (const auto& a : colloc.grid.axes) n += static_cast<long long>(a.size());
    r.set("evaluations_interior", n);
    r.set("evaluations_bc", 0LL);
    r.set("evaluations_ic", 0LL);
    r.set("evaluations_note", std::string("axis networks are evaluated once on the closed grid and shared by all terms"));
  } else {
    long long dirs = 0;
    std::vector<int> seen;
    for (const auto& k : problem->pde_terms())
      if (k.order > 0 && std::find(seen.begin(), seen.end(), k.axis) == seen.end()) seen.push_back(k.axis);
    dirs = std::max<long long>(1, static_cast<long long>(seen.size()));
    r.set("evaluations_interior", dirs * static_cast<long long>(colloc.interior_count));
    r.set("evaluations_bc", static_cast<long long>(colloc.bc_count()));
    r.set("evaluations_ic", static_cast<long long>(colloc.ic_count()));
  }
  const LossBreakdown& last = trace.losses.back();
  r.set("final_epoch_l_pde", last.l_pde);
  r.set("final_epoch_l_ic", last.l_ic);
  r.set("final_epoch_l_bc", last.l_bc);
  r.set("final_epoch_total", last.total);

  const RunReport ev = evaluate_model(c, *problem, model, c.eval_points, c.output);
  for (const auto& [k, v] : ev.entries()) r.set(k, v);

  if (!c.baseline.empty()) {
    const RunReport base = RunReport::read(path_in(c.baseline, "report.txt"));
    r.set("speedup_baseline", c.baseline);
    r.set("speedup", speedup(base.number("ms_mean"), trace.mean_ms()));
  }
  r.check_finite();
  r.write(path_in(c.output, "report.txt"));
  log_line(log, "finished: total loss " + io::format_double(last.total) + ", " + io::format_double(trace.mean_ms()) +
                    " ms/iter");
  return r;
}

RunReport cmd_train(const std::string& config_path, std::ostream* log) {
  return cmd_train(load_config(config_path), log);
}

RunReport cmd_eval(const std::string& run_dir, std::span<const std::size_t> eval_points, std::ostream* log) {
  TrainConfig c = load_config(path_in(run_dir, "config.txt"));
  const auto problem = make_problem(c.problem);
  const std::vector<std::size_t> pts =
      eval_points.empty() ? c.eval_points : std::vector<std::size_t>(eval_points.begin(), eval_points.end());
  if (pts.size() != problem->dim()) throw InvalidArgument("eval grid needs " + std::to_string(problem->dim()) + " counts");
  const AnyModel model = AnyModel::restore(c, *problem, load_checkpoint(path_in(run_dir, "checkpoint.txt")));
  const std::string out = path_in(run_dir, "eval");
  RunReport r = evaluate_model(c, *problem, model, pts, out);
  r.check_finite();
  r.write(path_in(out, "report.txt"));
  log_line(log, "evaluated " + run_dir + " on " + join(std::span<const std::size_t>(pts)));
  return r;
}

RunReport cmd_bench(const TrainConfig& baseline, const TrainConfig& candidate, int iterations, int warmup,
                    std::ostream* log) {
  if (iterations < 2) throw InvalidArgument("bench: need at least 2 timed iterations");
  RunReport r;
  r.set("artifact", std::string(kArtifactStamp));
  r.set("iterations", static_cast<long long>(iterations));
  r.set("warmup", static_cast<long long>(warmup));
  double ms[2] = {0, 0}, sd[2] = {0, 0};
  double evals[2] = {0, 0};
  const TrainConfig* cfgs[2] = {&baseline, &candidate};
  const char* tags[2] = {"baseline", "candidate"};
  for (int i = 0; i < 2; ++i) {
    const TrainConfig& c = *cfgs[i];
    validate_config(c);
    const auto problem = make_problem(c.problem);
    AnyModel model = AnyModel::build(c, *problem);
    const RunLoss loss(c, *problem);
    const auto blocks = model.param_blocks();
    AdamState state(model.param_count(), c.adam());
    std::vector<double> t;
    std::uint64_t ev = 0;
    for (int it = 0; it < warmup + iterations; ++it) {
      const std::uint64_t e0 = model.evaluations();
      const auto t0 = std::chrono::steady_clock::now();
      const LossResult res = loss(model, c.weights(), true);
      adam_step(blocks, res.grad.values, state);
      const auto t1 = std::chrono::steady_clock::now();
      if (it >= warmup) t.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
      ev = model.evaluations() - e0;
    }
    double mean = 0.0;
    for (double v : t) mean += v;
    mean /= static_cast<double>(t.size());
    double var = 0.0;
    for (double v : t) var += (v - mean) * (v - mean);
    ms[i] = mean;
    sd[i] = std::sqrt(var / static_cast<double>(t.size() - 1));
    evals[i] = static_cast<double>(ev);
    const std::string tag = tags[i];
    r.set(tag + "_problem", c.problem);
    r.set(tag + "_method", c.method);
    r.set(tag + "_widths", join(std::span<const int>(c.widths)));
    r.set(tag + "_points", join(std::span<const std::size_t>(c.points)));
    r.set(tag + "_param_count", static_cast<long long>(model.param_count()));
    r.set(tag + "_ms_mean", mean);
    r.set(tag + "_ms_std", sd[i]);
    r.set(tag + "_evaluations_per_iter", static_cast<long long>(ev));
    log_line(log, tag + ": " + io::format_double(mean) + " ms/iter, " + std::to_string(ev) + " evaluations/iter");
  }
  r.set("speedup", speedup(ms[0], ms[1]));
  // Relative standard error of the ratio (first-order propagation of the two
  // sample standard errors).
  const double n = static_cast<double>(iterations);
  const double rel = std::sqrt(std::pow(sd[0] / ms[0], 2) + std::pow(sd[1] / ms[1], 2)) / std::sqrt(n);
  r.set("speedup_noise_band", 2.0 * rel * ms[0] / ms[1]);
  r.set("evaluation_ratio", evals[0] / evals[1]);
  r.check_finite();
  return r;
}

ReferenceResult cmd_reference(const std::string& problem_name, std::span<const std::size_t> resolution,
                              const std::string& cache_dir) {
  const auto problem = make_problem(problem_name);
  std::string file;
  if (problem_name == "allencahn1d1t") {
    if (resolution.size() != 2) throw InvalidArgument("allencahn1d1t reference needs nx,nt");
    file = problem_name + "_nx" + std::to_string(resolution[0]) + "_nt" + std::to_string(resolution[1]) + ".field";
  } else if (problem->has_exact()) {
    if (resolution.size() != problem->dim())
      throw InvalidArgument(problem_name + " reference needs " + std::to_string(problem->dim()) + " counts");
    file = problem_name;
    for (std::size_t n : resolution) file += "_" + std::to_string(n);
    file += ".field";
  } else {
    throw Unsupported(problem_name + " has no built-in reference; supply external centerline profiles instead");
  }
  ReferenceResult out;
  out.path = path_in(cache_dir, file);
  const std::string sum_path = out.path + ".checksum";
  if (fs::exists(out.path) && fs::exists(sum_path)) {
    const std::string content = io::read_file(out.path);
    const std::string stored(io::trim(io::read_file(sum_path)));
    if (io::checksum(content) == stored) {
      std::istringstream is(content);
      out.field = load_field(is);
      out.checksum = stored;
      out.reused = true;
      return out;
    }
  }
  if (problem_name == "allencahn1d1t") out.field = ac_reference(resolution[0], resolution[1]);
  else out.field = analytic_reference(*problem, eval_grid(*problem, resolution));
  std::ostringstream os;
  save_field(os, out.field);
  const std::string content = os.str();
  fs::create_directories(cache_dir);
  io::write_file(out.path, content);
  out.checksum = io::checksum(content);
  io::write_file(sum_path, out.checksum + "\n");
  return out;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const InvalidArgument*>(&e) ||
      dynamic_cast<const Unsupported*>(&e) || dynamic_cast<const DomainError*>(&e))
    return 2;
  if (dynamic_cast<const NumericalError*>(&e)) return 3;
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const fs::filesystem_error*>(&e))
    return 4;
  return 1;
}

}  // namespace spikan
