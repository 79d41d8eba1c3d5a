#pragma once

// The operations behind the command-line tool: train, eval, bench, reference.
//
// A run directory holds
//   config.txt          every configuration key with the value used
//   trace.csv           per-epoch losses and wall time
//   checkpoint.txt      final parameters (checkpoint_<epoch>.txt for periodic ones)
//   report.txt          RunReport (key = value)
//   prediction.field    predicted fields on the evaluation grid
//   error.field         |prediction - reference| where a reference exists
// and, for time-dependent problems, time_mean_abs_error.field.

#include <exception>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "spikan/config.hpp"
#include "spikan/full_model.hpp"
#include "spikan/metrics.hpp"
#include "spikan/physics.hpp"
#include "spikan/reference.hpp"
#include "spikan/sep_model.hpp"

namespace spikan {

inline constexpr const char* kArtifactStamp = "spikan 0.1.0";

// Either model kind behind one interface.
class AnyModel {
 public:
  static AnyModel build(const TrainConfig& c, const ProblemSpec& problem);
  static AnyModel restore(const TrainConfig& c, const ProblemSpec& problem, std::vector<NamedNetwork> nets);

  bool separable() const noexcept { return std::holds_alternative<SeparableModel>(m_); }
  const SeparableModel& sep() const { return std::get<SeparableModel>(m_); }
  SeparableModel& sep() { return std::get<SeparableModel>(m_); }
  const DenseModel& dense() const { return std::get<DenseModel>(m_); }
  DenseModel& dense() { return std::get<DenseModel>(m_); }

  std::size_t param_count() const;
  std::vector<std::span<double>> param_blocks();
  std::vector<NamedNetwork> named_networks() const;
  std::uint64_t evaluations() const;

  // Fields on every point of `grid`, in field order.
  std::vector<DenseField> predict(const FactorGrid& grid) const;
  // d^order u_field / dx_axis^order on `grid` (order 0 is the value).
  DenseField derivative(const FactorGrid& grid, int field, int axis, int order) const;
  // [point][field] at arbitrary points.
  std::vector<double> predict_points(const PointCloud& pts) const;

 private:
  explicit AnyModel(SeparableModel m) : m_(std::move(m)) {}
  explicit AnyModel(DenseModel m) : m_(std::move(m)) {}
  std::variant<SeparableModel, DenseModel> m_;
};

// Loss (and gradient) on the training collocation of a configuration.
class RunLoss {
 public:
  RunLoss(const TrainConfig& c, const ProblemSpec& problem);
  LossResult operator()(const AnyModel& model, const LossWeights& weights, bool want_grad) const;
  const Collocation& collocation() const;

 private:
  std::variant<SeparableLoss, DenseLoss> loss_;
};

FactorGrid eval_grid(const ProblemSpec& problem, std::span<const std::size_t> points);

// Accuracy and residual entries for a trained model; writes field files into
// out_dir when it is non-empty. Deterministic in the model parameters.
RunReport evaluate_model(const TrainConfig& c, const ProblemSpec& problem, const AnyModel& model,
                         std::span<const std::size_t> eval_points, const std::string& out_dir);

RunReport cmd_train(const TrainConfig& c, std::ostream* log = nullptr);
RunReport cmd_train(const std::string& config_path, std::ostream* log = nullptr);

// Reloads a run directory and re-evaluates it (on the run's own evaluation grid
// unless eval_points is given). Writes eval/report.txt and eval/*.field.
RunReport cmd_eval(const std::string& run_dir, std::span<const std::size_t> eval_points = {},
                   std::ostream* log = nullptr);

// Times `iterations` optimisation steps (after `warmup` untimed ones) of both
// configurations; `baseline` is the reference for the speedup.
RunReport cmd_bench(const TrainConfig& baseline, const TrainConfig& candidate, int iterations, int warmup = 10,
                    std::ostream* log = nullptr);

struct ReferenceResult {
  ReferenceField field;
  std::string path;
  std::string checksum;
  bool reused = false;
};

// allencahn1d1t: resolution = {nx, nt} of the pseudospectral solve, cached in
// cache_dir with a checksum file. Analytic problems: resolution = points per axis.
ReferenceResult cmd_reference(const std::string& problem, std::span<const std::size_t> resolution,
                              const std::string& cache_dir);

// 0 success, 2 validation error, 3 numerical abort, 4 I/O or file format error, 1 otherwise.
int exit_code_for(const std::exception& e);

}  // namespace spikan
