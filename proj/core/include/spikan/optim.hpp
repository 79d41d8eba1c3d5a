#pragma once

// Adam and the full-batch training loop.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spikan/loss.hpp"

namespace spikan {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Rescale the gradient to this global norm when it is exceeded; 0 disables.
  double clip_norm = 0.0;
};

struct AdamState {
  AdamConfig config;
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  AdamState() = default;
  AdamState(std::size_t n, AdamConfig cfg) : config(cfg), m(n, 0.0), v(n, 0.0) {}
};

// One update of the parameters held in `blocks` (concatenated in order).
// Throws NumericalError naming the first non-finite gradient entry.
void adam_step(std::span<const std::span<double>> blocks, std::span<const double> grad, AdamState& state);
void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state);

struct TrainTrace {
  std::vector<LossBreakdown> losses;  // loss before each epoch's update
  std::vector<double> ms;             // wall time of each epoch
  std::vector<std::uint64_t> evaluations;  // network evaluations per epoch
  std::size_t warmup = 10;

  std::size_t epochs() const noexcept { return losses.size(); }
  // Mean and sample standard deviation of ms, excluding the warmup epochs
  // (all epochs are used when there are no more than `warmup`).
  double mean_ms() const;
  double std_ms() const;
};

// Evaluates the loss (and gradient when requested) at the current parameters.
using LossFunction = std::function<LossResult(bool want_grad)>;

struct TrainOptions {
  int epochs = 1;
  AdamConfig adam;
  std::size_t warmup = 10;
  // Called after the update of every epoch e (1-based) with e % checkpoint_every == 0,
  // and after the final epoch.
  int checkpoint_every = 0;
  std::function<void(int epoch)> on_checkpoint;
  // Network evaluation counter read before and after each epoch.
  std::function<std::uint64_t()> evaluation_counter;
};

// Full-batch Adam. A non-finite loss aborts with a NumericalError that names
// the epoch and the offending loss term.
TrainTrace train(std::span<const std::span<double>> blocks, const LossFunction& loss, const TrainOptions& options);

// Trace CSV with header epoch,l_pde,l_ic,l_bc,total,ms.
void write_trace_csv(std::ostream& os, const TrainTrace& trace);
void write_trace_csv(const std::string& path, const TrainTrace& trace);
TrainTrace read_trace_csv(std::istream& is);
TrainTrace read_trace_csv(const std::string& path);

}  // namespace spikan
