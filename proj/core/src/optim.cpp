#include "spikan/optim.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "spikan/errors.hpp"
#include "spikan/io.hpp"

namespace spikan {

void adam_step(std::span<const std::span<double>> blocks, std::span<const double> grad, AdamState& state) {
  std::size_t total = 0;
  for (const auto& b : blocks) total += b.size();
  if (total != grad.size() || state.m.size() != total || state.v.size() != total)
    throw InvalidArgument("adam_step: parameter, gradient and state sizes differ (" + std::to_string(total) + ", " +
                          std::to_string(grad.size()) + ", " + std::to_string(state.m.size()) + ")");
  double norm2 = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i]))
      throw NumericalError("non-finite gradient entry " + std::to_string(i) + " at step " +
                           std::to_string(state.step + 1));
    norm2 += grad[i] * grad[i];
  }
  const AdamConfig& c = state.config;
  double gscale = 1.0;
  if (c.clip_norm > 0.0) {
    const double norm = std::sqrt(norm2);
    if (norm > c.clip_norm) gscale = c.clip_norm / norm;
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  std::size_t i = 0;
  for (const auto& block : blocks) {
    for (double& theta : block) {
      const double g = grad[i] * gscale;
      state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
      state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g * g;
      const double mhat = state.m[i] / bc1;
      const double vhat = state.v[i] / bc2;
      theta -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
      ++i;
    }
  }
}

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state) {
  const std::span<double> one[] = {params};
  adam_step(std::span<const std::span<double>>(one), grad, state);
}

namespace {

std::span<const double> timed(const TrainTrace& t) {
  std::span<const double> all(t.ms);
  return all.size() > t.warmup ? all.subspan(t.warmup) : all;
}

void check_finite(const LossBreakdown& b, int epoch) {
  const std::pair<const char*, double> terms[] = {
      {"l_pde", b.l_pde}, {"l_ic", b.l_ic}, {"l_bc", b.l_bc}, {"total", b.total}};
  for (const auto& [name, v] : terms)
    if (!std::isfinite(v))
      throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) + ": term " + name + " = " +
                           io::format_double(v));
}

}  // namespace

double TrainTrace::mean_ms() const {
  const auto s = timed(*this);
  if (s.empty()) return 0.0;
  double sum = 0.0;
  for (double v : s) sum += v;
  return sum / static_cast<double>(s.size());
}

double TrainTrace::std_ms() const {
  const auto s = timed(*this);
  if (s.size() < 2) return 0.0;
  const double mean = mean_ms();
  double acc = 0.0;
  for (double v : s) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(s.size() - 1));
}

TrainTrace train(std::span<const std::span<double>> blocks, const LossFunction& loss, const TrainOptions& options) {
  if (options.epochs < 1) throw InvalidArgument("train: epochs must be at least 1");
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.size();
  AdamState state(n, options.adam);
  TrainTrace trace;
  trace.warmup = options.warmup;
  trace.losses.reserve(static_cast<std::size_t>(options.epochs));
  trace.ms.reserve(static_cast<std::size_t>(options.epochs));
  using clock = std::chrono::steady_clock;
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    const std::uint64_t ev0 = options.evaluation_counter ? options.evaluation_counter() : 0;
    const auto t0 = clock::now();
    LossResult r = loss(true);
    check_finite(r.loss, epoch);
    adam_step(blocks, r.grad.values, state);
    const auto t1 = clock::now();
    trace.ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    trace.losses.push_back(std::move(r.loss));
    trace.evaluations.push_back(options.evaluation_counter ? options.evaluation_counter() - ev0 : 0);
    const bool periodic = options.checkpoint_every > 0 && epoch % options.checkpoint_every == 0;
    if (options.on_checkpoint && (periodic || epoch == options.epochs)) options.on_checkpoint(epoch);
  }
  return trace;
}

void write_trace_csv(std::ostream& os, const TrainTrace& trace) {
  os << "epoch,l_pde,l_ic,l_bc,total,ms\n";
  for (std::size_t e = 0; e < trace.losses.size(); ++e) {
    const auto& b = trace.losses[e];
    os << (e + 1) << ',' << io::format_double(b.l_pde) << ',' << io::format_double(b.l_ic) << ','
       << io::format_double(b.l_bc) << ',' << io::format_double(b.total) << ','
       << io::format_double(e < trace.ms.size() ? trace.ms[e] : 0.0) << '\n';
  }
}

void write_trace_csv(const std::string& path, const TrainTrace& trace) {
  std::ostringstream os;
  write_trace_csv(os, trace);
  io::write_file(path, os.str());
}

TrainTrace read_trace_csv(std::istream& is) {
  io::LineReader reader(is);
  std::string line;
  if (!reader.next(line) || io::trim(line) != "epoch,l_pde,l_ic,l_bc,total,ms")
    throw ParseError("expected trace header epoch,l_pde,l_ic,l_bc,total,ms", reader.line_number());
  TrainTrace t;
  while (reader.next(line)) {
    if (io::trim(line).empty()) continue;
    const auto cols = io::split(line, ',');
    if (cols.size() != 6) throw ParseError("expected 6 columns", reader.line_number());
    try {
      if (io::parse_int(cols[0]) != static_cast<long long>(t.losses.size() + 1))
        throw ParseError("epochs must be consecutive from 1", reader.line_number());
      LossBreakdown b;
      b.l_pde = io::parse_double(cols[1]);
      b.l_ic = io::parse_double(cols[2]);
      b.l_bc = io::parse_double(cols[3]);
      b.total = io::parse_double(cols[4]);
      t.losses.push_back(b);
      t.ms.push_back(io::parse_double(cols[5]));
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), reader.line_number());
    }
  }
  t.evaluations.assign(t.losses.size(), 0);
  return t;
}

TrainTrace read_trace_csv(const std::string& path) {
  std::istringstream is(io::read_file(path));
  return read_trace_csv(is);
}

}  // namespace spikan
