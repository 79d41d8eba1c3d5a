#pragma once

// Experiment configuration: flat "key = value" text, one entry per line,
// '#' starts a comment. Every key has a typed validator; parse_config reports
// all violations at once through ValidationError.

#include <cstdint>
#include <string>
#include <vector>

#include "spikan/loss.hpp"
#include "spikan/optim.hpp"

namespace spikan {

struct TrainConfig {
  std::string problem;
  std::string method = "separable";  // separable | dense
  std::vector<int> widths;            // separable: [1, ..., rank*fields]; dense: [d, ..., fields]
  int rank = 0;                       // separable only
  int k = 3;                          // spline degree
  int g = 3;                          // spline grid intervals
  std::vector<std::size_t> points;    // collocation points per axis
  int epochs = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 0.0;
  std::uint64_t seed = 0;
  double lambda_pde = 1.0;
  double lambda_ic = 1.0;
  double lambda_bc = 1.0;
  std::string output;
  int checkpoint_every = 0;
  std::string baseline;               // run directory of a baseline run, optional
  int threads = 1;
  std::vector<std::size_t> eval_points;  // evaluation grid per axis
  std::string reference_dir = "references";
  std::size_t reference_nx = 320;
  std::size_t reference_nt = 1000;
  std::string external_profiles;      // cavity centerline CSV, optional
  std::size_t warmup = 10;

  LossWeights weights() const { return {lambda_pde, lambda_ic, lambda_bc}; }
  AdamConfig adam() const { return {lr, beta1, beta2, eps, clip_norm}; }
};

// Parses and validates. Keys that are absent take the documented defaults;
// per-problem defaults (eval_points) are filled in once the problem is known.
TrainConfig parse_config(const std::string& text);
TrainConfig load_config(const std::string& path);

// Throws ValidationError listing every violated field.
void validate_config(const TrainConfig& c);

// Every key with the value actually used, in a fixed order; parse_config of
// the result gives back the same configuration.
std::string config_to_string(const TrainConfig& c);

}  // namespace spikan
