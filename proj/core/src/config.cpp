#include "spikan/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <type_traits>

#include "spikan/bspline.hpp"
#include "spikan/errors.hpp"
#include "spikan/io.hpp"
#include "spikan/physics.hpp"

namespace spikan {

namespace {

template <class T>
std::vector<T> parse_list(const std::string& s) {
  std::vector<T> out;
  for (const auto& tok : io::split(s, ',')) {
    const long long v = io::parse_int(tok);
    if (v < 0 && !std::is_signed_v<T>) throw InvalidArgument("negative value '" + tok + "'");
    out.push_back(static_cast<T>(v));
  }
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::vector<std::size_t> default_eval_points(const std::string& problem) {
  if (problem == "helmholtz2d") return {200, 200};
  if (problem == "cavity2d") return {101, 101};
  if (problem == "allencahn1d1t") return {201, 101};
  if (problem == "kleingordon2d1t") return {40, 40, 40};
  return {};
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

TrainConfig parse_config(const std::string& text) {
  std::vector<std::string> problems;
  std::map<std::string, std::pair<std::string, std::size_t>> kv;
  std::istringstream is(text);
  io::LineReader reader(is);
  std::string line;
  while (reader.next(line)) {
    auto t = io::trim(line);
    if (const auto hash = t.find('#'); hash != std::string_view::npos) t = io::trim(t.substr(0, hash));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      problems.push_back("line " + std::to_string(reader.line_number()) + ": expected 'key = value'");
      continue;
    }
    const std::string key(io::trim(t.substr(0, eq)));
    const std::string value(io::trim(t.substr(eq + 1)));
    if (kv.count(key)) problems.push_back("line " + std::to_string(reader.line_number()) + ": duplicate key '" + key + "'");
    kv[key] = {value, reader.line_number()};
  }

  TrainConfig c;
  bool points_broadcast = false;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"problem", [&](const std::string& v) { c.problem = v; }},
      {"method", [&](const std::string& v) { c.method = v; }},
      {"widths", [&](const std::string& v) { c.widths = parse_list<int>(v); }},
      {"rank", [&](const std::string& v) { c.rank = static_cast<int>(io::parse_int(v)); }},
      {"k", [&](const std::string& v) { c.k = static_cast<int>(io::parse_int(v)); }},
      {"g", [&](const std::string& v) { c.g = static_cast<int>(io::parse_int(v)); }},
      {"points",
       [&](const std::string& v) {
         c.points = parse_list<std::size_t>(v);
         points_broadcast = c.points.size() == 1;
       }},
      {"epochs", [&](const std::string& v) { c.epochs = static_cast<int>(io::parse_int(v)); }},
      {"lr", [&](const std::string& v) { c.lr = io::parse_double(v); }},
      {"beta1", [&](const std::string& v) { c.beta1 = io::parse_double(v); }},
      {"beta2", [&](const std::string& v) { c.beta2 = io::parse_double(v); }},
      {"eps", [&](const std::string& v) { c.eps = io::parse_double(v); }},
      {"clip_norm", [&](const std::string& v) { c.clip_norm = io::parse_double(v); }},
      {"seed",
       [&](const std::string& v) {
         const long long s = io::parse_int(v);
         if (s < 0) throw InvalidArgument("must be non-negative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"lambda_pde", [&](const std::string& v) { c.lambda_pde = io::parse_double(v); }},
      {"lambda_ic", [&](const std::string& v) { c.lambda_ic = io::parse_double(v); }},
      {"lambda_bc", [&](const std::string& v) { c.lambda_bc = io::parse_double(v); }},
      {"output", [&](const std::string& v) { c.output = v; }},
      {"checkpoint_every", [&](const std::string& v) { c.checkpoint_every = static_cast<int>(io::parse_int(v)); }},
      {"baseline", [&](const std::string& v) { c.baseline = v; }},
      {"threads", [&](const std::string& v) { c.threads = static_cast<int>(io::parse_int(v)); }},
      {"eval_points", [&](const std::string& v) { c.eval_points = parse_list<std::size_t>(v); }},
      {"reference_dir", [&](const std::string& v) { c.reference_dir = v; }},
      {"reference_nx", [&](const std::string& v) { c.reference_nx = static_cast<std::size_t>(io::parse_int(v)); }},
      {"reference_nt", [&](const std::string& v) { c.reference_nt = static_cast<std::size_t>(io::parse_int(v)); }},
      {"external_profiles", [&](const std::string& v) { c.external_profiles = v; }},
      {"warmup", [&](const std::string& v) { c.warmup = static_cast<std::size_t>(io::parse_int(v)); }},
  };
  for (const auto& [key, entry] : kv) {
    const auto it = setters.find(key);
    if (it == setters.end()) {
      problems.push_back("line " + std::to_string(entry.second) + ": unknown key '" + key + "'");
      continue;
    }
    try {
      it->second(entry.first);
    } catch (const InvalidArgument& e) {
      problems.push_back(key + ": cannot parse '" + entry.first + "' (" + e.what() + ")");
    }
  }
  for (const char* required : {"problem", "widths", "points", "epochs", "output"})
    if (!kv.count(required)) problems.push_back(std::string(required) + ": required key is missing");

  // Per-problem fill-ins.
  const auto& names = problem_names();
  if (std::find(names.begin(), names.end(), c.problem) != names.end()) {
    const std::size_t d = make_problem(c.problem)->dim();
    if (points_broadcast) c.points.assign(d, c.points.front());
    if (c.eval_points.empty()) c.eval_points = default_eval_points(c.problem);
    else if (c.eval_points.size() == 1) c.eval_points.assign(d, c.eval_points.front());
  }

  try {
    validate_config(c);
  } catch (const ValidationError& e) {
    for (const auto& p : e.problems())
      if (std::find(problems.begin(), problems.end(), p) == problems.end()) problems.push_back(p);
  }
  if (!problems.empty()) throw ValidationError(problems);
  return c;
}

TrainConfig load_config(const std::string& path) { return parse_config(io::read_file(path)); }

void validate_config(const TrainConfig& c) {
  std::vector<std::string> p;
  const auto& names = problem_names();
  std::unique_ptr<ProblemSpec> problem;
  if (std::find(names.begin(), names.end(), c.problem) == names.end()) {
    std::string valid;
    for (const auto& n : names) valid += (valid.empty() ? "" : ", ") + n;
    p.push_back("problem: unknown problem '" + c.problem + "' (valid: " + valid + ")");
  } else {
    problem = make_problem(c.problem);
  }
  const bool separable = c.method == "separable";
  if (!separable && c.method != "dense") p.push_back("method: must be 'separable' or 'dense', got '" + c.method + "'");

  if (c.widths.size() < 2) p.push_back("widths: need at least an input and an output width");
  if (std::any_of(c.widths.begin(), c.widths.end(), [](int w) { return w < 1; }))
    p.push_back("widths: every width must be at least 1");
  if (separable) {
    if (c.rank < 1) p.push_back("rank: must be at least 1 for the separable method");
    if (!c.widths.empty() && c.widths.front() != 1) p.push_back("widths: separable networks take one input (widths[0] = 1)");
    if (problem && !c.widths.empty() && c.rank >= 1 && c.widths.back() != c.rank * problem->fields())
      p.push_back("widths: last width must equal rank*fields = " + std::to_string(c.rank * problem->fields()));
  } else if (problem && c.widths.size() >= 2) {
    if (c.widths.front() != static_cast<int>(problem->dim()))
      p.push_back("widths: dense network input width must equal the dimension " + std::to_string(problem->dim()));
    if (c.widths.back() != problem->fields())
      p.push_back("widths: dense network output width must equal the field count " + std::to_string(problem->fields()));
  }
  if (c.k < 1 || c.k > kMaxSplineDegree)
    p.push_back("k: spline degree must be in [1, " + std::to_string(kMaxSplineDegree) + "]");
  if (c.g < 1) p.push_back("g: grid size must be at least 1");
  if (problem) {
    const std::size_t d = problem->dim();
    if (c.points.size() != d) {
      p.push_back("points: need " + std::to_string(d) + " per-axis counts (or one to use on every axis)");
    } else {
      for (std::size_t a = 0; a < d; ++a) {
        const std::size_t min_n = static_cast<int>(a) == problem->time_axis() ? 2 : 3;
        if (c.points[a] < min_n)
          p.push_back("points: axis " + problem->axis_names()[a] + " needs at least " + std::to_string(min_n));
      }
    }
    if (c.eval_points.size() != d || std::any_of(c.eval_points.begin(), c.eval_points.end(), [](std::size_t n) { return n < 2; }))
      p.push_back("eval_points: need " + std::to_string(d) + " per-axis counts of at least 2");
  }
  if (c.epochs < 1) p.push_back("epochs: must be at least 1");
  if (!finite_nonneg(c.lr)) p.push_back("lr: must be finite and non-negative");
  if (!(c.beta1 >= 0.0 && c.beta1 < 1.0)) p.push_back("beta1: must be in [0, 1)");
  if (!(c.beta2 >= 0.0 && c.beta2 < 1.0)) p.push_back("beta2: must be in [0, 1)");
  if (!(c.eps > 0.0 && std::isfinite(c.eps))) p.push_back("eps: must be positive");
  if (!finite_nonneg(c.clip_norm)) p.push_back("clip_norm: must be finite and non-negative (0 disables)");
  if (!finite_nonneg(c.lambda_pde)) p.push_back("lambda_pde: must be finite and non-negative");
  if (!finite_nonneg(c.lambda_ic)) p.push_back("lambda_ic: must be finite and non-negative");
  if (!finite_nonneg(c.lambda_bc)) p.push_back("lambda_bc: must be finite and non-negative");
  if (c.output.empty()) p.push_back("output: run directory must be given");
  if (c.checkpoint_every < 0) p.push_back("checkpoint_every: must be non-negative (0 = final only)");
  if (c.threads < 1) p.push_back("threads: must be at least 1");
  if (c.reference_nx < 64 || c.reference_nx % 2 != 0) p.push_back("reference_nx: must be even and at least 64");
  if (c.reference_nt < 100) p.push_back("reference_nt: must be at least 100");
  if (!p.empty()) throw ValidationError(p);
}

std::string config_to_string(const TrainConfig& c) {
  std::ostringstream os;
  os << "problem = " << c.problem << '\n'
     << "method = " << c.method << '\n'
     << "widths = " << join(c.widths) << '\n'
     << "rank = " << c.rank << '\n'
     << "k = " << c.k << '\n'
     << "g = " << c.g << '\n'
     << "points = " << join(c.points) << '\n'
     << "epochs = " << c.epochs << '\n'
     << "lr = " << io::format_double(c.lr) << '\n'
     << "beta1 = " << io::format_double(c.beta1) << '\n'
     << "beta2 = " << io::format_double(c.beta2) << '\n'
     << "eps = " << io::format_double(c.eps) << '\n'
     << "clip_norm = " << io::format_double(c.clip_norm) << '\n'
     << "seed = " << c.seed << '\n'
     << "lambda_pde = " << io::format_double(c.lambda_pde) << '\n'
     << "lambda_ic = " << io::format_double(c.lambda_ic) << '\n'
     << "lambda_bc = " << io::format_double(c.lambda_bc) << '\n'
     << "output = " << c.output << '\n'
     << "checkpoint_every = " << c.checkpoint_every << '\n';
  if (!c.baseline.empty()) os << "baseline = " << c.baseline << '\n';
  os << "threads = " << c.threads << '\n'
     << "eval_points = " << join(c.eval_points) << '\n'
     << "reference_dir = " << c.reference_dir << '\n'
     << "reference_nx = " << c.reference_nx << '\n'
     << "reference_nt = " << c.reference_nt << '\n';
  if (!c.external_profiles.empty()) os << "external_profiles = " << c.external_profiles << '\n';
  os << "warmup = " << c.warmup << '\n';
  return os.str();
}

}  // namespace spikan
