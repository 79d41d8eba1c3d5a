#include "spikan/metrics.hpp"

#include <cmath>
#include <sstream>

#include "spikan/errors.hpp"
#include "spikan/io.hpp"
#include "spikan/reference.hpp"

namespace spikan {

namespace {

void require_same(const DenseField& a, const DenseField& b, const char* what) {
  if (a.shape != b.shape || a.values.size() != b.values.size())
    throw InvalidArgument(std::string(what) + ": shapes differ");
}

// Strides of a row-major shape split around `axis`: outer, extent, inner.
struct Split {
  std::size_t outer = 1, n = 1, inner = 1;
};

Split split_axis(const std::vector<std::size_t>& shape, std::size_t axis) {
  if (axis >= shape.size()) throw InvalidArgument("axis " + std::to_string(axis) + " out of range");
  Split s;
  for (std::size_t a = 0; a < axis; ++a) s.outer *= shape[a];
  s.n = shape[axis];
  for (std::size_t a = axis + 1; a < shape.size(); ++a) s.inner *= shape[a];
  return s;
}

std::vector<std::size_t> drop_axis(std::vector<std::size_t> shape, std::size_t axis) {
  shape.erase(shape.begin() + static_cast<std::ptrdiff_t>(axis));
  return shape;
}

bool is_number(const std::string& s, double& out) {
  try {
    out = io::parse_double(s);
    return true;
  } catch (const InvalidArgument&) {
    return false;
  }
}

}  // namespace

DenseField error_field(const DenseField& pred, const DenseField& ref) {
  require_same(pred, ref, "error_field");
  DenseField out(ref.shape);
  for (std::size_t i = 0; i < ref.size(); ++i) out.values[i] = std::abs(pred.values[i] - ref.values[i]);
  return out;
}

DenseField slice(const DenseField& f, std::size_t axis, std::size_t index) {
  const Split s = split_axis(f.shape, axis);
  if (index >= s.n) throw InvalidArgument("slice index out of range");
  DenseField out(drop_axis(f.shape, axis));
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t i = 0; i < s.inner; ++i) out.values[o * s.inner + i] = f.values[(o * s.n + index) * s.inner + i];
  return out;
}

DenseField time_mean_abs_error(const DenseField& pred, const DenseField& ref, std::size_t time_axis) {
  require_same(pred, ref, "time_mean_abs_error");
  const Split s = split_axis(ref.shape, time_axis);
  DenseField out(drop_axis(ref.shape, time_axis));
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t i = 0; i < s.inner; ++i) {
      double acc = 0.0;
      for (std::size_t t = 0; t < s.n; ++t) {
        const std::size_t k = (o * s.n + t) * s.inner + i;
        acc += std::abs(pred.values[k] - ref.values[k]);
      }
      out.values[o * s.inner + i] = acc / static_cast<double>(s.n);
    }
  return out;
}

std::vector<double> l2_over_time(const DenseField& pred, const DenseField& ref, std::size_t time_axis) {
  require_same(pred, ref, "l2_over_time");
  const Split s = split_axis(ref.shape, time_axis);
  std::vector<double> out(s.n);
  for (std::size_t t = 0; t < s.n; ++t)
    out[t] = relative_l2(slice(pred, time_axis, t), slice(ref, time_axis, t));
  return out;
}

double speedup(double baseline_ms, double candidate_ms) {
  if (!(baseline_ms > 0.0) || !(candidate_ms > 0.0)) throw InvalidArgument("speedup: times must be positive");
  return baseline_ms / candidate_ms;
}

void RunReport::set(const std::string& key, const std::string& value) {
  if (key.empty() || key.find_first_of(" \t=\n") != std::string::npos)
    throw InvalidArgument("report key '" + key + "' must be non-empty without spaces or '='");
  if (value.find('\n') != std::string::npos) throw InvalidArgument("report value for '" + key + "' spans lines");
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = value;
      return;
    }
  entries_.emplace_back(key, value);
}

void RunReport::set(const std::string& key, double value) { set(key, io::format_double(value)); }

void RunReport::set(const std::string& key, long long value) { set(key, std::to_string(value)); }

void RunReport::set(const std::string& key, const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + io::format_double(values[i]);
  set(key, s);
}

bool RunReport::has(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.first == key) return true;
  return false;
}

const std::string& RunReport::get(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.first == key) return e.second;
  throw InvalidArgument("report has no entry '" + key + "'");
}

double RunReport::number(const std::string& key) const { return io::parse_double(get(key)); }

std::vector<double> RunReport::numbers(const std::string& key) const {
  std::vector<double> out;
  const std::string& v = get(key);
  if (v.empty()) return out;
  for (const auto& tok : io::split(v, ',')) out.push_back(io::parse_double(tok));
  return out;
}

void RunReport::check_finite() const {
  for (const auto& [k, v] : entries_) {
    for (const auto& tok : io::split(v, ',')) {
      double x = 0.0;
      if (tok == "nan" || tok == "-nan" || tok == "inf" || tok == "-inf" || (is_number(tok, x) && !std::isfinite(x)))
        throw NumericalError("report entry '" + k + "' is not finite");
    }
  }
}

void RunReport::write(std::ostream& os) const {
  for (const auto& [k, v] : entries_) os << k << " = " << v << '\n';
}

void RunReport::write(const std::string& path) const {
  std::ostringstream os;
  write(os);
  io::write_file(path, os.str());
}

RunReport RunReport::read(std::istream& is) {
  io::LineReader r(is);
  std::string line;
  RunReport rep;
  while (r.next(line)) {
    const auto t = io::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", r.line_number());
    const std::string key(io::trim(std::string_view(line).substr(0, eq)));
    const std::string value(io::trim(std::string_view(line).substr(eq + 3)));
    if (rep.has(key)) throw ParseError("duplicate key '" + key + "'", r.line_number());
    try {
      rep.set(key, value);
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), r.line_number());
    }
  }
  return rep;
}

RunReport RunReport::read(const std::string& path) {
  std::istringstream is(io::read_file(path));
  return read(is);
}

}  // namespace spikan
