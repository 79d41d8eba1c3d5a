#pragma once

// Error fields, time-resolved errors, speedups and the run report.

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spikan/tensorgrid.hpp"

namespace spikan {

// |pred - ref| elementwise.
DenseField error_field(const DenseField& pred, const DenseField& ref);

// Mean over the time axis of |pred - ref|; the result drops that axis.
DenseField time_mean_abs_error(const DenseField& pred, const DenseField& ref, std::size_t time_axis);

// relative_l2 of every time slice.
std::vector<double> l2_over_time(const DenseField& pred, const DenseField& ref, std::size_t time_axis);

// Slice of a field at index `index` along `axis` (the axis is dropped).
DenseField slice(const DenseField& f, std::size_t axis, std::size_t index);

double speedup(double baseline_ms, double candidate_ms);

// Ordered key = value record. Numbers are stored in shortest round-trip form,
// so write then read reproduces every entry bitwise.
class RunReport {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
  void set(const std::string& key, const std::vector<double>& values);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  double number(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

  // Throws NumericalError naming the first entry that holds a non-finite number.
  void check_finite() const;

  void write(std::ostream& os) const;
  void write(const std::string& path) const;
  static RunReport read(std::istream& is);
  static RunReport read(const std::string& path);

  bool operator==(const RunReport& other) const = default;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace spikan
