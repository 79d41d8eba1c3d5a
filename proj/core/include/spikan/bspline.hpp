#pragma once

// Uniform clamped B-spline bases on the reference interval [-1, 1].

#include <array>
#include <span>
#include <vector>

namespace spikan {

inline constexpr int kMaxSplineDegree = 7;
inline constexpr double kDomainTolerance = 1e-12;

class SplineSpec {
 public:
  // g: number of intervals on [-1, 1]; k: polynomial degree.
  SplineSpec(int g, int k);

  int grid_size() const noexcept { return g_; }
  int degree() const noexcept { return k_; }
  int basis_count() const noexcept { return g_ + k_; }
  const std::vector<double>& knots() const noexcept { return knots_; }

  // Index of the knot span containing x (x already clamped to [-1, 1]).
  int span_index(double x) const noexcept;

  friend bool operator==(const SplineSpec& a, const SplineSpec& b) noexcept {
    return a.g_ == b.g_ && a.k_ == b.k_;
  }

 private:
  int g_;
  int k_;
  std::vector<double> knots_;
};

// The k+1 basis functions that are nonzero at a point, with derivatives.
// d[n][c] is the n-th derivative of basis function `first + c`.
struct LocalBasis {
  int first = 0;
  int count = 0;  // degree + 1
  std::array<std::array<double, kMaxSplineDegree + 1>, 4> d{};
};

// Validates x against [-1 - tol, 1 + tol] and clamps it onto [-1, 1]. A
// non-finite x raises NumericalError, any other x outside the band DomainError.
double clamp_to_reference(double x);

// Fills `out` with derivatives of orders 0..max_order (max_order <= 3) at x.
void local_basis(const SplineSpec& spec, double x, int max_order, LocalBasis& out);

std::vector<double> basis_eval(const SplineSpec& spec, double x);

struct BasisJet {
  std::vector<double> value;
  std::vector<double> d1;
  std::vector<double> d2;
};

BasisJet basis_jet(const SplineSpec& spec, double x);

}  // namespace spikan
