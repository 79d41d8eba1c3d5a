#include "spikan/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spikan/errors.hpp"

namespace spikan {

SplineSpec::SplineSpec(int g, int k) : g_(g), k_(k) {
  if (g < 1) throw InvalidArgument("SplineSpec: grid size must be >= 1");
  if (k < 1 || k > kMaxSplineDegree)
    throw InvalidArgument("SplineSpec: degree must be in [1, " +
                          std::to_string(kMaxSplineDegree) + "]");
  // Clamped: end knots repeated k+1 times, g+1 uniform breakpoints.
  knots_.reserve(static_cast<std::size_t>(g + 2 * k + 1));
  for (int i = 0; i < k; ++i) knots_.push_back(-1.0);
  for (int i = 0; i <= g; ++i) knots_.push_back(-1.0 + 2.0 * i / g);
  knots_[static_cast<std::size_t>(k + g)] = 1.0;
  for (int i = 0; i < k; ++i) knots_.push_back(1.0);
}

int SplineSpec::span_index(double x) const noexcept {
  const double h = 2.0 / g_;
  int j = static_cast<int>(std::floor((x + 1.0) / h));
  j = std::clamp(j, 0, g_ - 1);
  int mu = k_ + j;
  // floor() may land one span off exactly at a breakpoint.
  while (mu > k_ && x < knots_[static_cast<std::size_t>(mu)]) --mu;
  while (mu < k_ + g_ - 1 && x >= knots_[static_cast<std::size_t>(mu + 1)]) ++mu;
  return mu;
}

double clamp_to_reference(double x) {
  if (!std::isfinite(x)) throw NumericalError("spline input is not finite (" + std::to_string(x) + ")");
  if (!(x >= -1.0 - kDomainTolerance && x <= 1.0 + kDomainTolerance))
    throw DomainError("spline input " + std::to_string(x) + " outside [-1, 1]");
  return std::clamp(x, -1.0, 1.0);
}

void local_basis(const SplineSpec& spec, double x, int max_order, LocalBasis& out) {
  x = clamp_to_reference(x);
  const int p = spec.degree();
  const int span = spec.span_index(x);
  const auto& U = spec.knots();
  constexpr int M = kMaxSplineDegree + 1;

  // Triangular table of basis values (upper) and knot differences (lower).
  std::array<std::array<double, M>, M> ndu{};
  std::array<double, M> left{}, right{};
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - U[static_cast<std::size_t>(span + 1 - j)];
    right[j] = U[static_cast<std::size_t>(span + j)] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }

  out.first = span - p;
  out.count = p + 1;
  for (auto& row : out.d) row.fill(0.0);
  for (int j = 0; j <= p; ++j) out.d[0][j] = ndu[j][p];

  const int n = std::min(max_order, p);
  std::array<std::array<double, M>, 2> a{};
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= n; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      out.d[static_cast<std::size_t>(k)][r] = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= n; ++k) {
    for (int j = 0; j <= p; ++j) out.d[static_cast<std::size_t>(k)][j] *= factor;
    factor *= (p - k);
  }
}

std::vector<double> basis_eval(const SplineSpec& spec, double x) {
  LocalBasis lb;
  local_basis(spec, x, 0, lb);
  std::vector<double> out(static_cast<std::size_t>(spec.basis_count()), 0.0);
  for (int c = 0; c < lb.count; ++c) out[static_cast<std::size_t>(lb.first + c)] = lb.d[0][c];
  return out;
}

BasisJet basis_jet(const SplineSpec& spec, double x) {
  LocalBasis lb;
  local_basis(spec, x, 2, lb);
  const auto n = static_cast<std::size_t>(spec.basis_count());
  BasisJet out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
               std::vector<double>(n, 0.0)};
  for (int c = 0; c < lb.count; ++c) {
    const auto i = static_cast<std::size_t>(lb.first + c);
    out.value[i] = lb.d[0][c];
    out.d1[i] = lb.d[1][c];
    out.d2[i] = lb.d[2][c];
  }
  return out;
}

}  // namespace spikan
