#pragma once

// Benchmark initial-boundary value problems and the physics-informed loss.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spikan/full_model.hpp"
#include "spikan/loss.hpp"
#include "spikan/sep_model.hpp"
#include "spikan/tensorgrid.hpp"

namespace spikan {

namespace helmholtz {
inline constexpr double kA1 = 1.0;
inline constexpr double kA2 = 4.0;
inline constexpr double kKappa = 1.0;
double exact(double x, double y);
// Written as the four separate terms of the manufactured forcing.
double forcing(double x, double y);
}  // namespace helmholtz

namespace klein_gordon {
double exact(double x, double y, double t);
double forcing(double x, double y, double t);
}  // namespace klein_gordon

namespace allen_cahn {
inline constexpr double kDiffusion = 1e-4;
double initial(double x);
}  // namespace allen_cahn

namespace cavity {
inline constexpr double kReynolds = 100.0;
}

// A derivative the PDE residual needs: d^order u_field / dx_axis^order.
// order 0 is the field value (axis is ignored).
struct DerivKey {
  int field = 0;
  int axis = -1;
  int order = 0;
};

enum class FaceKind { Boundary, Initial };

// A face of the domain box: the axis held fixed, which end, and the output
// fields it constrains.
struct Face {
  std::string name;
  int axis = 0;
  bool upper = false;
  FaceKind kind = FaceKind::Boundary;
  std::vector<int> fields;
};

class ProblemSpec {
 public:
  virtual ~ProblemSpec() = default;

  virtual std::string name() const = 0;
  virtual std::vector<std::string> axis_names() const = 0;
  virtual std::vector<std::string> field_names() const = 0;
  virtual std::vector<Interval> domain() const = 0;
  // Index of the time axis, or -1 for steady problems.
  virtual int time_axis() const { return -1; }

  // Derivatives consumed by residual(), in the order of its `d` argument.
  virtual std::vector<DerivKey> pde_terms() const = 0;
  virtual int equations() const { return 1; }
  virtual void forcing(std::span<const double> x, std::span<double> f) const = 0;
  virtual void residual(std::span<const double> d, std::span<const double> f, std::span<double> r) const = 0;
  // d_bar = (dr/dd)^T r_bar at the point described by d.
  virtual void residual_vjp(std::span<const double> d, std::span<const double> r_bar,
                            std::span<double> d_bar) const = 0;

  virtual std::vector<Face> faces() const = 0;
  // Target values of face.fields at physical point x.
  virtual void face_target(const Face& face, std::span<const double> x, std::span<double> out) const = 0;

  virtual bool has_exact() const { return false; }
  virtual void exact(std::span<const double> x, std::span<double> out) const;

  std::size_t dim() const { return domain().size(); }
  int fields() const { return static_cast<int>(field_names().size()); }
  // Highest derivative order needed along each axis.
  std::vector<int> required_orders() const;
  std::vector<AxisMap> axis_maps() const;
};

std::unique_ptr<ProblemSpec> make_problem(std::string_view name);
const std::vector<std::string>& problem_names();

bool point_on_face(const ProblemSpec& problem, const Face& face, std::span<const double> x, double tol = 1e-12);

// Equidistant closed grid split into an open interior (PDE term), boundary
// faces (BC term) and the t = 0 slice (IC term).
struct FaceGrid {
  Face face;
  std::vector<AxisRange> ranges;
  std::size_t count = 0;
};

struct Collocation {
  FactorGrid grid;
  std::vector<AxisRange> interior;
  std::size_t interior_count = 0;
  std::vector<FaceGrid> faces;

  std::size_t ic_count() const;
  std::size_t bc_count() const;
};

Collocation make_collocation(const ProblemSpec& problem, std::span<const std::size_t> points_per_axis);

// Loss evaluation for the separable model. Forcing and face targets are
// cached at construction.
class SeparableLoss {
 public:
  SeparableLoss(const ProblemSpec& problem, Collocation colloc);

  LossResult operator()(const SeparableModel& model, const LossWeights& weights, bool want_grad) const;
  const Collocation& collocation() const noexcept { return colloc_; }

 private:
  const ProblemSpec& problem_;
  Collocation colloc_;
  std::vector<DerivKey> terms_;
  std::vector<double> forcing_;
  std::vector<std::vector<double>> targets_;  // per face, [point][constrained field]
};

// Loss evaluation for the dense baseline on the same collocation layout.
class DenseLoss {
 public:
  DenseLoss(const ProblemSpec& problem, Collocation colloc, int threads = 1);

  LossResult operator()(const DenseModel& model, const LossWeights& weights, bool want_grad) const;
  const Collocation& collocation() const noexcept { return colloc_; }

 private:
  const ProblemSpec& problem_;
  Collocation colloc_;
  int threads_;
  std::vector<DerivKey> terms_;
  std::vector<int> directions_;  // axes along which jets are needed
  PointCloud interior_;
  std::vector<double> forcing_;
  std::vector<PointCloud> face_points_;
  std::vector<std::vector<double>> targets_;
};

LossResult total_loss(const SeparableModel& model, const ProblemSpec& problem, const Collocation& colloc,
                      const LossWeights& weights, bool want_grad = true);
LossResult total_loss(const DenseModel& model, const ProblemSpec& problem, const Collocation& colloc,
                      const LossWeights& weights, bool want_grad = true);

template <class Model>
double loss_pde(const Model& model, const ProblemSpec& problem, const Collocation& colloc) {
  return total_loss(model, problem, colloc, {1.0, 0.0, 0.0}, false).loss.l_pde;
}
template <class Model>
double loss_ic(const Model& model, const ProblemSpec& problem, const Collocation& colloc) {
  return total_loss(model, problem, colloc, {0.0, 1.0, 0.0}, false).loss.l_ic;
}
template <class Model>
double loss_bc(const Model& model, const ProblemSpec& problem, const Collocation& colloc) {
  return total_loss(model, problem, colloc, {0.0, 0.0, 1.0}, false).loss.l_bc;
}

// Field-level residuals on assembled derivative fields (used for reporting).
struct CavityFields {
  DenseField u, u_x, u_y, u_xx, u_yy;
  DenseField v, v_x, v_y, v_xx, v_yy;
  DenseField p_x, p_y;
};

struct CavityResiduals {
  DenseField continuity, momentum_x, momentum_y;
};

CavityResiduals cavity_residuals(const CavityFields& f, double reynolds = cavity::kReynolds);

DenseField allen_cahn_residual(const DenseField& u, const DenseField& u_t, const DenseField& u_xx,
                               double diffusion = allen_cahn::kDiffusion);

// Gauge for incompressible pressure: subtract the mean, divide by max |.|.
DenseField normalize_pressure(const DenseField& p);

}  // namespace spikan
