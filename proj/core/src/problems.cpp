#include <algorithm>
#include <cmath>
#include <numbers>

#include "spikan/errors.hpp"
#include "spikan/physics.hpp"

namespace spikan {

namespace {
constexpr double kPi = std::numbers::pi;
}

double helmholtz::exact(double x, double y) { return std::sin(kA1 * kPi * x) * std::sin(kA2 * kPi * y); }

double helmholtz::forcing(double x, double y) {
  const double s = std::sin(kA1 * kPi * x) * std::sin(kA2 * kPi * y);
  return -(kA1 * kPi) * (kA1 * kPi) * s + s - (kA2 * kPi) * (kA2 * kPi) * s + kKappa * kKappa * s;
}

double klein_gordon::exact(double x, double y, double t) { return (x + y) * std::cos(t) + x * y * std::sin(t); }

double klein_gordon::forcing(double x, double y, double t) {
  const double u = exact(x, y, t);
  return u * u - u;
}

double allen_cahn::initial(double x) { return x * x * std::cos(kPi * x); }

void ProblemSpec::exact(std::span<const double>, std::span<double>) const {
  throw Unsupported(name() + " has no analytic solution");
}

std::vector<int> ProblemSpec::required_orders() const {
  std::vector<int> o(dim(), 0);
  for (const auto& k : pde_terms())
    if (k.order > 0) o[static_cast<std::size_t>(k.axis)] = std::max(o[static_cast<std::size_t>(k.axis)], k.order);
  return o;
}

std::vector<AxisMap> ProblemSpec::axis_maps() const {
  std::vector<AxisMap> m;
  for (const auto& iv : domain()) m.push_back(AxisMap::from_interval(iv.lo, iv.hi));
  return m;
}

namespace {

class Helmholtz2D final : public ProblemSpec {
 public:
  std::string name() const override { return "helmholtz2d"; }
  std::vector<std::string> axis_names() const override { return {"x", "y"}; }
  std::vector<std::string> field_names() const override { return {"u"}; }
  std::vector<Interval> domain() const override { return {{-1.0, 1.0}, {-1.0, 1.0}}; }
  std::vector<DerivKey> pde_terms() const override { return {{0, -1, 0}, {0, 0, 2}, {0, 1, 2}}; }

  void forcing(std::span<const double> x, std::span<double> f) const override {
    f[0] = helmholtz::forcing(x[0], x[1]);
  }
  void residual(std::span<const double> d, std::span<const double> f, std::span<double> r) const override {
    constexpr double k2 = helmholtz::kKappa * helmholtz::kKappa;
    r[0] = d[1] + d[2] + k2 * d[0] - f[0];
  }
  void residual_vjp(std::span<const double>, std::span<const double> rb, std::span<double> db) const override {
    db[0] = helmholtz::kKappa * helmholtz::kKappa * rb[0];
    db[1] = rb[0];
    db[2] = rb[0];
  }

  std::vector<Face> faces() const override {
    return {{"x_lo", 0, false, FaceKind::Boundary, {0}},
            {"x_hi", 0, true, FaceKind::Boundary, {0}},
            {"y_lo", 1, false, FaceKind::Boundary, {0}},
            {"y_hi", 1, true, FaceKind::Boundary, {0}}};
  }
  void face_target(const Face&, std::span<const double>, std::span<double> out) const override { out[0] = 0.0; }

  bool has_exact() const override { return true; }
  void exact(std::span<const double> x, std::span<double> out) const override {
    out[0] = helmholtz::exact(x[0], x[1]);
  }
};

// Steady incompressible Navier-Stokes, fields (u, v, p).
class Cavity2D final : public ProblemSpec {
 public:
  enum Term { U, UX, UY, UXX, UYY, V, VX, VY, VXX, VYY, PX, PY };

  std::string name() const override { return "cavity2d"; }
  std::vector<std::string> axis_names() const override { return {"x", "y"}; }
  std::vector<std::string> field_names() const override { return {"u", "v", "p"}; }
  std::vector<Interval> domain() const override { return {{0.0, 1.0}, {0.0, 1.0}}; }
  std::vector<DerivKey> pde_terms() const override {
    return {{0, -1, 0}, {0, 0, 1}, {0, 1, 1}, {0, 0, 2}, {0, 1, 2}, {1, -1, 0},
            {1, 0, 1},  {1, 1, 1}, {1, 0, 2}, {1, 1, 2}, {2, 0, 1}, {2, 1, 1}};
  }
  int equations() const override { return 3; }
  void forcing(std::span<const double>, std::span<double> f) const override { std::fill(f.begin(), f.end(), 0.0); }

  void residual(std::span<const double> d, std::span<const double> f, std::span<double> r) const override {
    const double nu = 1.0 / cavity::kReynolds;
    r[0] = d[UX] + d[VY] - f[0];
    r[1] = d[U] * d[UX] + d[V] * d[UY] + d[PX] - nu * (d[UXX] + d[UYY]) - f[1];
    r[2] = d[U] * d[VX] + d[V] * d[VY] + d[PY] - nu * (d[VXX] + d[VYY]) - f[2];
  }
  void residual_vjp(std::span<const double> d, std::span<const double> rb, std::span<double> db) const override {
    const double nu = 1.0 / cavity::kReynolds;
    db[U] = rb[1] * d[UX] + rb[2] * d[VX];
    db[UX] = rb[0] + rb[1] * d[U];
    db[UY] = rb[1] * d[V];
    db[UXX] = -nu * rb[1];
    db[UYY] = -nu * rb[1];
    db[V] = rb[1] * d[UY] + rb[2] * d[VY];
    db[VX] = rb[2] * d[U];
    db[VY] = rb[0] + rb[2] * d[V];
    db[VXX] = -nu * rb[2];
    db[VYY] = -nu * rb[2];
    db[PX] = rb[1];
    db[PY] = rb[2];
  }

  std::vector<Face> faces() const override {
    return {{"lid", 1, true, FaceKind::Boundary, {0, 1}},
            {"bottom", 1, false, FaceKind::Boundary, {0, 1}},
            {"left", 0, false, FaceKind::Boundary, {0, 1}},
            {"right", 0, true, FaceKind::Boundary, {0, 1}}};
  }
  void face_target(const Face& face, std::span<const double>, std::span<double> out) const override {
    out[0] = face.name == "lid" ? 1.0 : 0.0;
    out[1] = 0.0;
  }
};

class AllenCahn1D1T final : public ProblemSpec {
 public:
  std::string name() const override { return "allencahn1d1t"; }
  std::vector<std::string> axis_names() const override { return {"x", "t"}; }
  std::vector<std::string> field_names() const override { return {"u"}; }
  std::vector<Interval> domain() const override { return {{-1.0, 1.0}, {0.0, 1.0}}; }
  int time_axis() const override { return 1; }
  std::vector<DerivKey> pde_terms() const override { return {{0, -1, 0}, {0, 1, 1}, {0, 0, 2}}; }

  void forcing(std::span<const double>, std::span<double> f) const override { f[0] = 0.0; }
  void residual(std::span<const double> d, std::span<const double> f, std::span<double> r) const override {
    const double u = d[0];
    r[0] = d[1] - allen_cahn::kDiffusion * d[2] + 5.0 * (u * u * u - u) - f[0];
  }
  void residual_vjp(std::span<const double> d, std::span<const double> rb, std::span<double> db) const override {
    const double u = d[0];
    db[0] = rb[0] * 5.0 * (3.0 * u * u - 1.0);
    db[1] = rb[0];
    db[2] = -allen_cahn::kDiffusion * rb[0];
  }

  std::vector<Face> faces() const override {
    return {{"ic", 1, false, FaceKind::Initial, {0}},
            {"x_lo", 0, false, FaceKind::Boundary, {0}},
            {"x_hi", 0, true, FaceKind::Boundary, {0}}};
  }
  void face_target(const Face& face, std::span<const double> x, std::span<double> out) const override {
    out[0] = face.kind == FaceKind::Initial ? allen_cahn::initial(x[0]) : -1.0;
  }
};

class KleinGordon2D1T final : public ProblemSpec {
 public:
  std::string name() const override { return "kleingordon2d1t"; }
  std::vector<std::string> axis_names() const override { return {"x", "y", "t"}; }
  std::vector<std::string> field_names() const override { return {"u"}; }
  std::vector<Interval> domain() const override { return {{0.0, 1.0}, {0.0, 1.0}, {0.0, 10.0}}; }
  int time_axis() const override { return 2; }
  std::vector<DerivKey> pde_terms() const override { return {{0, -1, 0}, {0, 2, 2}, {0, 0, 2}, {0, 1, 2}}; }

  void forcing(std::span<const double> x, std::span<double> f) const override {
    f[0] = klein_gordon::forcing(x[0], x[1], x[2]);
  }
  void residual(std::span<const double> d, std::span<const double> f, std::span<double> r) const override {
    r[0] = d[1] - (d[2] + d[3]) + d[0] * d[0] - f[0];
  }
  void residual_vjp(std::span<const double> d, std::span<const double> rb, std::span<double> db) const override {
    db[0] = 2.0 * d[0] * rb[0];
    db[1] = rb[0];
    db[2] = -rb[0];
    db[3] = -rb[0];
  }

  std::vector<Face> faces() const override {
    return {{"ic", 2, false, FaceKind::Initial, {0}},
            {"x_lo", 0, false, FaceKind::Boundary, {0}},
            {"x_hi", 0, true, FaceKind::Boundary, {0}},
            {"y_lo", 1, false, FaceKind::Boundary, {0}},
            {"y_hi", 1, true, FaceKind::Boundary, {0}}};
  }
  void face_target(const Face& face, std::span<const double> x, std::span<double> out) const override {
    out[0] = face.kind == FaceKind::Initial ? x[0] + x[1] : klein_gordon::exact(x[0], x[1], x[2]);
  }

  bool has_exact() const override { return true; }
  void exact(std::span<const double> x, std::span<double> out) const override {
    out[0] = klein_gordon::exact(x[0], x[1], x[2]);
  }
};

}  // namespace

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {"helmholtz2d", "cavity2d", "allencahn1d1t", "kleingordon2d1t"};
  return names;
}

std::unique_ptr<ProblemSpec> make_problem(std::string_view name) {
  if (name == "helmholtz2d") return std::make_unique<Helmholtz2D>();
  if (name == "cavity2d") return std::make_unique<Cavity2D>();
  if (name == "allencahn1d1t") return std::make_unique<AllenCahn1D1T>();
  if (name == "kleingordon2d1t") return std::make_unique<KleinGordon2D1T>();
  std::string valid;
  for (const auto& n : problem_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw InvalidArgument("unknown problem '" + std::string(name) + "' (valid: " + valid + ")");
}

bool point_on_face(const ProblemSpec& problem, const Face& face, std::span<const double> x, double tol) {
  const auto dom = problem.domain();
  if (x.size() != dom.size()) return false;
  for (std::size_t a = 0; a < dom.size(); ++a)
    if (x[a] < dom[a].lo - tol || x[a] > dom[a].hi + tol) return false;
  const auto& iv = dom[static_cast<std::size_t>(face.axis)];
  const double target = face.upper ? iv.hi : iv.lo;
  return std::abs(x[static_cast<std::size_t>(face.axis)] - target) <= tol;
}

CavityResiduals cavity_residuals(const CavityFields& f, double reynolds) {
  const double nu = 1.0 / reynolds;
  CavityResiduals r{DenseField(f.u.shape), DenseField(f.u.shape), DenseField(f.u.shape)};
  for (std::size_t i = 0; i < f.u.size(); ++i) {
    const double u = f.u.values[i], v = f.v.values[i];
    r.continuity.values[i] = f.u_x.values[i] + f.v_y.values[i];
    r.momentum_x.values[i] = u * f.u_x.values[i] + v * f.u_y.values[i] + f.p_x.values[i] -
                             nu * (f.u_xx.values[i] + f.u_yy.values[i]);
    r.momentum_y.values[i] = u * f.v_x.values[i] + v * f.v_y.values[i] + f.p_y.values[i] -
                             nu * (f.v_xx.values[i] + f.v_yy.values[i]);
  }
  return r;
}

DenseField allen_cahn_residual(const DenseField& u, const DenseField& u_t, const DenseField& u_xx, double diffusion) {
  if (u.shape != u_t.shape || u.shape != u_xx.shape) throw InvalidArgument("allen_cahn_residual: shape mismatch");
  DenseField r(u.shape);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = u.values[i];
    r.values[i] = u_t.values[i] - diffusion * u_xx.values[i] + 5.0 * (x * x * x - x);
  }
  return r;
}

DenseField normalize_pressure(const DenseField& p) {
  DenseField out = p;
  if (p.size() == 0) return out;
  double mean = 0.0;
  for (double v : p.values) mean += v;
  mean /= static_cast<double>(p.size());
  double peak = 0.0;
  for (double& v : out.values) {
    v -= mean;
    peak = std::max(peak, std::abs(v));
  }
  if (peak > 0.0)
    for (double& v : out.values) v /= peak;
  return out;
}

}  // namespace spikan
