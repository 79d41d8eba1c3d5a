#include "spikan/reference.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>

#include "spikan/errors.hpp"
#include "spikan/io.hpp"

namespace spikan {

namespace {

constexpr double kPi = std::numbers::pi;

// Real-to-complex and complex-to-real transforms of one fixed length.
class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        real_(fftw_alloc_real(n)),
        spec_(fftw_alloc_complex(n / 2 + 1)),
        fwd_(fftw_plan_dft_r2c_1d(static_cast<int>(n), real_, spec_, FFTW_ESTIMATE)),
        inv_(fftw_plan_dft_c2r_1d(static_cast<int>(n), spec_, real_, FFTW_ESTIMATE)) {
    if (!real_ || !spec_ || !fwd_ || !inv_) throw Error("FFTW plan creation failed");
  }
  ~RealFft() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(real_);
    fftw_free(spec_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::size_t modes() const noexcept { return n_ / 2 + 1; }

  // Spectrum of x (unnormalised).
  void forward(const double* x, std::vector<std::complex<double>>& out) {
    std::copy(x, x + n_, real_);
    fftw_execute(fwd_);
    out.resize(modes());
    for (std::size_t k = 0; k < modes(); ++k) out[k] = {spec_[k][0], spec_[k][1]};
  }
  // Inverse of forward(), including the 1/n normalisation.
  void inverse(const std::vector<std::complex<double>>& in, double* x) {
    for (std::size_t k = 0; k < modes(); ++k) {
      spec_[k][0] = in[k].real();
      spec_[k][1] = in[k].imag();
    }
    fftw_execute(inv_);
    const double s = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = real_[i] * s;
  }

 private:
  std::size_t n_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan fwd_;
  fftw_plan inv_;
};

// Spectral derivative of a periodic sample of period 2 (wavenumbers pi*k).
void spectral_derivative(RealFft& fft, const double* u, int order, double* out,
                         std::vector<std::complex<double>>& work) {
  fft.forward(u, work);
  const std::size_t n = fft.size();
  for (std::size_t k = 0; k < work.size(); ++k) {
    const double w = kPi * static_cast<double>(k);
    if (order == 1) {
      work[k] = (2 * k == n) ? std::complex<double>(0.0) : work[k] * std::complex<double>(0.0, w);
    } else {
      work[k] *= -w * w;
    }
  }
  fft.inverse(work, out);
}

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Analytic: return "analytic";
    case Provenance::Pseudospectral: return "pseudospectral";
    case Provenance::ExternalFile: return "external-file";
    case Provenance::Prediction: return "prediction";
    case Provenance::Derived: return "derived";
  }
  return "unknown";
}

Provenance provenance_from_string(const std::string& s) {
  for (auto p : {Provenance::Analytic, Provenance::Pseudospectral, Provenance::ExternalFile, Provenance::Prediction,
                 Provenance::Derived})
    if (to_string(p) == s) return p;
  throw InvalidArgument("unknown provenance '" + s + "'");
}

std::size_t ReferenceField::field_index(const std::string& name) const {
  for (std::size_t i = 0; i < field_names.size(); ++i)
    if (field_names[i] == name) return i;
  throw InvalidArgument("no field named '" + name + "'");
}

void ReferenceField::validate() const {
  if (field_names.size() != values.size()) throw InvalidArgument("field names and values differ in count");
  if (grid.axis_names.size() != grid.dim()) throw InvalidArgument("every grid axis needs a name");
  const auto shape = grid.shape();
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i].shape != shape || values[i].values.size() != shape_product(shape))
      throw InvalidArgument("field '" + field_names[i] + "' is not shaped like the grid");
}

ReferenceField ac_reference(std::size_t nx, std::size_t nt, const AllenCahnOptions& options) {
  if (nx < 64 || nx % 2 != 0) throw InvalidArgument("ac_reference: nx must be even and at least 64");
  if (nt < 100) throw InvalidArgument("ac_reference: nt must be at least 100");
  const double D = options.diffusion;
  const double dt = 1.0 / static_cast<double>(nt);

  ReferenceField out;
  out.provenance = Provenance::Pseudospectral;
  out.grid.axes = {linspace(-1.0, 1.0, nx + 1), linspace(0.0, 1.0, nt + 1)};
  out.grid.axis_names = {"x", "t"};
  out.field_names = {"u"};
  out.meta = {{"solver", "fourier-pseudospectral"},
              {"time_integrator", "rk4"},
              {"nx", std::to_string(nx)},
              {"nt", std::to_string(nt)},
              {"diffusion", io::format_double(D)},
              {"nonlinear", options.nonlinear ? "1" : "0"},
              {"dealiasing", options.dealias ? "2/3-rule" : "none"},
              {"periodic_interval", "[-1,1)"}};
  DenseField& u_all = out.values.emplace_back(out.grid.shape());
  const std::size_t stride = nt + 1;  // row-major [x][t]

  RealFft fft(nx);
  std::vector<double> u(nx), k1(nx), k2(nx), k3(nx), k4(nx), tmp(nx);
  for (std::size_t i = 0; i < nx; ++i) u[i] = allen_cahn::initial(out.grid.axes[0][i]);

  // Modes above nx/3 of the cubic term are dropped (2/3 rule).
  const std::size_t cutoff = options.dealias ? nx / 3 : nx / 2;
  std::vector<std::complex<double>> vhat, chat, fhat;
  std::vector<double> cube(nx);
  auto rhs = [&](const std::vector<double>& v, std::vector<double>& f) {
    fft.forward(v.data(), vhat);
    if (options.nonlinear) {
      for (std::size_t i = 0; i < nx; ++i) cube[i] = v[i] * v[i] * v[i];
      fft.forward(cube.data(), chat);
    }
    fhat.resize(vhat.size());
    for (std::size_t k = 0; k < vhat.size(); ++k) {
      const double w = kPi * static_cast<double>(k);
      fhat[k] = -D * w * w * vhat[k];
      if (options.nonlinear) {
        fhat[k] += 5.0 * vhat[k];
        if (k <= cutoff) fhat[k] -= 5.0 * chat[k];
      }
    }
    fft.inverse(fhat, f.data());
  };
  auto store = [&](std::size_t step) {
    for (std::size_t i = 0; i < nx; ++i) u_all.values[i * stride + step] = u[i];
    u_all.values[nx * stride + step] = u[0];
  };

  store(0);
  for (std::size_t s = 1; s <= nt; ++s) {
    rhs(u, k1);
    for (std::size_t i = 0; i < nx; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
    rhs(tmp, k2);
    for (std::size_t i = 0; i < nx; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
    rhs(tmp, k3);
    for (std::size_t i = 0; i < nx; ++i) tmp[i] = u[i] + dt * k3[i];
    rhs(tmp, k4);
    for (std::size_t i = 0; i < nx; ++i) {
      u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!(std::abs(u[i]) <= options.blowup))
        throw NumericalError("ac_reference: |u| exceeded " + io::format_double(options.blowup) + " at step " +
                             std::to_string(s) + "; reduce dt (increase nt) to satisfy the explicit stability limit, "
                             "dt*D*(pi*nx/2)^2 = " +
                             io::format_double(dt * D * std::pow(kPi * static_cast<double>(nx) / 2.0, 2)));
    }
    store(s);
  }
  return out;
}

ReferenceField ac_sample(const ReferenceField& solution, const FactorGrid& grid) {
  if (solution.grid.dim() != 2 || grid.dim() != 2) throw InvalidArgument("ac_sample: expected (x, t) grids");
  const std::size_t nx = solution.grid.axes[0].size() - 1;
  const std::size_t nt = solution.grid.axes[1].size() - 1;
  const DenseField& src = solution.values.at(0);
  const std::size_t stride = nt + 1;

  ReferenceField out;
  out.provenance = solution.provenance;
  out.meta = solution.meta;
  out.meta.emplace_back("sampling", "trigonometric-x,linear-t");
  out.grid = grid;
  if (out.grid.axis_names.size() != 2) out.grid.axis_names = {"x", "t"};
  out.field_names = {"u"};
  DenseField& dst = out.values.emplace_back(grid.shape());

  const auto& xs = grid.axes[0].points;
  const auto& ts = grid.axes[1].points;
  const std::size_t modes = nx / 2 + 1;
  // cos/sin tables of pi*k*(x+1) for every requested x.
  std::vector<double> cs(xs.size() * modes), sn(xs.size() * modes);
  for (std::size_t p = 0; p < xs.size(); ++p) {
    if (xs[p] < -1.0 - 1e-12 || xs[p] > 1.0 + 1e-12) throw DomainError("ac_sample: x outside [-1, 1]");
    for (std::size_t k = 0; k < modes; ++k) {
      const double a = kPi * static_cast<double>(k) * (xs[p] + 1.0);
      cs[p * modes + k] = std::cos(a);
      sn[p * modes + k] = std::sin(a);
    }
  }
  RealFft fft(nx);
  std::vector<std::complex<double>> c;
  std::vector<double> row(nx);
  for (std::size_t q = 0; q < ts.size(); ++q) {
    const double t = ts[q];
    if (t < -1e-12 || t > 1.0 + 1e-12) throw DomainError("ac_sample: t outside [0, 1]");
    const double pos = std::clamp(t, 0.0, 1.0) * static_cast<double>(nt);
    const std::size_t j0 = std::min(static_cast<std::size_t>(pos), nt);
    const std::size_t j1 = std::min(j0 + 1, nt);
    const double w = pos - static_cast<double>(j0);
    for (std::size_t i = 0; i < nx; ++i)
      row[i] = (1.0 - w) * src.values[i * stride + j0] + w * src.values[i * stride + j1];
    fft.forward(row.data(), c);
    const double inv = 1.0 / static_cast<double>(nx);
    for (std::size_t p = 0; p < xs.size(); ++p) {
      double acc = c[0].real();
      for (std::size_t k = 1; k < modes; ++k) {
        const double re = c[k].real() * cs[p * modes + k] - c[k].imag() * sn[p * modes + k];
        acc += (2 * k == nx) ? re : 2.0 * re;
      }
      dst.values[p * ts.size() + q] = acc * inv;
    }
  }
  return out;
}

std::vector<double> ac_energy(const ReferenceField& solution, double diffusion) {
  const std::size_t nx = solution.grid.axes.at(0).size() - 1;
  const std::size_t nt = solution.grid.axes.at(1).size() - 1;
  const DenseField& src = solution.values.at(0);
  const double dx = 2.0 / static_cast<double>(nx);
  RealFft fft(nx);
  std::vector<std::complex<double>> work;
  std::vector<double> u(nx), ux(nx), e(nt + 1);
  for (std::size_t s = 0; s <= nt; ++s) {
    for (std::size_t i = 0; i < nx; ++i) u[i] = src.values[i * (nt + 1) + s];
    spectral_derivative(fft, u.data(), 1, ux.data(), work);
    double acc = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
      const double w = u[i] * u[i] - 1.0;
      acc += 0.5 * diffusion * ux[i] * ux[i] + 1.25 * w * w;
    }
    e[s] = acc * dx;
  }
  return e;
}

ReferenceField analytic_reference(const ProblemSpec& problem, const FactorGrid& grid) {
  if (!problem.has_exact()) throw Unsupported(problem.name() + " has no analytic reference");
  if (grid.dim() != problem.dim()) throw InvalidArgument("analytic_reference: grid dimension mismatch");
  ReferenceField out;
  out.provenance = Provenance::Analytic;
  out.grid = grid;
  if (out.grid.axis_names.size() != grid.dim()) out.grid.axis_names = problem.axis_names();
  out.field_names = problem.field_names();
  out.meta = {{"problem", problem.name()}};
  const auto m = static_cast<std::size_t>(problem.fields());
  for (std::size_t f = 0; f < m; ++f) out.values.emplace_back(grid.shape());
  const PointCloud pts = tensor_points(grid);
  std::vector<double> v(m);
  for (std::size_t p = 0; p < pts.size(); ++p) {
    problem.exact(pts[p], v);
    for (std::size_t f = 0; f < m; ++f) out.values[f].values[p] = v[f];
  }
  return out;
}

namespace {

void write_values(std::ostream& os, const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ' ';
    os << io::format_double(v[i]);
  }
  os << '\n';
}

std::vector<double> read_values(io::LineReader& r, std::size_t n) {
  std::string line;
  if (!r.next(line)) throw ParseError("unexpected end of file, expected " + std::to_string(n) + " values", r.line_number() + 1);
  const auto toks = io::split_ws(line);
  if (toks.size() != n)
    throw ParseError("expected " + std::to_string(n) + " values, found " + std::to_string(toks.size()), r.line_number());
  std::vector<double> v(n);
  try {
    for (std::size_t i = 0; i < n; ++i) v[i] = io::parse_double(toks[i]);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), r.line_number());
  }
  return v;
}

}  // namespace

void save_field(std::ostream& os, const ReferenceField& f) {
  f.validate();
  os << "SPIKAN-FIELD 1\n";
  os << "provenance " << to_string(f.provenance) << '\n';
  for (const auto& [k, v] : f.meta) os << "meta " << k << ' ' << v << '\n';
  for (std::size_t a = 0; a < f.grid.dim(); ++a) {
    const Grid1D& g = f.grid.axes[a];
    os << "axis " << f.grid.axis_names[a] << ' ' << g.size() << ' ' << io::format_double(g.lo) << ' '
       << io::format_double(g.hi) << '\n';
    write_values(os, g.points);
  }
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    os << "field " << f.field_names[i] << '\n';
    write_values(os, f.values[i].values);
  }
  os << "end\n";
}

void save_field(const std::string& path, const ReferenceField& f) {
  std::ostringstream os;
  save_field(os, f);
  io::write_file(path, os.str());
}

ReferenceField load_field(std::istream& is) {
  io::LineReader r(is);
  std::string line;
  if (!r.next(line) || io::trim(line) != "SPIKAN-FIELD 1") throw ParseError("expected header 'SPIKAN-FIELD 1'", 1);
  ReferenceField f;
  bool have_provenance = false, ended = false;
  while (r.next(line)) {
    if (io::trim(line).empty()) continue;
    const auto toks = io::split_ws(line);
    const std::string& kw = toks[0];
    try {
      if (kw == "provenance" && toks.size() == 2) {
        f.provenance = provenance_from_string(toks[1]);
        have_provenance = true;
      } else if (kw == "meta" && toks.size() >= 2) {
        const auto rest = io::trim(std::string_view(line).substr(line.find(toks[1]) + toks[1].size()));
        f.meta.emplace_back(toks[1], std::string(rest));
      } else if (kw == "axis" && toks.size() == 5) {
        if (!f.values.empty()) throw ParseError("axis after field", r.line_number());
        const auto n = static_cast<std::size_t>(io::parse_int(toks[2]));
        Grid1D g;
        g.lo = io::parse_double(toks[3]);
        g.hi = io::parse_double(toks[4]);
        g.points = read_values(r, n);
        f.grid.axes.push_back(std::move(g));
        f.grid.axis_names.push_back(toks[1]);
      } else if (kw == "field" && toks.size() == 2) {
        const auto shape = f.grid.shape();
        DenseField d(shape);
        d.values = read_values(r, shape_product(shape));
        f.field_names.push_back(toks[1]);
        f.values.push_back(std::move(d));
      } else if (kw == "end" && toks.size() == 1) {
        ended = true;
        break;
      } else {
        throw ParseError("unrecognised line '" + line + "'", r.line_number());
      }
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), r.line_number());
    }
  }
  if (!have_provenance) throw ParseError("missing provenance line", r.line_number());
  if (!ended) throw ParseError("missing 'end'", r.line_number());
  return f;
}

ReferenceField load_field(const std::string& path) {
  std::istringstream is(io::read_file(path));
  return load_field(is);
}

CenterlineProfile load_external_profiles(std::istream& is) {
  io::LineReader r(is);
  std::string line;
  CenterlineProfile out;
  Profile* cur = nullptr;
  bool expect_header = true, any_section = false;
  std::size_t rows = 0;
  while (r.next(line)) {
    const auto t = io::trim(line);
    if (t.empty()) continue;
    if (t == "[u_vs_y]" || t == "[v_vs_x]") {
      cur = t == "[u_vs_y]" ? &out.u_vs_y : &out.v_vs_x;
      if (cur->size() > 0) throw ParseError("duplicate section " + std::string(t), r.line_number());
      any_section = true;
      expect_header = true;
      continue;
    }
    if (!cur) {
      if (any_section) throw ParseError("data outside a section", r.line_number());
      cur = &out.u_vs_y;
    }
    if (expect_header) {
      if (t != "coord,value") throw ParseError("expected header 'coord,value'", r.line_number());
      expect_header = false;
      continue;
    }
    const auto cols = io::split(t, ',');
    if (cols.size() != 2) throw ParseError("expected two comma-separated values", r.line_number());
    double c = 0.0, v = 0.0;
    try {
      c = io::parse_double(cols[0]);
      v = io::parse_double(cols[1]);
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), r.line_number());
    }
    if (!(c >= 0.0 && c <= 1.0)) throw ParseError("coordinate outside [0, 1]", r.line_number());
    if (!cur->coord.empty() && !(c > cur->coord.back()))
      throw ParseError("coordinates must be strictly increasing", r.line_number());
    if (!std::isfinite(v)) throw ParseError("non-finite value", r.line_number());
    cur->coord.push_back(c);
    cur->value.push_back(v);
    ++rows;
  }
  if (rows == 0) throw ParseError("no profile data", std::max<std::size_t>(r.line_number(), 1));
  return out;
}

CenterlineProfile load_external_profiles(const std::string& path) {
  std::istringstream is(io::read_file(path));
  return load_external_profiles(is);
}

void write_profiles(std::ostream& os, const CenterlineProfile& p) {
  const std::pair<const char*, const Profile*> sections[] = {{"[u_vs_y]", &p.u_vs_y}, {"[v_vs_x]", &p.v_vs_x}};
  for (const auto& [name, prof] : sections) {
    if (prof->size() == 0) continue;
    os << name << "\ncoord,value\n";
    for (std::size_t i = 0; i < prof->size(); ++i)
      os << io::format_double(prof->coord[i]) << ',' << io::format_double(prof->value[i]) << '\n';
  }
}

void write_profiles(const std::string& path, const CenterlineProfile& p) {
  std::ostringstream os;
  write_profiles(os, p);
  io::write_file(path, os.str());
}

double relative_l2(const DenseField& pred, const DenseField& ref) {
  if (pred.values.size() != ref.values.size() || (!pred.shape.empty() && !ref.shape.empty() && pred.shape != ref.shape))
    throw InvalidArgument("relative_l2: shapes differ");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ref.values.size(); ++i) {
    const double e = ref.values[i] - pred.values[i];
    num += e * e;
    den += ref.values[i] * ref.values[i];
  }
  if (!(den > 0.0)) throw NumericalError("relative_l2: reference has zero norm, the metric is undefined");
  return std::sqrt(num / den);
}

double relative_l2(const DenseField& pred, const ReferenceField& ref, std::size_t field) {
  return relative_l2(pred, ref.values.at(field));
}

}  // namespace spikan
