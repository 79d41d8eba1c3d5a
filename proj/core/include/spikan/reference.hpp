#pragma once

// Ground-truth fields and the plain-text field container.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "spikan/physics.hpp"
#include "spikan/tensorgrid.hpp"

namespace spikan {

enum class Provenance { Analytic, Pseudospectral, ExternalFile, Prediction, Derived };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

// Named fields on a tensor-product grid, one DenseField per output field.
struct ReferenceField {
  FactorGrid grid;
  std::vector<std::string> field_names;
  std::vector<DenseField> values;
  Provenance provenance = Provenance::Analytic;
  std::vector<std::pair<std::string, std::string>> meta;

  std::size_t field_index(const std::string& name) const;
  const DenseField& field(const std::string& name) const { return values[field_index(name)]; }
  // Throws InvalidArgument unless every field has the grid's shape.
  void validate() const;
};

struct AllenCahnOptions {
  double diffusion = allen_cahn::kDiffusion;
  bool nonlinear = true;  // test hook: false drops the reaction term
  bool dealias = true;    // 2/3 rule on the cubic term
  double blowup = 10.0;
};

// Fourier pseudospectral in x on the periodic interval [-1, 1), classical RK4
// in time on [0, 1] with nt steps. The cubic term is dealiased with the 2/3
// rule unless options.dealias is false. The result holds every time step on the
// closed grid x_i = -1 + 2i/nx, i = 0..nx (the x = 1 column repeats x = -1).
ReferenceField ac_reference(std::size_t nx, std::size_t nt, const AllenCahnOptions& options = {});

// Samples an ac_reference solution onto `grid` (axes x, t): trigonometric
// interpolation in x, linear interpolation in t.
ReferenceField ac_sample(const ReferenceField& solution, const FactorGrid& grid);

// E[u] = integral of (D/2) u_x^2 + (5/4)(u^2 - 1)^2 over one period, for every
// stored time step of an ac_reference solution.
std::vector<double> ac_energy(const ReferenceField& solution, double diffusion = allen_cahn::kDiffusion);

// Exact solution of a manufactured problem on `grid`.
ReferenceField analytic_reference(const ProblemSpec& problem, const FactorGrid& grid);

// Field container:
//   SPIKAN-FIELD 1
//   provenance <name>
//   meta <key> <value>          (zero or more)
//   axis <name> <n>             (one per axis, followed by a line of n coordinates)
//   field <name>                (one per field, followed by a line of values)
//   end
void save_field(std::ostream& os, const ReferenceField& f);
void save_field(const std::string& path, const ReferenceField& f);
ReferenceField load_field(std::istream& is);
ReferenceField load_field(const std::string& path);

// Centerline velocity profiles of the lid-driven cavity.
struct Profile {
  std::vector<double> coord;
  std::vector<double> value;
  std::size_t size() const noexcept { return coord.size(); }
};

struct CenterlineProfile {
  Profile u_vs_y;  // u along x = 0.5
  Profile v_vs_x;  // v along y = 0.5
};

// Sections "[u_vs_y]" and "[v_vs_x]", each starting with a "coord,value"
// header. A file without section markers holds a single u_vs_y profile.
// Coordinates must be strictly increasing inside [0, 1].
CenterlineProfile load_external_profiles(std::istream& is);
CenterlineProfile load_external_profiles(const std::string& path);
void write_profiles(std::ostream& os, const CenterlineProfile& p);
void write_profiles(const std::string& path, const CenterlineProfile& p);

// sqrt(sum (ref - pred)^2 / sum ref^2). Throws NumericalError for a zero reference.
double relative_l2(const DenseField& pred, const DenseField& ref);
double relative_l2(const DenseField& pred, const ReferenceField& ref, std::size_t field = 0);

}  // namespace spikan
