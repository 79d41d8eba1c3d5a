#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "spikan/commands.hpp"
#include "spikan/errors.hpp"
#include "spikan/io.hpp"
#include "spikan/physics.hpp"
#include "spikan/reference.hpp"

using namespace spikan;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

DenseField column(const ReferenceField& f, std::size_t step) {
  const std::size_t nx = f.grid.axes[0].size(), nt = f.grid.axes[1].size();
  DenseField c({nx});
  for (std::size_t i = 0; i < nx; ++i) c.values[i] = f.values[0].values[i * nt + step];
  return c;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("spikan_ref_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("reference") {
  TEST_CASE("initial condition is stored at t = 0") {
    const auto f = ac_reference(128, 200);
    REQUIRE(f.grid.axes[0].size() == 129);
    REQUIRE(f.grid.axes[1].size() == 201);
    CHECK(f.provenance == Provenance::Pseudospectral);
    const auto c = column(f, 0);
    for (std::size_t i = 0; i < 129; ++i) CHECK(c.values[i] == allen_cahn::initial(f.grid.axes[0][i]));
    for (std::size_t s = 0; s < 201; s += 20) {
      const auto col = column(f, s);
      CHECK(col.values[128] == col.values[0]);
    }
  }

  TEST_CASE("no diffusion and no reaction keeps the initial state") {
    AllenCahnOptions o;
    o.diffusion = 0.0;
    o.nonlinear = false;
    const auto f = ac_reference(64, 100, o);
    const auto c0 = column(f, 0);
    for (std::size_t s : {1u, 50u, 100u}) CHECK(column(f, s).values == c0.values);
  }

  TEST_CASE("pure diffusion conserves the mean and dissipates") {
    AllenCahnOptions o;
    o.nonlinear = false;
    o.diffusion = 0.01;
    const auto f = ac_reference(64, 200, o);
    const auto c0 = column(f, 0), c1 = column(f, 200);
    double m0 = 0.0, m1 = 0.0, s0 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < 64; ++i) {
      m0 += c0.values[i];
      m1 += c1.values[i];
      s0 += c0.values[i] * c0.values[i];
      s1 += c1.values[i] * c1.values[i];
    }
    CHECK(std::abs(m1 - m0) <= 1e-12 * 64);
    CHECK(s1 < s0);
  }

  TEST_CASE("energy is non-increasing") {
    const auto f = ac_reference(256, 1000);
    const auto e = ac_energy(f);
    REQUIRE(e.size() == 1001);
    for (std::size_t s = 1; s < e.size(); ++s) CHECK(e[s] <= e[s - 1] * (1.0 + 1e-12));
    CHECK(e.back() < e.front());
  }

  TEST_CASE("sampled reference satisfies the equation") {
    const double D = 0.01;
    AllenCahnOptions o;
    o.diffusion = D;
    const std::size_t nt = 800;
    const auto f = ac_reference(256, nt, o);
    const double dt = 1.0 / nt, h = 1e-3;
    FactorGrid base;
    base.axis_names = {"x", "t"};
    base.axes.push_back(linspace(-0.9, 0.9, 19));
    Grid1D ts;
    ts.lo = 0.0;
    ts.hi = 1.0;
    for (std::size_t s = 80; s <= 720; s += 80) ts.points.push_back(static_cast<double>(s) * dt);
    base.axes.push_back(ts);
    auto shifted = [&](double dx, double dtt) {
      FactorGrid g = base;
      for (double& x : g.axes[0].points) x += dx;
      for (double& t : g.axes[1].points) t += dtt;
      return ac_sample(f, g).values[0];
    };
    const auto u = shifted(0, 0), up = shifted(h, 0), um = shifted(-h, 0), tp = shifted(0, dt), tm = shifted(0, -dt);
    DenseField u_t(u.shape), u_xx(u.shape);
    for (std::size_t i = 0; i < u.size(); ++i) {
      u_t.values[i] = (tp.values[i] - tm.values[i]) / (2 * dt);
      u_xx.values[i] = (up.values[i] - 2 * u.values[i] + um.values[i]) / (h * h);
    }
    const auto r = allen_cahn_residual(u, u_t, u_xx, D);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      worst = std::max(worst, std::abs(r.values[i]));
      scale = std::max(scale, std::abs(u_t.values[i]));
    }
    CHECK(scale > 0.1);
    CHECK(worst <= 1e-3);
  }

  TEST_CASE("trigonometric sampling reproduces stored nodes") {
    const auto f = ac_reference(64, 100);
    FactorGrid g;
    g.axis_names = {"x", "t"};
    g.axes = {f.grid.axes[0], linspace(0.0, 1.0, 11)};
    const auto s = ac_sample(f, g);
    for (std::size_t i = 0; i < 65; ++i)
      for (std::size_t q = 0; q < 11; ++q)
        CHECK(std::abs(s.values[0].values[i * 11 + q] - f.values[0].values[i * 101 + q * 10]) <= 1e-12);
    g.axes[1] = linspace(0.0, 1.5, 3);
    CHECK_THROWS_AS(ac_sample(f, g), DomainError);
  }

  TEST_CASE("solver argument checks") {
    CHECK_THROWS_AS(ac_reference(63, 200), InvalidArgument);
    CHECK_THROWS_AS(ac_reference(32, 200), InvalidArgument);
    CHECK_THROWS_AS(ac_reference(64, 10), InvalidArgument);
    AllenCahnOptions o;
    o.diffusion = 1.0;
    CHECK_THROWS_AS(ac_reference(256, 100, o), NumericalError);
  }

  TEST_CASE("analytic references") {
    const auto h = make_problem("helmholtz2d");
    FactorGrid g;
    g.axes = {linspace(-1, 1, 5), linspace(-1, 1, 7)};
    const auto r = analytic_reference(*h, g);
    CHECK(r.provenance == Provenance::Analytic);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 7; ++j)
        CHECK(r.values[0].values[i * 7 + j] ==
              doctest::Approx(std::sin(kPi * g.axes[0][i]) * std::sin(4 * kPi * g.axes[1][j])).epsilon(1e-14));

    const auto kg = make_problem("kleingordon2d1t");
    FactorGrid g3;
    g3.axes = {linspace(0, 1, 3), linspace(0, 1, 3), linspace(0, 1, 4)};
    const auto rk = analytic_reference(*kg, g3);
    const double x = 0.5, y = 1.0, t = 2.0 / 3.0;
    CHECK(rk.values[0].values[(1 * 3 + 2) * 4 + 2] ==
          doctest::Approx((x + y) * std::cos(t) + x * y * std::sin(t)).epsilon(1e-14));
    CHECK_THROWS_AS(analytic_reference(*make_problem("cavity2d"), g), Unsupported);
    CHECK_THROWS_AS(analytic_reference(*h, g3), InvalidArgument);
  }

  TEST_CASE("field container round trip") {
    const auto f = ac_reference(64, 100);
    std::stringstream ss;
    save_field(ss, f);
    const auto back = load_field(ss);
    CHECK(back.provenance == f.provenance);
    CHECK(back.meta == f.meta);
    CHECK(back.field_names == f.field_names);
    CHECK(back.grid.axis_names == f.grid.axis_names);
    for (std::size_t a = 0; a < 2; ++a) {
      CHECK(back.grid.axes[a].points == f.grid.axes[a].points);
      CHECK(back.grid.axes[a].lo == f.grid.axes[a].lo);
      CHECK(back.grid.axes[a].hi == f.grid.axes[a].hi);
    }
    CHECK(back.values[0].values == f.values[0].values);
    CHECK(back.values[0].shape == f.values[0].shape);
  }

  TEST_CASE("field container parse errors") {
    auto line_of = [](const std::string& text) {
      std::istringstream is(text);
      try {
        load_field(is);
      } catch (const ParseError& e) {
        return e.line();
      }
      return std::size_t{0};
    };
    CHECK(line_of("") == 1);
    CHECK(line_of("SPIKAN-FIELD 2\n") == 1);
    CHECK(line_of("SPIKAN-FIELD 1\nprovenance magic\n") == 2);
    CHECK(line_of("SPIKAN-FIELD 1\nprovenance analytic\naxis x 3 0 1\n0 0.5\nend\n") == 4);
    CHECK(line_of("SPIKAN-FIELD 1\nprovenance analytic\naxis x 2 0 1\n0 1\nfield u\n1 2\n") == 6);
    CHECK(line_of("SPIKAN-FIELD 1\nprovenance analytic\nbogus\n") == 3);
    std::istringstream ok("SPIKAN-FIELD 1\nprovenance analytic\nmeta note two words\naxis x 2 0 1\n0 1\nfield u\n1 2\nend\n");
    const auto f = load_field(ok);
    CHECK(f.meta.at(0).second == "two words");
    CHECK(f.field("u").values == std::vector<double>{1, 2});
    CHECK_THROWS_AS(f.field("v"), InvalidArgument);
  }

  TEST_CASE("centerline profiles") {
    std::istringstream two("coord,value\n0.0,0.0\n1.0,1.0\n");
    const auto p = load_external_profiles(two);
    CHECK(p.u_vs_y.size() == 2);
    CHECK(p.v_vs_x.size() == 0);
    CHECK(p.u_vs_y.value[1] == 1.0);

    std::istringstream empty("");
    CHECK_THROWS_AS(load_external_profiles(empty), ParseError);
    std::istringstream decreasing("coord,value\n0.5,0\n0.2,0\n");
    try {
      load_external_profiles(decreasing);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
    std::istringstream outside("coord,value\n1.5,0\n");
    CHECK_THROWS_AS(load_external_profiles(outside), ParseError);
    std::istringstream header("x,y\n0,0\n");
    CHECK_THROWS_AS(load_external_profiles(header), ParseError);

    CenterlineProfile c;
    c.u_vs_y = {{0.0, 0.1, 0.5, 1.0}, {0.0, -0.0641, -0.2058, 1.0}};
    c.v_vs_x = {{0.0, 0.3, 1.0}, {0.0, 0.1753, 0.0}};
    std::stringstream ss;
    write_profiles(ss, c);
    const auto back = load_external_profiles(ss);
    CHECK(back.u_vs_y.coord == c.u_vs_y.coord);
    CHECK(back.u_vs_y.value == c.u_vs_y.value);
    CHECK(back.v_vs_x.coord == c.v_vs_x.coord);
    CHECK(back.v_vs_x.value == c.v_vs_x.value);
  }

  TEST_CASE("relative L2") {
    DenseField ref({2}), pred({2});
    ref.values = {3.0, 4.0};
    pred.values = {3.0, 4.0};
    CHECK(relative_l2(pred, ref) == 0.0);
    pred.values = {0.0, 0.0};
    CHECK(relative_l2(pred, ref) == doctest::Approx(1.0));
    pred.values = {3.0, 3.0};
    CHECK(relative_l2(pred, ref) == doctest::Approx(0.2));
    for (double s : {1e-3, 7.0, -2.0}) {
      DenseField a = pred, b = ref;
      for (double& v : a.values) v *= s;
      for (double& v : b.values) v *= s;
      CHECK(relative_l2(a, b) == doctest::Approx(0.2).epsilon(1e-14));
    }
    DenseField zero({2});
    CHECK_THROWS_AS(relative_l2(pred, zero), NumericalError);
    CHECK_THROWS_AS(relative_l2(DenseField({3}), ref), InvalidArgument);
  }

  TEST_CASE("reference cache is reused when the checksum matches") {
    const auto dir = scratch_dir("cache");
    const std::vector<std::size_t> res{64, 100};
    const auto a = cmd_reference("allencahn1d1t", res, dir.string());
    CHECK_FALSE(a.reused);
    CHECK(fs::exists(a.path));
    CHECK(io::checksum(io::read_file(a.path)) == a.checksum);
    const auto b = cmd_reference("allencahn1d1t", res, dir.string());
    CHECK(b.reused);
    CHECK(b.checksum == a.checksum);
    CHECK(b.field.values[0].values == a.field.values[0].values);

    io::write_file(a.path + ".checksum", "0000\n");
    const auto c = cmd_reference("allencahn1d1t", res, dir.string());
    CHECK_FALSE(c.reused);
    CHECK(c.checksum == a.checksum);

    const std::vector<std::size_t> hres{5, 5};
    CHECK(cmd_reference("helmholtz2d", hres, dir.string()).field.provenance == Provenance::Analytic);
    CHECK_THROWS_AS(cmd_reference("cavity2d", hres, dir.string()), Unsupported);
    CHECK_THROWS_AS(cmd_reference("allencahn1d1t", std::vector<std::size_t>{64}, dir.string()), InvalidArgument);
    fs::remove_all(dir);
  }
}
