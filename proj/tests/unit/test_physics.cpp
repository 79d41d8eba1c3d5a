#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "common/oracles.hpp"
#include "spikan/errors.hpp"
#include "spikan/physics.hpp"

using namespace spikan;

namespace {

constexpr double kPi = std::numbers::pi;

SeparableModel sep_for(const ProblemSpec& p, std::vector<int> hidden, int rank, std::uint64_t seed, int k = 3) {
  Rng rng(seed);
  std::vector<int> w{1};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(rank * p.fields());
  auto m = SeparableModel::random(w, SplineSpec(3, k), rank, p.fields(), p.axis_maps(), p.axis_names(), rng);
  for (auto& net : m.nets())
    for (std::size_t l = 0; l < net.layer_count(); ++l)
      for (double& b : net.layer(l).bias) b = 0.3 * rng.normal();
  return m;
}

DenseModel dense_for(const ProblemSpec& p, std::vector<int> hidden, std::uint64_t seed, int k = 3) {
  Rng rng(seed);
  std::vector<int> w{static_cast<int>(p.dim())};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(p.fields());
  auto m = DenseModel::random(w, SplineSpec(3, k), p.axis_maps(), p.axis_names(), rng);
  for (std::size_t l = 0; l < m.net().layer_count(); ++l)
    for (double& b : m.net().layer(l).bias) b = 0.3 * rng.normal();
  return m;
}

// Separable model whose every axis network outputs the constant c_a.
SeparableModel constant_model(const ProblemSpec& p, std::vector<double> c) {
  std::vector<KanNetwork> nets;
  for (double v : c) {
    KanNetwork n({1, p.fields()}, SplineSpec(3, 3));
    for (double& b : n.layer(0).bias) b = v;
    nets.push_back(std::move(n));
  }
  return SeparableModel(std::move(nets), p.axis_maps(), p.axis_names(), 1, p.fields());
}

SeparableModel zero_model(const ProblemSpec& p) { return constant_model(p, std::vector<double>(p.dim(), 0.0)); }

double face_mse(const LossBreakdown& b, const std::string& name) {
  for (const auto& f : b.faces)
    if (f.name == name) return f.mse;
  FAIL("no face " << name);
  return 0.0;
}

DenseField random_field(std::size_t n, Rng& rng) {
  DenseField f({n});
  for (double& v : f.values) v = rng.uniform(-2, 2);
  return f;
}

}  // namespace

TEST_SUITE("physics") {
  TEST_CASE("analytic solutions and forcing") {
    CHECK(helmholtz::exact(0.5, 0.125) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(klein_gordon::exact(1, 1, 0) == 2.0);
    CHECK(klein_gordon::forcing(1, 1, 0) == 2.0);
    for (double t : {0.0, 0.7, 3.0, 10.0}) CHECK(klein_gordon::exact(0, 0, t) == 0.0);
    CHECK(allen_cahn::initial(1.0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(allen_cahn::initial(0.0) == 0.0);
  }

  TEST_CASE("four-term Helmholtz forcing equals the collapsed form") {
    Rng rng(1);
    const double a1 = helmholtz::kA1 * kPi, a2 = helmholtz::kA2 * kPi, k = helmholtz::kKappa;
    for (int i = 0; i < 100; ++i) {
      const double x = rng.uniform(-1, 1), y = rng.uniform(-1, 1);
      const double q = (k * k + 1 - a1 * a1 - a2 * a2) * std::sin(a1 * x) * std::sin(a2 * y);
      CHECK(std::abs(helmholtz::forcing(x, y) - q) <= 1e-12);
    }
  }

  TEST_CASE("manufactured solutions through the residual operators") {
    Rng rng(2);
    const auto h = make_problem("helmholtz2d");
    const auto kg = make_problem("kleingordon2d1t");
    double kg_worst = 0.0, h_offset = 0.0;
    for (int i = 0; i < 1000; ++i) {
      // The four-term forcing carries one sin*sin term more than the operator
      // produces from the exact solution, so the residual is exactly -sin*sin.
      const double x = rng.uniform(-1, 1), y = rng.uniform(-1, 1);
      const double u = std::sin(kPi * x) * std::sin(4 * kPi * y);
      const std::vector<double> pt{x, y}, d{u, -kPi * kPi * u, -16 * kPi * kPi * u};
      std::vector<double> f(1), r(1);
      h->forcing(pt, f);
      h->residual(d, f, r);
      h_offset = std::max(h_offset, std::abs(r[0] + u));

      const double X = rng.uniform(0, 1), Y = rng.uniform(0, 1), T = rng.uniform(0, 10);
      const double v = (X + Y) * std::cos(T) + X * Y * std::sin(T);
      const std::vector<double> p3{X, Y, T}, d3{v, -v, 0.0, 0.0};
      kg->forcing(p3, f);
      kg->residual(d3, f, r);
      kg_worst = std::max(kg_worst, std::abs(r[0]));
    }
    CHECK(kg_worst < 1e-10);
    CHECK(h_offset < 1e-10);
  }

  TEST_CASE("problem registry") {
    for (const auto& n : problem_names()) CHECK(make_problem(n)->name() == n);
    try {
      make_problem("heat1d");
      FAIL("expected an error");
    } catch (const InvalidArgument& e) {
      const std::string msg = e.what();
      for (const auto& n : problem_names()) CHECK(msg.find(n) != std::string::npos);
    }
    CHECK(make_problem("helmholtz2d")->required_orders() == std::vector<int>{2, 2});
    CHECK(make_problem("allencahn1d1t")->required_orders() == std::vector<int>{2, 1});
    CHECK(make_problem("kleingordon2d1t")->required_orders() == std::vector<int>{2, 2, 2});
    CHECK(make_problem("cavity2d")->required_orders() == std::vector<int>{2, 2});
    std::vector<double> out(1);
    CHECK_THROWS_AS(make_problem("cavity2d")->exact(std::vector<double>{0.5, 0.5}, out), Unsupported);
  }

  TEST_CASE("collocation layout") {
    const auto h = make_problem("helmholtz2d");
    const std::vector<std::size_t> n{5, 6};
    const auto c = make_collocation(*h, n);
    CHECK(c.interior_count == 3 * 4);
    CHECK(c.bc_count() == 6 + 6 + 5 + 5);
    CHECK(c.ic_count() == 0);

    const auto ac = make_problem("allencahn1d1t");
    const std::vector<std::size_t> na{5, 4};
    const auto ca = make_collocation(*ac, na);
    CHECK(ca.interior_count == 3 * 3);
    CHECK(ca.ic_count() == 5);
    CHECK(ca.bc_count() == 8);

    const std::vector<std::size_t> too_few{2, 6}, wrong_dim{5, 5, 5};
    CHECK_THROWS_AS(make_collocation(*h, too_few), InvalidArgument);
    CHECK_THROWS_AS(make_collocation(*h, wrong_dim), InvalidArgument);
  }

  TEST_CASE("face points lie on their faces and interior points on none") {
    const std::vector<std::pair<std::string, std::vector<std::size_t>>> cases{
        {"helmholtz2d", {7, 6}}, {"cavity2d", {5, 5}}, {"allencahn1d1t", {8, 5}}, {"kleingordon2d1t", {4, 5, 3}}};
    for (const auto& [name, n] : cases) {
      const auto p = make_problem(name);
      const auto c = make_collocation(*p, n);
      for (const auto& fg : c.faces) {
        const auto pts = tensor_points(c.grid, fg.ranges);
        CHECK(pts.size() == fg.count);
        for (std::size_t i = 0; i < pts.size(); ++i) CHECK(point_on_face(*p, fg.face, pts[i]));
      }
      const auto inner = tensor_points(c.grid, c.interior);
      CHECK(inner.size() == c.interior_count);
      for (std::size_t i = 0; i < inner.size(); ++i)
        for (const auto& fg : c.faces) CHECK_FALSE(point_on_face(*p, fg.face, inner[i]));
    }
  }

  TEST_CASE("zero-model loss examples") {
    const auto ac = make_problem("allencahn1d1t");
    const std::vector<std::size_t> na{9, 5};
    const auto ca = make_collocation(*ac, na);
    const auto r = total_loss(zero_model(*ac), *ac, ca, {}, false).loss;
    double ic = 0.0;
    for (int i = 0; i < 9; ++i) {
      const double x = -1.0 + 2.0 * i / 8;
      const double u0 = x * x * std::cos(kPi * x);
      ic += u0 * u0;
    }
    CHECK(r.l_ic == doctest::Approx(ic / 9).epsilon(1e-14));
    CHECK(r.l_bc == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(face_mse(r, "x_lo") == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(face_mse(r, "x_hi") == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.l_pde == 0.0);

    const auto cav = make_problem("cavity2d");
    const std::vector<std::size_t> nc{6, 6};
    const auto cc = make_collocation(*cav, nc);
    const auto rc = total_loss(zero_model(*cav), *cav, cc, {}, false).loss;
    CHECK(face_mse(rc, "lid") == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(face_mse(rc, "bottom") == 0.0);
    CHECK(face_mse(rc, "left") == 0.0);
    CHECK(face_mse(rc, "right") == 0.0);
    CHECK(rc.l_bc == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(rc.l_pde == 0.0);

    const auto h = make_problem("helmholtz2d");
    const std::vector<std::size_t> nh{6, 6};
    const auto ch = make_collocation(*h, nh);
    const auto rh = total_loss(zero_model(*h), *h, ch, {}, false).loss;
    CHECK(rh.l_bc == 0.0);
    double q2 = 0.0;
    for (int i = 1; i < 5; ++i)
      for (int j = 1; j < 5; ++j) {
        const double q = helmholtz::forcing(-1.0 + 0.4 * i, -1.0 + 0.4 * j);
        q2 += q * q;
      }
    CHECK(rh.l_pde == doctest::Approx(q2 / 16).epsilon(1e-12));

    const auto kg = make_problem("kleingordon2d1t");
    std::vector<double> tgt(1);
    kg->face_target(kg->faces()[0], std::vector<double>{1.0, 1.0, 0.0}, tgt);
    CHECK(tgt[0] == 2.0);
  }

  TEST_CASE("fixed point u = -1 of the Allen-Cahn operator") {
    const auto ac = make_problem("allencahn1d1t");
    const std::vector<std::size_t> n{9, 5};
    const auto c = make_collocation(*ac, n);
    const auto r = total_loss(constant_model(*ac, {-1.0, 1.0}), *ac, c, {}, false).loss;
    CHECK(r.l_pde == 0.0);
    CHECK(r.l_bc == 0.0);
  }

  TEST_CASE("weights and decomposition") {
    const auto h = make_problem("helmholtz2d");
    const std::vector<std::size_t> n{6, 6};
    const auto c = make_collocation(*h, n);
    const auto m = sep_for(*h, {3, 3}, 3, 4);
    const auto z = total_loss(m, *h, c, {0, 0, 0});
    CHECK(z.loss.total == 0.0);
    for (double g : z.grad.values) CHECK(g == 0.0);
    CHECK(z.loss.l_pde > 0.0);

    const auto base = total_loss(m, *h, c, {1, 1, 1}, false).loss;
    CHECK(total_loss(m, *h, c, {1, 0, 0}, false).loss.total == base.l_pde);
    CHECK(loss_pde(m, *h, c) == base.l_pde);
    CHECK(loss_bc(m, *h, c) == base.l_bc);
    for (const LossWeights w : {LossWeights{0.3, 2.0, 7.5}, LossWeights{1, 0, 1}, LossWeights{10, 1, 0.1}}) {
      const auto r = total_loss(m, *h, c, w, false).loss;
      CHECK(r.l_pde == base.l_pde);
      CHECK(r.l_bc == base.l_bc);
      CHECK(r.total == w.pde * r.l_pde + w.ic * r.l_ic + w.bc * r.l_bc);
    }

    const auto ac = make_problem("allencahn1d1t");
    const std::vector<std::size_t> na{7, 5};
    const auto ca = make_collocation(*ac, na);
    const auto ma = sep_for(*ac, {3}, 2, 5);
    const auto ra = total_loss(ma, *ac, ca, {1, 1, 1}, false).loss;
    CHECK(loss_ic(ma, *ac, ca) == ra.l_ic);
    double ic_sum = 0.0, bc_sum = 0.0;
    std::size_t ic_n = 0, bc_n = 0;
    for (const auto& f : ra.faces) {
      (f.initial ? ic_sum : bc_sum) += f.mse * static_cast<double>(f.points);
      (f.initial ? ic_n : bc_n) += f.points;
    }
    CHECK(ra.l_ic == doctest::Approx(ic_sum / static_cast<double>(ic_n)).epsilon(1e-14));
    CHECK(ra.l_bc == doctest::Approx(bc_sum / static_cast<double>(bc_n)).epsilon(1e-14));
  }

  TEST_CASE("loss gradients match finite differences") {
    struct Case {
      std::string name;
      std::vector<std::size_t> n;
      std::vector<int> hidden;
      int rank;
    };
    const std::vector<Case> cases{{"helmholtz2d", {6, 6}, {3, 3}, 3},
                                  {"cavity2d", {5, 5}, {3, 3}, 2},
                                  {"allencahn1d1t", {6, 4}, {3, 3}, 3},
                                  {"kleingordon2d1t", {4, 4, 4}, {3}, 2}};
    // Quintic splines keep the second input derivative twice differentiable in
    // the parameters, so the loss has no kinks where hidden values cross knots.
    // Richardson extrapolation at a moderate step keeps both truncation and
    // round-off small.
    const LossWeights w{1.0, 0.7, 1.3};
    for (const auto& cs : cases) {
      CAPTURE(cs.name);
      const auto p = make_problem(cs.name);
      const auto c = make_collocation(*p, cs.n);
      {
        auto m = sep_for(*p, cs.hidden, cs.rank, 11, 5);
        const SeparableLoss L(*p, c);
        const auto r = L(m, w, true);
        const auto fd = oracle::fd_gradient_richardson(m.param_blocks(), [&] { return L(m, w, false).loss.total; }, 1e-3);
        CHECK(oracle::worst_rel(r.grad.values, fd, oracle::loss_floor(r.loss.total)) <= 1e-4);
      }
      {
        auto m = dense_for(*p, {3, 3}, 12, 5);
        const DenseLoss L(*p, c);
        const auto r = L(m, w, true);
        const auto fd = oracle::fd_gradient_richardson(m.param_blocks(), [&] { return L(m, w, false).loss.total; }, 1e-3);
        CHECK(oracle::worst_rel(r.grad.values, fd, oracle::loss_floor(r.loss.total)) <= 1e-4);
      }
    }
  }

  TEST_CASE("network evaluation counters") {
    const auto h = make_problem("helmholtz2d");
    const std::vector<std::size_t> n{8, 6};
    const auto c = make_collocation(*h, n);
    const auto sm = sep_for(*h, {3}, 2, 1);
    sm.reset_evaluations();
    SeparableLoss(*h, c)(sm, {}, true);
    CHECK(sm.evaluations() == 8 + 6);
    const auto dm = dense_for(*h, {3}, 1);
    dm.reset_evaluations();
    DenseLoss(*h, c)(dm, {}, true);
    CHECK(dm.evaluations() == 2 * c.interior_count + c.bc_count());
  }

  TEST_CASE("dense loss is independent of the thread count") {
    const auto h = make_problem("helmholtz2d");
    const std::vector<std::size_t> n{24, 24};
    const auto c = make_collocation(*h, n);
    const auto m = dense_for(*h, {4}, 3);
    const auto a = DenseLoss(*h, c, 1)(m, {}, true);
    for (int t : {2, 3, 4}) {
      const auto b = DenseLoss(*h, c, t)(m, {}, true);
      CHECK(b.loss.total == a.loss.total);
      CHECK(b.grad.values == a.grad.values);
    }
  }

  TEST_CASE("mismatched model is rejected") {
    const auto h = make_problem("helmholtz2d");
    const auto cav = make_problem("cavity2d");
    const std::vector<std::size_t> n{5, 5};
    const auto c = make_collocation(*h, n);
    CHECK_THROWS_AS(total_loss(sep_for(*cav, {3}, 2, 1), *h, c, {}), InvalidArgument);
  }

  TEST_CASE("cavity residual fields") {
    const std::size_t n = 50;
    Rng rng(9);
    CavityFields f;
    for (auto* fld : {&f.u, &f.u_x, &f.u_y, &f.u_xx, &f.u_yy, &f.v, &f.v_x, &f.v_y, &f.v_xx, &f.v_yy, &f.p_x, &f.p_y})
      *fld = random_field(n, rng);
    const auto r = cavity_residuals(f);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = f.u.values[i], v = f.v.values[i];
      const double cont = f.u_x.values[i] + f.v_y.values[i];
      const double mx =
          u * f.u_x.values[i] + v * f.u_y.values[i] + f.p_x.values[i] - (f.u_xx.values[i] + f.u_yy.values[i]) / 100.0;
      const double my =
          u * f.v_x.values[i] + v * f.v_y.values[i] + f.p_y.values[i] - (f.v_xx.values[i] + f.v_yy.values[i]) / 100.0;
      CHECK(r.continuity.values[i] == doctest::Approx(cont).epsilon(1e-14));
      CHECK(r.momentum_x.values[i] == doctest::Approx(mx).epsilon(1e-13));
      CHECK(r.momentum_y.values[i] == doctest::Approx(my).epsilon(1e-13));
    }

    // u = x, v = -y, constant pressure.
    CavityFields s;
    for (auto* fld : {&s.u, &s.u_x, &s.u_y, &s.u_xx, &s.u_yy, &s.v, &s.v_x, &s.v_y, &s.v_xx, &s.v_yy, &s.p_x, &s.p_y})
      *fld = DenseField({n});
    for (std::size_t i = 0; i < n; ++i) {
      s.u.values[i] = rng.uniform(0, 1);
      s.v.values[i] = -rng.uniform(0, 1);
    }
    std::fill(s.u_x.values.begin(), s.u_x.values.end(), 1.0);
    std::fill(s.v_y.values.begin(), s.v_y.values.end(), -1.0);
    for (double v : cavity_residuals(s).continuity.values) CHECK(v == 0.0);

    CavityFields rest;
    for (auto* fld : {&rest.u, &rest.u_x, &rest.u_y, &rest.u_xx, &rest.u_yy, &rest.v, &rest.v_x, &rest.v_y, &rest.v_xx,
                      &rest.v_yy, &rest.p_x, &rest.p_y})
      *fld = DenseField({n});
    const auto rr = cavity_residuals(rest);
    for (const auto* fld : {&rr.continuity, &rr.momentum_x, &rr.momentum_y})
      for (double v : fld->values) CHECK(v == 0.0);
  }

  TEST_CASE("Allen-Cahn residual of constant states") {
    for (double c : {1.0, 0.0, -1.0}) {
      const DenseField u({4, 3}, c), zero({4, 3});
      for (double v : allen_cahn_residual(u, zero, zero).values) CHECK(v == 0.0);
    }
    CHECK_THROWS_AS(allen_cahn_residual(DenseField({2}), DenseField({3}), DenseField({2})), InvalidArgument);
  }

  TEST_CASE("pressure gauge") {
    DenseField p({5});
    p.values = {3.0, 5.0, 4.0, 10.0, 3.0};
    const auto q = normalize_pressure(p);
    double mean = 0.0, peak = 0.0;
    for (double v : q.values) {
      mean += v;
      peak = std::max(peak, std::abs(v));
    }
    CHECK(std::abs(mean) <= 1e-15);
    CHECK(peak == 1.0);
    CHECK(q.values[3] == 1.0);
    const auto flat = normalize_pressure(DenseField({3}, 2.0));
    for (double v : flat.values) CHECK(v == 0.0);
  }
}
