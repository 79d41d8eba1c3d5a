#include <doctest.h>

#include <cmath>
#include <vector>

#include "common/oracles.hpp"
#include "spikan/errors.hpp"
#include "spikan/full_model.hpp"
#include "spikan/sep_model.hpp"

using namespace spikan;

namespace {

DenseModel random_dense(std::vector<int> widths, std::vector<Interval> dom, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<AxisMap> maps;
  std::vector<std::string> names;
  for (std::size_t a = 0; a < dom.size(); ++a) {
    maps.push_back(AxisMap::from_interval(dom[a].lo, dom[a].hi));
    names.push_back("x" + std::to_string(a));
  }
  auto m = DenseModel::random(widths, SplineSpec(3, 3), maps, names, rng);
  for (std::size_t l = 0; l < m.net().layer_count(); ++l) {
    for (double& b : m.net().layer(l).bias) b = 0.2 * rng.normal();
    for (double& c : m.net().layer(l).coeffs) c += 0.3 * rng.normal();
  }
  return m;
}

PointCloud random_points(std::size_t n, const std::vector<Interval>& dom, std::uint64_t seed) {
  Rng rng(seed);
  PointCloud pc;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> p;
    for (const auto& iv : dom) p.push_back(rng.uniform(iv.lo + 0.05, iv.hi - 0.05));
    if (pc.dim() == 0) pc = PointCloud(dom.size(), {});
    pc.push_back(p);
  }
  return pc;
}

}  // namespace

TEST_SUITE("full_model") {
  TEST_CASE("zero network") {
    const DenseModel m(KanNetwork({2, 3, 2}, SplineSpec(3, 3)), {AxisMap::from_interval(0, 1), AxisMap::from_interval(0, 1)},
                       {"x", "y"});
    const PointCloud pts(2, {0.1, 0.2, 0.9, 0.5});
    for (double v : dense_eval(m, pts)) CHECK(v == 0.0);
    for (int axis : {0, 1})
      for (int order : {1, 2})
        for (double v : dense_derivs(m, pts, axis, order)) CHECK(v == 0.0);
  }

  TEST_CASE("single point equals the network forward pass") {
    const auto m = random_dense({2, 4, 3}, {{0, 2}, {-1, 3}}, 1);
    const auto v = dense_eval(m, PointCloud(2, {0.5, 2.0}));
    const auto f = forward(m.net(), std::vector<double>{-0.5, 0.5});
    for (std::size_t o = 0; o < 3; ++o) CHECK(v[o] == f[o]);
  }

  TEST_CASE("fit to x + 2y has y-derivative 2") {
    KanNetwork net({2, 1}, SplineSpec(3, 3));
    oracle::fit_edge(net.layer(0), 0, 0, 3, 3, [](double x) { return x; });
    oracle::fit_edge(net.layer(0), 0, 1, 3, 3, [](double y) { return 2 * y; });
    const DenseModel m(net, {AxisMap::from_interval(-1, 1), AxisMap::from_interval(-1, 1)}, {"x", "y"});
    const auto pts = random_points(20, {{-1, 1}, {-1, 1}}, 5);
    for (double v : dense_derivs(m, pts, 1, 1)) CHECK(v == doctest::Approx(2.0).epsilon(1e-9));
    for (double v : dense_derivs(m, pts, 0, 1)) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("agrees with a separable model on an additive target") {
    // x + y is rank 2 in separated form: [x, 1] . [1, y].
    KanNetwork dnet({2, 1}, SplineSpec(3, 3));
    oracle::fit_edge(dnet.layer(0), 0, 0, 3, 3, [](double x) { return x; });
    oracle::fit_edge(dnet.layer(0), 0, 1, 3, 3, [](double y) { return y; });
    const std::vector<AxisMap> maps{AxisMap::from_interval(-1, 1), AxisMap::from_interval(-1, 1)};
    const DenseModel dense(dnet, maps, {"x", "y"});

    KanNetwork fx({1, 2}, SplineSpec(3, 3)), fy({1, 2}, SplineSpec(3, 3));
    oracle::fit_edge(fx.layer(0), 0, 0, 3, 3, [](double x) { return x; });
    oracle::fit_edge(fx.layer(0), 1, 0, 3, 3, [](double) { return 1.0; });
    oracle::fit_edge(fy.layer(0), 0, 0, 3, 3, [](double) { return 1.0; });
    oracle::fit_edge(fy.layer(0), 1, 0, 3, 3, [](double y) { return y; });
    const SeparableModel sep({fx, fy}, maps, {"x", "y"}, 2, 1);

    const auto pts = random_points(50, {{-1, 1}, {-1, 1}}, 9);
    const auto a = dense_eval(dense, pts), b = eval_points(sep, pts);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::abs(a[i] - b[i]) <= 1e-9);
      CHECK(std::abs(a[i] - (pts[i][0] + pts[i][1])) <= 1e-9);
    }
  }

  TEST_CASE("derivatives match finite differences") {
    const std::vector<Interval> dom{{0, 1}, {-2, 2}, {0, 0.5}};
    const auto m = random_dense({3, 4, 4, 2}, dom, 3);
    const auto pts = random_points(10, dom, 4);
    const double h = 1e-4;
    for (int axis = 0; axis < 3; ++axis) {
      const auto d1 = dense_derivs(m, pts, axis, 1), d2 = dense_derivs(m, pts, axis, 2);
      for (std::size_t p = 0; p < pts.size(); ++p) {
        auto at = [&](double s) {
          std::vector<double> x(pts[p].begin(), pts[p].end());
          x[static_cast<std::size_t>(axis)] += s;
          return dense_eval(m, PointCloud(3, x));
        };
        const auto up = at(h), um = at(-h), u0 = at(0), uhp = at(h / 2), uhm = at(-h / 2);
        for (std::size_t o = 0; o < 2; ++o) {
          const double fd1 = (4 * (uhp[o] - uhm[o]) / h - (up[o] - um[o]) / (2 * h)) / 3;
          const double fd2 = (up[o] - 2 * u0[o] + um[o]) / (h * h);
          CHECK(oracle::rel_err(d1[p * 2 + o], fd1, 1e-3) <= 1e-5);
          CHECK(oracle::rel_err(d2[p * 2 + o], fd2, 1e-1) <= 1e-5);
        }
      }
    }
    CHECK_THROWS_AS(dense_derivs(m, pts, 0, 3), Unsupported);
    CHECK_THROWS_AS(dense_derivs(m, pts, 3, 1), InvalidArgument);
  }

  TEST_CASE("zero upstream and single-point value gradient") {
    const auto m = random_dense({2, 3, 1}, {{0, 1}, {0, 1}}, 6);
    std::vector<double> xi(2);
    m.normalize(std::vector<double>{0.3, 0.8}, xi);
    Tape tape;
    record(m.net(), xi, 0, tape);
    const std::vector<double> zero{0.0};
    for (double v : dense_backward(m, tape, 0, zero, zero, zero).values) CHECK(v == 0.0);
    const std::vector<double> one{1.0};
    CHECK(dense_backward(m, tape, 0, one).values == backward_params(m.net(), tape, one).values);
  }

  TEST_CASE("aggregated gradient matches finite differences") {
    const std::vector<Interval> dom{{0, 1}, {-2, 2}};
    auto m = random_dense({2, 3, 3, 1}, dom, 7);
    const auto pts = random_points(16, dom, 8);
    auto loss = [&] {
      const auto u = dense_eval(m, pts), ux = dense_derivs(m, pts, 0, 1), uyy = dense_derivs(m, pts, 1, 2);
      double s = 0.0;
      for (std::size_t p = 0; p < pts.size(); ++p) s += 0.5 * u[p] * u[p] + 0.5 * ux[p] * ux[p] + 0.2 * uyy[p];
      return s;
    };
    ParamGrad g(m.param_count());
    std::vector<double> xi(2);
    Tape tape;
    for (std::size_t p = 0; p < pts.size(); ++p) {
      m.normalize(pts[p], xi);
      record(m.net(), xi, -1, tape);
      const std::vector<double> u{tape.value()[0]};
      dense_accumulate(m, tape, 0, u, {}, {}, g.values);
      record(m.net(), xi, 0, tape);
      const std::vector<double> ux{tape.d1()[0] * m.axis_maps()[0].derivative_factor(1)};
      dense_accumulate(m, tape, 0, {}, ux, {}, g.values);
      record(m.net(), xi, 1, tape);
      const std::vector<double> c{0.2};
      dense_accumulate(m, tape, 1, {}, {}, c, g.values);
    }
    const auto fd = oracle::fd_gradient(m.param_blocks(), loss, 1e-5);
    CHECK(oracle::worst_rel(g.values, fd, 1e-7) <= 1e-4);
  }

  TEST_CASE("one evaluation per point") {
    const auto m = random_dense({2, 3, 1}, {{0, 1}, {0, 1}}, 2);
    const auto pts = random_points(13, {{0, 1}, {0, 1}}, 1);
    m.reset_evaluations();
    dense_eval(m, pts);
    CHECK(m.evaluations() == 13);
    dense_derivs(m, pts, 1, 2);
    CHECK(m.evaluations() == 26);
  }

  TEST_CASE("construction and domain errors") {
    CHECK_THROWS_AS(DenseModel(KanNetwork({3, 1}, SplineSpec(3, 3)), {AxisMap{}, AxisMap{}}, {"x", "y"}), InvalidArgument);
    const auto m = random_dense({2, 1}, {{0, 1}, {0, 1}}, 1);
    CHECK_THROWS_AS(dense_eval(m, PointCloud(2, {0.5, 1.5})), DomainError);
    CHECK_THROWS_AS(dense_eval(m, PointCloud(3, {0.5, 0.5, 0.5})), InvalidArgument);
  }
}
