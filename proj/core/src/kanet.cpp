#include "spikan/kanet.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "spikan/errors.hpp"
#include "spikan/io.hpp"

namespace spikan {

namespace {

// silu and its first three derivatives.
// With `all` false only the value and first derivative are filled.
std::array<double, 4> silu_derivs(double x, bool all) noexcept {
  const double s = 1.0 / (1.0 + std::exp(-x));
  if (!all) return {x * s, s * (1.0 + x * (1.0 - s)), 0.0, 0.0};
  const double q = s * (1.0 - s);
  const double a = 1.0 - 2.0 * s;
  return {x * s, s * (1.0 + x * (1.0 - s)), q * (2.0 + x * a),
          q * (a * (3.0 + x * a) - 2.0 * x * q)};
}

void check_widths(const std::vector<int>& widths) {
  if (widths.size() < 2) throw InvalidArgument("KanNetwork: need at least input and output widths");
  for (int w : widths)
    if (w < 1) throw InvalidArgument("KanNetwork: widths must be positive");
}

void check_tape(const KanNetwork& net, const std::vector<int>& widths, int n_basis) {
  if (widths != net.widths() || n_basis != net.spline().basis_count())
    throw InvalidArgument("tape was not recorded on this network");
}

}  // namespace

double silu(double x) noexcept { return x / (1.0 + std::exp(-x)); }

std::size_t layer_param_count(int n_in, int n_out, int n_basis) noexcept {
  const auto edges = static_cast<std::size_t>(n_in) * static_cast<std::size_t>(n_out);
  return edges * static_cast<std::size_t>(n_basis + 2) + static_cast<std::size_t>(n_out);
}

KanNetwork::KanNetwork(std::vector<int> widths, SplineSpec spec)
    : widths_(std::move(widths)), spec_(std::move(spec)) {
  check_widths(widths_);
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    offsets_.push_back(total);
    total += layer_param_count(widths_[l], widths_[l + 1], spec_.basis_count());
  }
  params_.assign(total, 0.0);
  for (std::size_t l = 0; l < layer_count(); ++l)
    for (double& s : layer(l).scale) s = 1.0;
}

KanNetwork KanNetwork::random(std::vector<int> widths, SplineSpec spec, Rng& rng) {
  KanNetwork net(std::move(widths), std::move(spec));
  const double coeff_std = 0.1 / std::sqrt(static_cast<double>(net.spec_.basis_count()));
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    KanLayer L = net.layer(l);
    const double base_std = 1.0 / std::sqrt(static_cast<double>(L.n_in));
    for (double& c : L.coeffs) c = coeff_std * rng.normal();
    for (double& b : L.base) b = base_std * rng.normal();
  }
  return net;
}

KanLayer KanNetwork::layer(std::size_t l) {
  const int n_in = widths_[l], n_out = widths_[l + 1], nb = spec_.basis_count();
  const auto edges = static_cast<std::size_t>(n_in) * static_cast<std::size_t>(n_out);
  std::span<double> all(params_.data() + offsets_[l], layer_param_count(n_in, n_out, nb));
  return {n_in,
          n_out,
          nb,
          all.subspan(0, edges * static_cast<std::size_t>(nb)),
          all.subspan(edges * static_cast<std::size_t>(nb), edges),
          all.subspan(edges * static_cast<std::size_t>(nb + 1), edges),
          all.subspan(edges * static_cast<std::size_t>(nb + 2))};
}

ConstKanLayer KanNetwork::layer(std::size_t l) const {
  KanLayer m = const_cast<KanNetwork*>(this)->layer(l);
  return {m.n_in, m.n_out, m.n_basis, m.coeffs, m.base, m.scale, m.bias};
}

double edge_activation(const ConstKanLayer& layer, const SplineSpec& spec, int i, int j, double x) {
  LocalBasis lb;
  local_basis(spec, x, 0, lb);
  double s = 0.0;
  for (int c = 0; c < lb.count; ++c) s += layer.coeff(i, j, lb.first + c) * lb.d[0][c];
  return layer.base_weight(i, j) * silu(clamp_to_reference(x)) + layer.spline_scale(i, j) * s;
}

void record(const KanNetwork& net, std::span<const double> x, int dir, Tape& tape) {
  const auto& widths = net.widths();
  if (static_cast<int>(x.size()) != net.input_width())
    throw InvalidArgument("forward: input has " + std::to_string(x.size()) + " components, network expects " +
                          std::to_string(net.input_width()));
  if (dir >= net.input_width()) throw InvalidArgument("forward_jet: direction out of range");

  const bool jets = dir >= 0;
  const std::size_t L = net.layer_count();
  const SplineSpec& spec = net.spline();
  if (tape.widths_ != widths || tape.n_basis_ != spec.basis_count()) {
    tape.widths_ = widths;
    tape.n_basis_ = spec.basis_count();
    tape.layers_.assign(L, {});
    for (std::size_t l = 0; l < L; ++l) {
      auto& R = tape.layers_[l];
      const auto n = static_cast<std::size_t>(widths[l]);
      for (auto* v : {&R.u, &R.du, &R.ddu, &R.h, &R.dh, &R.ddh}) v->assign(n, 0.0);
      R.basis.assign(n, {});
      R.silu.assign(n, {});
    }
    const auto n_out = static_cast<std::size_t>(widths.back());
    tape.out_v_.assign(n_out, 0.0);
    tape.out_d1_.assign(n_out, 0.0);
    tape.out_d2_.assign(n_out, 0.0);
  }
  tape.derivs_ = jets;

  {
    auto& R = tape.layers_[0];
    for (std::size_t j = 0; j < x.size(); ++j) {
      R.u[j] = clamp_to_reference(x[j]);
      R.du[j] = (jets && static_cast<int>(j) == dir) ? 1.0 : 0.0;
      R.ddu[j] = 0.0;
    }
  }

  for (std::size_t l = 0; l < L; ++l) {
    auto& R = tape.layers_[l];
    const ConstKanLayer W = net.layer(l);
    // First derivatives are kept even for value tapes: the reverse pass needs them.
    const int max_order = jets ? 3 : 1;
    for (int j = 0; j < W.n_in; ++j) {
      local_basis(spec, R.u[j], max_order, R.basis[j]);
      R.silu[j] = silu_derivs(R.u[j], jets);
    }

    const bool last = l + 1 == L;
    double* ov = last ? tape.out_v_.data() : tape.layers_[l + 1].h.data();
    double* od1 = last ? tape.out_d1_.data() : tape.layers_[l + 1].dh.data();
    double* od2 = last ? tape.out_d2_.data() : tape.layers_[l + 1].ddh.data();

    for (int i = 0; i < W.n_out; ++i) {
      double v = W.bias[i], dv = 0.0, ddv = 0.0;
      for (int j = 0; j < W.n_in; ++j) {
        const LocalBasis& B = R.basis[j];
        const double* c = &W.coeff(i, j, B.first);
        const double wb = W.base_weight(i, j), ws = W.spline_scale(i, j);
        double s0 = 0.0;
        for (int q = 0; q < B.count; ++q) s0 += c[q] * B.d[0][q];
        v += wb * R.silu[j][0] + ws * s0;
        if (jets) {
          double s1 = 0.0, s2 = 0.0;
          for (int q = 0; q < B.count; ++q) {
            s1 += c[q] * B.d[1][q];
            s2 += c[q] * B.d[2][q];
          }
          const double p1 = wb * R.silu[j][1] + ws * s1;
          const double p2 = wb * R.silu[j][2] + ws * s2;
          dv += p1 * R.du[j];
          ddv += p2 * R.du[j] * R.du[j] + p1 * R.ddu[j];
        }
      }
      ov[i] = v;
      od1[i] = dv;
      od2[i] = ddv;
    }

    if (!last) {
      auto& N = tape.layers_[l + 1];
      for (int i = 0; i < W.n_out; ++i) {
        const double u = std::tanh(N.h[i]);
        N.u[i] = u;
        if (jets) {
          const double s = 1.0 - u * u;
          N.du[i] = s * N.dh[i];
          N.ddu[i] = s * N.ddh[i] - 2.0 * u * s * N.dh[i] * N.dh[i];
        } else {
          N.du[i] = 0.0;
          N.ddu[i] = 0.0;
        }
      }
    }
  }
}

std::vector<double> forward(const KanNetwork& net, std::span<const double> x) {
  Tape tape;
  record(net, x, -1, tape);
  auto v = tape.value();
  return {v.begin(), v.end()};
}

Jet2 forward_jet(const KanNetwork& net, std::span<const double> x, int dir) {
  if (dir < 0) throw InvalidArgument("forward_jet: direction must be a valid input index");
  Tape tape;
  record(net, x, dir, tape);
  return tape.output();
}

void accumulate_param_grad(const KanNetwork& net, const Tape& tape, std::span<const double> v_bar,
                           std::span<const double> d1_bar, std::span<const double> d2_bar,
                           std::span<double> grad) {
  check_tape(net, tape.widths_, tape.n_basis_);
  if (grad.size() != net.param_count()) throw InvalidArgument("gradient buffer size mismatch");
  const auto n_out_net = static_cast<std::size_t>(net.output_width());
  if ((!v_bar.empty() && v_bar.size() != n_out_net) || (!d1_bar.empty() && d1_bar.size() != n_out_net) ||
      (!d2_bar.empty() && d2_bar.size() != n_out_net))
    throw InvalidArgument("cotangent width does not match network output");

  const bool jets = tape.derivs_ && !(d1_bar.empty() && d2_bar.empty());
  const std::size_t L = net.layer_count();

  // Cotangents on the current layer's outputs (value, d1, d2).
  std::vector<double> vb(n_out_net, 0.0);
  if (!v_bar.empty()) vb.assign(v_bar.begin(), v_bar.end());
  std::vector<double> d1b(n_out_net, 0.0), d2b(n_out_net, 0.0);
  if (jets) {
    if (!d1_bar.empty()) d1b.assign(d1_bar.begin(), d1_bar.end());
    if (!d2_bar.empty()) d2b.assign(d2_bar.begin(), d2_bar.end());
  }
  std::vector<double> ub, dub, ddub;

  for (std::size_t l = L; l-- > 0;) {
    const auto& R = tape.layers_[l];
    const ConstKanLayer W = net.layer(l);
    const std::size_t off = net.layer_offset(l);
    const auto edges = static_cast<std::size_t>(W.n_in) * static_cast<std::size_t>(W.n_out);
    double* g_coeff = grad.data() + off;
    double* g_base = g_coeff + edges * static_cast<std::size_t>(W.n_basis);
    double* g_scale = g_base + edges;
    double* g_bias = g_scale + edges;
    const bool need_input = l > 0;

    ub.assign(static_cast<std::size_t>(W.n_in), 0.0);
    dub.assign(static_cast<std::size_t>(W.n_in), 0.0);
    ddub.assign(static_cast<std::size_t>(W.n_in), 0.0);

    for (int i = 0; i < W.n_out; ++i) {
      g_bias[i] += vb[i];
      for (int j = 0; j < W.n_in; ++j) {
        const LocalBasis& B = R.basis[j];
        const std::size_t e = static_cast<std::size_t>(i) * W.n_in + j;
        const double* c = &W.coeff(i, j, B.first);
        double* gc = g_coeff + e * W.n_basis + B.first;
        const double wb = W.base[e], ws = W.scale[e];
        const auto& sl = R.silu[j];

        const double pb0 = vb[i];
        double pb1 = 0.0, pb2 = 0.0;
        if (jets) {
          pb1 = d1b[i] * R.du[j] + d2b[i] * R.ddu[j];
          pb2 = d2b[i] * R.du[j] * R.du[j];
        }

        double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
        for (int q = 0; q < B.count; ++q) {
          s0 += c[q] * B.d[0][q];
          if (jets || need_input) s1 += c[q] * B.d[1][q];
          if (jets) {
            s2 += c[q] * B.d[2][q];
            s3 += c[q] * B.d[3][q];
          }
          gc[q] += ws * (pb0 * B.d[0][q] + pb1 * B.d[1][q] + pb2 * B.d[2][q]);
        }
        g_scale[e] += pb0 * s0 + pb1 * s1 + pb2 * s2;
        g_base[e] += pb0 * sl[0] + pb1 * sl[1] + pb2 * sl[2];

        if (need_input) {
          if (jets) {
            const double p1 = wb * sl[1] + ws * s1;
            const double p2 = wb * sl[2] + ws * s2;
            const double p3 = wb * sl[3] + ws * s3;
            ub[j] += pb0 * p1 + pb1 * p2 + pb2 * p3;
            dub[j] += d1b[i] * p1 + 2.0 * d2b[i] * p2 * R.du[j];
            ddub[j] += d2b[i] * p1;
          } else {
            ub[j] += pb0 * (wb * sl[1] + ws * s1);
          }
        }
      }
    }

    if (!need_input) break;

    // Through the tanh squash: u = tanh(h), u' = s h', u'' = s h'' - 2 u s h'^2.
    const auto n = static_cast<std::size_t>(W.n_in);
    vb.assign(n, 0.0);
    d1b.assign(n, 0.0);
    d2b.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double u = R.u[j];
      const double s = 1.0 - u * u;
      if (jets) {
        const double h1 = R.dh[j], h2 = R.ddh[j];
        vb[j] = ub[j] * s + dub[j] * (-2.0 * u * s * h1) +
                ddub[j] * (-2.0 * u * s * h2 - 2.0 * h1 * h1 * (s * s - 2.0 * u * u * s));
        d1b[j] = dub[j] * s + ddub[j] * (-4.0 * u * s * h1);
        d2b[j] = ddub[j] * s;
      } else {
        vb[j] = ub[j] * s;
      }
    }
  }
}

ParamGrad backward_params(const KanNetwork& net, const Tape& tape, std::span<const double> v_bar,
                          std::span<const double> d1_bar, std::span<const double> d2_bar) {
  ParamGrad g(net.param_count());
  accumulate_param_grad(net, tape, v_bar, d1_bar, d2_bar, g.values);
  return g;
}

void save_checkpoint(std::ostream& os, std::span<const NamedNetwork> nets) {
  os << "SPIKAN-CHECKPOINT 1\n";
  auto write_tensor = [&os](std::size_t l, const char* name, std::span<const double> vals,
                            std::initializer_list<int> shape) {
    os << "tensor " << l << ' ' << name;
    for (int s : shape) os << ' ' << s;
    os << '\n';
    for (std::size_t i = 0; i < vals.size(); ++i) os << (i ? " " : "") << io::format_double(vals[i]);
    os << '\n';
  };
  for (const auto& [name, net] : nets) {
    os << "network " << name << '\n';
    os << "widths";
    for (int w : net.widths()) os << ' ' << w;
    os << '\n';
    os << "spline " << net.spline().grid_size() << ' ' << net.spline().degree() << '\n';
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      const ConstKanLayer W = net.layer(l);
      write_tensor(l, "coeffs", W.coeffs, {W.n_out, W.n_in, W.n_basis});
      write_tensor(l, "base", W.base, {W.n_out, W.n_in});
      write_tensor(l, "scale", W.scale, {W.n_out, W.n_in});
      write_tensor(l, "bias", W.bias, {W.n_out});
    }
    os << "end\n";
  }
}

std::vector<NamedNetwork> load_checkpoint(std::istream& is) {
  io::LineReader reader(is);
  std::string line;
  auto fail = [&](const std::string& msg) -> ParseError { return ParseError("checkpoint: " + msg, reader.line_number()); };
  if (!reader.next(line) || io::trim(line) != "SPIKAN-CHECKPOINT 1") throw fail("missing header");

  std::vector<NamedNetwork> out;
  while (reader.next(line)) {
    auto tok = io::split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] != "network" || tok.size() != 2) throw fail("expected 'network <name>'");
    const std::string name = tok[1];

    if (!reader.next(line)) throw fail("truncated");
    tok = io::split_ws(line);
    if (tok.empty() || tok[0] != "widths") throw fail("expected widths");
    std::vector<int> widths;
    for (std::size_t i = 1; i < tok.size(); ++i) widths.push_back(static_cast<int>(io::parse_int(tok[i])));

    if (!reader.next(line)) throw fail("truncated");
    tok = io::split_ws(line);
    if (tok.size() != 3 || tok[0] != "spline") throw fail("expected 'spline <g> <k>'");
    KanNetwork net(widths, SplineSpec(static_cast<int>(io::parse_int(tok[1])),
                                      static_cast<int>(io::parse_int(tok[2]))));

    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      KanLayer W = net.layer(l);
      for (auto [tname, dst] : {std::pair{"coeffs", W.coeffs}, std::pair{"base", W.base},
                                std::pair{"scale", W.scale}, std::pair{"bias", W.bias}}) {
        if (!reader.next(line)) throw fail("truncated");
        tok = io::split_ws(line);
        if (tok.size() < 3 || tok[0] != "tensor" || io::parse_int(tok[1]) != static_cast<long long>(l) ||
            tok[2] != tname)
          throw fail(std::string("expected tensor ") + std::to_string(l) + " " + tname);
        if (!reader.next(line)) throw fail("truncated");
        auto vals = io::split_ws(line);
        if (vals.size() != dst.size()) throw fail(std::string("wrong value count for ") + tname);
        try {
          for (std::size_t i = 0; i < vals.size(); ++i) dst[i] = io::parse_double(vals[i]);
        } catch (const InvalidArgument& e) {
          throw fail(e.what());
        }
      }
    }
    if (!reader.next(line) || io::trim(line) != "end") throw fail("expected 'end'");
    out.push_back({name, std::move(net)});
  }
  if (out.empty()) throw fail("no networks");
  return out;
}

void save_checkpoint(const std::string& path, std::span<const NamedNetwork> nets) {
  std::ostringstream ss;
  save_checkpoint(ss, nets);
  io::write_file(path, ss.str());
}

std::vector<NamedNetwork> load_checkpoint(const std::string& path) {
  std::istringstream ss(io::read_file(path));
  return load_checkpoint(ss);
}

}  // namespace spikan
