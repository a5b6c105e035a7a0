#include "bicon/normalform.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "bicon/errors.hpp"

namespace bicon {

NormalFormState NormalFormState::zero(int n) {
  NormalFormState s;
  s.n = n;
  s.xi.assign(static_cast<std::size_t>(n), 0.0);
  s.Psi.assign(static_cast<std::size_t>(n * n), 0.0);
  s.phistar.assign(static_cast<std::size_t>(n), 0.0);
  s.phibar.assign(static_cast<std::size_t>(n), 0.0);
  s.chistar.assign(static_cast<std::size_t>(n), 0.0);
  s.chibar.assign(static_cast<std::size_t>(n), 0.0);
  return s;
}

std::vector<double> NormalFormState::pack() const {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(flat_size()));
  v.insert(v.end(), xi.begin(), xi.end());
  v.insert(v.end(), Psi.begin(), Psi.end());
  v.push_back(phi);
  v.push_back(chi);
  v.insert(v.end(), phistar.begin(), phistar.end());
  v.insert(v.end(), phibar.begin(), phibar.end());
  v.insert(v.end(), chistar.begin(), chistar.end());
  v.insert(v.end(), chibar.begin(), chibar.end());
  return v;
}

NormalFormState NormalFormState::unpack(int n, const std::vector<double>& v) {
  NormalFormState s = zero(n);
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) s.xi[static_cast<std::size_t>(i)] = v[k++];
  for (int i = 0; i < n * n; ++i) s.Psi[static_cast<std::size_t>(i)] = v[k++];
  s.phi = v[k++];
  s.chi = v[k++];
  for (int i = 0; i < n; ++i) s.phistar[static_cast<std::size_t>(i)] = v[k++];
  for (int i = 0; i < n; ++i) s.phibar[static_cast<std::size_t>(i)] = v[k++];
  for (int i = 0; i < n; ++i) s.chistar[static_cast<std::size_t>(i)] = v[k++];
  for (int i = 0; i < n; ++i) s.chibar[static_cast<std::size_t>(i)] = v[k++];
  return s;
}

Curve Curve::line(std::vector<double> from, std::vector<double> to, double h) {
  Curve c;
  std::vector<double> d(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) d[i] = to[i] - from[i];
  c.position = [from, d](double t) {
    std::vector<double> x(from.size());
    for (std::size_t i = 0; i < from.size(); ++i) x[i] = from[i] + t * d[i];
    return x;
  };
  c.velocity = [d](double) { return d; };
  c.t0 = 0.0;
  c.t1 = 1.0;
  c.h = h;
  return c;
}

TransportCoefficients::TransportCoefficients(const BiconformalData& data) {
  const MetricChart& m = *data.metric;
  const ProjectorPair& pp = data.proj;
  n_ = m.dim();
  p_ = pp.p();
  if (!data.Rbar || !data.L0 || !data.L1)
    throw DegenerateRank(
        "transport coefficients need curvature and normal-form sources");
  const ConnectionCoefficients& gb = data.gammabar;
  gammabar_ = gb.coeffs;
  Rbar_ = *data.Rbar;
  P_dn_ = pp.P();
  Pi_dn_ = pp.Pi();
  P_mix_ = pp.P_mix();
  Pi_mix_ = pp.Pi_mix();
  g_inv_ = m.g_inv();
  E_ = data.E;
  W_ = data.W;
  DE_ = covariant_derivative(gb, data.E);
  DW_ = covariant_derivative(gb, data.W);
  DDE_ = covariant_derivative(gb, DE_);
  DDW_ = covariant_derivative(gb, DW_);
  L0_ = *data.L0;
  L1_ = *data.L1;
  DL0_ = covariant_derivative(gb, L0_);
  DL1_ = covariant_derivative(gb, L1_);
  DP_ = covariant_derivative(gb, P_dn_);
  DPi_ = covariant_derivative(gb, Pi_dn_);
}

namespace {

std::vector<double> eval_field(Evaluator& ev, const TensorField& t) {
  std::vector<double> out;
  out.reserve(t.components().size());
  for (const Expr& e : t.components()) out.push_back(ev.value(e));
  return out;
}

} // namespace

TransportCoefficients::Num TransportCoefficients::evaluate(
    const EvalContext& ctx, const std::vector<double>& point) const {
  Evaluator ev(ctx, point);
  Num c;
  c.n = n_;
  c.p = p_;
  c.gammabar = eval_field(ev, gammabar_);
  c.Rbar = eval_field(ev, Rbar_);
  c.P_dn = eval_field(ev, P_dn_);
  c.Pi_dn = eval_field(ev, Pi_dn_);
  c.P_mix = eval_field(ev, P_mix_);
  c.Pi_mix = eval_field(ev, Pi_mix_);
  c.g_inv = eval_field(ev, g_inv_);
  c.E = eval_field(ev, E_);
  c.W = eval_field(ev, W_);
  c.DE = eval_field(ev, DE_);
  c.DW = eval_field(ev, DW_);
  c.DDE = eval_field(ev, DDE_);
  c.DDW = eval_field(ev, DDW_);
  c.L0 = eval_field(ev, L0_);
  c.L1 = eval_field(ev, L1_);
  c.DL0 = eval_field(ev, DL0_);
  c.DL1 = eval_field(ev, DL1_);
  c.DP = eval_field(ev, DP_);
  c.DPi = eval_field(ev, DPi_);
  return c;
}

namespace {

// Flat index helpers for the dense coefficient arrays.
inline int i2(int n, int a, int b) { return a * n + b; }
inline int i3(int n, int a, int b, int c) { return (a * n + b) * n + c; }
inline int i4(int n, int a, int b, int c, int d) {
  return ((a * n + b) * n + c) * n + d;
}

struct StateView {
  // Mirrors NormalFormState::pack() layout over a flat vector.
  int n;
  const double* xi;
  const double* Psi; // [c*n + a]
  double phi, chi;
  const double* phistar;
  const double* phibar;
  const double* chistar;
  const double* chibar;

  explicit StateView(int n, const std::vector<double>& v) : n(n) {
    const double* q = v.data();
    xi = q;
    q += n;
    Psi = q;
    q += n * n;
    phi = q[0];
    chi = q[1];
    q += 2;
    phistar = q;
    q += n;
    phibar = q;
    q += n;
    chistar = q;
    q += n;
    chibar = q;
  }
};

} // namespace

std::vector<double> transport_rhs(const TransportCoefficients::Num& c,
                                  const std::vector<double>& v,
                                  const std::vector<double>& state) {
  const int n = c.n;
  const int p = c.p;
  StateView s(n, state);

  // Raised gauge gradients.
  std::vector<double> phibar_up(static_cast<std::size_t>(n), 0.0);
  std::vector<double> chibar_up(static_cast<std::size_t>(n), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      phibar_up[static_cast<std::size_t>(a)] +=
          c.g_inv[static_cast<std::size_t>(i2(n, a, b))] * s.phibar[b];
      chibar_up[static_cast<std::size_t>(a)] +=
          c.g_inv[static_cast<std::size_t>(i2(n, a, b))] * s.chibar[b];
    }
  double chibar_dot_E = 0.0, phibar_dot_W = 0.0;
  for (int r = 0; r < n; ++r) {
    chibar_dot_E += chibar_up[static_cast<std::size_t>(r)] * c.E[static_cast<std::size_t>(r)];
    phibar_dot_W += phibar_up[static_cast<std::size_t>(r)] * c.W[static_cast<std::size_t>(r)];
  }

  // Covariant derivatives of the state variables per the normal-form system.
  auto lie2 = [&](const std::vector<double>& K, const std::vector<double>& DK,
                  int b, int a) {
    // £ξ K_{ba} for a rank-2 covariant coefficient tensor with gradient DK.
    double acc = 0.0;
    for (int r = 0; r < n; ++r) {
      acc += s.xi[r] * DK[static_cast<std::size_t>(i3(n, r, b, a))];
      acc += s.Psi[i2(n, b, r)] * K[static_cast<std::size_t>(i2(n, r, a))];
      acc += s.Psi[i2(n, a, r)] * K[static_cast<std::size_t>(i2(n, b, r))];
    }
    return acc;
  };

  std::vector<double> Dphistar(static_cast<std::size_t>(n * n));
  std::vector<double> Dchistar(static_cast<std::size_t>(n * n));
  std::vector<double> Dphibar(static_cast<std::size_t>(n * n));
  std::vector<double> Dchibar(static_cast<std::size_t>(n * n));
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) {
      const double lieDE = lie2(c.DE, c.DDE, b, a);
      const double lieDW = lie2(c.DW, c.DDW, b, a);
      Dphistar[static_cast<std::size_t>(i2(n, b, a))] =
          (-1.0 / p) *
          (lieDE + 0.5 * (s.chibar[b] * c.E[static_cast<std::size_t>(a)] +
                          s.chibar[a] * c.E[static_cast<std::size_t>(b)] -
                          chibar_dot_E *
                              c.Pi_dn[static_cast<std::size_t>(i2(n, a, b))]));
      Dchistar[static_cast<std::size_t>(i2(n, b, a))] =
          (1.0 / (p - n)) *
          (lieDW + 0.5 * (s.phibar[b] * c.W[static_cast<std::size_t>(a)] +
                          s.phibar[a] * c.W[static_cast<std::size_t>(b)] -
                          phibar_dot_W *
                              c.P_dn[static_cast<std::size_t>(i2(n, a, b))]));
      const double lieL0 = lie2(c.L0, c.DL0, b, a);
      const double lieL1 = lie2(c.L1, c.DL1, b, a);
      double gradP = 0.0, gradPi = 0.0;
      for (int r = 0; r < n; ++r) {
        gradP += phibar_up[static_cast<std::size_t>(r)] *
                 c.DP[static_cast<std::size_t>(i3(n, r, b, a))];
        gradPi += chibar_up[static_cast<std::size_t>(r)] *
                  c.DPi[static_cast<std::size_t>(i3(n, r, b, a))];
      }
      Dphibar[static_cast<std::size_t>(i2(n, b, a))] =
          (lieL0 + 2.0 * gradP) / (2.0 - p);
      Dchibar[static_cast<std::size_t>(i2(n, b, a))] =
          (lieL1 + 2.0 * gradPi) / (2.0 - n + p);
    }

  // ∇̄_b Ψ_c{}^a from the second-derivative equation.
  std::vector<double> DPsi(static_cast<std::size_t>(n * n * n));
  for (int b = 0; b < n; ++b)
    for (int cidx = 0; cidx < n; ++cidx)
      for (int a = 0; a < n; ++a) {
        double acc = 0.5 * (s.phibar[b] * c.P_mix[static_cast<std::size_t>(i2(n, a, cidx))] +
                            s.phibar[cidx] * c.P_mix[static_cast<std::size_t>(i2(n, a, b))] -
                            phibar_up[static_cast<std::size_t>(a)] *
                                c.P_dn[static_cast<std::size_t>(i2(n, cidx, b))] +
                            s.chibar[b] * c.Pi_mix[static_cast<std::size_t>(i2(n, a, cidx))] +
                            s.chibar[cidx] * c.Pi_mix[static_cast<std::size_t>(i2(n, a, b))] -
                            chibar_up[static_cast<std::size_t>(a)] *
                                c.Pi_dn[static_cast<std::size_t>(i2(n, cidx, b))]);
        for (int d = 0; d < n; ++d)
          acc -= s.xi[d] * c.Rbar[static_cast<std::size_t>(i4(n, a, cidx, d, b))];
        DPsi[static_cast<std::size_t>(i3(n, b, cidx, a))] = acc;
      }

  // Assemble coordinate-time derivatives: d/dt = v^b ∂_b, converting the
  // covariant gradients above back through the connection.
  std::vector<double> out(state.size(), 0.0);
  double* o_xi = out.data();
  double* o_Psi = o_xi + n;
  double* o_phi = o_Psi + n * n;
  double* o_chi = o_phi + 1;
  double* o_phistar = o_chi + 1;
  double* o_phibar = o_phistar + n;
  double* o_chistar = o_phibar + n;
  double* o_chibar = o_chistar + n;

  auto G = [&](int a, int b, int r) {
    return c.gammabar[static_cast<std::size_t>(i3(n, a, b, r))];
  };

  for (int a = 0; a < n; ++a) {
    double acc = 0.0;
    for (int b = 0; b < n; ++b) {
      acc += v[static_cast<std::size_t>(b)] * s.Psi[i2(n, b, a)];
      for (int r = 0; r < n; ++r)
        acc -= v[static_cast<std::size_t>(b)] * G(a, b, r) * s.xi[r];
    }
    o_xi[a] = acc;
  }
  for (int cidx = 0; cidx < n; ++cidx)
    for (int a = 0; a < n; ++a) {
      double acc = 0.0;
      for (int b = 0; b < n; ++b) {
        acc += v[static_cast<std::size_t>(b)] *
               DPsi[static_cast<std::size_t>(i3(n, b, cidx, a))];
        for (int r = 0; r < n; ++r) {
          acc -= v[static_cast<std::size_t>(b)] * G(a, b, r) * s.Psi[i2(n, cidx, r)];
          acc += v[static_cast<std::size_t>(b)] * G(r, b, cidx) * s.Psi[i2(n, r, a)];
        }
      }
      o_Psi[i2(n, cidx, a)] = acc;
    }
  {
    double accp = 0.0, accc = 0.0;
    for (int b = 0; b < n; ++b) {
      accp += v[static_cast<std::size_t>(b)] * (s.phibar[b] + s.phistar[b]);
      accc += v[static_cast<std::size_t>(b)] * (s.chibar[b] + s.chistar[b]);
    }
    *o_phi = accp;
    *o_chi = accc;
  }
  auto covector_dt = [&](const double* w, const std::vector<double>& Dw,
                         double* dst) {
    for (int a = 0; a < n; ++a) {
      double acc = 0.0;
      for (int b = 0; b < n; ++b) {
        acc += v[static_cast<std::size_t>(b)] *
               Dw[static_cast<std::size_t>(i2(n, b, a))];
        for (int r = 0; r < n; ++r)
          acc += v[static_cast<std::size_t>(b)] * G(r, b, a) * w[r];
      }
      dst[a] = acc;
    }
  };
  covector_dt(s.phistar, Dphistar, o_phistar);
  covector_dt(s.phibar, Dphibar, o_phibar);
  covector_dt(s.chistar, Dchistar, o_chistar);
  covector_dt(s.chibar, Dchibar, o_chibar);
  return out;
}

ResidualReport constraint_residuals(const TransportCoefficients::Num& c,
                                    const NormalFormState& s) {
  const int n = c.n;
  const int p = c.p;
  ResidualReport r;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double accP = -s.phi * c.P_dn[static_cast<std::size_t>(i2(n, a, b))];
      double accPi = -s.chi * c.Pi_dn[static_cast<std::size_t>(i2(n, a, b))];
      for (int k = 0; k < n; ++k) {
        accP += s.xi[static_cast<std::size_t>(k)] *
                c.DP[static_cast<std::size_t>(i3(n, k, a, b))];
        accP += s.Psi[static_cast<std::size_t>(i2(n, a, k))] *
                c.P_dn[static_cast<std::size_t>(i2(n, k, b))];
        accP += s.Psi[static_cast<std::size_t>(i2(n, b, k))] *
                c.P_dn[static_cast<std::size_t>(i2(n, a, k))];
        accPi += s.xi[static_cast<std::size_t>(k)] *
                 c.DPi[static_cast<std::size_t>(i3(n, k, a, b))];
        accPi += s.Psi[static_cast<std::size_t>(i2(n, a, k))] *
                 c.Pi_dn[static_cast<std::size_t>(i2(n, k, b))];
        accPi += s.Psi[static_cast<std::size_t>(i2(n, b, k))] *
                 c.Pi_dn[static_cast<std::size_t>(i2(n, a, k))];
      }
      r.lie_P = std::max(r.lie_P, std::abs(accP));
      r.lie_Pi = std::max(r.lie_Pi, std::abs(accPi));
    }
  for (int a = 0; a < n; ++a) {
    double accE = p * s.phistar[static_cast<std::size_t>(a)];
    double accW = (n - p) * s.chistar[static_cast<std::size_t>(a)];
    for (int k = 0; k < n; ++k) {
      accE += s.xi[static_cast<std::size_t>(k)] *
              c.DE[static_cast<std::size_t>(i2(n, k, a))];
      accE += s.Psi[static_cast<std::size_t>(i2(n, a, k))] *
              c.E[static_cast<std::size_t>(k)];
      accW += s.xi[static_cast<std::size_t>(k)] *
              c.DW[static_cast<std::size_t>(i2(n, k, a))];
      accW += s.Psi[static_cast<std::size_t>(i2(n, a, k))] *
              c.W[static_cast<std::size_t>(k)];
    }
    r.lie_E = std::max(r.lie_E, std::abs(accE));
    r.lie_W = std::max(r.lie_W, std::abs(accW));
  }
  return r;
}

namespace {

// Tiny cache of coefficient evaluations keyed by curve parameter.
class CoeffCache {
public:
  CoeffCache(const TransportCoefficients& tc, const EvalContext& ctx,
             const Curve& curve, const ChartPtr& chart)
      : tc_(tc), ctx_(ctx), curve_(curve), chart_(chart) {}

  const TransportCoefficients::Num& at(double t) {
    for (auto& [key, num] : entries_)
      if (key == t) return num;
    std::vector<double> x = curve_.position(t);
    if (!chart_->contains(x))
      throw StepOutsideBox("curve left the chart box at t = " +
                           std::to_string(t));
    entries_.emplace_back(t, tc_.evaluate(ctx_, x));
    if (entries_.size() > 6) entries_.pop_front();
    return entries_.back().second;
  }

private:
  const TransportCoefficients& tc_;
  const EvalContext& ctx_;
  const Curve& curve_;
  ChartPtr chart_;
  std::deque<std::pair<double, TransportCoefficients::Num>> entries_;
};

std::vector<double> velocity_at(const Curve& curve, double t, int n) {
  if (curve.velocity) return curve.velocity(t);
  const double dt = 1e-6;
  std::vector<double> a = curve.position(t - dt);
  std::vector<double> b = curve.position(t + dt);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] =
        (b[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)]) /
        (2 * dt);
  return v;
}

} // namespace

Trajectory transport(const BiconformalData& data, const NormalFormState& s0,
                     const Curve& curve, const EvalContext& ctx,
                     const TransportOptions& opts) {
  const int n = data.n();
  const int p = data.p();
  if (p == 1 || p == 2 || p == n - 1 || p == n - 2)
    throw DegenerateRank(
        "the transport system does not close for p in {1, 2, n-1, n-2}");
  if (s0.n != n) throw Error("initial state dimension mismatch");
  if (!(curve.h > 0)) throw Error("curve step size must be positive");

  TransportCoefficients tc(data);
  CoeffCache cache(tc, ctx, curve, data.metric->chart());

  const double span = curve.t1 - curve.t0;
  const long long steps = std::max<long long>(
      1, static_cast<long long>(std::ceil(span / curve.h - 1e-12)));
  const double h = span / static_cast<double>(steps);

  Trajectory traj;
  std::vector<double> y = s0.pack();

  auto record = [&](double t, const std::vector<double>& state) {
    TrajectoryPoint pt;
    pt.t = t;
    pt.state = NormalFormState::unpack(n, state);
    pt.residuals = constraint_residuals(cache.at(t), pt.state);
    const double rmax =
        std::max(pt.residuals.max_I(), pt.residuals.max_II());
    if (!std::isfinite(rmax) || rmax > opts.residual_bound)
      throw ResidualBlowup("constraint residual " + std::to_string(rmax) +
                           " exceeded the configured bound at t = " +
                           std::to_string(t));
    traj.points.push_back(std::move(pt));
  };

  record(curve.t0, y);
  for (long long k = 0; k < steps; ++k) {
    const double t = curve.t0 + h * static_cast<double>(k);
    const double tm = t + h / 2;
    const double te = t + h;
    const auto& c0 = cache.at(t);
    const auto& cm = cache.at(tm);
    const auto& ce = cache.at(te);
    const std::vector<double> v0 = velocity_at(curve, t, n);
    const std::vector<double> vm = velocity_at(curve, tm, n);
    const std::vector<double> ve = velocity_at(curve, te, n);

    std::vector<double> k1 = transport_rhs(c0, v0, y);
    std::vector<double> tmp(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    std::vector<double> k2 = transport_rhs(cm, vm, tmp);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    std::vector<double> k3 = transport_rhs(cm, vm, tmp);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + h * k3[i];
    std::vector<double> k4 = transport_rhs(ce, ve, tmp);
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);

    if ((k + 1) % opts.record_stride == 0 || k + 1 == steps) record(te, y);
  }
  return traj;
}

ResidualReport constraint_residuals(const BiconformalData& data,
                                    const NormalFormState& s,
                                    const std::vector<double>& point,
                                    const EvalContext& ctx) {
  TransportCoefficients tc(data);
  return constraint_residuals(tc.evaluate(ctx, point), s);
}

ConstraintCount count_constraints(int n, int p) {
  if (n < 2 || p < 1 || p > n - 1)
    throw InvalidRank("count_constraints needs 1 <= p <= n-1, n >= 2");
  ConstraintCount out;
  const long long nn = n;
  out.variables = 2 + 3 * nn + nn * nn;
  out.constraints = nn + nn * (nn + 1) / 2 + static_cast<long long>(p) * (nn - p);
  out.N = out.variables - out.constraints;
  return out;
}

int lie_constraint_rank(int n, int p) {
  if (n < 2 || p < 1 || p > n - 1)
    throw InvalidRank("lie_constraint_rank needs 1 <= p <= n-1, n >= 2");
  // Rows: symmetric index pairs (a <= b); columns: (r, q) pairs.
  const int rows = n * (n + 1) / 2;
  const int cols = n * n;
  std::vector<std::vector<double>> mat(
      static_cast<std::size_t>(rows),
      std::vector<double>(static_cast<std::size_t>(cols), 0.0));
  auto P = [&](int b, int q) { return (b == q && b < p) ? 1.0 : 0.0; };
  int row = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b, ++row)
      for (int r = 0; r < n; ++r)
        for (int q = 0; q < n; ++q) {
          double v = 0.0;
          if (r == a) v += P(b, q);
          if (r == b) v += P(a, q);
          if (v != 0.0)
            mat[static_cast<std::size_t>(row)][static_cast<std::size_t>(r * n + q)] = v;
        }
  // Gaussian elimination with partial pivoting.
  int rank = 0;
  int lead = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int piv = -1;
    double best = 1e-12;
    for (int rr = rank; rr < rows; ++rr)
      if (std::abs(mat[static_cast<std::size_t>(rr)][static_cast<std::size_t>(c)]) > best) {
        best = std::abs(mat[static_cast<std::size_t>(rr)][static_cast<std::size_t>(c)]);
        piv = rr;
      }
    if (piv < 0) continue;
    std::swap(mat[static_cast<std::size_t>(rank)], mat[static_cast<std::size_t>(piv)]);
    const double d = mat[static_cast<std::size_t>(rank)][static_cast<std::size_t>(c)];
    for (int rr = rank + 1; rr < rows; ++rr) {
      const double f =
          mat[static_cast<std::size_t>(rr)][static_cast<std::size_t>(c)] / d;
      if (f == 0.0) continue;
      for (int cc = c; cc < cols; ++cc)
        mat[static_cast<std::size_t>(rr)][static_cast<std::size_t>(cc)] -=
            f * mat[static_cast<std::size_t>(rank)][static_cast<std::size_t>(cc)];
    }
    ++rank;
    ++lead;
  }
  return rank;
}

} // namespace bicon
