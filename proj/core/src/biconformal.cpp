#include "bicon/biconformal.hpp"

#include "bicon/errors.hpp"

namespace bicon {

TensorField compute_M(const MetricChart& m, const ProjectorPair& pp) {
  const TensorField DP = m.nabla(pp.P()); // (x, a, b) = ∇_x P_ab
  const int n = m.dim();
  TensorField M(m.chart(), {Slot::Down, Slot::Down, Slot::Down});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = b; c < n; ++c) {
        Expr val = DP.at({b, a, c}) + DP.at({c, a, b}) - DP.at({a, b, c});
        M.at({a, b, c}) = val;
        M.at({a, c, b}) = val; // symmetric in the last pair since P is
      }
  return M;
}

std::pair<TensorField, TensorField> compute_EW(const MetricChart& m,
                                               const ProjectorPair& pp,
                                               const TensorField& M) {
  (void)m;
  TensorField E = tensordot(M, pp.P_up(), {{1, 0}, {2, 1}});
  TensorField W = -tensordot(M, pp.Pi_up(), {{1, 0}, {2, 1}});
  return {std::move(E), std::move(W)};
}

SplitT compute_T(const MetricChart& m, const ProjectorPair& pp,
                 const TensorField& M, const TensorField& E,
                 const TensorField& W) {
  const int n = m.dim();
  const int p = pp.p();
  const Expr cW = Expr::number(Rational(1, n - p));
  const Expr cE = Expr::number(Rational(1, p));
  SplitT out;
  out.T = M + cW * outer(W, pp.Pi()) - cE * outer(E, pp.P());
  out.A = tensordot(pp.P_mix(), out.T, {{0, 0}});
  out.B = tensordot(pp.Pi_mix(), out.T, {{0, 0}});
  return out;
}

TensorField compute_L(const MetricChart& m, const ProjectorPair& pp,
                      const TensorField& M, const TensorField& E,
                      const TensorField& W) {
  const int n = m.dim();
  const int p = pp.p();
  const Expr cE = Expr::number(Rational(1, 2 * p));
  const Expr cW = Expr::number(Rational(1, 2 * (n - p)));
  const Expr half = Expr::number(Rational(1, 2));
  const TensorField S_mix = pp.P_mix() - pp.Pi_mix();
  const TensorField M_up = m.raise_slot(M, 0); // M^p_bc
  TensorField L(m.chart(), {Slot::Up, Slot::Down, Slot::Down});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = b; c < n; ++c) {
        std::vector<Expr> terms;
        terms.push_back(cE * (E.at({b}) * pp.P_mix().at({a, c}) +
                              E.at({c}) * pp.P_mix().at({a, b})));
        terms.push_back(cW * (W.at({b}) * pp.Pi_mix().at({a, c}) +
                              W.at({c}) * pp.Pi_mix().at({a, b})));
        for (int q = 0; q < n; ++q) {
          const Expr& s = S_mix.at({a, q});
          if (s.is_literal_zero()) continue;
          terms.push_back(half * s * M_up.at({q, b, c}));
        }
        Expr val = Expr::sum(std::move(terms));
        L.at({a, b, c}) = val;
        L.at({a, c, b}) = val;
      }
  return L;
}

TensorField compute_Rbar_from_relation(const MetricChart& m,
                                       const TensorField& L) {
  const int n = m.dim();
  const TensorField& R = m.riemann();
  const TensorField DL = m.nabla(L); // (x, a, b, c) = ∇_x L^a_bc
  TensorField Rbar(m.chart(), {Slot::Up, Slot::Down, Slot::Down, Slot::Down});
  Rbar.for_each([&](std::span<const int> idx) {
    const int a = idx[0], b = idx[1], c = idx[2], d = idx[3];
    std::vector<Expr> terms;
    terms.push_back(R.at({a, b, c, d}));
    terms.push_back(DL.at({c, a, d, b}));
    terms.push_back(-DL.at({d, a, c, b}));
    for (int r = 0; r < n; ++r) {
      terms.push_back(L.at({a, r, c}) * L.at({r, d, b}));
      terms.push_back(-(L.at({a, r, d}) * L.at({r, c, b})));
    }
    Rbar.at(idx) = Expr::sum(std::move(terms));
  });
  return Rbar;
}

NormalFormSources compute_L0_L1(const MetricChart& m, const ProjectorPair& pp,
                                const TensorField& Rbar) {
  const int n = m.dim();
  const int p = pp.p();
  if (p == 1 || p == n - 1)
    throw DegenerateRank(
        "normal-form source tensors are undefined for p in {1, n-1}");

  auto build = [&](const TensorField& proj_mix, const TensorField& proj_up,
                   const TensorField& proj_dn, int rank) {
    // Q_xy = Pr^d_r Rbar^r_{xdy}; J_db = Pr^r_q Rbar^q_{rdb}.
    TensorField Q = tensordot(proj_mix, Rbar, {{1, 0}, {0, 2}});
    TensorField J = tensordot(proj_mix, Rbar, {{1, 0}, {0, 1}});
    TensorField R0f = tensordot(Q, proj_up, {{0, 0}, {1, 1}});
    Expr R0 = R0f.scalar();
    const Expr inv_rank = Expr::number(Rational(1, rank));
    const Expr coef = Expr::number(Rational(1, 1 - rank));
    TensorField Lx(m.chart(), {Slot::Down, Slot::Down});
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        std::vector<Expr> inner;
        for (int d = 0; d < n; ++d) {
          inner.push_back(proj_mix.at({d, c}) * J.at({d, b}));
          inner.push_back(proj_mix.at({d, b}) * J.at({d, c}));
        }
        inner.push_back(-J.at({b, c}));
        Expr bracket = Q.at({c, b}) - inv_rank * Expr::sum(std::move(inner));
        Lx.at({b, c}) = Expr::number(2) * bracket +
                        coef * R0 * proj_dn.at({b, c});
      }
    return std::make_pair(std::move(Lx), std::move(R0));
  };

  NormalFormSources out;
  auto [L0, R0] = build(pp.P_mix(), pp.P_up(), pp.P(), p);
  auto [L1, R1] = build(pp.Pi_mix(), pp.Pi_up(), pp.Pi(), n - p);
  out.L0 = std::move(L0);
  out.L1 = std::move(L1);
  out.R0 = std::move(R0);
  out.R1 = std::move(R1);
  return out;
}

namespace {

void require_zero(ZeroTester& tester, const TensorField& t, const char* what) {
  ZeroVerdict v = test_zero(tester, t);
  if (!v.zero())
    throw ValidationFailure(std::string("bi-conformal invariant violated: ") + what);
}

} // namespace

BiconformalData BiconformalData::compute(const MetricPtr& m,
                                         const ProjectorPair& pp,
                                         ZeroTester& tester,
                                         const BiconformalOptions& opts) {
  BiconformalData d;
  d.metric = m;
  d.proj = pp;
  d.M = compute_M(*m, pp);
  auto [E, W] = compute_EW(*m, pp, d.M);
  d.E = std::move(E);
  d.W = std::move(W);

  // E/W algebra: Π_ac E^c = E_a, P_ac W^c = W_a, P^{ab} E_b = 0 = Π^{ab} W_b.
  TensorField E_up = m->raise_slot(d.E, 0);
  TensorField W_up = m->raise_slot(d.W, 0);
  require_zero(tester, tensordot(pp.Pi(), E_up, {{1, 0}}) - d.E,
               "Pi_ac E^c = E_a");
  require_zero(tester, tensordot(pp.P(), W_up, {{1, 0}}) - d.W,
               "P_ac W^c = W_a");
  require_zero(tester, tensordot(pp.P_up(), d.E, {{1, 0}}), "P^{ab} E_b = 0");
  require_zero(tester, tensordot(pp.Pi_up(), d.W, {{1, 0}}), "Pi^{ab} W_b = 0");

  SplitT split = compute_T(*m, pp, d.M, d.E, d.W);
  d.T = std::move(split.T);
  d.A = std::move(split.A);
  d.B = std::move(split.B);
  d.L = compute_L(*m, pp, d.M, d.E, d.W);
  d.gammabar = m->connection().plus(d.L);
  d.u = Expr::number(Rational(1, 2 * pp.p())) * d.E +
        Expr::number(Rational(1, 2 * (m->dim() - pp.p()))) * d.W;

  if (opts.with_curvature) {
    d.Rbar = compute_Rbar_from_relation(*m, d.L);
    if (opts.crosscheck_curvature) {
      TensorField direct = riemann_of_connection(d.gammabar);
      ZeroVerdict v = test_zero(tester, *d.Rbar - direct);
      if (!v.zero())
        throw Error("bi-conformal curvature cross-check failed: the "
                    "two-connection relation and the direct curvature of "
                    "Γ + L disagree");
    }
    const int p = pp.p();
    if (p != 1 && p != m->dim() - 1) {
      NormalFormSources s = compute_L0_L1(*m, pp, *d.Rbar);
      d.L0 = std::move(s.L0);
      d.L1 = std::move(s.L1);
      d.Rbar0 = std::move(s.R0);
      d.Rbar1 = std::move(s.R1);
    }
  }
  return d;
}

namespace {

// Residual of the first covariant-derivative identity:
// ∇̄_a P_bc − ∇_a P_bc + E_a P_bc / p + (E_b P_ac + E_c P_ab) / 2p
//   + ½ (P_cp M^p_ab + P_bp M^p_ac).
TensorField identity1_residual(const MetricChart& m,
                               const ConnectionCoefficients& gammabar,
                               const TensorField& P_dn, const TensorField& E,
                               const TensorField& M_up, int rank) {
  const int n = m.dim();
  TensorField lhs = covariant_derivative(gammabar, P_dn);
  TensorField rhs0 = m.nabla(P_dn);
  const Expr c1 = Expr::number(Rational(1, rank));
  const Expr c2 = Expr::number(Rational(1, 2 * rank));
  const Expr half = Expr::number(Rational(1, 2));
  TensorField res(m.chart(), {Slot::Down, Slot::Down, Slot::Down});
  res.for_each([&](std::span<const int> idx) {
    const int a = idx[0], b = idx[1], c = idx[2];
    std::vector<Expr> terms;
    terms.push_back(lhs.at({a, b, c}));
    terms.push_back(-rhs0.at({a, b, c}));
    terms.push_back(c1 * E.at({a}) * P_dn.at({b, c}));
    terms.push_back(c2 * (E.at({b}) * P_dn.at({a, c}) +
                          E.at({c}) * P_dn.at({a, b})));
    for (int q = 0; q < n; ++q) {
      terms.push_back(half * P_dn.at({c, q}) * M_up.at({q, a, b}));
      terms.push_back(half * P_dn.at({b, q}) * M_up.at({q, a, c}));
    }
    res.at(idx) = Expr::sum(std::move(terms));
  });
  return res;
}

// Residual of the mixed-form identity:
// 2∇̄_a P^b_c − 2∇_a P^b_c − (P^{bq} − Π^{bq}) P^r_c M_qra
//   + P^b_q M^q_ac − W_c Π^b_a / (n−p) + E_c P^b_a / p.
TensorField identity2_residual(const MetricChart& m,
                               const ConnectionCoefficients& gammabar,
                               const ProjectorPair& pp, const TensorField& M,
                               const TensorField& M_up, const TensorField& E,
                               const TensorField& W, int rank) {
  const int n = m.dim();
  TensorField lhs = covariant_derivative(gammabar, pp.P_mix());
  TensorField rhs0 = m.nabla(pp.P_mix());
  const Expr cW = Expr::number(Rational(1, n - rank));
  const Expr cE = Expr::number(Rational(1, rank));
  TensorField res(m.chart(), {Slot::Down, Slot::Up, Slot::Down});
  res.for_each([&](std::span<const int> idx) {
    const int a = idx[0], b = idx[1], c = idx[2];
    std::vector<Expr> terms;
    terms.push_back(Expr::number(2) * (lhs.at({a, b, c}) - rhs0.at({a, b, c})));
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r) {
        const Expr& mm = M.at({q, r, a});
        if (mm.is_literal_zero()) continue;
        terms.push_back(-((pp.P_up().at({b, q}) - pp.Pi_up().at({b, q})) *
                          pp.P_mix().at({r, c}) * mm));
      }
    for (int q = 0; q < n; ++q)
      terms.push_back(pp.P_mix().at({b, q}) * M_up.at({q, a, c}));
    terms.push_back(-(cW * W.at({c}) * pp.Pi_mix().at({b, a})));
    terms.push_back(cE * E.at({c}) * pp.P_mix().at({b, a}));
    res.at(idx) = Expr::sum(std::move(terms));
  });
  return res;
}

// Residual of the contravariant identity:
// ∇̄_a P^{bc} − ∇_a P^{bc} − E_a P^{bc} / p − (W^c Π^b_a + W^b Π^c_a)/(2(n−p))
//   + ½ (M^b_{ar} P^{rc} + M^c_{ar} P^{rb}).
TensorField identity3_residual(const MetricChart& m,
                               const ConnectionCoefficients& gammabar,
                               const TensorField& P_up,
                               const TensorField& Pi_mix, const TensorField& E,
                               const TensorField& W_up,
                               const TensorField& M_up2, int rank,
                               int corank) {
  const int n = m.dim();
  TensorField lhs = covariant_derivative(gammabar, P_up);
  TensorField rhs0 = m.nabla(P_up);
  const Expr cE = Expr::number(Rational(1, rank));
  const Expr cW = Expr::number(Rational(1, 2 * corank));
  const Expr half = Expr::number(Rational(1, 2));
  TensorField res(m.chart(), {Slot::Down, Slot::Up, Slot::Up});
  res.for_each([&](std::span<const int> idx) {
    const int a = idx[0], b = idx[1], c = idx[2];
    std::vector<Expr> terms;
    terms.push_back(lhs.at({a, b, c}));
    terms.push_back(-rhs0.at({a, b, c}));
    terms.push_back(-(cE * E.at({a}) * P_up.at({b, c})));
    terms.push_back(-(cW * (W_up.at({c}) * Pi_mix.at({b, a}) +
                            W_up.at({b}) * Pi_mix.at({c, a}))));
    for (int r = 0; r < n; ++r) {
      terms.push_back(half * M_up2.at({b, a, r}) * P_up.at({r, c}));
      terms.push_back(half * M_up2.at({c, a, r}) * P_up.at({r, b}));
    }
    res.at(idx) = Expr::sum(std::move(terms));
  });
  return res;
}

} // namespace

TensorField random_vector_field(const ChartPtr& chart, std::uint64_t seed,
                                int degree) {
  Rng rng(seed);
  TensorField xi(chart, {Slot::Up});
  for (int a = 0; a < chart->dim(); ++a)
    xi.at({a}) = random_polynomial(chart->coords(), degree, rng, 3);
  return xi;
}

IdentityReport verify_identities(const BiconformalData& data,
                                 const TensorField& xi, ZeroTester& tester) {
  const MetricChart& m = *data.metric;
  const ProjectorPair& pp = data.proj;
  const int n = m.dim();
  if (!data.Rbar)
    throw Error("verify_identities needs data computed with curvature");
  const TensorField& Rbar = *data.Rbar;
  const ConnectionCoefficients& gb = data.gammabar;

  IdentityReport report;
  auto add = [&](const std::string& name, const TensorField& residual) {
    report.items.push_back({name, test_zero(tester, residual)});
  };

  TensorField M_up = m.raise_slot(data.M, 0); // M^p_bc
  TensorField W_up = m.raise_slot(data.W, 0);

  // Covariant-derivative identities of P.
  add("identity-1 (P)",
      identity1_residual(m, gb, pp.P(), data.E, M_up, pp.p()));
  add("identity-2 (P)",
      identity2_residual(m, gb, pp, data.M, M_up, data.E, data.W, pp.p()));
  add("identity-3 (P)",
      identity3_residual(m, gb, pp.P_up(), pp.Pi_mix(), data.E, W_up, M_up,
                         pp.p(), n - pp.p()));

  // Duals: recompute M, E, W from scratch on the swapped pair.
  {
    ProjectorPair sw = pp.swapped();
    TensorField Msw = compute_M(m, sw);
    auto [Esw, Wsw] = compute_EW(m, sw, Msw);
    TensorField Lsw = compute_L(m, sw, Msw, Esw, Wsw);
    ConnectionCoefficients gbsw = m.connection().plus(Lsw);
    TensorField Msw_up = m.raise_slot(Msw, 0);
    TensorField Wsw_up = m.raise_slot(Wsw, 0);
    add("identity-1 (Pi)",
        identity1_residual(m, gbsw, sw.P(), Esw, Msw_up, sw.p()));
    add("identity-2 (Pi)",
        identity2_residual(m, gbsw, sw, Msw, Msw_up, Esw, Wsw, sw.p()));
    add("identity-3 (Pi)",
        identity3_residual(m, gbsw, sw.P_up(), sw.Pi_mix(), Esw, Wsw_up,
                           Msw_up, sw.p(), n - sw.p()));
    // The swap must reproduce the same connection.
    add("swap invariance (gammabar)", gbsw.coeffs - gb.coeffs);
  }

  // Vanishing divergences.
  add("contraction (div P^{ab})",
      contract(covariant_derivative(gb, pp.P_up()), 0, 1));
  add("contraction (div Pi^{ab})",
      contract(covariant_derivative(gb, pp.Pi_up()), 0, 1));
  add("contraction (div P^a_b)",
      contract(covariant_derivative(gb, pp.P_mix()), 0, 1));
  add("contraction (div Pi^a_b)",
      contract(covariant_derivative(gb, pp.Pi_mix()), 0, 1));

  // Trace identities.
  TensorField DbarP = covariant_derivative(gb, pp.P());
  TensorField DbarPi = covariant_derivative(gb, pp.Pi());
  TensorField DbarPup = covariant_derivative(gb, pp.P_up());
  TensorField DbarPiup = covariant_derivative(gb, pp.Pi_up());
  add("EW (P^{bc} dbar P_bc = -E)",
      tensordot(pp.P_up(), DbarP, {{0, 1}, {1, 2}}) + data.E);
  add("EW (P_bc dbar P^{bc} = E)",
      tensordot(pp.P(), DbarPup, {{0, 1}, {1, 2}}) - data.E);
  add("WE (Pi^{bc} dbar Pi_bc = -W)",
      tensordot(pp.Pi_up(), DbarPi, {{0, 1}, {1, 2}}) + data.W);
  add("WE (Pi_bc dbar Pi^{bc} = W)",
      tensordot(pp.Pi(), DbarPiup, {{0, 1}, {1, 2}}) - data.W);

  // Four vanishing contractions.
  TensorField DbarPmix = covariant_derivative(gb, pp.P_mix());
  TensorField DbarPimix = covariant_derivative(gb, pp.Pi_mix());
  add("PPi (P^d_r dbar_b Pi^r_d)",
      tensordot(pp.P_mix(), DbarPimix, {{0, 2}, {1, 1}}));
  add("PPi (Pi^d_r dbar_b P^r_d)",
      tensordot(pp.Pi_mix(), DbarPmix, {{0, 2}, {1, 1}}));
  add("PPi (P^{dr} dbar_d P_rb)",
      tensordot(pp.P_up(), DbarP, {{0, 0}, {1, 1}}));
  add("PPi (Pi^{dr} dbar_d Pi_rb)",
      tensordot(pp.Pi_up(), DbarPi, {{0, 0}, {1, 1}}));

  // Curvature route cross-check and the inverse relation.
  TensorField Rbar_direct = riemann_of_connection(gb);
  add("curvature (relation vs direct)", Rbar - Rbar_direct);
  {
    const TensorField& R = m.riemann();
    TensorField DbarL = covariant_derivative(gb, data.L);
    TensorField res(m.chart(), {Slot::Up, Slot::Down, Slot::Down, Slot::Down});
    res.for_each([&](std::span<const int> idx) {
      const int a = idx[0], b = idx[1], c = idx[2], d = idx[3];
      std::vector<Expr> terms;
      terms.push_back(R.at({a, b, c, d}));
      terms.push_back(-Rbar.at({a, b, c, d}));
      terms.push_back(DbarL.at({c, a, d, b}));
      terms.push_back(-DbarL.at({d, a, c, b}));
      for (int r = 0; r < n; ++r) {
        terms.push_back(-(data.L.at({a, r, c}) * data.L.at({r, d, b})));
        terms.push_back(data.L.at({a, r, d}) * data.L.at({r, c, b}));
      }
      res.at(idx) = Expr::sum(std::move(terms));
    });
    add("curvature-connection (inverse relation)", res);
  }

  // Lie-derivative identities with the test field.
  {
    TensorField LG = lie_derivative_connection(xi, gb); // (£ξ γ̄)^a_{bc}
    TensorField Psi = covariant_derivative(gb, xi);     // (c, a) = ∇̄_c ξ^a
    TensorField DPsi = covariant_derivative(gb, Psi);   // (b, c, a)
    TensorField res(m.chart(), {Slot::Up, Slot::Down, Slot::Down});
    res.for_each([&](std::span<const int> idx) {
      const int a = idx[0], b = idx[1], c = idx[2];
      std::vector<Expr> terms;
      terms.push_back(LG.at({a, b, c}));
      terms.push_back(-DPsi.at({b, c, a}));
      for (int d = 0; d < n; ++d)
        terms.push_back(-(xi.at({d}) * Rbar.at({a, c, d, b})));
      res.at(idx) = Expr::sum(std::move(terms));
    });
    add("lie-xi (£ξ γ̄ = ∇̄∇̄ξ + ξ·R̄)", res);

    // Commutation of ∇̄ and £ξ on P_ab.
    TensorField LieP = lie_derivative(xi, pp.P(), &gb);
    TensorField t1 = covariant_derivative(gb, LieP);
    TensorField t2 = lie_derivative(xi, DbarP, &gb);
    TensorField res2(m.chart(), {Slot::Down, Slot::Down, Slot::Down});
    res2.for_each([&](std::span<const int> idx) {
      const int c = idx[0], a = idx[1], b = idx[2];
      std::vector<Expr> terms;
      terms.push_back(t1.at({c, a, b}));
      terms.push_back(-t2.at({c, a, b}));
      for (int r = 0; r < n; ++r) {
        terms.push_back(-(LG.at({r, c, a}) * pp.P().at({r, b})));
        terms.push_back(-(LG.at({r, c, b}) * pp.P().at({a, r})));
      }
      res2.at(idx) = Expr::sum(std::move(terms));
    });
    add("lie-commutation (on P_ab)", res2);

    // £ξ R̄^d_{cab} = ∇̄_a (£ξ γ̄)^d_{bc} − ∇̄_b (£ξ γ̄)^d_{ac}.
    TensorField LieR = lie_derivative(xi, Rbar, &gb);
    TensorField DLG = covariant_derivative(gb, LG); // (x, d, y, z)
    TensorField res3(m.chart(),
                     {Slot::Up, Slot::Down, Slot::Down, Slot::Down});
    res3.for_each([&](std::span<const int> idx) {
      const int d = idx[0], c = idx[1], a = idx[2], b = idx[3];
      res3.at(idx) = LieR.at({d, c, a, b}) - DLG.at({a, d, b, c}) +
                     DLG.at({b, d, a, c});
    });
    add("lie-curvature (£ξ R̄)", res3);

    // Metric-connection form: £ξ Γ from £ξ g.
    TensorField LGm = lie_derivative_connection(xi, m.connection());
    TensorField Lieg = lie_derivative(xi, m.g(), &m.connection());
    TensorField DLg = m.nabla(Lieg); // (x, y, z) = ∇_x (£ξ g)_{yz}
    const Expr half = Expr::number(Rational(1, 2));
    TensorField res4(m.chart(), {Slot::Up, Slot::Down, Slot::Down});
    res4.for_each([&](std::span<const int> idx) {
      const int a = idx[0], b = idx[1], c = idx[2];
      std::vector<Expr> terms;
      terms.push_back(LGm.at({a, b, c}));
      for (int e = 0; e < n; ++e) {
        const Expr& gi = m.g_inv().at({a, e});
        if (gi.is_literal_zero()) continue;
        Expr combo =
            DLg.at({b, c, e}) + DLg.at({c, b, e}) - DLg.at({e, b, c});
        terms.push_back(-(half * gi * combo));
      }
      res4.at(idx) = Expr::sum(std::move(terms));
    });
    add("lie-connection (£ξ Γ from £ξ g)", res4);
  }

  return report;
}

} // namespace bicon
