#include "bicon/projector.hpp"

#include <cmath>

#include "bicon/errors.hpp"

namespace bicon {

namespace {

void require_zero(ZeroTester& tester, const TensorField& t, const char* what) {
  ZeroVerdict v = test_zero(tester, t);
  if (!v.zero())
    throw ValidationFailure(std::string("projector invariant violated: ") + what);
}

} // namespace

void ProjectorPair::finish(const MetricPtr& m, ZeroTester& tester,
                           bool expect_rank, int expected_p) {
  metric_ = m;
  const int n = m->dim();
  Pi_dn_ = m->g() - P_dn_;
  Pi_mix_ = TensorField::delta(m->chart()) - P_mix_;
  S_dn_ = P_dn_ - Pi_dn_;
  P_up_ = m->raise_slot(P_mix_, 1);
  Pi_up_ = m->raise_slot(Pi_mix_, 1);

  // Symmetry of P (Π inherits it from g − P).
  TensorField Pt(m->chart(), {Slot::Down, Slot::Down});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) Pt.at({a, b}) = P_dn_.at({b, a});
  require_zero(tester, P_dn_ - Pt, "symmetry (P_ab = P_ba)");

  // Trace and rank policy.
  std::vector<Expr> tr;
  for (int a = 0; a < n; ++a) tr.push_back(P_mix_.at({a, a}));
  Expr trace = Expr::sum(std::move(tr));
  if (expect_rank) {
    p_ = expected_p;
    ZeroVerdict v = tester.test(trace - Expr::number(p_));
    if (!v.zero())
      throw ValidationFailure("projector invariant violated: trace (P^a_a = p)");
  } else {
    int found = -1;
    for (int k = 0; k <= n; ++k) {
      if (tester.test(trace - Expr::number(k)).zero()) {
        found = k;
        break;
      }
    }
    if (found < 0)
      throw NonIntegerTrace(
          "projector trace does not sample close to an integer");
    if (found < 1 || found > n - 1)
      throw ValidationFailure(
          "projector rank must satisfy 1 <= p <= n-1 (got p = " +
          std::to_string(found) + ")");
    p_ = found;
  }

  // Idempotency, orthogonality, square root.
  require_zero(tester, tensordot(P_dn_, P_mix_, {{1, 0}}) - P_dn_,
               "idempotency (P_ap P^p_b = P_ab)");
  require_zero(tester, tensordot(Pi_dn_, Pi_mix_, {{1, 0}}) - Pi_dn_,
               "idempotency (Pi_ap Pi^p_b = Pi_ab)");
  require_zero(tester, tensordot(P_dn_, Pi_mix_, {{1, 0}}),
               "orthogonality (P_ap Pi^p_b = 0)");
  TensorField S_mix = P_mix_ - Pi_mix_;
  require_zero(tester, tensordot(S_dn_, S_mix, {{1, 0}}) - m->g(),
               "square root (S_ap S^p_b = g_ab)");
}

ProjectorPair ProjectorPair::from_coordinate_block(
    const MetricPtr& m, const std::vector<std::string>& coords,
    ZeroTester& tester) {
  const int n = m->dim();
  const int p = static_cast<int>(coords.size());
  if (p < 1 || p > n - 1)
    throw ValidationFailure(
        "coordinate block must select between 1 and n-1 coordinates");
  std::vector<int> block;
  block.reserve(coords.size());
  for (const auto& c : coords) block.push_back(m->chart()->index_of(c));

  // Gram matrix of the chosen coordinate vectors.
  std::vector<std::vector<Expr>> gram(
      static_cast<std::size_t>(p), std::vector<Expr>(static_cast<std::size_t>(p)));
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      gram[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          m->g().at({block[static_cast<std::size_t>(i)],
                     block[static_cast<std::size_t>(j)]});
  Expr det = matrix_determinant(gram);
  if (tester.test(det).zero())
    throw NullDistribution(
        "coordinate block spans a degenerate distribution (singular Gram matrix)");
  auto gram_inv = matrix_inverse(gram, det);

  // P^a_b = Σ_{ij} δ^a_i (G^{-1})^{ij} g_{jb}.
  ProjectorPair pp;
  pp.P_mix_ = TensorField(m->chart(), {Slot::Up, Slot::Down});
  for (int i = 0; i < p; ++i)
    for (int b = 0; b < n; ++b) {
      std::vector<Expr> terms;
      for (int j = 0; j < p; ++j)
        terms.push_back(
            gram_inv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
            m->g().at({block[static_cast<std::size_t>(j)], b}));
      pp.P_mix_.at({block[static_cast<std::size_t>(i)], b}) =
          Expr::sum(std::move(terms));
    }
  pp.P_dn_ = m->lower_slot(pp.P_mix_, 0);
  pp.finish(m, tester, /*expect_rank=*/true, p);
  return pp;
}

ProjectorPair ProjectorPair::from_components(const MetricPtr& m, TensorField P,
                                             ZeroTester& tester) {
  if (P.rank() != 2 || P.signature()[0] != Slot::Down ||
      P.signature()[1] != Slot::Down)
    throw SlotVarianceMismatch("projector components must form a (Down, Down) field");
  ProjectorPair pp;
  pp.P_dn_ = std::move(P);
  pp.P_mix_ = m->raise_slot(pp.P_dn_, 0);
  pp.finish(m, tester, /*expect_rank=*/false, 0);
  return pp;
}

ProjectorPair ProjectorPair::swapped() const {
  ProjectorPair out;
  out.metric_ = metric_;
  out.p_ = n() - p_;
  out.P_dn_ = Pi_dn_;
  out.Pi_dn_ = P_dn_;
  out.S_dn_ = -S_dn_;
  out.P_mix_ = Pi_mix_;
  out.Pi_mix_ = P_mix_;
  out.P_up_ = Pi_up_;
  out.Pi_up_ = P_up_;
  return out;
}

} // namespace bicon
