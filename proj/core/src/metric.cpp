#include "bicon/metric.hpp"

#include <map>

#include "bicon/errors.hpp"

namespace bicon {

namespace {

// Laplace expansion over the rows not yet consumed, keyed by the bitmask of
// available columns. Skips literal-zero entries early.
Expr det_rec(const std::vector<std::vector<Expr>>& m, std::size_t row,
             unsigned cols, std::map<unsigned, Expr>& memo) {
  const std::size_t n = m.size();
  if (row == n) return Expr::one();
  auto it = memo.find(cols);
  if (it != memo.end()) return it->second;
  std::vector<Expr> terms;
  int sign = 1;
  for (std::size_t c = 0; c < n; ++c) {
    if (!(cols & (1u << c))) continue;
    const Expr& entry = m[row][c];
    if (!entry.is_literal_zero()) {
      Expr sub = det_rec(m, row + 1, cols & ~(1u << c), memo);
      Expr term = entry * sub;
      terms.push_back(sign > 0 ? term : -term);
    }
    sign = -sign;
  }
  Expr result = Expr::sum(std::move(terms));
  memo.emplace(cols, result);
  return result;
}

} // namespace

Expr matrix_determinant(const std::vector<std::vector<Expr>>& m) {
  const std::size_t n = m.size();
  if (n == 0 || n > 16) throw Error("determinant size out of range");
  std::map<unsigned, Expr> memo;
  return det_rec(m, 0, (1u << n) - 1u, memo);
}

std::vector<std::vector<Expr>> matrix_inverse(
    const std::vector<std::vector<Expr>>& m, const Expr& det) {
  const std::size_t n = m.size();
  const Expr inv_det = Expr::pow(det, Rational(-1));
  std::vector<std::vector<Expr>> out(n, std::vector<Expr>(n, Expr::zero()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // Cofactor expansion of the (j, i) minor gives the (i, j) entry of the
      // adjugate.
      std::vector<std::vector<Expr>> minor;
      minor.reserve(n - 1);
      for (std::size_t r = 0; r < n; ++r) {
        if (r == j) continue;
        std::vector<Expr> row;
        row.reserve(n - 1);
        for (std::size_t c = 0; c < n; ++c) {
          if (c == i) continue;
          row.push_back(m[r][c]);
        }
        minor.push_back(std::move(row));
      }
      Expr cof = minor.empty() ? Expr::one() : matrix_determinant(minor);
      if ((i + j) % 2 == 1) cof = -cof;
      out[i][j] = cof * inv_det;
    }
  }
  return out;
}

std::shared_ptr<const MetricChart> MetricChart::create(ChartPtr chart,
                                                       TensorField g,
                                                       ZeroTester& tester) {
  if (g.rank() != 2 || g.signature()[0] != Slot::Down ||
      g.signature()[1] != Slot::Down)
    throw SlotVarianceMismatch("metric must be a (Down, Down) field");
  const int n = chart->dim();

  auto m = std::shared_ptr<MetricChart>(new MetricChart());
  m->chart_ = chart;

  // Symmetry.
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      ZeroVerdict v = tester.test(g.at({a, b}) - g.at({b, a}));
      if (!v.zero())
        throw ValidationFailure("metric is not symmetric at component (" +
                                chart->coord(a) + ", " + chart->coord(b) + ")");
    }
  m->g_ = g;

  // Determinant and inverse.
  std::vector<std::vector<Expr>> rows(static_cast<std::size_t>(n),
                                      std::vector<Expr>(static_cast<std::size_t>(n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = g.at({a, b});
  m->det_ = matrix_determinant(rows);
  if (tester.test(m->det_).zero())
    throw SingularMetric("metric determinant vanishes on the sampling box");
  auto inv = matrix_inverse(rows, m->det_);
  m->g_inv_ = TensorField(chart, {Slot::Up, Slot::Up});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      m->g_inv_.at({a, b}) = inv[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];

  // g·g⁻¹ = identity.
  TensorField gg = tensordot(m->g_, m->g_inv_, {{1, 0}});
  TensorField check = gg - TensorField::delta(chart);
  ZeroVerdict v = test_zero(tester, check);
  if (!v.zero())
    throw SingularMetric("metric inverse check failed (g·g^{-1} != identity)");

  // Christoffel symbols.
  TensorField dg = partial_derivative(m->g_); // ∂_x g_{ab}
  TensorField gamma(chart, {Slot::Up, Slot::Down, Slot::Down});
  const Expr half = Expr::number(Rational(1, 2));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = b; c < n; ++c) {
        std::vector<Expr> terms;
        for (int d = 0; d < n; ++d) {
          const Expr& gi = m->g_inv_.at({a, d});
          if (gi.is_literal_zero()) continue;
          Expr combo = dg.at({b, d, c}) + dg.at({c, d, b}) - dg.at({d, b, c});
          terms.push_back(gi * combo);
        }
        Expr val = half * Expr::sum(std::move(terms));
        gamma.at({a, b, c}) = val;
        gamma.at({a, c, b}) = val;
      }
  m->conn_ = ConnectionCoefficients{std::move(gamma)};
  return m;
}

const TensorField& MetricChart::riemann() const {
  std::call_once(riemann_once_,
                 [this] { riemann_ = riemann_of_connection(conn_); });
  return *riemann_;
}

TensorField MetricChart::raise_slot(const TensorField& t, int slot) const {
  if (t.signature()[static_cast<std::size_t>(slot)] != Slot::Down)
    throw SlotVarianceMismatch("raise_slot needs a Down slot");
  TensorField r = tensordot(g_inv_, t, {{1, slot}});
  return move_slot(r, 0, slot);
}

TensorField MetricChart::lower_slot(const TensorField& t, int slot) const {
  if (t.signature()[static_cast<std::size_t>(slot)] != Slot::Up)
    throw SlotVarianceMismatch("lower_slot needs an Up slot");
  TensorField r = tensordot(g_, t, {{1, slot}});
  return move_slot(r, 0, slot);
}

TensorField MetricChart::metric_trace(const TensorField& t, int s1, int s2) const {
  if (s1 == s2) throw Error("metric_trace needs two distinct slots");
  const Slot v1 = t.signature()[static_cast<std::size_t>(s1)];
  const Slot v2 = t.signature()[static_cast<std::size_t>(s2)];
  if (v1 != v2)
    return contract(t, s1, s2);
  if (v1 == Slot::Down) {
    TensorField raised = raise_slot(t, s1);
    return contract(raised, s1, s2);
  }
  TensorField lowered = lower_slot(t, s1);
  return contract(lowered, s1, s2);
}

} // namespace bicon
