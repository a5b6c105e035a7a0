#pragma once

#include <memory>
#include <mutex>
#include <optional>

#include "bicon/connection.hpp"
#include "bicon/tensor.hpp"

namespace bicon {

/// Determinant of a square symbolic matrix (Laplace expansion with submatrix
/// memoization, so sparse matrices stay cheap).
Expr matrix_determinant(const std::vector<std::vector<Expr>>& m);

/// Inverse via adjugate / determinant.
std::vector<std::vector<Expr>> matrix_inverse(
    const std::vector<std::vector<Expr>>& m, const Expr& det);

/// A chart equipped with a pseudo-Riemannian metric. Construction validates
/// symmetry and non-degeneracy (probabilistic zero tests) and precomputes the
/// inverse metric and the Christoffel symbols; the Riemann tensor is computed
/// on first use and cached. Immutable afterwards; safe to share.
class MetricChart {
public:
  static std::shared_ptr<const MetricChart> create(ChartPtr chart,
                                                   TensorField g,
                                                   ZeroTester& tester);

  const ChartPtr& chart() const { return chart_; }
  int dim() const { return chart_->dim(); }
  const TensorField& g() const { return g_; }
  const TensorField& g_inv() const { return g_inv_; }
  const Expr& det_g() const { return det_; }

  /// Levi-Civita connection coefficients (Christoffel symbols),
  /// Γ^a_{bc} = ½ g^{ad}(∂_b g_{dc} + ∂_c g_{db} − ∂_d g_{bc}).
  const ConnectionCoefficients& connection() const { return conn_; }
  const TensorField& christoffel() const { return conn_.coeffs; }

  /// Curvature of the Levi-Civita connection,
  /// R^a_{bcd} = ∂_c Γ^a_{db} − ∂_d Γ^a_{cb} + Γ^a_{rc} Γ^r_{db} − Γ^a_{rd} Γ^r_{cb}.
  const TensorField& riemann() const;

  TensorField raise_slot(const TensorField& t, int slot) const;
  TensorField lower_slot(const TensorField& t, int slot) const;
  /// Contracts two slots of equal variance through the metric.
  TensorField metric_trace(const TensorField& t, int s1, int s2) const;

  /// Covariant derivative with the Levi-Civita connection.
  TensorField nabla(const TensorField& t) const {
    return covariant_derivative(conn_, t);
  }

private:
  MetricChart() = default;
  ChartPtr chart_;
  TensorField g_, g_inv_;
  Expr det_;
  ConnectionCoefficients conn_;
  mutable std::once_flag riemann_once_;
  mutable std::optional<TensorField> riemann_;
};

using MetricPtr = std::shared_ptr<const MetricChart>;

/// christoffel(m): the cached Levi-Civita coefficients.
inline const TensorField& christoffel(const MetricChart& m) {
  return m.christoffel();
}
/// riemann(m): the cached curvature tensor.
inline const TensorField& riemann(const MetricChart& m) { return m.riemann(); }

} // namespace bicon
