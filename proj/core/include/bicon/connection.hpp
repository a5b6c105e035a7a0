#pragma once

#include "bicon/tensor.hpp"

namespace bicon {

/// Coefficients of a symmetric linear connection in the natural basis,
/// stored as an (Up, Down, Down) component array. Not a tensor, but the
/// difference of two connections is.
struct ConnectionCoefficients {
  TensorField coeffs; // C^a_{bc}, symmetric in the lower pair

  const ChartPtr& chart() const { return coeffs.chart(); }
  const Expr& at(int a, int b, int c) const { return coeffs.at({a, b, c}); }

  /// Pointwise sum with a (1,2) tensor, e.g. the metric connection plus a
  /// deformation term.
  ConnectionCoefficients plus(const TensorField& l) const {
    return ConnectionCoefficients{coeffs + l};
  }
};

/// Covariant derivative with the given symmetric connection; the new Down
/// slot comes first: (D t)_{a ...} = ∂_a t_... + corrections.
TensorField covariant_derivative(const ConnectionCoefficients& conn,
                                 const TensorField& t);

/// Lie derivative along xi (a rank-1 Up field). With a connection the
/// covariant form is used; without one, the coordinate formula. The result is
/// independent of which symmetric connection is supplied.
TensorField lie_derivative(const TensorField& xi, const TensorField& t,
                           const ConnectionCoefficients* conn = nullptr);

/// Lie derivative of connection coefficients (a genuine tensor):
/// (£ξ C)^a_{bc} = ξ^d ∂_d C^a_{bc} − C^d_{bc} ∂_d ξ^a + C^a_{dc} ∂_b ξ^d
///                + C^a_{bd} ∂_c ξ^d + ∂_b ∂_c ξ^a.
TensorField lie_derivative_connection(const TensorField& xi,
                                      const ConnectionCoefficients& conn);

/// Curvature tensor of a symmetric connection:
/// R^a_{bcd} = ∂_c C^a_{db} − ∂_d C^a_{cb} + C^a_{rc} C^r_{db} − C^a_{rd} C^r_{cb}.
TensorField riemann_of_connection(const ConnectionCoefficients& conn);

} // namespace bicon
