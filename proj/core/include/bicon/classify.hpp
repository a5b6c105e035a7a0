#pragma once

#include "bicon/biconformal.hpp"

namespace bicon {

enum class SeparabilityClass {
  Decomposable,
  WarpedProduct,
  DoubleWarped,
  TwistedProduct,
  ConformallyReducible,
  GenericSeparable,
  NotSeparable,
};

std::string class_name(SeparabilityClass c);

struct BoundResult {
  bool possibly_infinite = false;
  long long N = 0; // valid when finite
};

/// Upper bound on the dimension of the bi-conformal algebra for ranks where
/// the normal form closes; PossiblyInfinite exactly on p ∈ {1, 2, n−1, n−2}.
BoundResult dimension_bound(int n, int p);

/// Classification evidence and verdict for one (metric, projector) pair,
/// relative to the GIVEN projector (no search over projectors happens).
struct ClassificationReport {
  ZeroVerdict separable;             // T = 0 test
  ZeroVerdict E_zero, W_zero;        // E = 0, W = 0
  ZeroVerdict dE_zero, dW_zero;      // closedness (locally: exactness)
  ZeroVerdict du_zero;
  SeparabilityClass label = SeparabilityClass::NotSeparable;
  int n = 0, p = 0;
  BoundResult bound;
};

/// (dω)_ab = ∂_a ω_b − ∂_b ω_a for a rank-1 Down field.
TensorField exterior_derivative(const TensorField& omega);

/// Decision procedure. If T is NonZero the pair is NotSeparable; otherwise
/// the most specific case wins, in the order Decomposable (E = W = 0),
/// WarpedProduct (E = 0, dW = 0), DoubleWarped (dE = dW = 0), TwistedProduct
/// (E = 0), ConformallyReducible (du = 0), else GenericSeparable. The report
/// carries every verdict since the cases overlap.
ClassificationReport classify(const BiconformalData& data, ZeroTester& tester);

/// Zero verdict of the triple projection P^r_a P^s_b P^q_c T_rsq, the
/// necessary condition for a foliation by conformal hypersurfaces. Stated for
/// n = 4 leaves; evaluated on any dimension without asserting sufficiency.
ZeroVerdict foliation_condition(const BiconformalData& data,
                                ZeroTester& tester);

} // namespace bicon
