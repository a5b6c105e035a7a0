#include "bicon/classify.hpp"

#include "bicon/errors.hpp"

namespace bicon {

std::string class_name(SeparabilityClass c) {
  switch (c) {
  case SeparabilityClass::Decomposable: return "Decomposable";
  case SeparabilityClass::WarpedProduct: return "WarpedProduct";
  case SeparabilityClass::DoubleWarped: return "DoubleWarped";
  case SeparabilityClass::TwistedProduct: return "TwistedProduct";
  case SeparabilityClass::ConformallyReducible: return "ConformallyReducible";
  case SeparabilityClass::GenericSeparable: return "GenericSeparable";
  case SeparabilityClass::NotSeparable: return "NotSeparable";
  }
  return "?";
}

BoundResult dimension_bound(int n, int p) {
  if (n < 2 || p < 1 || p > n - 1)
    throw InvalidRank("dimension_bound needs 1 <= p <= n-1, n >= 2");
  BoundResult out;
  if (p == 1 || p == 2 || p == n - 1 || p == n - 2) {
    out.possibly_infinite = true;
    return out;
  }
  const long long q = n - p;
  out.N = (static_cast<long long>(p) + 1) * (p + 2) / 2 + (q + 1) * (q + 2) / 2;
  return out;
}

TensorField exterior_derivative(const TensorField& omega) {
  if (omega.rank() != 1 || omega.signature()[0] != Slot::Down)
    throw SlotVarianceMismatch("exterior_derivative needs a rank-1 Down field");
  const int n = omega.dim();
  TensorField d(omega.chart(), {Slot::Down, Slot::Down});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const std::string& ca = omega.chart()->coord(a);
      const std::string& cb = omega.chart()->coord(b);
      d.at({a, b}) =
          differentiate(omega.at({b}), ca) - differentiate(omega.at({a}), cb);
    }
  return d;
}

ClassificationReport classify(const BiconformalData& data, ZeroTester& tester) {
  ClassificationReport r;
  r.n = data.n();
  r.p = data.p();
  r.bound = dimension_bound(r.n, r.p);
  r.separable = test_zero(tester, data.T);
  r.E_zero = test_zero(tester, data.E);
  r.W_zero = test_zero(tester, data.W);
  r.dE_zero = test_zero(tester, exterior_derivative(data.E));
  r.dW_zero = test_zero(tester, exterior_derivative(data.W));
  r.du_zero = test_zero(tester, exterior_derivative(data.u));

  if (!r.separable.zero()) {
    r.label = SeparabilityClass::NotSeparable;
  } else if (r.E_zero.zero() && r.W_zero.zero()) {
    r.label = SeparabilityClass::Decomposable;
  } else if (r.E_zero.zero() && r.dW_zero.zero()) {
    r.label = SeparabilityClass::WarpedProduct;
  } else if (r.dE_zero.zero() && r.dW_zero.zero()) {
    r.label = SeparabilityClass::DoubleWarped;
  } else if (r.E_zero.zero()) {
    r.label = SeparabilityClass::TwistedProduct;
  } else if (r.du_zero.zero()) {
    r.label = SeparabilityClass::ConformallyReducible;
  } else {
    r.label = SeparabilityClass::GenericSeparable;
  }
  return r;
}

ZeroVerdict foliation_condition(const BiconformalData& data,
                                ZeroTester& tester) {
  const ProjectorPair& pp = data.proj;
  // P^r_a P^s_b P^q_c T_rsq.
  TensorField t1 = tensordot(pp.P_mix(), data.T, {{0, 0}}); // (a, s, q)
  TensorField t2 = tensordot(pp.P_mix(), t1, {{0, 1}});     // (b, a, q)
  TensorField t3 = tensordot(pp.P_mix(), t2, {{0, 2}});     // (c, b, a)
  return test_zero(tester, t3);
}

} // namespace bicon
