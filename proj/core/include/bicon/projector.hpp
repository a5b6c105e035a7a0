#pragma once

#include "bicon/metric.hpp"

namespace bicon {

/// A validated pair of orthogonal complementary projectors (P, Π) with
/// respect to the metric, their square root S = P − Π, and the integer rank
/// p of P. All algebraic invariants are zero-tested at construction:
/// symmetry, P + Π = g, idempotency, mutual orthogonality, integer trace and
/// S_ap S^p_b = g_ab. Immutable after validation.
class ProjectorPair {
public:
  /// Orthogonal projector onto the span of the chosen coordinate vectors.
  /// Requires only that the induced block Gram matrix be invertible on the
  /// sampling box; the metric need not be block-diagonal in these coordinates.
  static ProjectorPair from_coordinate_block(const MetricPtr& m,
                                             const std::vector<std::string>& coords,
                                             ZeroTester& tester);

  /// Validates a user-supplied covariant P_ab; Π := g − P. The rank is
  /// determined by zero-testing the trace against each integer.
  static ProjectorPair from_components(const MetricPtr& m, TensorField P,
                                       ZeroTester& tester);

  const MetricPtr& metric() const { return metric_; }
  int p() const { return p_; }
  int n() const { return metric_->dim(); }

  const TensorField& P() const { return P_dn_; }       // P_ab
  const TensorField& Pi() const { return Pi_dn_; }     // Π_ab
  const TensorField& S() const { return S_dn_; }       // S_ab = P_ab − Π_ab
  const TensorField& P_mix() const { return P_mix_; }  // P^a_b
  const TensorField& Pi_mix() const { return Pi_mix_; }
  const TensorField& P_up() const { return P_up_; }    // P^ab
  const TensorField& Pi_up() const { return Pi_up_; }

  /// The same pair with the roles of P and Π exchanged (rank n − p). The
  /// invariants are symmetric under the swap, so no re-validation happens.
  ProjectorPair swapped() const;

private:
  ProjectorPair() = default;
  void finish(const MetricPtr& m, ZeroTester& tester, bool expect_rank,
              int expected_p);

  MetricPtr metric_;
  int p_ = 0;
  TensorField P_dn_, Pi_dn_, S_dn_, P_mix_, Pi_mix_, P_up_, Pi_up_;
};

} // namespace bicon
