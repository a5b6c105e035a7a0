#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bicon/projector.hpp"

namespace bicon {

/// M_abc = ∇_b P_ac + ∇_c P_ab − ∇_a P_bc (Levi-Civita derivatives of P).
TensorField compute_M(const MetricChart& m, const ProjectorPair& pp);

/// Traces E_a = M_acb P^{cb} and W_a = −M_acb Π^{cb}.
std::pair<TensorField, TensorField> compute_EW(const MetricChart& m,
                                               const ProjectorPair& pp,
                                               const TensorField& M);

/// T_abc = M_abc + W_a Π_bc / (n−p) − E_a P_bc / p, with its projected parts
/// A_abc = P_a^d T_dbc and B_abc = Π_a^d T_dbc (A + B = T).
struct SplitT {
  TensorField T, A, B;
};
SplitT compute_T(const MetricChart& m, const ProjectorPair& pp,
                 const TensorField& M, const TensorField& E,
                 const TensorField& W);

/// Connection deformation
/// L^a_bc = (E_b P^a_c + E_c P^a_b)/(2p) + (W_b Π^a_c + W_c Π^a_b)/(2(n−p))
///          + ½ (P^a_p − Π^a_p) M^p_bc,
/// symmetric in (b, c); the bi-conformal connection is Γ + L.
TensorField compute_L(const MetricChart& m, const ProjectorPair& pp,
                      const TensorField& M, const TensorField& E,
                      const TensorField& W);

/// Curvature of the bi-conformal connection via the two-connection relation
/// R̄^a_bcd = R^a_bcd + 2∇_[c L^a_d]b + 2 L^a_r[c L^r_d]b.
TensorField compute_Rbar_from_relation(const MetricChart& m,
                                       const TensorField& L);

/// Normal-form source tensors; defined only for p ∉ {1, n−1}.
struct NormalFormSources {
  TensorField L0, L1; // L⁰_bc, L¹_bc (not symmetric in general)
  Expr R0, R1;        // R̄⁰, R̄¹
};
NormalFormSources compute_L0_L1(const MetricChart& m, const ProjectorPair& pp,
                                const TensorField& Rbar);

struct BiconformalOptions {
  bool with_curvature = true; // R̄, L⁰/L¹ (heavier; classification needs neither)
  bool crosscheck_curvature = true; // validate the relation route against the
                                    // direct curvature of Γ + L
};

/// Everything the downstream decision procedures need for one
/// (metric, projector) pair. Computed once, immutable afterwards.
class BiconformalData {
public:
  static BiconformalData compute(const MetricPtr& m, const ProjectorPair& pp,
                                 ZeroTester& tester,
                                 const BiconformalOptions& opts = {});

  MetricPtr metric;
  ProjectorPair proj;
  TensorField M, E, W, T, A, B, u; // u_a = E_a/(2p) + W_a/(2(n−p))
  TensorField L;                   // (Up, Down, Down)
  ConnectionCoefficients gammabar; // Γ + L
  std::optional<TensorField> Rbar;
  std::optional<TensorField> L0, L1;
  std::optional<Expr> Rbar0, Rbar1;

  int n() const { return metric->dim(); }
  int p() const { return proj.p(); }

private:
  BiconformalData() = default;
};

struct IdentityResult {
  std::string name;
  ZeroVerdict verdict;
};

struct IdentityReport {
  std::vector<IdentityResult> items;
  bool all_zero() const {
    for (const auto& i : items)
      if (!i.verdict.zero()) return false;
    return true;
  }
};

/// Runs the full identity battery for the pair: the covariant-derivative
/// identities of P (and their duals under P ↔ Π, p ↔ n−p, recomputed from
/// scratch on the swapped pair), the vanishing contractions, the E/W trace
/// identities, both curvature routes, and the Lie-derivative identities for
/// the supplied test vector field. Needs data computed with curvature.
IdentityReport verify_identities(const BiconformalData& data,
                                 const TensorField& xi, ZeroTester& tester);

/// Deterministic random polynomial vector field for identity checks.
TensorField random_vector_field(const ChartPtr& chart, std::uint64_t seed,
                                int degree = 2);

} // namespace bicon
