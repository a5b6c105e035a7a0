#pragma once

#include <functional>

#include "bicon/biconformal.hpp"

namespace bicon {

/// State of a candidate bi-conformal vector field at a point: the field, its
/// bi-conformal derivative Ψ_c{}^a, the gauges and their split gradients.
/// phibar is P-longitudinal and phistar Π-longitudinal; chistar is
/// P-longitudinal and chibar Π-longitudinal.
struct NormalFormState {
  int n = 0;
  std::vector<double> xi;                            // ξ^a
  std::vector<double> Psi;                           // Ψ_c{}^a at [c*n + a]
  double phi = 0.0, chi = 0.0;
  std::vector<double> phistar, phibar, chistar, chibar;

  static NormalFormState zero(int n);
  double alpha() const { return 0.5 * (phi + chi); }
  double beta() const { return 0.5 * (phi - chi); }

  int flat_size() const { return n * n + 5 * n + 2; }
  std::vector<double> pack() const;
  static NormalFormState unpack(int n, const std::vector<double>& v);
};

/// Parameterized path through the chart box.
struct Curve {
  std::function<std::vector<double>(double)> position;
  std::function<std::vector<double>(double)> velocity;
  double t0 = 0.0, t1 = 1.0;
  double h = 1e-3;

  static Curve line(std::vector<double> from, std::vector<double> to,
                    double h = 1e-3);
};

struct ResidualReport {
  double lie_P = 0.0;  // £ξP − φP  (max norm)
  double lie_Pi = 0.0; // £ξΠ − χΠ
  double lie_E = 0.0;  // £ξE + p φ*
  double lie_W = 0.0;  // £ξW + (n−p) χ*
  double max_I() const { return lie_P > lie_Pi ? lie_P : lie_Pi; }
  double max_II() const { return lie_E > lie_W ? lie_E : lie_W; }
};

struct TrajectoryPoint {
  double t = 0.0;
  NormalFormState state;
  ResidualReport residuals;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
};

/// Symbolic coefficient tensors of the transport system, compiled once per
/// (metric, projector) pair and evaluated numerically along the curve.
class TransportCoefficients {
public:
  explicit TransportCoefficients(const BiconformalData& data);

  struct Num {
    int n = 0, p = 0;
    std::vector<double> gammabar; // [a][b][c]
    std::vector<double> Rbar;     // [a][b][c][d]
    std::vector<double> P_dn, Pi_dn, P_mix, Pi_mix, g_inv; // [a][b]
    std::vector<double> E, W;                              // [a]
    std::vector<double> DE, DW;       // [c][a] = ∇̄_c E_a
    std::vector<double> DDE, DDW;     // [x][c][a]
    std::vector<double> L0, L1;       // [b][c]
    std::vector<double> DL0, DL1;     // [x][b][c]
    std::vector<double> DP, DPi;      // [x][b][c] = ∇̄_x P_bc
  };

  Num evaluate(const EvalContext& ctx, const std::vector<double>& point) const;
  int n() const { return n_; }
  int p() const { return p_; }

private:
  int n_ = 0, p_ = 0;
  TensorField gammabar_, Rbar_, P_dn_, Pi_dn_, P_mix_, Pi_mix_, g_inv_;
  TensorField E_, W_, DE_, DW_, DDE_, DDW_, L0_, L1_, DL0_, DL1_, DP_, DPi_;
};

/// Time derivative of the state at a point: the first-order transport system
/// contracted with the curve tangent. Linear in the state.
std::vector<double> transport_rhs(const TransportCoefficients::Num& c,
                                  const std::vector<double>& velocity,
                                  const std::vector<double>& state);

/// Constraint residuals of a state at a point.
ResidualReport constraint_residuals(const TransportCoefficients::Num& c,
                                    const NormalFormState& s);

struct TransportOptions {
  double residual_bound = 1e6; // throw ResidualBlowup beyond this
  int record_stride = 1;       // keep every k-th step in the trajectory
};

/// RK4 transport of the state along the curve. Requires a rank where the
/// normal form closes (p ∉ {1, 2, n−1, n−2}) and data computed with
/// curvature. Records constraint residuals along the way.
Trajectory transport(const BiconformalData& data, const NormalFormState& s0,
                     const Curve& curve, const EvalContext& ctx,
                     const TransportOptions& opts = {});

/// Convenience wrapper evaluating the residuals of a state at a point.
ResidualReport constraint_residuals(const BiconformalData& data,
                                    const NormalFormState& s,
                                    const std::vector<double>& point,
                                    const EvalContext& ctx);

struct ConstraintCount {
  long long variables = 0;
  long long constraints = 0;
  long long N = 0; // variables − constraints
};

/// Variable/constraint bookkeeping of the normal-form system:
/// variables = 2 + 3n + n², constraints = n + n(n+1)/2 + p(n−p).
ConstraintCount count_constraints(int n, int p);

/// Rank of the Lie-constraint coefficient matrix δ^p_a P_bq + δ^p_b P_aq in
/// the projector eigenbasis; equals p(p+1)/2 + p(n−p).
int lie_constraint_rank(int n, int p);

} // namespace bicon
