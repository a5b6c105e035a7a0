#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bicon/chart.hpp"
#include "bicon/expr.hpp"

namespace bicon {

/// Deterministic uniform double in [0, 1). splitmix64-based so results do not
/// depend on the platform's distribution implementation.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64();
  double next_double(); // [0, 1)
  double uniform(double lo, double hi);
  long long uniform_int(long long lo, long long hi); // inclusive

private:
  std::uint64_t state_;
};

/// Order-independent hash stream: a value derived purely from the inputs.
std::uint64_t mix_key(std::uint64_t a, std::uint64_t b);
std::uint64_t hash_key(const std::string& s);

/// Callable backing an opaque function: given the derivative multi-index and
/// the argument values, produce the (derivative) value at that point.
using OpaqueCallable =
    std::function<double(const std::vector<int>&, const std::vector<double>&)>;

/// Evaluation and sampling configuration. Binds chart coordinates to the
/// sampling box, opaque functions to concrete formulas or callables, and
/// carries the probabilistic zero-test parameters.
struct EvalContext {
  ChartPtr chart;
  std::map<std::string, double> params; // non-coordinate symbols
  std::map<std::string, Expr> opaque_exprs; // formula over the argument coords
  std::map<std::string, OpaqueCallable> opaque_fns;
  std::uint64_t seed = 42;
  double tol = 1e-9; // dimensionless zero-test tolerance
  int samples = 32;  // K
  /// When set, an opaque symbol with no binding evaluates to a deterministic
  /// pseudo-random jet: each (name, derivative multi-index, point) triple gets
  /// an independent value. This is what makes identities in fully opaque
  /// metrics testable by sampling.
  bool sample_unbound_opaques = false;
  double jet_lo = 0.35, jet_hi = 2.0;
  int max_resample = 8; // retry factor for singular sample points

  void validate() const;

  // Derivatives of bound opaque formulas, memoized per (name, multi-index).
  std::shared_ptr<std::map<std::pair<std::string, std::vector<int>>, Expr>>
      deriv_cache =
          std::make_shared<std::map<std::pair<std::string, std::vector<int>>, Expr>>();
};

/// Memoizing single-point evaluator. Tracks, per node, the value and the
/// largest absolute value over that node's subtree ("scale").
class Evaluator {
public:
  Evaluator(const EvalContext& ctx, std::vector<double> point,
            std::uint64_t salt = 0);

  double value(const Expr& e);
  /// Largest |subterm| over e's own tree at this point (includes e itself).
  double scale(const Expr& e);
  const std::vector<double>& point() const { return point_; }

private:
  struct Entry {
    double value;
    double submax;
  };
  Entry eval(const Expr& e);

  const EvalContext& ctx_;
  std::vector<double> point_;
  std::uint64_t salt_;
  std::unordered_map<std::shared_ptr<const ExprNode>, Entry> memo_;
};

/// eval(e, ctx, point): IEEE-double value of e at the point. Every symbol must
/// be bound (coordinates via the point, parameters via ctx.params, opaques via
/// a binding) unless ctx.sample_unbound_opaques is set.
double eval(const Expr& e, const EvalContext& ctx,
            const std::vector<double>& point);

enum class Verdict { ProvablyZero, ProbablyZero, NonZero };

std::string verdict_name(Verdict v);

struct ZeroVerdict {
  Verdict kind = Verdict::ProvablyZero;
  std::vector<double> witness;   // sample point, for NonZero
  std::vector<int> component;    // tensor component, when applicable
  double value = 0.0;            // |value| at the witness
  double threshold = 0.0;        // tol * (1 + scale) there
  bool zero() const { return kind != Verdict::NonZero; }
};

/// Probabilistic zero testing over a fixed deterministic sample set.
/// ProvablyZero iff canonical simplification reached the literal 0; otherwise
/// the expression is evaluated at K points of the box and compared against
/// tol * (1 + scale). Singular points (domain errors) are resampled up to
/// max_resample * K times. Evaluations share memo tables across queries, so
/// testing many components of one tensor is cheap.
class ZeroTester {
public:
  ZeroTester(EvalContext ctx, bool jets_for_unbound = true);

  ZeroVerdict test(const Expr& e);
  const EvalContext& context() const { return ctx_; }
  EvalContext& context() { return ctx_; }

  /// Evaluator for the k-th shared sample point (drawing it if needed).
  Evaluator& evaluator(int k);
  std::vector<double> draw_point(std::uint64_t stream);

private:
  EvalContext ctx_;
  std::vector<std::unique_ptr<Evaluator>> evals_;
  std::uint64_t next_stream_ = 0;
};

/// Single-shot form of the zero test.
ZeroVerdict is_zero(const Expr& e, const EvalContext& ctx);

/// Deterministic random polynomial in the given symbols: total degree <= deg,
/// small rational coefficients. Used for property tests and default test
/// vector fields.
Expr random_polynomial(const std::vector<std::string>& symbols, int deg,
                       Rng& rng, int terms = 4);

} // namespace bicon
