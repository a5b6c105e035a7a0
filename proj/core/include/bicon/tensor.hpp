#pragma once

#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "bicon/chart.hpp"
#include "bicon/eval.hpp"
#include "bicon/expr.hpp"

namespace bicon {

enum class Slot : std::uint8_t { Up, Down };

/// Dense tensor field over one chart: a variance signature plus n^rank
/// symbolic components in row-major order. Rank 0 holds a single scalar.
class TensorField {
public:
  TensorField() = default;
  TensorField(ChartPtr chart, std::vector<Slot> signature);

  static TensorField scalar(ChartPtr chart, const Expr& e);
  /// Kronecker delta as a mixed (Up, Down) field.
  static TensorField delta(ChartPtr chart);

  const ChartPtr& chart() const { return chart_; }
  int dim() const { return chart_->dim(); }
  int rank() const { return static_cast<int>(sig_.size()); }
  const std::vector<Slot>& signature() const { return sig_; }

  Expr& at(std::span<const int> idx);
  const Expr& at(std::span<const int> idx) const;
  Expr& at(std::initializer_list<int> idx) {
    return at(std::span<const int>(idx.begin(), idx.size()));
  }
  const Expr& at(std::initializer_list<int> idx) const {
    return at(std::span<const int>(idx.begin(), idx.size()));
  }

  const std::vector<Expr>& components() const { return comp_; }
  std::vector<Expr>& components() { return comp_; }

  /// The single component of a rank-0 field.
  const Expr& scalar() const { return comp_[0]; }

  /// Iterate over all multi-indices in row-major order.
  void for_each(const std::function<void(std::span<const int>)>& fn) const;

  bool literal_zero() const; // every component is the literal 0

  TensorField map(const std::function<Expr(const Expr&)>& fn) const;

private:
  std::size_t flat(std::span<const int> idx) const;
  ChartPtr chart_;
  std::vector<Slot> sig_;
  std::vector<Expr> comp_;
};

TensorField operator+(const TensorField& a, const TensorField& b);
TensorField operator-(const TensorField& a, const TensorField& b);
TensorField operator-(const TensorField& a);
TensorField operator*(const Expr& s, const TensorField& t);

/// Tensor product; result signature is a's slots followed by b's.
TensorField outer(const TensorField& a, const TensorField& b);

/// Contract one Up slot against one Down slot of the same tensor.
TensorField contract(const TensorField& t, int slot_a, int slot_b);

/// Contract pairs (slot of a, slot of b); each pair must couple one Up with
/// one Down slot. Result keeps a's remaining slots followed by b's.
TensorField tensordot(const TensorField& a, const TensorField& b,
                      const std::vector<std::pair<int, int>>& pairs);

/// Coordinate partial derivative; the new Down slot comes first.
TensorField partial_derivative(const TensorField& t);

/// Moves the slot at `from` to position `to`, shifting the slots in between.
TensorField move_slot(const TensorField& t, int from, int to);

/// Verdict for a whole field: NonZero if any component is, ProvablyZero if
/// all are, ProbablyZero otherwise. Records the offending component.
ZeroVerdict test_zero(ZeroTester& tester, const TensorField& t);

/// Max |component| at a point (used by numeric residual checks).
double max_abs(Evaluator& ev, const TensorField& t);

} // namespace bicon
