#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bicon/rational.hpp"

namespace bicon {

enum class NodeKind : std::uint8_t {
  Number,  // exact rational constant
  Symbol,  // coordinate or named parameter
  Opaque,  // opaque function of listed coordinates, with formal-derivative order
  Call,    // elementary function of one argument
  Power,   // base ^ rational exponent
  Product, // flattened n-ary product, leading rational coefficient if any
  Sum,     // flattened n-ary sum, collected like terms
};

enum class CallKind : std::uint8_t { Sin, Cos, Exp, Log, Abs, Sign };

struct ExprNode;

/// Immutable handle to a canonicalized expression tree. Construction always
/// canonicalizes (flatten/sort/fold), so two handles representing the same
/// canonical form compare equal structurally. Safe to share across threads.
class Expr {
public:
  Expr() = default; // empty handle; only valid after assignment

  static Expr number(const Rational& r);
  static Expr number(long long n) { return number(Rational(n)); }
  static Expr symbol(const std::string& name);
  /// Opaque function symbol of the listed coordinate arguments, optionally
  /// carrying a formal partial-derivative multi-index (one order per argument).
  static Expr opaque(const std::string& name, std::vector<std::string> args,
                     std::vector<int> deriv = {});
  static Expr zero() { return number(0); }
  static Expr one() { return number(1); }

  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr pow(const Expr& base, const Rational& exponent);
  static Expr call(CallKind fn, const Expr& arg);

  bool valid() const { return node_ != nullptr; }
  const ExprNode& node() const { return *node_; }
  const std::shared_ptr<const ExprNode>& ptr() const { return node_; }

  bool is_literal_zero() const;
  bool is_literal_one() const;
  bool is_number() const;
  Rational number_value() const; // requires is_number()

  std::size_t tree_size() const;
  std::uint64_t hash() const;

  /// Total structural order used for canonical sorting: negative, zero or
  /// positive like strcmp. Deterministic across runs.
  static int compare(const Expr& a, const Expr& b);
  friend bool operator==(const Expr& a, const Expr& b) {
    return compare(a, b) == 0;
  }
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  /// Same canonical node, pointer-wise (used by idempotence checks).
  bool identical(const Expr& other) const { return node_ == other.node_; }

  std::string str() const;

private:
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ExprNode> node_;
  friend struct ExprBuilder;
};

struct ExprNode {
  NodeKind kind;
  CallKind fn = CallKind::Sin;       // Call
  Rational value;                    // Number, Power exponent
  std::string name;                  // Symbol, Opaque
  std::vector<std::string> args;     // Opaque argument coordinates
  std::vector<int> deriv;            // Opaque derivative multi-index
  std::vector<Expr> kids;            // Sum/Product children, Power base, Call arg
  std::uint64_t hash = 0;
  std::size_t size = 1;
};

// Operator sugar. All of it routes through the canonicalizing builders.
inline Expr operator+(const Expr& a, const Expr& b) {
  return Expr::sum({a, b});
}
inline Expr operator-(const Expr& a, const Expr& b) {
  return Expr::sum({a, Expr::product({Expr::number(-1), b})});
}
inline Expr operator-(const Expr& a) {
  return Expr::product({Expr::number(-1), a});
}
inline Expr operator*(const Expr& a, const Expr& b) {
  return Expr::product({a, b});
}
inline Expr operator/(const Expr& a, const Expr& b) {
  return Expr::product({a, Expr::pow(b, Rational(-1))});
}

inline Expr sin(const Expr& e) { return Expr::call(CallKind::Sin, e); }
inline Expr cos(const Expr& e) { return Expr::call(CallKind::Cos, e); }
inline Expr exp(const Expr& e) { return Expr::call(CallKind::Exp, e); }
inline Expr log(const Expr& e) { return Expr::call(CallKind::Log, e); }
inline Expr abs(const Expr& e) { return Expr::call(CallKind::Abs, e); }
inline Expr sign(const Expr& e) { return Expr::call(CallKind::Sign, e); }
inline Expr sqrt(const Expr& e) { return Expr::pow(e, Rational(1, 2)); }
inline Expr pow(const Expr& e, long long k) {
  return Expr::pow(e, Rational(k));
}

/// Partial derivative with respect to a coordinate symbol. Total on
/// well-formed expressions; opaque functions produce formal-derivative
/// nodes (never a silent zero) unless the coordinate is not among their
/// declared arguments, in which case the derivative is exactly zero.
Expr differentiate(const Expr& e, const std::string& coord);

/// Re-runs canonicalization bottom-up. Construction already canonicalizes,
/// so this is the identity on any Expr built through the public builders.
Expr canonicalize(const Expr& e);

std::string call_name(CallKind fn);

} // namespace bicon
