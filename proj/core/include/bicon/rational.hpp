#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "bicon/errors.hpp"

namespace bicon {

/// Exact rational arithmetic on 64-bit numerator/denominator.
/// All constant folding in expressions goes through this type; floating
/// point only appears at evaluation time.
class Rational {
public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}
  Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

  long long num() const { return num_; }
  long long den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  bool is_integer() const { return den_ == 1; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(checked(static_cast<__int128>(a.num_) * b.den_ +
                            static_cast<__int128>(b.num_) * a.den_),
                    checked(static_cast<__int128>(a.den_) * b.den_));
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return a + Rational(-b.num_, b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(checked(static_cast<__int128>(a.num_) * b.num_),
                    checked(static_cast<__int128>(a.den_) * b.den_));
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw ExprError("rational division by zero");
    return Rational(checked(static_cast<__int128>(a.num_) * b.den_),
                    checked(static_cast<__int128>(a.den_) * b.num_));
  }
  Rational operator-() const { return Rational(-num_, den_); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
  }
  /// Exact order via 128-bit cross multiplication.
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ <
           static_cast<__int128>(b.num_) * a.den_;
  }

  /// r^k for integer k; throws on 0^negative.
  Rational pow_int(long long k) const {
    if (k == 0) return Rational(1);
    Rational base = *this;
    if (k < 0) {
      if (num_ == 0) throw ExprError("zero raised to a negative power");
      base = Rational(den_, num_);
      k = -k;
    }
    Rational acc(1);
    for (long long i = 0; i < k; ++i) acc = acc * base;
    return acc;
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

private:
  static long long checked(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN)
      throw ExprError("rational overflow");
    return static_cast<long long>(v);
  }

  void normalize() {
    if (den_ == 0) throw ExprError("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  long long num_;
  long long den_;
};

} // namespace bicon
