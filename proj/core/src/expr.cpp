#include "bicon/expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "bicon/errors.hpp"

namespace bicon {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t hash_rational(const Rational& r) {
  return mix(static_cast<std::uint64_t>(r.num()) * 0x9e3779b97f4a7c15ULL,
             static_cast<std::uint64_t>(r.den()));
}

std::uint64_t node_hash(const ExprNode& n) {
  std::uint64_t h = static_cast<std::uint64_t>(n.kind) * 0xff51afd7ed558ccdULL;
  switch (n.kind) {
  case NodeKind::Number:
    h = mix(h, hash_rational(n.value));
    break;
  case NodeKind::Symbol:
    h = mix(h, hash_string(n.name));
    break;
  case NodeKind::Opaque:
    h = mix(h, hash_string(n.name));
    for (const auto& a : n.args) h = mix(h, hash_string(a));
    for (int d : n.deriv) h = mix(h, static_cast<std::uint64_t>(d) + 17);
    break;
  case NodeKind::Call:
    h = mix(h, static_cast<std::uint64_t>(n.fn) + 101);
    h = mix(h, n.kids[0].hash());
    break;
  case NodeKind::Power:
    h = mix(h, n.kids[0].hash());
    h = mix(h, hash_rational(n.value));
    break;
  case NodeKind::Product:
  case NodeKind::Sum:
    for (const auto& k : n.kids) h = mix(h, k.hash());
    break;
  }
  return h;
}

std::size_t node_size(const ExprNode& n) {
  std::size_t s = 1;
  for (const auto& k : n.kids) s += k.tree_size();
  return s;
}

} // namespace

struct ExprBuilder {
  static Expr wrap(ExprNode n) {
    n.hash = node_hash(n);
    n.size = node_size(n);
    return Expr(std::make_shared<const ExprNode>(std::move(n)));
  }

  static Expr raw_number(const Rational& r) {
    ExprNode n;
    n.kind = NodeKind::Number;
    n.value = r;
    return wrap(std::move(n));
  }

  // Children are assumed already canonical and sorted; no re-normalization.
  static Expr raw_sum(std::vector<Expr> kids) {
    if (kids.empty()) return raw_number(Rational(0));
    if (kids.size() == 1) return kids[0];
    ExprNode n;
    n.kind = NodeKind::Sum;
    n.kids = std::move(kids);
    return wrap(std::move(n));
  }

  static Expr raw_product(std::vector<Expr> kids) {
    if (kids.empty()) return raw_number(Rational(1));
    if (kids.size() == 1) return kids[0];
    ExprNode n;
    n.kind = NodeKind::Product;
    n.kids = std::move(kids);
    return wrap(std::move(n));
  }

  static Expr raw_power(const Expr& base, const Rational& e) {
    ExprNode n;
    n.kind = NodeKind::Power;
    n.kids = {base};
    n.value = e;
    return wrap(std::move(n));
  }
};

Expr Expr::number(const Rational& r) { return ExprBuilder::raw_number(r); }

Expr Expr::symbol(const std::string& name) {
  ExprNode n;
  n.kind = NodeKind::Symbol;
  n.name = name;
  return ExprBuilder::wrap(std::move(n));
}

Expr Expr::opaque(const std::string& name, std::vector<std::string> args,
                  std::vector<int> deriv) {
  if (deriv.empty()) deriv.assign(args.size(), 0);
  if (deriv.size() != args.size())
    throw ExprError("opaque derivative multi-index length mismatch for " + name);
  ExprNode n;
  n.kind = NodeKind::Opaque;
  n.name = name;
  n.args = std::move(args);
  n.deriv = std::move(deriv);
  return ExprBuilder::wrap(std::move(n));
}

bool Expr::is_literal_zero() const {
  return node_ && node_->kind == NodeKind::Number && node_->value.is_zero();
}
bool Expr::is_literal_one() const {
  return node_ && node_->kind == NodeKind::Number && node_->value.is_one();
}
bool Expr::is_number() const {
  return node_ && node_->kind == NodeKind::Number;
}
Rational Expr::number_value() const { return node_->value; }
std::size_t Expr::tree_size() const { return node_ ? node_->size : 0; }
std::uint64_t Expr::hash() const { return node_ ? node_->hash : 0; }

int Expr::compare(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return 0;
  const ExprNode& x = *a.node_;
  const ExprNode& y = *b.node_;
  if (x.kind != y.kind)
    return static_cast<int>(x.kind) < static_cast<int>(y.kind) ? -1 : 1;
  switch (x.kind) {
  case NodeKind::Number:
    if (x.value == y.value) return 0;
    return x.value < y.value ? -1 : 1;
  case NodeKind::Symbol:
    return x.name.compare(y.name) < 0 ? -1 : (x.name == y.name ? 0 : 1);
  case NodeKind::Opaque: {
    if (int c = x.name.compare(y.name)) return c < 0 ? -1 : 1;
    if (x.args != y.args) return x.args < y.args ? -1 : 1;
    if (x.deriv != y.deriv) return x.deriv < y.deriv ? -1 : 1;
    return 0;
  }
  case NodeKind::Call:
    if (x.fn != y.fn)
      return static_cast<int>(x.fn) < static_cast<int>(y.fn) ? -1 : 1;
    return compare(x.kids[0], y.kids[0]);
  case NodeKind::Power: {
    if (int c = compare(x.kids[0], y.kids[0])) return c;
    if (x.value == y.value) return 0;
    return x.value < y.value ? -1 : 1;
  }
  case NodeKind::Product:
  case NodeKind::Sum: {
    std::size_t m = std::min(x.kids.size(), y.kids.size());
    for (std::size_t i = 0; i < m; ++i)
      if (int c = compare(x.kids[i], y.kids[i])) return c;
    if (x.kids.size() != y.kids.size())
      return x.kids.size() < y.kids.size() ? -1 : 1;
    return 0;
  }
  }
  return 0;
}

namespace {

bool expr_less(const Expr& a, const Expr& b) { return Expr::compare(a, b) < 0; }

// Splits a canonical term into (rational coefficient, coefficient-free key).
std::pair<Rational, Expr> split_coefficient(const Expr& t) {
  const ExprNode& n = t.node();
  if (n.kind == NodeKind::Number) return {n.value, Expr::one()};
  if (n.kind == NodeKind::Product && n.kids[0].is_number()) {
    std::vector<Expr> rest(n.kids.begin() + 1, n.kids.end());
    return {n.kids[0].number_value(), ExprBuilder::raw_product(std::move(rest))};
  }
  return {Rational(1), t};
}

Expr with_coefficient(const Rational& c, const Expr& key) {
  if (c.is_zero()) return Expr::zero();
  if (key.is_literal_one()) return Expr::number(c);
  if (c.is_one()) return key;
  std::vector<Expr> kids;
  if (key.node().kind == NodeKind::Product) {
    kids.reserve(key.node().kids.size() + 1);
    kids.push_back(Expr::number(c));
    for (const auto& k : key.node().kids) kids.push_back(k);
  } else {
    kids = {Expr::number(c), key};
  }
  return ExprBuilder::raw_product(std::move(kids));
}

// Splits a canonical factor into (base, rational exponent).
std::pair<Expr, Rational> split_exponent(const Expr& f) {
  const ExprNode& n = f.node();
  if (n.kind == NodeKind::Power) return {n.kids[0], n.value};
  return {f, Rational(1)};
}

} // namespace

Expr Expr::sum(std::vector<Expr> terms) {
  // Flatten nested sums.
  std::vector<Expr> flat;
  flat.reserve(terms.size());
  for (auto& t : terms) {
    if (!t.valid()) throw ExprError("sum of an empty expression handle");
    if (t.node().kind == NodeKind::Sum)
      for (const auto& k : t.node().kids) flat.push_back(k);
    else
      flat.push_back(std::move(t));
  }
  // Collect like terms: decompose as coefficient * key, merge equal keys.
  Rational constant(0);
  std::vector<std::pair<Expr, Rational>> parts; // key -> coefficient
  for (const auto& t : flat) {
    if (t.is_literal_zero()) continue;
    auto [c, key] = split_coefficient(t);
    if (key.is_literal_one()) {
      constant = constant + c;
      continue;
    }
    parts.emplace_back(key, c);
  }
  std::sort(parts.begin(), parts.end(),
            [](const auto& a, const auto& b) { return expr_less(a.first, b.first); });
  std::vector<Expr> out;
  if (!constant.is_zero()) out.push_back(Expr::number(constant));
  for (std::size_t i = 0; i < parts.size();) {
    Rational c = parts[i].second;
    std::size_t j = i + 1;
    while (j < parts.size() && compare(parts[i].first, parts[j].first) == 0) {
      c = c + parts[j].second;
      ++j;
    }
    if (!c.is_zero()) out.push_back(with_coefficient(c, parts[i].first));
    i = j;
  }
  return ExprBuilder::raw_sum(std::move(out));
}

Expr Expr::product(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  flat.reserve(factors.size());
  for (auto& f : factors) {
    if (!f.valid()) throw ExprError("product of an empty expression handle");
    if (f.node().kind == NodeKind::Product)
      for (const auto& k : f.node().kids) flat.push_back(k);
    else
      flat.push_back(std::move(f));
  }
  Rational coeff(1);
  std::vector<std::pair<Expr, Rational>> parts; // base -> exponent
  for (const auto& f : flat) {
    if (f.is_number()) {
      coeff = coeff * f.number_value();
      if (coeff.is_zero()) return Expr::zero();
      continue;
    }
    auto [base, e] = split_exponent(f);
    parts.emplace_back(base, e);
  }
  std::sort(parts.begin(), parts.end(),
            [](const auto& a, const auto& b) { return expr_less(a.first, b.first); });
  std::vector<Expr> out;
  for (std::size_t i = 0; i < parts.size();) {
    Rational e = parts[i].second;
    std::size_t j = i + 1;
    while (j < parts.size() && compare(parts[i].first, parts[j].first) == 0) {
      e = e + parts[j].second;
      ++j;
    }
    if (!e.is_zero()) {
      Expr f = e.is_one() ? parts[i].first : pow(parts[i].first, e);
      // pow() may fold (e.g. rational base); reroute numbers into the coefficient.
      if (f.is_number())
        coeff = coeff * f.number_value();
      else
        out.push_back(std::move(f));
    }
    i = j;
  }
  if (coeff.is_zero()) return Expr::zero();
  std::sort(out.begin(), out.end(), expr_less);
  if (out.empty()) return Expr::number(coeff);
  if (!coeff.is_one()) {
    std::vector<Expr> kids;
    kids.reserve(out.size() + 1);
    kids.push_back(Expr::number(coeff));
    for (auto& f : out) kids.push_back(std::move(f));
    return ExprBuilder::raw_product(std::move(kids));
  }
  return ExprBuilder::raw_product(std::move(out));
}

Expr Expr::pow(const Expr& base, const Rational& exponent) {
  if (!base.valid()) throw ExprError("power of an empty expression handle");
  if (exponent.is_zero()) return Expr::one();
  if (exponent.is_one()) return base;
  const ExprNode& b = base.node();
  if (b.kind == NodeKind::Number) {
    if (b.value.is_zero()) {
      if (exponent < Rational(0))
        throw ExprError("zero raised to a negative power");
      return Expr::zero();
    }
    if (exponent.is_integer())
      return Expr::number(b.value.pow_int(exponent.num()));
    // Non-integer exponent of a rational stays symbolic.
  }
  if (b.kind == NodeKind::Power && exponent.is_integer())
    return pow(b.kids[0], b.value * exponent);
  if (b.kind == NodeKind::Product && exponent.is_integer()) {
    std::vector<Expr> kids;
    kids.reserve(b.kids.size());
    for (const auto& k : b.kids) kids.push_back(pow(k, exponent));
    return product(std::move(kids));
  }
  return ExprBuilder::raw_power(base, exponent);
}

Expr Expr::call(CallKind fn, const Expr& arg) {
  if (!arg.valid()) throw ExprError("call on an empty expression handle");
  if (arg.is_number()) {
    const Rational v = arg.number_value();
    switch (fn) {
    case CallKind::Sin:
      if (v.is_zero()) return Expr::zero();
      break;
    case CallKind::Cos:
      if (v.is_zero()) return Expr::one();
      break;
    case CallKind::Exp:
      if (v.is_zero()) return Expr::one();
      break;
    case CallKind::Log:
      if (v.is_one()) return Expr::zero();
      break;
    case CallKind::Abs:
      return Expr::number(v < Rational(0) ? -v : v);
    case CallKind::Sign:
      if (v.is_zero()) return Expr::zero();
      return Expr::number(v < Rational(0) ? -1 : 1);
    }
  }
  if (fn == CallKind::Abs && arg.node().kind == NodeKind::Call &&
      arg.node().fn == CallKind::Abs)
    return arg;
  ExprNode n;
  n.kind = NodeKind::Call;
  n.fn = fn;
  n.kids = {arg};
  return ExprBuilder::wrap(std::move(n));
}

namespace {

Expr diff_impl(const Expr& e, const std::string& coord,
               std::unordered_map<const ExprNode*, Expr>& memo) {
  auto it = memo.find(&e.node());
  if (it != memo.end()) return it->second;
  const ExprNode& n = e.node();
  Expr result;
  switch (n.kind) {
  case NodeKind::Number:
    result = Expr::zero();
    break;
  case NodeKind::Symbol:
    result = (n.name == coord) ? Expr::one() : Expr::zero();
    break;
  case NodeKind::Opaque: {
    auto pos = std::find(n.args.begin(), n.args.end(), coord);
    if (pos == n.args.end()) {
      result = Expr::zero();
    } else {
      std::vector<int> d = n.deriv;
      d[static_cast<std::size_t>(pos - n.args.begin())] += 1;
      result = Expr::opaque(n.name, n.args, std::move(d));
    }
    break;
  }
  case NodeKind::Sum: {
    std::vector<Expr> terms;
    terms.reserve(n.kids.size());
    for (const auto& k : n.kids) terms.push_back(diff_impl(k, coord, memo));
    result = Expr::sum(std::move(terms));
    break;
  }
  case NodeKind::Product: {
    std::vector<Expr> terms;
    terms.reserve(n.kids.size());
    for (std::size_t i = 0; i < n.kids.size(); ++i) {
      Expr d = diff_impl(n.kids[i], coord, memo);
      if (d.is_literal_zero()) continue;
      std::vector<Expr> factors;
      factors.reserve(n.kids.size());
      for (std::size_t j = 0; j < n.kids.size(); ++j)
        factors.push_back(i == j ? d : n.kids[j]);
      terms.push_back(Expr::product(std::move(factors)));
    }
    result = Expr::sum(std::move(terms));
    break;
  }
  case NodeKind::Power: {
    Expr d = diff_impl(n.kids[0], coord, memo);
    if (d.is_literal_zero()) {
      result = Expr::zero();
    } else {
      result = Expr::product({Expr::number(n.value),
                              Expr::pow(n.kids[0], n.value - Rational(1)), d});
    }
    break;
  }
  case NodeKind::Call: {
    Expr d = diff_impl(n.kids[0], coord, memo);
    if (d.is_literal_zero()) {
      result = Expr::zero();
      break;
    }
    const Expr& a = n.kids[0];
    switch (n.fn) {
    case CallKind::Sin:
      result = cos(a) * d;
      break;
    case CallKind::Cos:
      result = -(sin(a) * d);
      break;
    case CallKind::Exp:
      result = exp(a) * d;
      break;
    case CallKind::Log:
      result = d * Expr::pow(a, Rational(-1));
      break;
    case CallKind::Abs:
      result = sign(a) * d;
      break;
    case CallKind::Sign:
      // Away from sign changes (which sampling boxes must avoid) the
      // derivative vanishes.
      result = Expr::zero();
      break;
    }
    break;
  }
  }
  memo.emplace(&e.node(), result);
  return result;
}

} // namespace

Expr differentiate(const Expr& e, const std::string& coord) {
  std::unordered_map<const ExprNode*, Expr> memo;
  return diff_impl(e, coord, memo);
}

Expr canonicalize(const Expr& e) {
  const ExprNode& n = e.node();
  switch (n.kind) {
  case NodeKind::Number:
  case NodeKind::Symbol:
  case NodeKind::Opaque:
    return e;
  case NodeKind::Call:
    return Expr::call(n.fn, canonicalize(n.kids[0]));
  case NodeKind::Power:
    return Expr::pow(canonicalize(n.kids[0]), n.value);
  case NodeKind::Product: {
    std::vector<Expr> kids;
    kids.reserve(n.kids.size());
    for (const auto& k : n.kids) kids.push_back(canonicalize(k));
    return Expr::product(std::move(kids));
  }
  case NodeKind::Sum: {
    std::vector<Expr> kids;
    kids.reserve(n.kids.size());
    for (const auto& k : n.kids) kids.push_back(canonicalize(k));
    return Expr::sum(std::move(kids));
  }
  }
  return e;
}

std::string call_name(CallKind fn) {
  switch (fn) {
  case CallKind::Sin: return "sin";
  case CallKind::Cos: return "cos";
  case CallKind::Exp: return "exp";
  case CallKind::Log: return "log";
  case CallKind::Abs: return "abs";
  case CallKind::Sign: return "sign";
  }
  return "?";
}

namespace {

// Printing precedence levels: sum < product < power < atom.
enum Prec { PrecSum = 0, PrecProduct = 1, PrecPower = 2, PrecAtom = 3 };

void print(std::ostream& os, const Expr& e, int parent_prec);

void print_product(std::ostream& os, const ExprNode& n, int parent_prec) {
  // A leading -1 coefficient prints as unary minus.
  std::size_t start = 0;
  bool neg = false;
  Rational coeff(1);
  if (n.kids[0].is_number()) {
    coeff = n.kids[0].number_value();
    start = 1;
    if (coeff < Rational(0)) {
      neg = true;
      coeff = -coeff;
    }
  }
  const bool parens = parent_prec > PrecProduct || (neg && parent_prec == PrecProduct);
  if (parens) os << "(";
  if (neg) os << "-";
  bool first = true;
  if (!coeff.is_one() || start == 0) {
    os << coeff.str();
    first = false;
  }
  for (std::size_t i = start; i < n.kids.size(); ++i) {
    if (!first) os << "*";
    print(os, n.kids[i], PrecProduct + 1);
    first = false;
  }
  if (parens) os << ")";
}

void print(std::ostream& os, const Expr& e, int parent_prec) {
  const ExprNode& n = e.node();
  switch (n.kind) {
  case NodeKind::Number: {
    const bool parens =
        (n.value < Rational(0) || !n.value.is_integer()) && parent_prec >= PrecProduct;
    if (parens) os << "(";
    os << n.value.str();
    if (parens) os << ")";
    break;
  }
  case NodeKind::Symbol:
    os << n.name;
    break;
  case NodeKind::Opaque: {
    bool derived = false;
    for (int d : n.deriv)
      if (d != 0) derived = true;
    if (!derived) {
      os << n.name;
    } else {
      os << "D(" << n.name;
      for (std::size_t i = 0; i < n.args.size(); ++i)
        for (int k = 0; k < n.deriv[i]; ++k) os << ", " << n.args[i];
      os << ")";
    }
    break;
  }
  case NodeKind::Call:
    os << call_name(n.fn) << "(";
    print(os, n.kids[0], PrecSum);
    os << ")";
    break;
  case NodeKind::Power: {
    if (parent_prec > PrecPower) os << "(";
    print(os, n.kids[0], PrecPower + 1);
    os << "^";
    if (n.value.is_integer() && !(n.value < Rational(0))) {
      os << n.value.str();
    } else {
      os << "(" << n.value.str() << ")";
    }
    if (parent_prec > PrecPower) os << ")";
    break;
  }
  case NodeKind::Product:
    print_product(os, n, parent_prec);
    break;
  case NodeKind::Sum: {
    if (parent_prec > PrecSum) os << "(";
    bool first = true;
    for (const auto& t : n.kids) {
      auto [c, key] = split_coefficient(t);
      if (!first && c < Rational(0)) {
        os << " - ";
        print(os, with_coefficient(-c, key), PrecSum + 1);
      } else {
        if (!first) os << " + ";
        print(os, t, PrecSum + 1);
      }
      first = false;
    }
    if (parent_prec > PrecSum) os << ")";
    break;
  }
  }
}

} // namespace

std::string Expr::str() const {
  if (!node_) return "<empty>";
  std::ostringstream os;
  print(os, *this, PrecSum);
  return os.str();
}

} // namespace bicon
