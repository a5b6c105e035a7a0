#include "bicon/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "bicon/errors.hpp"

namespace bicon {

namespace {

std::size_t power_size(int n, int rank) {
  std::size_t s = 1;
  for (int i = 0; i < rank; ++i) s *= static_cast<std::size_t>(n);
  return s;
}

void check_same_shape(const TensorField& a, const TensorField& b) {
  if (a.chart() != b.chart())
    throw Error("tensor operands live on different charts");
  if (a.signature() != b.signature())
    throw SlotVarianceMismatch("tensor operands have different signatures");
}

} // namespace

TensorField::TensorField(ChartPtr chart, std::vector<Slot> signature)
    : chart_(std::move(chart)), sig_(std::move(signature)) {
  comp_.assign(power_size(chart_->dim(), rank()), Expr::zero());
}

TensorField TensorField::scalar(ChartPtr chart, const Expr& e) {
  TensorField t(std::move(chart), {});
  t.comp_[0] = e;
  return t;
}

TensorField TensorField::delta(ChartPtr chart) {
  TensorField t(std::move(chart), {Slot::Up, Slot::Down});
  const int n = t.dim();
  for (int i = 0; i < n; ++i) t.at({i, i}) = Expr::one();
  return t;
}

std::size_t TensorField::flat(std::span<const int> idx) const {
  if (idx.size() != sig_.size())
    throw Error("tensor index rank mismatch");
  std::size_t f = 0;
  const int n = dim();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= n) throw Error("tensor index out of range");
    f = f * static_cast<std::size_t>(n) + static_cast<std::size_t>(idx[i]);
  }
  return f;
}

Expr& TensorField::at(std::span<const int> idx) { return comp_[flat(idx)]; }
const Expr& TensorField::at(std::span<const int> idx) const {
  return comp_[flat(idx)];
}

void TensorField::for_each(
    const std::function<void(std::span<const int>)>& fn) const {
  const int n = dim();
  const int r = rank();
  std::vector<int> idx(static_cast<std::size_t>(r), 0);
  if (r == 0) {
    fn(idx);
    return;
  }
  while (true) {
    fn(idx);
    int k = r - 1;
    while (k >= 0) {
      if (++idx[static_cast<std::size_t>(k)] < n) break;
      idx[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
}

bool TensorField::literal_zero() const {
  return std::all_of(comp_.begin(), comp_.end(),
                     [](const Expr& e) { return e.is_literal_zero(); });
}

TensorField TensorField::map(const std::function<Expr(const Expr&)>& fn) const {
  TensorField out(chart_, sig_);
  for (std::size_t i = 0; i < comp_.size(); ++i) out.comp_[i] = fn(comp_[i]);
  return out;
}

TensorField operator+(const TensorField& a, const TensorField& b) {
  check_same_shape(a, b);
  TensorField out(a.chart(), a.signature());
  for (std::size_t i = 0; i < out.components().size(); ++i)
    out.components()[i] = a.components()[i] + b.components()[i];
  return out;
}

TensorField operator-(const TensorField& a, const TensorField& b) {
  check_same_shape(a, b);
  TensorField out(a.chart(), a.signature());
  for (std::size_t i = 0; i < out.components().size(); ++i)
    out.components()[i] = a.components()[i] - b.components()[i];
  return out;
}

TensorField operator-(const TensorField& a) {
  return a.map([](const Expr& e) { return -e; });
}

TensorField operator*(const Expr& s, const TensorField& t) {
  return t.map([&](const Expr& e) { return s * e; });
}

TensorField outer(const TensorField& a, const TensorField& b) {
  if (a.chart() != b.chart())
    throw Error("tensor operands live on different charts");
  std::vector<Slot> sig = a.signature();
  sig.insert(sig.end(), b.signature().begin(), b.signature().end());
  TensorField out(a.chart(), std::move(sig));
  const int ra = a.rank();
  const int r = out.rank();
  out.for_each([&](std::span<const int> idx) {
    std::vector<int> ia(idx.begin(), idx.begin() + ra);
    std::vector<int> ib(idx.begin() + ra, idx.begin() + r);
    out.at(idx) = a.at(ia) * b.at(ib);
  });
  return out;
}

TensorField contract(const TensorField& t, int slot_a, int slot_b) {
  const int r = t.rank();
  if (slot_a == slot_b || slot_a < 0 || slot_b < 0 || slot_a >= r || slot_b >= r)
    throw Error("invalid contraction slots");
  if (t.signature()[static_cast<std::size_t>(slot_a)] ==
      t.signature()[static_cast<std::size_t>(slot_b)])
    throw SlotVarianceMismatch(
        "contraction must pair one Up slot with one Down slot");
  std::vector<Slot> sig;
  for (int i = 0; i < r; ++i)
    if (i != slot_a && i != slot_b)
      sig.push_back(t.signature()[static_cast<std::size_t>(i)]);
  TensorField out(t.chart(), sig);
  const int n = t.dim();
  out.for_each([&](std::span<const int> oidx) {
    std::vector<Expr> terms;
    terms.reserve(static_cast<std::size_t>(n));
    std::vector<int> idx(static_cast<std::size_t>(r));
    for (int c = 0; c < n; ++c) {
      int k = 0;
      for (int i = 0; i < r; ++i) {
        if (i == slot_a || i == slot_b)
          idx[static_cast<std::size_t>(i)] = c;
        else
          idx[static_cast<std::size_t>(i)] = oidx[static_cast<std::size_t>(k++)];
      }
      terms.push_back(t.at(idx));
    }
    out.at(oidx) = Expr::sum(std::move(terms));
  });
  return out;
}

TensorField tensordot(const TensorField& a, const TensorField& b,
                      const std::vector<std::pair<int, int>>& pairs) {
  if (a.chart() != b.chart())
    throw Error("tensor operands live on different charts");
  const int ra = a.rank();
  const int rb = b.rank();
  std::vector<bool> used_a(static_cast<std::size_t>(ra), false);
  std::vector<bool> used_b(static_cast<std::size_t>(rb), false);
  for (auto [sa, sb] : pairs) {
    if (sa < 0 || sa >= ra || sb < 0 || sb >= rb)
      throw Error("tensordot slot out of range");
    if (used_a[static_cast<std::size_t>(sa)] || used_b[static_cast<std::size_t>(sb)])
      throw Error("tensordot slot used twice");
    used_a[static_cast<std::size_t>(sa)] = true;
    used_b[static_cast<std::size_t>(sb)] = true;
    if (a.signature()[static_cast<std::size_t>(sa)] ==
        b.signature()[static_cast<std::size_t>(sb)])
      throw SlotVarianceMismatch(
          "tensordot must pair one Up slot with one Down slot");
  }
  std::vector<Slot> sig;
  std::vector<int> free_a, free_b;
  for (int i = 0; i < ra; ++i)
    if (!used_a[static_cast<std::size_t>(i)]) {
      sig.push_back(a.signature()[static_cast<std::size_t>(i)]);
      free_a.push_back(i);
    }
  for (int i = 0; i < rb; ++i)
    if (!used_b[static_cast<std::size_t>(i)]) {
      sig.push_back(b.signature()[static_cast<std::size_t>(i)]);
      free_b.push_back(i);
    }
  TensorField out(a.chart(), sig);
  const int n = a.dim();
  const int m = static_cast<int>(pairs.size());
  out.for_each([&](std::span<const int> oidx) {
    std::vector<int> ia(static_cast<std::size_t>(ra));
    std::vector<int> ib(static_cast<std::size_t>(rb));
    for (std::size_t i = 0; i < free_a.size(); ++i)
      ia[static_cast<std::size_t>(free_a[i])] = oidx[i];
    for (std::size_t i = 0; i < free_b.size(); ++i)
      ib[static_cast<std::size_t>(free_b[i])] = oidx[free_a.size() + i];
    std::vector<Expr> terms;
    std::vector<int> c(static_cast<std::size_t>(m), 0);
    while (true) {
      for (int i = 0; i < m; ++i) {
        ia[static_cast<std::size_t>(pairs[static_cast<std::size_t>(i)].first)] =
            c[static_cast<std::size_t>(i)];
        ib[static_cast<std::size_t>(pairs[static_cast<std::size_t>(i)].second)] =
            c[static_cast<std::size_t>(i)];
      }
      terms.push_back(a.at(ia) * b.at(ib));
      int k = m - 1;
      while (k >= 0) {
        if (++c[static_cast<std::size_t>(k)] < n) break;
        c[static_cast<std::size_t>(k)] = 0;
        --k;
      }
      if (k < 0) break;
    }
    out.at(oidx) = Expr::sum(std::move(terms));
  });
  return out;
}

TensorField partial_derivative(const TensorField& t) {
  std::vector<Slot> sig;
  sig.push_back(Slot::Down);
  sig.insert(sig.end(), t.signature().begin(), t.signature().end());
  TensorField out(t.chart(), sig);
  out.for_each([&](std::span<const int> idx) {
    const std::string& coord = t.chart()->coord(idx[0]);
    std::vector<int> rest(idx.begin() + 1, idx.end());
    out.at(idx) = differentiate(t.at(rest), coord);
  });
  return out;
}

TensorField move_slot(const TensorField& t, int from, int to) {
  const int r = t.rank();
  if (from < 0 || from >= r || to < 0 || to >= r)
    throw Error("move_slot out of range");
  if (from == to) return t;
  std::vector<int> perm; // out slot i comes from t slot perm[i]
  for (int i = 0; i < r; ++i)
    if (i != from) perm.push_back(i);
  perm.insert(perm.begin() + to, from);
  std::vector<Slot> sig;
  for (int i = 0; i < r; ++i)
    sig.push_back(t.signature()[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
  TensorField out(t.chart(), sig);
  out.for_each([&](std::span<const int> oidx) {
    std::vector<int> idx(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i)
      idx[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
          oidx[static_cast<std::size_t>(i)];
    out.at(idx) = t.at(oidx);
  });
  return out;
}

ZeroVerdict test_zero(ZeroTester& tester, const TensorField& t) {
  ZeroVerdict out{Verdict::ProvablyZero};
  bool all_provable = true;
  ZeroVerdict bad;
  bool found_bad = false;
  t.for_each([&](std::span<const int> idx) {
    if (found_bad) return;
    ZeroVerdict v = tester.test(t.at(idx));
    if (v.kind == Verdict::NonZero) {
      bad = v;
      bad.component.assign(idx.begin(), idx.end());
      found_bad = true;
    } else if (v.kind == Verdict::ProbablyZero) {
      all_provable = false;
    }
  });
  if (found_bad) return bad;
  out.kind = all_provable ? Verdict::ProvablyZero : Verdict::ProbablyZero;
  return out;
}

double max_abs(Evaluator& ev, const TensorField& t) {
  double m = 0.0;
  t.for_each([&](std::span<const int> idx) {
    m = std::max(m, std::abs(ev.value(t.at(idx))));
  });
  return m;
}

} // namespace bicon
