#include "bicon/eval.hpp"

#include <algorithm>
#include <cmath>

#include "bicon/errors.hpp"

namespace bicon {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double u64_to_unit(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

} // namespace

std::uint64_t Rng::next_u64() {
  state_ = splitmix64(state_ ^ 0x6a09e667f3bcc909ULL);
  return splitmix64(state_);
}

double Rng::next_double() { return u64_to_unit(next_u64()); }

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

long long Rng::uniform_int(long long lo, long long hi) {
  return lo + static_cast<long long>(next_u64() %
                                     static_cast<std::uint64_t>(hi - lo + 1));
}

std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b));
}

std::uint64_t hash_key(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void EvalContext::validate() const {
  if (!chart) throw Error("evaluation context has no chart");
  if (!(tol > 0)) throw Error("zero-test tolerance must be positive");
  if (samples < 1) throw Error("sample count must be at least 1");
}

Evaluator::Evaluator(const EvalContext& ctx, std::vector<double> point,
                     std::uint64_t salt)
    : ctx_(ctx), point_(std::move(point)), salt_(salt) {
  if (ctx_.chart && point_.size() != static_cast<std::size_t>(ctx_.chart->dim()))
    throw EvaluationError("point dimension does not match chart");
}

double Evaluator::value(const Expr& e) { return eval(e).value; }

double Evaluator::scale(const Expr& e) { return eval(e).submax; }

Evaluator::Entry Evaluator::eval(const Expr& e) {
  if (!e.valid()) throw EvaluationError("evaluating an empty expression");
  auto it = memo_.find(e.ptr());
  if (it != memo_.end()) return it->second;

  const ExprNode& n = e.node();
  double v = 0.0;
  double submax = 0.0;
  switch (n.kind) {
  case NodeKind::Number:
    v = n.value.to_double();
    break;
  case NodeKind::Symbol: {
    if (ctx_.chart && ctx_.chart->has_coord(n.name)) {
      v = point_[static_cast<std::size_t>(ctx_.chart->index_of(n.name))];
    } else {
      auto p = ctx_.params.find(n.name);
      if (p == ctx_.params.end())
        throw EvaluationError("unbound symbol: " + n.name);
      v = p->second;
    }
    break;
  }
  case NodeKind::Opaque: {
    if (auto f = ctx_.opaque_exprs.find(n.name); f != ctx_.opaque_exprs.end()) {
      // Differentiate the bound formula per the multi-index (memoized), then
      // evaluate it at this point.
      auto key = std::make_pair(n.name, n.deriv);
      auto& cache = *ctx_.deriv_cache;
      auto cit = cache.find(key);
      if (cit == cache.end()) {
        Expr d = f->second;
        for (std::size_t i = 0; i < n.args.size(); ++i)
          for (int k = 0; k < n.deriv[i]; ++k) d = differentiate(d, n.args[i]);
        cit = cache.emplace(key, std::move(d)).first;
      }
      Entry sub = eval(cit->second);
      v = sub.value;
      submax = sub.submax;
    } else if (auto g = ctx_.opaque_fns.find(n.name); g != ctx_.opaque_fns.end()) {
      std::vector<double> argvals;
      argvals.reserve(n.args.size());
      for (const auto& a : n.args)
        argvals.push_back(
            point_[static_cast<std::size_t>(ctx_.chart->index_of(a))]);
      v = g->second(n.deriv, argvals);
    } else if (ctx_.sample_unbound_opaques) {
      // Independent deterministic jet value per (name, multi-index, point).
      std::uint64_t k = mix_key(ctx_.seed, salt_);
      k = mix_key(k, hash_key(n.name));
      for (int d : n.deriv) k = mix_key(k, static_cast<std::uint64_t>(d) + 3);
      const double u = u64_to_unit(splitmix64(k));
      const double mag = ctx_.jet_lo + (ctx_.jet_hi - ctx_.jet_lo) * u;
      v = (splitmix64(k ^ 0xabcdef12345ULL) & 1) ? mag : -mag;
    } else {
      throw EvaluationError("unbound opaque function: " + n.name);
    }
    break;
  }
  case NodeKind::Sum: {
    for (const auto& k : n.kids) {
      Entry s = eval(k);
      v += s.value;
      submax = std::max(submax, s.submax);
    }
    break;
  }
  case NodeKind::Product: {
    v = 1.0;
    for (const auto& k : n.kids) {
      Entry s = eval(k);
      v *= s.value;
      submax = std::max(submax, s.submax);
    }
    break;
  }
  case NodeKind::Power: {
    Entry b = eval(n.kids[0]);
    submax = b.submax;
    if (n.value.is_integer()) {
      long long k = n.value.num();
      if (b.value == 0.0 && k < 0)
        throw EvaluationError("division by zero");
      v = std::pow(b.value, static_cast<double>(k));
    } else {
      if (b.value < 0.0)
        throw EvaluationError("fractional power of a negative value");
      if (b.value == 0.0 && n.value < Rational(0))
        throw EvaluationError("division by zero");
      v = std::pow(b.value, n.value.to_double());
    }
    break;
  }
  case NodeKind::Call: {
    Entry a = eval(n.kids[0]);
    submax = a.submax;
    switch (n.fn) {
    case CallKind::Sin: v = std::sin(a.value); break;
    case CallKind::Cos: v = std::cos(a.value); break;
    case CallKind::Exp: v = std::exp(a.value); break;
    case CallKind::Log:
      if (a.value <= 0.0)
        throw EvaluationError("log of a non-positive value");
      v = std::log(a.value);
      break;
    case CallKind::Abs: v = std::abs(a.value); break;
    case CallKind::Sign: v = (a.value > 0) - (a.value < 0); break;
    }
    break;
  }
  }
  if (!std::isfinite(v)) throw EvaluationError("non-finite value");
  Entry entry{v, std::max(submax, std::abs(v))};
  memo_.emplace(e.ptr(), entry);
  return entry;
}

double eval(const Expr& e, const EvalContext& ctx,
            const std::vector<double>& point) {
  ctx.validate();
  Evaluator ev(ctx, point);
  return ev.value(e);
}

std::string verdict_name(Verdict v) {
  switch (v) {
  case Verdict::ProvablyZero: return "ProvablyZero";
  case Verdict::ProbablyZero: return "ProbablyZero";
  case Verdict::NonZero: return "NonZero";
  }
  return "?";
}

ZeroTester::ZeroTester(EvalContext ctx, bool jets_for_unbound)
    : ctx_(std::move(ctx)) {
  ctx_.validate();
  if (jets_for_unbound) ctx_.sample_unbound_opaques = true;
}

std::vector<double> ZeroTester::draw_point(std::uint64_t stream) {
  const auto& box = ctx_.chart->box();
  std::vector<double> p(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) {
    std::uint64_t k = mix_key(ctx_.seed ^ 0x5eedULL, stream);
    k = mix_key(k, i + 1);
    p[i] = box[i].first + (box[i].second - box[i].first) * u64_to_unit(k);
  }
  return p;
}

Evaluator& ZeroTester::evaluator(int k) {
  while (evals_.size() <= static_cast<std::size_t>(k)) {
    std::uint64_t stream = next_stream_++;
    evals_.push_back(
        std::make_unique<Evaluator>(ctx_, draw_point(stream), stream));
  }
  return *evals_[static_cast<std::size_t>(k)];
}

ZeroVerdict ZeroTester::test(const Expr& e) {
  if (e.is_literal_zero()) return ZeroVerdict{Verdict::ProvablyZero};
  const int K = ctx_.samples;
  const int max_attempts = K * std::max(2, ctx_.max_resample);
  int successes = 0;
  ZeroVerdict out{Verdict::ProbablyZero};
  // First pass over the shared evaluators; on a singular point, fall back to
  // private fresh points for this expression only.
  std::vector<std::unique_ptr<Evaluator>> privates;
  for (int attempt = 0; attempt < max_attempts && successes < K; ++attempt) {
    Evaluator* ev = nullptr;
    try {
      if (attempt < K) {
        ev = &evaluator(attempt);
      } else {
        std::uint64_t stream =
            mix_key(ctx_.seed ^ 0x9997ULL, e.hash() + static_cast<std::uint64_t>(attempt));
        privates.push_back(
            std::make_unique<Evaluator>(ctx_, draw_point(stream), stream));
        ev = privates.back().get();
      }
      const double v = ev->value(e);
      const double sc = ev->scale(e);
      const double threshold = ctx_.tol * (1.0 + sc);
      ++successes;
      if (std::abs(v) > threshold) {
        out.kind = Verdict::NonZero;
        out.witness = ev->point();
        out.value = std::abs(v);
        out.threshold = threshold;
        return out;
      }
    } catch (const EvaluationError&) {
      continue; // singular point; resample
    }
  }
  if (successes < K)
    throw EvaluationError(
        "zero test could not draw enough regular sample points");
  return out;
}

ZeroVerdict is_zero(const Expr& e, const EvalContext& ctx) {
  ZeroTester tester(ctx, ctx.sample_unbound_opaques);
  return tester.test(e);
}

Expr random_polynomial(const std::vector<std::string>& symbols, int deg,
                       Rng& rng, int terms) {
  std::vector<Expr> sum_terms;
  for (int t = 0; t < terms; ++t) {
    std::vector<Expr> factors;
    factors.push_back(Expr::number(
        Rational(rng.uniform_int(-4, 4), rng.uniform_int(1, 3))));
    int remaining = deg;
    for (const auto& s : symbols) {
      if (remaining <= 0) break;
      int k = static_cast<int>(rng.uniform_int(0, remaining));
      if (k > 0) factors.push_back(pow(Expr::symbol(s), k));
      remaining -= k;
    }
    sum_terms.push_back(Expr::product(std::move(factors)));
  }
  sum_terms.push_back(Expr::number(Rational(rng.uniform_int(-3, 3))));
  return Expr::sum(std::move(sum_terms));
}

} // namespace bicon
