#include "bicon/connection.hpp"

#include "bicon/errors.hpp"

namespace bicon {

TensorField covariant_derivative(const ConnectionCoefficients& conn,
                                 const TensorField& t) {
  TensorField out = partial_derivative(t);
  const int n = t.dim();
  const int r = t.rank();
  out.for_each([&](std::span<const int> idx) {
    const int a = idx[0];
    std::vector<int> tidx(idx.begin() + 1, idx.end());
    std::vector<Expr> terms;
    terms.push_back(out.at(idx));
    for (int s = 0; s < r; ++s) {
      const bool up = t.signature()[static_cast<std::size_t>(s)] == Slot::Up;
      const int held = tidx[static_cast<std::size_t>(s)];
      for (int c = 0; c < n; ++c) {
        std::vector<int> q = tidx;
        q[static_cast<std::size_t>(s)] = c;
        const Expr& comp = t.at(q);
        if (comp.is_literal_zero()) continue;
        if (up)
          terms.push_back(conn.at(held, a, c) * comp);
        else
          terms.push_back(-(conn.at(c, a, held) * comp));
      }
    }
    out.at(idx) = Expr::sum(std::move(terms));
  });
  return out;
}

namespace {

void check_vector(const TensorField& xi) {
  if (xi.rank() != 1 || xi.signature()[0] != Slot::Up)
    throw SlotVarianceMismatch("lie derivative needs a rank-1 Up field");
}

} // namespace

TensorField lie_derivative(const TensorField& xi, const TensorField& t,
                           const ConnectionCoefficients* conn) {
  check_vector(xi);
  const int n = t.dim();
  const int r = t.rank();
  // D t and D xi with either the covariant or the coordinate derivative.
  TensorField dt = conn ? covariant_derivative(*conn, t) : partial_derivative(t);
  TensorField dxi =
      conn ? covariant_derivative(*conn, xi) : partial_derivative(xi); // (Down, Up)
  TensorField out(t.chart(), t.signature());
  out.for_each([&](std::span<const int> idx) {
    std::vector<Expr> terms;
    // ξ^c D_c t
    for (int c = 0; c < n; ++c) {
      std::vector<int> di;
      di.push_back(c);
      di.insert(di.end(), idx.begin(), idx.end());
      terms.push_back(xi.at({c}) * dt.at(di));
    }
    for (int s = 0; s < r; ++s) {
      const bool up = t.signature()[static_cast<std::size_t>(s)] == Slot::Up;
      for (int c = 0; c < n; ++c) {
        std::vector<int> q(idx.begin(), idx.end());
        const int held = q[static_cast<std::size_t>(s)];
        q[static_cast<std::size_t>(s)] = c;
        const Expr& comp = t.at(q);
        if (comp.is_literal_zero()) continue;
        if (up)
          terms.push_back(-(dxi.at({c, held}) * comp)); // − t^..c.. D_c ξ^a
        else
          terms.push_back(dxi.at({held, c}) * comp); // + t_..c.. D_a ξ^c
      }
    }
    out.at(idx) = Expr::sum(std::move(terms));
  });
  return out;
}

TensorField lie_derivative_connection(const TensorField& xi,
                                      const ConnectionCoefficients& conn) {
  check_vector(xi);
  const int n = xi.dim();
  const ChartPtr& chart = xi.chart();
  TensorField dxi = partial_derivative(xi);           // (Down, Up): ∂_b ξ^a
  TensorField ddxi = partial_derivative(dxi);         // (Down, Down, Up): ∂_b ∂_c ξ^a
  TensorField dC = partial_derivative(conn.coeffs);   // ∂_d C^a_{bc}
  TensorField out(chart, {Slot::Up, Slot::Down, Slot::Down});
  out.for_each([&](std::span<const int> idx) {
    const int a = idx[0], b = idx[1], c = idx[2];
    std::vector<Expr> terms;
    for (int d = 0; d < n; ++d) {
      terms.push_back(xi.at({d}) * dC.at({d, a, b, c}));
      terms.push_back(-(conn.at(d, b, c) * dxi.at({d, a})));
      terms.push_back(conn.at(a, d, c) * dxi.at({b, d}));
      terms.push_back(conn.at(a, b, d) * dxi.at({c, d}));
    }
    terms.push_back(ddxi.at({b, c, a}));
    out.at(idx) = Expr::sum(std::move(terms));
  });
  return out;
}

TensorField riemann_of_connection(const ConnectionCoefficients& conn) {
  const ChartPtr& chart = conn.chart();
  const int n = chart->dim();
  TensorField dC = partial_derivative(conn.coeffs); // ∂_x C^a_{bc}
  TensorField out(chart,
                  {Slot::Up, Slot::Down, Slot::Down, Slot::Down});
  out.for_each([&](std::span<const int> idx) {
    const int a = idx[0], b = idx[1], c = idx[2], d = idx[3];
    std::vector<Expr> terms;
    terms.push_back(dC.at({c, a, d, b}));
    terms.push_back(-dC.at({d, a, c, b}));
    for (int r = 0; r < n; ++r) {
      terms.push_back(conn.at(a, r, c) * conn.at(r, d, b));
      terms.push_back(-(conn.at(a, r, d) * conn.at(r, c, b)));
    }
    out.at(idx) = Expr::sum(std::move(terms));
  });
  return out;
}

} // namespace bicon
