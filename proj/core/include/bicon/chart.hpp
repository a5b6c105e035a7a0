#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bicon/errors.hpp"
#include "bicon/expr.hpp"

namespace bicon {

/// A coordinate chart: ordered coordinate names plus a sampling box used by
/// probabilistic zero tests.
class Chart {
public:
  Chart(std::vector<std::string> coords,
        std::vector<std::pair<double, double>> box)
      : coords_(std::move(coords)), box_(std::move(box)) {
    if (coords_.size() < 2) throw Error("chart dimension must be at least 2");
    if (box_.size() != coords_.size())
      throw Error("chart needs one sampling interval per coordinate");
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      for (std::size_t j = i + 1; j < coords_.size(); ++j)
        if (coords_[i] == coords_[j])
          throw Error("duplicate coordinate name: " + coords_[i]);
      if (!(box_[i].first < box_[i].second))
        throw Error("degenerate sampling interval for " + coords_[i]);
    }
  }

  int dim() const { return static_cast<int>(coords_.size()); }
  const std::vector<std::string>& coords() const { return coords_; }
  const std::string& coord(int i) const { return coords_[static_cast<std::size_t>(i)]; }
  const std::vector<std::pair<double, double>>& box() const { return box_; }

  int index_of(const std::string& name) const {
    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (coords_[i] == name) return static_cast<int>(i);
    throw Error("unknown coordinate: " + name);
  }
  bool has_coord(const std::string& name) const {
    for (const auto& c : coords_)
      if (c == name) return true;
    return false;
  }

  Expr coord_expr(int i) const { return Expr::symbol(coord(i)); }

  bool contains(const std::vector<double>& point, double slack = 1e-9) const {
    if (point.size() != coords_.size()) return false;
    for (std::size_t i = 0; i < point.size(); ++i)
      if (point[i] < box_[i].first - slack || point[i] > box_[i].second + slack)
        return false;
    return true;
  }

private:
  std::vector<std::string> coords_;
  std::vector<std::pair<double, double>> box_;
};

using ChartPtr = std::shared_ptr<const Chart>;

inline ChartPtr make_chart(std::vector<std::string> coords,
                           std::vector<std::pair<double, double>> box) {
  return std::make_shared<const Chart>(std::move(coords), std::move(box));
}

inline ChartPtr make_chart(std::vector<std::string> coords, double lo = 0.25,
                           double hi = 1.25) {
  std::vector<std::pair<double, double>> box(coords.size(), {lo, hi});
  return std::make_shared<const Chart>(std::move(coords), std::move(box));
}

} // namespace bicon
