#include "grid.hpp"

#include <cmath>

#include "errors.hpp"

namespace vaxeq {

TimeGrid::TimeGrid(double T, int nodes) : horizon(T), n_nodes(nodes) {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("grid horizon must be positive and finite");
  if (nodes < 2) throw DomainError("grid needs at least 2 nodes");
}

double TimeGrid::node(int n) const {
  if (n < 0 || n >= n_nodes) throw DomainError("node index out of range");
  if (n == n_nodes - 1) return horizon;  // exact right endpoint
  return horizon * static_cast<double>(n) / static_cast<double>(intervals());
}

double TimeGrid::weight(int n) const {
  if (n < 0 || n >= n_nodes) throw DomainError("node index out of range");
  const double h = horizon / static_cast<double>(intervals());
  return (n == 0 || n == n_nodes - 1) ? 0.5 * h : h;
}

StrategyProfile::StrategyProfile(TimeGrid g, int groups, double fill)
    : grid(g), k(groups), values(static_cast<std::size_t>(g.n_nodes) * groups, fill) {
  if (groups < 1) throw DomainError("profile needs at least one group");
}

bool StrategyProfile::in_box(double slack) const {
  for (double v : values)
    if (!(v >= -slack && v <= 1.0 + slack)) return false;
  return true;
}

void StrategyProfile::require_same_shape(const StrategyProfile& other) const {
  if (!(grid == other.grid) || k != other.k)
    throw DomainError("profiles live on different grids");
}

}  // namespace vaxeq
