#pragma once

#include <span>
#include <vector>

namespace vaxeq {

// Uniform time grid on [0, T] with trapezoidal quadrature weights, the
// discrete stand-in for the L2([0,T]) pairing: <<phi, y>> ~ sum_n w_n <phi_n, y_n>.
struct TimeGrid {
  double horizon = 1.0;
  int n_nodes = 2;

  TimeGrid() = default;
  TimeGrid(double T, int nodes);  // throws DomainError if T <= 0 or nodes < 2

  int intervals() const { return n_nodes - 1; }

  // t_0 = 0 and t_N = horizon exactly; interior nodes uniform.
  double node(int n) const;

  // T/(2N) at both ends, T/N in the interior; the weights sum to T.
  double weight(int n) const;

  bool operator==(const TimeGrid& o) const {
    return horizon == o.horizon && n_nodes == o.n_nodes;
  }
};

// Per-node, per-group values on a grid, node-major. Strategy entries are
// vaccination probabilities and must stay in [0, 1].
struct StrategyProfile {
  TimeGrid grid;
  int k = 0;
  std::vector<double> values;

  StrategyProfile() = default;
  StrategyProfile(TimeGrid g, int groups, double fill = 0.0);

  double& at(int node, int group) { return values[static_cast<std::size_t>(node) * k + group]; }
  double at(int node, int group) const { return values[static_cast<std::size_t>(node) * k + group]; }

  std::span<double> slice(int node) {
    return {values.data() + static_cast<std::size_t>(node) * k, static_cast<std::size_t>(k)};
  }
  std::span<const double> slice(int node) const {
    return {values.data() + static_cast<std::size_t>(node) * k, static_cast<std::size_t>(k)};
  }

  bool in_box(double slack = 0.0) const;

  // Throws DomainError when the grids or group counts differ.
  void require_same_shape(const StrategyProfile& other) const;
};

}  // namespace vaxeq
