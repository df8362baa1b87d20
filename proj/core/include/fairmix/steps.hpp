#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fairmix/empirical.hpp"
#include "fairmix/mixture.hpp"

namespace fairmix {

/// The Shannon channel P(y_j | x_i): one row per support point, one column per
/// component. Rows sum to 1.
class Responsibilities {
 public:
  Responsibilities(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), r_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return r_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return r_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const noexcept { return {r_.data() + i * cols_, cols_}; }

  // Rows whose weighted log densities all fell below the underflow threshold and
  // were assigned to the Mahalanobis-nearest component instead.
  std::size_t underflow_rows = 0;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> r_;
};

// Weighted log densities below this (nats) count as underflow in the E-step.
inline constexpr double kUnderflowLogDensity = -745.0;

Responsibilities e_step(const MixtureModel& m, const EmpiricalDistribution& d);

// ln P(y_j) for every component, -inf for zero weights.
std::vector<double> log_weights(const MixtureModel& m);

/// One E-step row. Fills log_terms[j] = ln P(y_j) + ln P(x | y_j) and the
/// posterior row; returns false when the row underflowed and was assigned by
/// the Mahalanobis rule.
bool e_step_row(const MixtureModel& m, std::span<const double> log_w, const Point& x,
                std::span<double> log_terms, std::span<double> row);

// P+1(y_j) = sum_i P(x_i) r[i][j], renormalized onto the simplex.
std::vector<double> m1_step(const Responsibilities& r, const EmpiricalDistribution& d);

struct M2Options {
  double boundary_weight_floor = 1e-3;
  std::array<double, 2> sigma_floor{0.0, 0.0};
};

// 1e-4 x support extent on each axis (falls back to 1e-4 for a single point).
std::array<double, 2> default_sigma_floor(const EmpiricalDistribution& d);
M2Options default_m2_options(const EmpiricalDistribution& d, double boundary_weight_floor = 1e-3);

struct M2Result {
  std::vector<GaussianComponent> components;
  // Components whose new weight fell below the floor and were left unchanged.
  std::vector<std::size_t> frozen;
  std::size_t sigma_floor_hits = 0;

  bool boundary() const noexcept { return !frozen.empty(); }
};

/// Weighted mean/std (and correlation in 2-D) with posterior weights
/// P(x_i) r[i][j] / new_weights[j]. `previous` supplies the components kept
/// for frozen (boundary) indices.
M2Result m2_step(const Responsibilities& r, const EmpiricalDistribution& d,
                 std::span<const double> new_weights, const MixtureModel& previous,
                 const M2Options& options);

}  // namespace fairmix
