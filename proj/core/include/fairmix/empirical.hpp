#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fairmix/mixture.hpp"
#include "fairmix/point.hpp"

namespace fairmix {

// Inclusive arithmetic progression from, from+step, ..., <= to.
struct AxisRange {
  double from = 0.0;
  double to = 0.0;
  double step = 1.0;

  std::size_t count() const;
  double at(std::size_t k) const { return from + static_cast<double>(k) * step; }
  std::vector<double> values() const;

  friend bool operator==(const AxisRange&, const AxisRange&) = default;
};

// Axis-aligned lattice in 1-D or 2-D. Node order is x-fastest.
class RegularGrid {
 public:
  explicit RegularGrid(AxisRange x);
  RegularGrid(AxisRange x, AxisRange y);

  std::size_t dim() const noexcept { return y_ ? 2 : 1; }
  std::size_t size() const noexcept;
  const AxisRange& axis(std::size_t a) const { return a == 0 ? x_ : *y_; }
  std::vector<Point> nodes() const;
  // Index of the nearest node; points outside the lattice clamp to the border.
  std::size_t nearest(const Point& p) const;

  friend bool operator==(const RegularGrid&, const RegularGrid&) = default;

 private:
  AxisRange x_;
  std::optional<AxisRange> y_;
};

// Integer lattice spanning [min(mu - 5 sigma), max(mu + 5 sigma)] on every axis.
RegularGrid default_experiment_grid(const MixtureModel& truth);

enum class SupportMode { Grid, Sample };

/// The data side P(x): either probabilities on distinct grid nodes or a raw
/// sample with uniform mass 1/N per point.
///
/// A Sample-mode distribution may carry a Grid-mode companion (the same data
/// binned onto an experiment grid); relative entropy is evaluated on it.
class EmpiricalDistribution {
 public:
  static EmpiricalDistribution grid(std::vector<Point> nodes, std::vector<double> probs,
                                    std::size_t sample_size = 0);
  static EmpiricalDistribution sample(std::vector<Point> points);

  SupportMode mode() const noexcept { return mode_; }
  const std::vector<Point>& support() const noexcept { return support_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return support_.size(); }
  std::size_t dim() const noexcept { return support_.front().dim(); }
  std::size_t sample_size() const noexcept { return sample_size_; }

  const EmpiricalDistribution* kl_grid() const noexcept { return kl_grid_.get(); }
  EmpiricalDistribution with_kl_grid(EmpiricalDistribution binned) const;

  // Per-axis max - min over the support.
  std::array<double, 2> extent() const;

 private:
  EmpiricalDistribution() = default;

  SupportMode mode_ = SupportMode::Grid;
  std::vector<Point> support_;
  std::vector<double> probs_;
  std::size_t sample_size_ = 0;
  std::shared_ptr<const EmpiricalDistribution> kl_grid_;
};

// Grid-mode P(x_i) proportional to the model's predictive density at each node.
EmpiricalDistribution discretize_truth(const MixtureModel& m, std::span<const Point> grid);

// Accumulates the mass of every support point onto its nearest grid node.
EmpiricalDistribution bin_onto(const EmpiricalDistribution& d, const RegularGrid& grid);

/// Draws n i.i.d. points from m. With a binning grid the counts are returned in
/// Grid mode; otherwise a Sample-mode distribution with a KL companion binned onto
/// default_experiment_grid(m). Deterministic in (m, n, seed).
EmpiricalDistribution draw_sample(const MixtureModel& m, std::size_t n, std::uint64_t seed,
                                  const std::optional<RegularGrid>& binning = std::nullopt);

}  // namespace fairmix
