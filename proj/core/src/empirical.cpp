#include "fairmix/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairmix/errors.hpp"
#include "fairmix/random.hpp"

namespace fairmix {

namespace {

constexpr double kProbSumTolerance = 1e-12;

void check_probabilities(const std::vector<double>& probs) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw StructuralError("probabilities must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > kProbSumTolerance) {
    throw StructuralError("probabilities must sum to 1");
  }
}

void normalize(std::vector<double>& v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& p : v) p /= total;
}

}  // namespace

std::size_t AxisRange::count() const {
  if (!(step > 0.0) || !std::isfinite(from) || !std::isfinite(to)) {
    throw StructuralError("axis range needs finite bounds and a positive step");
  }
  if (to < from) throw StructuralError("axis range is empty (to < from)");
  return static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
}

std::vector<double> AxisRange::values() const {
  const std::size_t n = count();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = at(k);
  return out;
}

RegularGrid::RegularGrid(AxisRange x) : x_(x) { (void)x_.count(); }

RegularGrid::RegularGrid(AxisRange x, AxisRange y) : x_(x), y_(y) {
  (void)x_.count();
  (void)y_->count();
}

std::size_t RegularGrid::size() const noexcept {
  return x_.count() * (y_ ? y_->count() : 1);
}

std::vector<Point> RegularGrid::nodes() const {
  std::vector<Point> out;
  out.reserve(size());
  if (!y_) {
    for (double v : x_.values()) out.emplace_back(v);
    return out;
  }
  const auto xs = x_.values();
  for (double yv : y_->values()) {
    for (double xv : xs) out.emplace_back(xv, yv);
  }
  return out;
}

std::size_t RegularGrid::nearest(const Point& p) const {
  if (p.dim() != dim()) throw StructuralError("point/grid dimension mismatch");
  auto index_on = [](const AxisRange& r, double v) {
    const double k = std::round((v - r.from) / r.step);
    const double last = static_cast<double>(r.count() - 1);
    return static_cast<std::size_t>(std::clamp(k, 0.0, last));
  };
  const std::size_t ix = index_on(x_, p[0]);
  if (!y_) return ix;
  return index_on(*y_, p[1]) * x_.count() + ix;
}

RegularGrid default_experiment_grid(const MixtureModel& truth) {
  std::array<AxisRange, 2> axes{};
  for (std::size_t a = 0; a < truth.dim(); ++a) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const auto& c : truth.components()) {
      lo = std::min(lo, c.mean()[a] - 5.0 * c.sigma(a));
      hi = std::max(hi, c.mean()[a] + 5.0 * c.sigma(a));
    }
    axes[a] = AxisRange{std::floor(lo), std::ceil(hi), 1.0};
  }
  return truth.dim() == 1 ? RegularGrid(axes[0]) : RegularGrid(axes[0], axes[1]);
}

EmpiricalDistribution EmpiricalDistribution::grid(std::vector<Point> nodes,
                                                  std::vector<double> probs,
                                                  std::size_t sample_size) {
  if (nodes.empty()) throw StructuralError("grid distribution needs at least one node");
  if (nodes.size() != probs.size()) throw StructuralError("grid nodes/probs length mismatch");
  const std::size_t d = nodes.front().dim();
  for (const auto& p : nodes) {
    if (p.dim() != d) throw StructuralError("grid nodes differ in dimension");
  }
  check_probabilities(probs);
  std::vector<Point> sorted = nodes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw StructuralError("grid nodes must be distinct");
  }
  EmpiricalDistribution out;
  out.mode_ = SupportMode::Grid;
  out.support_ = std::move(nodes);
  out.probs_ = std::move(probs);
  out.sample_size_ = sample_size;
  return out;
}

EmpiricalDistribution EmpiricalDistribution::sample(std::vector<Point> points) {
  if (points.empty()) throw StructuralError("sample needs at least one point");
  const std::size_t d = points.front().dim();
  for (const auto& p : points) {
    if (p.dim() != d) throw StructuralError("sample points differ in dimension");
  }
  EmpiricalDistribution out;
  out.mode_ = SupportMode::Sample;
  out.sample_size_ = points.size();
  out.probs_.assign(points.size(), 1.0 / static_cast<double>(points.size()));
  out.support_ = std::move(points);
  return out;
}

EmpiricalDistribution EmpiricalDistribution::with_kl_grid(EmpiricalDistribution binned) const {
  if (binned.mode() != SupportMode::Grid) throw StructuralError("KL companion must be Grid mode");
  if (binned.dim() != dim()) throw StructuralError("KL companion dimension mismatch");
  EmpiricalDistribution out = *this;
  out.kl_grid_ = std::make_shared<const EmpiricalDistribution>(std::move(binned));
  return out;
}

std::array<double, 2> EmpiricalDistribution::extent() const {
  std::array<double, 2> out{0.0, 0.0};
  for (std::size_t a = 0; a < dim(); ++a) {
    auto [lo, hi] = std::minmax_element(support_.begin(), support_.end(),
                                        [a](const Point& p, const Point& q) { return p[a] < q[a]; });
    out[a] = (*hi)[a] - (*lo)[a];
  }
  return out;
}

EmpiricalDistribution discretize_truth(const MixtureModel& m, std::span<const Point> grid) {
  if (grid.empty()) throw StructuralError("discretization grid is empty");
  std::vector<double> probs(grid.size());
  double total = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require_same_dim(m.component(0).mean(), grid[i]);
    probs[i] = predictive_density(m, grid[i]);
    total += probs[i];
  }
  if (!(total > 0.0)) throw DegenerateGridError("model has zero density on every grid node");
  normalize(probs);
  return EmpiricalDistribution::grid({grid.begin(), grid.end()}, std::move(probs));
}

EmpiricalDistribution bin_onto(const EmpiricalDistribution& d, const RegularGrid& grid) {
  std::vector<double> mass(grid.size(), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) mass[grid.nearest(d.support()[i])] += d.probs()[i];
  normalize(mass);
  return EmpiricalDistribution::grid(grid.nodes(), std::move(mass), d.sample_size());
}

EmpiricalDistribution draw_sample(const MixtureModel& m, std::size_t n, std::uint64_t seed,
                                  const std::optional<RegularGrid>& binning) {
  if (n == 0) throw StructuralError("sample size must be >= 1");
  if (binning && binning->dim() != m.dim()) throw StructuralError("binning grid dimension mismatch");

  std::vector<double> cumulative(m.size());
  std::partial_sum(m.weights().begin(), m.weights().end(), cumulative.begin());

  NormalSampler normal(seed);
  std::vector<Point> points;
  points.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double u = normal.uniform_open() * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t j =
        std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), m.size() - 1);
    const GaussianComponent& c = m.component(j);
    const double z1 = normal();
    if (c.dim() == 1) {
      points.emplace_back(c.mean()[0] + c.sigma(0) * z1);
    } else {
      const double z2 = normal();
      const double r = c.rho();
      points.emplace_back(c.mean()[0] + c.sigma(0) * z1,
                          c.mean()[1] + c.sigma(1) * (r * z1 + std::sqrt(1.0 - r * r) * z2));
    }
  }

  auto raw = EmpiricalDistribution::sample(std::move(points));
  if (binning) return bin_onto(raw, *binning);
  auto companion = bin_onto(raw, default_experiment_grid(m));
  return raw.with_kl_grid(std::move(companion));
}

}  // namespace fairmix
