#include "fairmix/steps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fairmix/errors.hpp"

namespace fairmix {

namespace {

void require_pair(const MixtureModel& m, const EmpiricalDistribution& d) {
  if (m.dim() != d.dim()) throw StructuralError("model and data dimensions differ");
}

}  // namespace

std::vector<double> log_weights(const MixtureModel& m) {
  std::vector<double> out(m.size());
  for (std::size_t j = 0; j < m.size(); ++j) {
    out[j] = m.weight(j) > 0.0 ? std::log(m.weight(j)) : -std::numeric_limits<double>::infinity();
  }
  return out;
}

bool e_step_row(const MixtureModel& m, std::span<const double> log_w, const Point& x,
                std::span<double> log_terms, std::span<double> row) {
  const std::size_t n = m.size();
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    log_terms[j] = log_w[j] + m.component(j).log_density(x);
    peak = std::max(peak, log_terms[j]);
  }
  if (!(peak >= kUnderflowLogDensity)) {
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (m.weight(j) <= 0.0) continue;
      const double q = m.component(j).mahalanobis2(x);
      if (q < best) {
        best = q;
        nearest = j;
      }
    }
    for (std::size_t j = 0; j < n; ++j) row[j] = j == nearest ? 1.0 : 0.0;
    return false;
  }
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    row[j] = std::exp(log_terms[j] - peak);
    total += row[j];
  }
  for (std::size_t j = 0; j < n; ++j) row[j] /= total;
  return true;
}

Responsibilities e_step(const MixtureModel& m, const EmpiricalDistribution& d) {
  require_pair(m, d);
  const std::size_t n = m.size();
  Responsibilities r(d.size(), n);
  const auto log_w = log_weights(m);
  std::vector<double> terms(n);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!e_step_row(m, log_w, d.support()[i], terms, row)) ++r.underflow_rows;
    for (std::size_t j = 0; j < n; ++j) r(i, j) = row[j];
  }
  return r;
}

std::vector<double> m1_step(const Responsibilities& r, const EmpiricalDistribution& d) {
  if (r.rows() != d.size()) throw StructuralError("responsibility rows do not match the support");
  std::vector<double> w(r.cols(), 0.0);
  for (std::size_t i = 0; i < r.rows(); ++i) {
    const double p = d.probs()[i];
    if (p == 0.0) continue;
    for (std::size_t j = 0; j < r.cols(); ++j) w[j] += p * r(i, j);
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  return w;
}

std::array<double, 2> default_sigma_floor(const EmpiricalDistribution& d) {
  auto extent = d.extent();
  for (double& e : extent) e = 1e-4 * (e > 0.0 ? e : 1.0);
  return extent;
}

M2Options default_m2_options(const EmpiricalDistribution& d, double boundary_weight_floor) {
  return M2Options{boundary_weight_floor, default_sigma_floor(d)};
}

M2Result m2_step(const Responsibilities& r, const EmpiricalDistribution& d,
                 std::span<const double> new_weights, const MixtureModel& previous,
                 const M2Options& options) {
  if (r.rows() != d.size()) throw StructuralError("responsibility rows do not match the support");
  if (new_weights.size() != r.cols() || previous.size() != r.cols()) {
    throw StructuralError("component count mismatch in M2-step");
  }
  require_pair(previous, d);
  const std::size_t dim = d.dim();
  M2Result out;
  out.components.reserve(r.cols());

  for (std::size_t j = 0; j < r.cols(); ++j) {
    if (!(new_weights[j] >= options.boundary_weight_floor) || !(new_weights[j] > 0.0)) {
      out.components.push_back(previous.component(j));
      out.frozen.push_back(j);
      continue;
    }
    const double inv = 1.0 / new_weights[j];
    std::array<double, 2> mean{0.0, 0.0};
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double w = d.probs()[i] * r(i, j) * inv;
      for (std::size_t a = 0; a < dim; ++a) mean[a] += w * d.support()[i][a];
    }
    std::array<double, 2> var{0.0, 0.0};
    double cov = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double w = d.probs()[i] * r(i, j) * inv;
      const double dx = d.support()[i][0] - mean[0];
      var[0] += w * dx * dx;
      if (dim == 2) {
        const double dy = d.support()[i][1] - mean[1];
        var[1] += w * dy * dy;
        cov += w * dx * dy;
      }
    }
    std::array<double, 2> sigma{};
    for (std::size_t a = 0; a < dim; ++a) {
      sigma[a] = std::sqrt(var[a]);
      if (!(sigma[a] >= options.sigma_floor[a]) || !(sigma[a] > 0.0)) {
        sigma[a] = std::max(options.sigma_floor[a], std::numeric_limits<double>::min());
        ++out.sigma_floor_hits;
      }
    }
    if (dim == 1) {
      out.components.push_back(GaussianComponent::univariate(mean[0], sigma[0]));
    } else {
      double rho = cov / (sigma[0] * sigma[1]);
      // Floors or rounding can push a degenerate estimate onto the boundary.
      rho = std::clamp(rho, -0.999999, 0.999999);
      out.components.push_back(
          GaussianComponent::bivariate(Point(mean[0], mean[1]), sigma[0], sigma[1], rho));
    }
  }
  return out;
}

}  // namespace fairmix
