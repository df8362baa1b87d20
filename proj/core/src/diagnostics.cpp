#include "fairmix/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fairmix/errors.hpp"

namespace fairmix {

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

void require_pair(const MixtureModel& m, const EmpiricalDistribution& d) {
  if (m.dim() != d.dim()) throw StructuralError("model and data dimensions differ");
}

double clamp_bits(double bits, std::size_t& clamped) {
  if (bits >= kLogClampBits) return bits;
  ++clamped;
  return kLogClampBits;
}

double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

const EmpiricalDistribution& kl_support(const EmpiricalDistribution& d) {
  if (d.mode() == SupportMode::Grid) return d;
  if (const auto* g = d.kl_grid()) return *g;
  throw DomainError("relative entropy of a raw sample needs a binned KL grid");
}

double relative_entropy_on_grid(const EmpiricalDistribution& g, const MixtureModel& m,
                                std::size_t& clamped) {
  std::vector<double> lpd(g.size());
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) {
    lpd[i] = log_predictive_density(m, g.support()[i]);
    peak = std::max(peak, lpd[i]);
  }
  if (!std::isfinite(peak)) throw DegenerateGridError("model has zero density on the KL grid");
  double acc = 0.0;
  for (double v : lpd) acc += std::exp(v - peak);
  const double log_z = peak + std::log(acc);
  double kl = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double p = g.probs()[i];
    if (p == 0.0) continue;
    const double model_bits = clamp_bits((lpd[i] - log_z) * kInvLn2, clamped);
    kl += p * (std::log2(p) - model_bits);
  }
  // Rounding can leave -1e-17 at the minimum.
  return std::max(kl, 0.0);
}

}  // namespace

double log_likelihood(const MixtureModel& m, const EmpiricalDistribution& d) {
  require_pair(m, d);
  std::size_t clamped = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double p = d.probs()[i];
    if (p == 0.0) continue;
    total += p * clamp_bits(log_predictive_density(m, d.support()[i]) * kInvLn2, clamped);
  }
  return total;
}

double relative_entropy(const EmpiricalDistribution& d, const MixtureModel& m) {
  require_pair(m, d);
  std::size_t clamped = 0;
  return relative_entropy_on_grid(kl_support(d), m, clamped);
}

double conditional_entropy(const MixtureModel& m, const EmpiricalDistribution& d) {
  const Responsibilities r = e_step(m, d);
  double h = 0.0;
  for (std::size_t i = 0; i < r.rows(); ++i) {
    const double p = d.probs()[i];
    if (p == 0.0) continue;
    double row = 0.0;
    for (double v : r.row(i)) row += xlog2x(v);
    h -= p * row;
  }
  return std::max(h, 0.0);
}

double complete_q(const MixtureModel& m, const EmpiricalDistribution& d) {
  const Responsibilities r = e_step(m, d);
  std::size_t clamped = 0;
  double q = 0.0;
  for (std::size_t i = 0; i < r.rows(); ++i) {
    const double p = d.probs()[i];
    if (p == 0.0) continue;
    for (std::size_t j = 0; j < r.cols(); ++j) {
      if (r(i, j) == 0.0) continue;
      const double joint =
          (std::log(m.weight(j)) + m.component(j).log_density(d.support()[i])) * kInvLn2;
      q += p * r(i, j) * clamp_bits(joint, clamped);
    }
  }
  return q;
}

double channel_mismatch(const MixtureModel& m, const EmpiricalDistribution& d) {
  const auto next = m1_step(e_step(m, d), d);
  double worst = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) worst = std::max(worst, std::abs(next[j] - m.weight(j)));
  return worst;
}

double entropy_bits(const EmpiricalDistribution& d) {
  double h = 0.0;
  for (double p : d.probs()) h -= xlog2x(p);
  return h;
}

DiagnosticRecord evaluate(const MixtureModel& m, const EmpiricalDistribution& d) {
  require_pair(m, d);
  const std::size_t n = m.size();
  DiagnosticRecord rec;
  const auto log_w = log_weights(m);
  std::vector<double> a(n);
  std::vector<double> r(n);
  std::vector<double> next(n, 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double p = d.probs()[i];
    if (p == 0.0) continue;
    e_step_row(m, log_w, d.support()[i], a, r);
    double peak = -std::numeric_limits<double>::infinity();
    for (double v : a) peak = std::max(peak, v);
    double lpd = peak;
    if (std::isfinite(peak)) {
      double acc = 0.0;
      for (double v : a) acc += std::exp(v - peak);
      lpd = peak + std::log(acc);
    }
    double row_h = 0.0;
    double row_q = 0.0;
    std::size_t row_clamped = 0;
    for (std::size_t j = 0; j < n; ++j) {
      next[j] += p * r[j];
      if (r[j] == 0.0) continue;
      row_h += xlog2x(r[j]);
      row_q += r[j] * clamp_bits(a[j] * kInvLn2, row_clamped);
    }
    rec.L += p * clamp_bits(lpd * kInvLn2, row_clamped);
    if (row_clamped > 0) ++rec.clamped_points;
    rec.H_cond -= p * row_h;
    rec.Q += p * row_q;
  }
  rec.H_cond = std::max(rec.H_cond, 0.0);
  double total = 0.0;
  for (double v : next) total += v;
  for (std::size_t j = 0; j < n; ++j) {
    rec.mismatch = std::max(rec.mismatch, std::abs(next[j] / total - m.weight(j)));
  }
  if (d.mode() == SupportMode::Grid || d.kl_grid() != nullptr) {
    std::size_t kl_clamped = 0;  // same grid points as above in Grid mode
    rec.KL = relative_entropy_on_grid(kl_support(d), m, kl_clamped);
  } else {
    rec.KL = std::numeric_limits<double>::quiet_NaN();
  }
  return rec;
}

MixtureModel equal_sigma_model(const MixtureModel& truth, double sigma) {
  if (truth.dim() != 1) throw UnsupportedError("equal-sigma family is defined for 1-D mixtures");
  std::vector<GaussianComponent> comps;
  comps.reserve(truth.size());
  for (const auto& c : truth.components()) {
    comps.push_back(GaussianComponent::univariate(c.mean()[0], sigma));
  }
  return truth.with_components(std::move(comps));
}

std::vector<SweepRow> sweep_sigma(const MixtureModel& truth, std::span<const Point> grid,
                                  std::span<const double> sigmas) {
  const EmpiricalDistribution d = discretize_truth(truth, grid);
  std::vector<double> ordered(sigmas.begin(), sigmas.end());
  std::sort(ordered.begin(), ordered.end());
  std::vector<SweepRow> rows;
  rows.reserve(ordered.size());
  for (double s : ordered) {
    const DiagnosticRecord rec = evaluate(equal_sigma_model(truth, s), d);
    rows.push_back(SweepRow{s, rec.L, rec.Q, rec.H_cond, rec.KL});
  }
  return rows;
}

double fd_dH_dsigma(const MixtureModel& truth, std::span<const Point> grid, double sigma, double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  if (!(sigma - h > 0.0)) throw DomainError("sigma - h must be positive");
  const EmpiricalDistribution d = discretize_truth(truth, grid);
  const double up = conditional_entropy(equal_sigma_model(truth, sigma + h), d);
  const double down = conditional_entropy(equal_sigma_model(truth, sigma - h), d);
  return (up - down) / (2.0 * h);
}

}  // namespace fairmix
