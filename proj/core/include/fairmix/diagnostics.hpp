#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fairmix/empirical.hpp"
#include "fairmix/mixture.hpp"
#include "fairmix/steps.hpp"

namespace fairmix {

// Every quantity is in bits (per sample where applicable).
inline constexpr double kLogClampBits = -1000.0;

struct DiagnosticRecord {
  double L = 0.0;         // incomplete-data log-likelihood
  double Q = 0.0;         // complete-data log-likelihood, L - H_cond
  double H_cond = 0.0;    // H(Y | X, theta)
  double KL = 0.0;        // H(P || P_theta); NaN when no grid is available
  double mismatch = 0.0;  // max_j |P+1(y_j) - P(y_j)|
  std::size_t clamped_points = 0;  // support points whose L or Q term hit kLogClampBits
};

double log_likelihood(const MixtureModel& m, const EmpiricalDistribution& d);

// Grid mode directly; Sample mode through its KL companion grid. P_theta is
// renormalized over the grid nodes. Throws DomainError for a bare sample.
double relative_entropy(const EmpiricalDistribution& d, const MixtureModel& m);

double conditional_entropy(const MixtureModel& m, const EmpiricalDistribution& d);
double complete_q(const MixtureModel& m, const EmpiricalDistribution& d);
double channel_mismatch(const MixtureModel& m, const EmpiricalDistribution& d);

// -sum_i P(x_i) log2 P(x_i)
double entropy_bits(const EmpiricalDistribution& d);

/// All diagnostics from a single E-step pass. KL is NaN when `d` is a sample
/// without a KL companion grid.
DiagnosticRecord evaluate(const MixtureModel& m, const EmpiricalDistribution& d);

struct SweepRow {
  double sigma = 0.0;
  double L = 0.0;
  double Q = 0.0;
  double H_cond = 0.0;
  double KL = 0.0;
};

// Truth means and weights with every sigma set to `sigma` (1-D).
MixtureModel equal_sigma_model(const MixtureModel& truth, double sigma);

/// Diagnostics of the equal-sigma family against discretize_truth(truth, grid),
/// one row per sigma, ordered by sigma.
std::vector<SweepRow> sweep_sigma(const MixtureModel& truth, std::span<const Point> grid,
                                  std::span<const double> sigmas);

// Central difference of H(Y|X) along the equal-sigma family.
double fd_dH_dsigma(const MixtureModel& truth, std::span<const Point> grid, double sigma, double h);

}  // namespace fairmix
