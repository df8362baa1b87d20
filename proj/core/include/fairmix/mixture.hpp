#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fairmix/point.hpp"

namespace fairmix {

/// One Gaussian mixture component. In 1-D only sigma(0) is meaningful and
/// rho() is 0; in 2-D the density is the full correlated bivariate normal.
class GaussianComponent {
 public:
  static GaussianComponent univariate(double mean, double sigma);
  static GaussianComponent bivariate(Point mean, double sigma_x, double sigma_y, double rho);

  const Point& mean() const noexcept { return mean_; }
  double sigma(std::size_t axis = 0) const noexcept { return sigma_[axis]; }
  double rho() const noexcept { return rho_; }
  std::size_t dim() const noexcept { return mean_.dim(); }

  // ln N(x; mean, Sigma). Cheaper and safer than log(component_density).
  double log_density(const Point& x) const;
  // Squared Mahalanobis distance of x from the mean.
  double mahalanobis2(const Point& x) const;

  friend bool operator==(const GaussianComponent&, const GaussianComponent&) = default;

 private:
  GaussianComponent(Point mean, std::array<double, 2> sigma, double rho);

  Point mean_;
  std::array<double, 2> sigma_{1.0, 1.0};
  double rho_ = 0.0;
};

/// The parameter set theta: components plus mixing proportions P(y).
class MixtureModel {
 public:
  // Throws StructuralError on empty/mismatched input or weights off the simplex.
  MixtureModel(std::vector<GaussianComponent> components, std::vector<double> weights);

  std::size_t size() const noexcept { return components_.size(); }
  std::size_t dim() const noexcept { return components_.front().dim(); }
  const std::vector<GaussianComponent>& components() const noexcept { return components_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const GaussianComponent& component(std::size_t j) const { return components_.at(j); }
  double weight(std::size_t j) const { return weights_.at(j); }

  MixtureModel with_weights(std::vector<double> weights) const;
  MixtureModel with_components(std::vector<GaussianComponent> components) const;
  // Component j becomes component perm[j] of this model (weights follow).
  MixtureModel permuted(std::span<const std::size_t> perm) const;

  friend bool operator==(const MixtureModel&, const MixtureModel&) = default;

 private:
  std::vector<GaussianComponent> components_;
  std::vector<double> weights_;
};

/// Two-component 1-D mixture in the (mu1, mu2, sigma1, sigma2, P(y1)) form.
MixtureModel binary_mixture(double mu1, double mu2, double sigma1, double sigma2, double weight1);

double component_density(const GaussianComponent& c, const Point& x);

// sum_j P(y_j) P(x | y_j)
double predictive_density(const MixtureModel& m, const Point& x);

// Natural log of predictive_density evaluated with log-sum-exp.
double log_predictive_density(const MixtureModel& m, const Point& x);

}  // namespace fairmix
