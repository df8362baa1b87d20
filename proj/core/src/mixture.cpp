#include "fairmix/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fairmix/errors.hpp"

namespace fairmix {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;  // ln(2*pi)
constexpr double kWeightSumTolerance = 1e-12;

}  // namespace

GaussianComponent::GaussianComponent(Point mean, std::array<double, 2> sigma, double rho)
    : mean_(mean), sigma_(sigma), rho_(rho) {
  for (std::size_t a = 0; a < mean_.dim(); ++a) {
    if (!(sigma_[a] > 0.0) || !std::isfinite(sigma_[a])) {
      throw StructuralError("component sigma must be positive and finite");
    }
    if (!std::isfinite(mean_[a])) throw StructuralError("component mean must be finite");
  }
  if (mean_.dim() == 1 && rho_ != 0.0) throw StructuralError("rho is only defined in 2-D");
  if (!(std::abs(rho_) < 1.0)) throw StructuralError("|rho| must be < 1");
}

GaussianComponent GaussianComponent::univariate(double mean, double sigma) {
  return GaussianComponent(Point(mean), {sigma, 1.0}, 0.0);
}

GaussianComponent GaussianComponent::bivariate(Point mean, double sigma_x, double sigma_y,
                                               double rho) {
  if (mean.dim() != 2) throw StructuralError("bivariate component needs a 2-D mean");
  return GaussianComponent(mean, {sigma_x, sigma_y}, rho);
}

double GaussianComponent::mahalanobis2(const Point& x) const {
  require_same_dim(mean_, x);
  const double zx = (x[0] - mean_[0]) / sigma_[0];
  if (dim() == 1) return zx * zx;
  const double zy = (x[1] - mean_[1]) / sigma_[1];
  return (zx * zx - 2.0 * rho_ * zx * zy + zy * zy) / (1.0 - rho_ * rho_);
}

double GaussianComponent::log_density(const Point& x) const {
  const double q = mahalanobis2(x);
  if (dim() == 1) return -0.5 * (q + kLogTwoPi) - std::log(sigma_[0]);
  return -0.5 * q - kLogTwoPi - std::log(sigma_[0] * sigma_[1]) -
         0.5 * std::log1p(-rho_ * rho_);
}

MixtureModel::MixtureModel(std::vector<GaussianComponent> components, std::vector<double> weights)
    : components_(std::move(components)), weights_(std::move(weights)) {
  if (components_.empty()) throw StructuralError("mixture needs at least one component");
  if (components_.size() != weights_.size()) {
    throw StructuralError("mixture has " + std::to_string(components_.size()) +
                          " components but " + std::to_string(weights_.size()) + " weights");
  }
  const std::size_t d = components_.front().dim();
  double total = 0.0;
  for (std::size_t j = 0; j < components_.size(); ++j) {
    if (components_[j].dim() != d) throw StructuralError("mixture components differ in dimension");
    if (!(weights_[j] >= 0.0) || !std::isfinite(weights_[j])) {
      throw StructuralError("mixture weights must be nonnegative");
    }
    total += weights_[j];
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    throw StructuralError("mixture weights must sum to 1");
  }
}

MixtureModel MixtureModel::with_weights(std::vector<double> weights) const {
  return MixtureModel(components_, std::move(weights));
}

MixtureModel MixtureModel::with_components(std::vector<GaussianComponent> components) const {
  return MixtureModel(std::move(components), weights_);
}

MixtureModel MixtureModel::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != size()) throw StructuralError("permutation length mismatch");
  std::vector<GaussianComponent> comps;
  std::vector<double> w;
  comps.reserve(size());
  w.reserve(size());
  for (std::size_t j : perm) {
    comps.push_back(component(j));
    w.push_back(weight(j));
  }
  return MixtureModel(std::move(comps), std::move(w));
}

MixtureModel binary_mixture(double mu1, double mu2, double sigma1, double sigma2,
                            double weight1) {
  return MixtureModel(
      {GaussianComponent::univariate(mu1, sigma1), GaussianComponent::univariate(mu2, sigma2)},
      {weight1, 1.0 - weight1});
}

double component_density(const GaussianComponent& c, const Point& x) {
  return std::exp(c.log_density(x));
}

double predictive_density(const MixtureModel& m, const Point& x) {
  double total = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    total += m.weight(j) * component_density(m.component(j), x);
  }
  return total;
}

double log_predictive_density(const MixtureModel& m, const Point& x) {
  double peak = -std::numeric_limits<double>::infinity();
  std::array<double, 16> small{};
  std::vector<double> large;
  double* terms = small.data();
  if (m.size() > small.size()) {
    large.resize(m.size());
    terms = large.data();
  }
  for (std::size_t j = 0; j < m.size(); ++j) {
    terms[j] = m.weight(j) > 0.0 ? std::log(m.weight(j)) + m.component(j).log_density(x)
                                 : -std::numeric_limits<double>::infinity();
    peak = std::max(peak, terms[j]);
  }
  if (!std::isfinite(peak)) return peak;
  double acc = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) acc += std::exp(terms[j] - peak);
  return peak + std::log(acc);
}

}  // namespace fairmix
