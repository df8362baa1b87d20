#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "fairmix/errors.hpp"
#include "fairmix/experiments.hpp"

namespace fairmix {

std::string_view to_string(RegionLabel r) noexcept {
  switch (r) {
    case RegionLabel::GLLG: return "GLLG";
    case RegionLabel::LGGL: return "LGGL";
    case RegionLabel::GLGL: return "GLGL";
    case RegionLabel::GGLL: return "GGLL";
  }
  return "?";
}

RegionInfo region_classify(double mu1, double mu2, const MixtureModel& truth) {
  if (truth.dim() != 1 || truth.size() != 2) {
    throw UnsupportedError("region labels are defined for 1-D two-component mixtures");
  }
  const double t1 = truth.component(0).mean()[0];
  const double t2 = truth.component(1).mean()[0];

  // (value, is_true_mean): G (false) sorts before L (true) on ties.
  std::array<std::pair<double, bool>, 4> items{{{mu1, false}, {mu2, false}, {t1, true}, {t2, true}}};
  std::sort(items.begin(), items.end());

  std::array<char, 4> pattern{};
  for (std::size_t k = 0; k < 4; ++k) pattern[k] = items[k].second ? 'L' : 'G';
  auto is = [&](const char* p) { return std::equal(pattern.begin(), pattern.end(), p); };

  RegionInfo info;
  if (is("GLLG")) {
    info.label = RegionLabel::GLLG;
  } else if (is("LGGL")) {
    info.label = RegionLabel::LGGL;
  } else if (is("GLGL") || is("LGLG")) {
    info.label = RegionLabel::GLGL;
  } else {
    info.label = RegionLabel::GGLL;  // GGLL or LLGG
  }
  info.dist_fair = std::abs(mu1 + mu2 - (t1 + t2)) / std::numbers::sqrt2;
  info.dist_equal = std::abs(mu1 - mu2) / std::numbers::sqrt2;
  return info;
}

}  // namespace fairmix
