#include <cmath>
#include <map>
#include <sstream>

#include "doctest.h"
#include "fairmix/experiments.hpp"
#include "fairmix/report.hpp"
#include "fairmix/scenario.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

using namespace fairmix;

namespace {

MapSpec spec_from(const ScenarioFile& s) {
  return MapSpec{.truth = *s.truth,
                 .mu1_values = s.map->mu1.values(),
                 .mu2_values = s.map->mu2.values(),
                 .init_sigma = s.map->init_sigma,
                 .init_weights = s.map->init_weights,
                 .sample_size = *s.sample_size,
                 .algorithms = s.algorithms,
                 .trials_per_cell = s.map->trials_per_cell,
                 .stop = *s.stop,
                 .base_seed = *s.seed,
                 .binning = s.binning.value_or(Binning::Grid),
                 .upper_triangle = s.map->upper_triangle};
}

}  // namespace

TEST_SUITE("slow-invariants") {
  TEST_CASE("full initialization map: labels, region ordering and determinism") {
    const auto scenario = load_scenario(std::string(FAIRMIX_SCENARIO_DIR) + "/example2.json");
    const auto spec = spec_from(scenario);
    const auto map = init_map(spec);

    const auto& t = spec.truth;
    for (const auto& c : map.cells) {
      CHECK(std::string(to_string(c.region.label)) ==
            oracle::region_pattern(c.init_mu1, c.init_mu2, t.component(0).mean()[0], t.component(1).mean()[0]));
    }

    for (auto alg : spec.algorithms) {
      std::map<RegionLabel, std::pair<double, int>> acc;
      for (const auto& c : map.cells) {
        auto& [sum, n] = acc[c.region.label];
        sum += static_cast<double>(c.for_algorithm(alg).median_iterations);
        ++n;
      }
      auto mean = [&](RegionLabel r) { return acc[r].first / acc[r].second; };
      CAPTURE(to_string(alg));
      CHECK(mean(RegionLabel::GLLG) <= 1.1 * mean(RegionLabel::LGGL));
      CHECK(mean(RegionLabel::LGGL) <= 1.1 * mean(RegionLabel::GLGL));
      CHECK(mean(RegionLabel::GLGL) <= 1.1 * mean(RegionLabel::GGLL));
    }

    const auto em = map.summary_for(Algorithm::EM).mean_iterations;
    const auto e3m = map.summary_for(Algorithm::E3M).mean_iterations;
    CHECK(e3m / em < 0.9);

    std::ostringstream a, b;
    write_map_csv(a, Provenance(0), map);
    write_map_csv(b, Provenance(0), init_map(spec, 3));
    CHECK(a.str() == b.str());
  }

  TEST_CASE("equal proportions make the map centrosymmetric") {
    MapSpec spec{.truth = binary_mixture(100, 125, 10, 10, 0.5),
                 .mu1_values = {80, 95, 105, 120, 130, 145},
                 .mu2_values = {80, 95, 105, 120, 130, 145}};
    spec.algorithms = {Algorithm::EM};
    spec.base_seed = 31;
    spec.upper_triangle = true;
    const auto map = init_map(spec);
    auto median_at = [&](double mu1, double mu2) {
      for (const auto& c : map.cells) {
        if (c.mu1 == mu1 && c.mu2 == mu2) return static_cast<double>(c.per_algorithm[0].median_iterations);
      }
      FAIL("missing cell");
      return 0.0;
    };
    int compared = 0;
    for (const auto& c : map.cells) {
      if (c.mu1 == c.mu2) continue;  // these start at (mu, mu + 1), which is not mirror-exact
      const double here = median_at(c.mu1, c.mu2);
      const double there = median_at(225 - c.mu2, 225 - c.mu1);
      CAPTURE(c.mu1);
      CAPTURE(c.mu2);
      CHECK(std::abs(here - there) <= 0.25 * std::max(here, there));
      ++compared;
    }
    CHECK(compared == 15);
  }
}
