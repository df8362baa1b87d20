#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fairmix/empirical.hpp"
#include "fairmix/mixture.hpp"
#include "oracle.hpp"

namespace fixtures {

inline fairmix::MixtureModel example1_truth() { return fairmix::binary_mixture(65, 95, 15, 15, 0.5); }
inline fairmix::MixtureModel example2_truth() { return fairmix::binary_mixture(100, 125, 10, 10, 0.7); }

inline fairmix::RegularGrid example1_grid() { return fairmix::RegularGrid(fairmix::AxisRange{1, 150, 1}); }

inline fairmix::EmpiricalDistribution example1_data() {
  return fairmix::discretize_truth(example1_truth(), example1_grid().nodes());
}

inline oracle::Mix1 to_oracle(const fairmix::MixtureModel& m) {
  oracle::Mix1 o;
  for (std::size_t j = 0; j < m.size(); ++j) {
    o.mu.push_back(m.component(j).mean()[0]);
    o.sigma.push_back(m.component(j).sigma(0));
    o.w.push_back(m.weight(j));
  }
  return o;
}

inline oracle::Grid1 to_oracle(const fairmix::EmpiricalDistribution& d) {
  oracle::Grid1 g;
  for (std::size_t i = 0; i < d.size(); ++i) {
    g.x.push_back(d.support()[i][0]);
    g.p.push_back(d.probs()[i]);
  }
  return g;
}

// A random 1-D binary mixture with means in [lo, hi].
inline fairmix::MixtureModel random_binary(std::mt19937_64& rng, double lo = 40, double hi = 160) {
  std::uniform_real_distribution<double> mean(lo, hi), sigma(4, 20), weight(0.15, 0.85);
  return fairmix::binary_mixture(mean(rng), mean(rng), sigma(rng), sigma(rng), weight(rng));
}

}  // namespace fixtures
