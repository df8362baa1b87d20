#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairmix/empirical.hpp"
#include "fairmix/engine.hpp"
#include "fairmix/mixture.hpp"

namespace fairmix {

// ---------------------------------------------------------------------------
// Region labels on the (mu1, mu2) initialization plane

/// Interleaving of the initial means (G) and the true means (L), with each
/// pattern identified with its reversal. Listed from easiest to hardest.
enum class RegionLabel { GLLG, LGGL, GLGL, GGLL };

std::string_view to_string(RegionLabel r) noexcept;

struct RegionInfo {
  RegionLabel label = RegionLabel::GLLG;
  double dist_fair = 0.0;   // to the 135 degree line mu1 + mu2 = mu1* + mu2*
  double dist_equal = 0.0;  // to the 45 degree line mu1 = mu2
};

// Throws UnsupportedError unless truth is a 1-D two-component mixture. An
// initial mean equal to a true mean sorts to its left.
RegionInfo region_classify(double mu1, double mu2, const MixtureModel& truth);

// ---------------------------------------------------------------------------
// Shared sampling policy

enum class Binning { Grid, Raw };

std::string_view to_string(Binning b) noexcept;

/// Builds the EmpiricalDistribution for one run: Grid binning onto
/// default_experiment_grid(truth) or a raw sample (with KL companion).
EmpiricalDistribution experiment_sample(const MixtureModel& truth, std::size_t n,
                                        std::uint64_t seed, Binning binning);

// ---------------------------------------------------------------------------
// Initialization map

struct MapSpec {
  MixtureModel truth;
  std::vector<double> mu1_values;
  std::vector<double> mu2_values;
  double init_sigma = 7.0;
  std::vector<double> init_weights{0.5, 0.5};
  std::size_t sample_size = 50000;
  std::vector<Algorithm> algorithms{Algorithm::EM, Algorithm::E3M};
  std::size_t trials_per_cell = 3;
  StopSpec stop{};
  std::uint64_t base_seed = 0;
  Binning binning = Binning::Grid;
  bool upper_triangle = false;  // skip cells with mu1 > mu2
  RunOptions run{};

  void validate() const;
};

struct AlgorithmCell {
  Algorithm algorithm = Algorithm::EM;
  std::size_t median_iterations = 0;
  Outcome modal_outcome = Outcome::Global;
  std::vector<std::size_t> trial_iterations;
  std::vector<Outcome> trial_outcomes;
};

struct MapCellResult {
  double mu1 = 0.0;  // nominal grid coordinates
  double mu2 = 0.0;
  double init_mu1 = 0.0;  // means actually used; (mu1, mu1 + 1) on the 45 degree line
  double init_mu2 = 0.0;
  RegionInfo region;
  std::vector<AlgorithmCell> per_algorithm;

  const AlgorithmCell& for_algorithm(Algorithm a) const;
};

struct AlgorithmSummary {
  Algorithm algorithm = Algorithm::EM;
  double mean_iterations = 0.0;
  double global_rate = 0.0;
};

struct MapResult {
  std::vector<double> mu1_axis;
  std::vector<double> mu2_axis;
  std::vector<MapCellResult> cells;  // mu2-major, mu1-fastest
  std::vector<AlgorithmSummary> summary;

  const AlgorithmSummary& summary_for(Algorithm a) const;
};

std::uint64_t cell_seed(std::uint64_t base_seed, double mu1, double mu2, std::size_t trial,
                        Algorithm alg) noexcept;

// Runs every trial of one cell for one algorithm. init_map is a fold of these.
AlgorithmCell run_map_cell(const MapSpec& spec, double mu1, double mu2, Algorithm alg);

/// Evaluates every cell. Cells run on `workers` threads (0 = hardware
/// concurrency); output is identical for any worker count.
MapResult init_map(const MapSpec& spec, std::size_t workers = 0);

// ---------------------------------------------------------------------------
// Repeated trials

struct TrialStats {
  Algorithm algorithm = Algorithm::EM;
  std::size_t runs = 0;
  std::size_t invalid_count = 0;   // Local, Boundary or MaxIter
  std::size_t over500_count = 0;   // iterations > 500
  std::size_t fast_count = 0;      // Global with iterations < fast_threshold
  std::size_t fast_threshold = 0;
  std::vector<std::size_t> iterations;
  std::vector<Outcome> outcomes;
  std::vector<std::uint64_t> seeds;
};

// One fresh sample per seed; the same seeds give matched samples across algorithms.
TrialStats repeated_trials(Algorithm alg, const MixtureModel& truth, const MixtureModel& init,
                           std::size_t sample_size, const StopSpec& stop,
                           std::size_t fast_threshold, std::span<const std::uint64_t> seeds,
                           Binning binning = Binning::Grid, const RunOptions& options = {});

// seeds[k] = hash(base_seed, k)
std::vector<std::uint64_t> derive_seeds(std::uint64_t base_seed, std::size_t runs);

// ---------------------------------------------------------------------------
// Two-dimensional pairs

struct PairScenario {
  std::string name;
  MixtureModel truth;  // 2-D, two components
  MixtureModel init;

  friend bool operator==(const PairScenario&, const PairScenario&) = default;
};

struct Example3Config {
  std::vector<PairScenario> pairs;
  std::size_t sample_size = 50000;
  Algorithm algorithm = Algorithm::E3M;
  std::size_t max_iter = 100;
  double horizontal_tol = 1.0;
  std::uint64_t seed = 0;
  RunOptions run{};
};

struct PairOutcome {
  std::string name;
  RunResult run;
  bool converged = false;
  std::size_t iterations = 0;
  double horizontal_distance = 0.0;  // |x1 - x2| of the fitted centers at the end
};

// |x-gap of fitted centers - x-gap of true centers|; for sub-samples sharing an
// x-center this is the horizontal distance between the two fitted centers.
double horizontal_gap_error(const MixtureModel& fitted, const MixtureModel& truth);

/// Fits each pair independently on its own raw sample; a pair converges once
/// horizontal_gap_error < horizontal_tol.
std::vector<PairOutcome> example3_runner(const Example3Config& config);

}  // namespace fairmix
