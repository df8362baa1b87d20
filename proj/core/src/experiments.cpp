#include "fairmix/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "fairmix/errors.hpp"
#include "fairmix/random.hpp"

namespace fairmix {

std::string_view to_string(Binning b) noexcept { return b == Binning::Grid ? "grid" : "raw"; }

EmpiricalDistribution experiment_sample(const MixtureModel& truth, std::size_t n,
                                        std::uint64_t seed, Binning binning) {
  if (binning == Binning::Grid) return draw_sample(truth, n, seed, default_experiment_grid(truth));
  return draw_sample(truth, n, seed);
}

// ---------------------------------------------------------------------------

void MapSpec::validate() const {
  if (truth.dim() != 1 || truth.size() != 2) {
    throw UnsupportedError("initialization maps need a 1-D two-component truth");
  }
  if (mu1_values.empty() || mu2_values.empty()) throw StructuralError("map ranges must be nonempty");
  if (trials_per_cell == 0 || trials_per_cell % 2 == 0) {
    throw StructuralError("trials_per_cell must be odd");
  }
  if (algorithms.empty()) throw StructuralError("map needs at least one algorithm");
  if (!(init_sigma > 0.0)) throw StructuralError("init_sigma must be > 0");
  if (init_weights.size() != 2) throw StructuralError("init_weights needs two entries");
  if (sample_size == 0) throw StructuralError("sample size must be >= 1");
  (void)MixtureModel(truth.components(), init_weights);
  stop.validate();
}

const AlgorithmCell& MapCellResult::for_algorithm(Algorithm a) const {
  for (const auto& c : per_algorithm) {
    if (c.algorithm == a) return c;
  }
  throw StructuralError("algorithm not present in map cell");
}

const AlgorithmSummary& MapResult::summary_for(Algorithm a) const {
  for (const auto& s : summary) {
    if (s.algorithm == a) return s;
  }
  throw StructuralError("algorithm not present in map summary");
}

std::uint64_t cell_seed(std::uint64_t base_seed, double mu1, double mu2, std::size_t trial,
                        Algorithm alg) noexcept {
  return hash_seed({base_seed, seed_word(mu1), seed_word(mu2), static_cast<std::uint64_t>(trial),
                    static_cast<std::uint64_t>(alg)});
}

namespace {

std::pair<double, double> effective_init(double mu1, double mu2) {
  return mu1 == mu2 ? std::pair{mu1, mu1 + 1.0} : std::pair{mu1, mu2};
}

Outcome modal(const std::vector<Outcome>& outcomes) {
  std::array<std::size_t, 4> counts{};
  for (Outcome o : outcomes) ++counts[static_cast<std::size_t>(o)];
  const auto it = std::max_element(counts.begin(), counts.end());
  return static_cast<Outcome>(it - counts.begin());
}

// Runs fn(k) for k in [0, n) on a small pool; rethrows the first failure.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < n; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

AlgorithmCell run_map_cell(const MapSpec& spec, double mu1, double mu2, Algorithm alg) {
  const auto [init1, init2] = effective_init(mu1, mu2);
  const MixtureModel init =
      binary_mixture(init1, init2, spec.init_sigma, spec.init_sigma, spec.init_weights[0]);
  AlgorithmCell cell;
  cell.algorithm = alg;
  for (std::size_t t = 0; t < spec.trials_per_cell; ++t) {
    const auto data = experiment_sample(spec.truth, spec.sample_size,
                                        cell_seed(spec.base_seed, mu1, mu2, t, alg), spec.binning);
    const RunResult run = run_algorithm(alg, init, data, spec.stop, spec.truth, spec.run);
    cell.trial_iterations.push_back(run.iterations_used);
    cell.trial_outcomes.push_back(run.outcome);
  }
  std::vector<std::size_t> sorted = cell.trial_iterations;
  std::sort(sorted.begin(), sorted.end());
  cell.median_iterations = sorted[sorted.size() / 2];
  cell.modal_outcome = modal(cell.trial_outcomes);
  return cell;
}

MapResult init_map(const MapSpec& spec, std::size_t workers) {
  spec.validate();
  MapResult out;
  out.mu1_axis = spec.mu1_values;
  out.mu2_axis = spec.mu2_values;
  for (double mu2 : spec.mu2_values) {
    for (double mu1 : spec.mu1_values) {
      if (spec.upper_triangle && mu1 > mu2) continue;
      MapCellResult cell;
      cell.mu1 = mu1;
      cell.mu2 = mu2;
      std::tie(cell.init_mu1, cell.init_mu2) = effective_init(mu1, mu2);
      cell.region = region_classify(cell.init_mu1, cell.init_mu2, spec.truth);
      cell.per_algorithm.resize(spec.algorithms.size());
      out.cells.push_back(std::move(cell));
    }
  }

  const std::size_t n_alg = spec.algorithms.size();
  parallel_for(out.cells.size() * n_alg, workers, [&](std::size_t k) {
    MapCellResult& cell = out.cells[k / n_alg];
    cell.per_algorithm[k % n_alg] =
        run_map_cell(spec, cell.mu1, cell.mu2, spec.algorithms[k % n_alg]);
  });

  for (std::size_t a = 0; a < n_alg; ++a) {
    AlgorithmSummary s;
    s.algorithm = spec.algorithms[a];
    double global = 0.0;
    for (const auto& cell : out.cells) {
      s.mean_iterations += static_cast<double>(cell.per_algorithm[a].median_iterations);
      if (cell.per_algorithm[a].modal_outcome == Outcome::Global) global += 1.0;
    }
    const double n = static_cast<double>(std::max<std::size_t>(out.cells.size(), 1));
    s.mean_iterations /= n;
    s.global_rate = global / n;
    out.summary.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::uint64_t> derive_seeds(std::uint64_t base_seed, std::size_t runs) {
  std::vector<std::uint64_t> seeds(runs);
  for (std::size_t k = 0; k < runs; ++k) seeds[k] = hash_seed({base_seed, k});
  return seeds;
}

TrialStats repeated_trials(Algorithm alg, const MixtureModel& truth, const MixtureModel& init,
                           std::size_t sample_size, const StopSpec& stop,
                           std::size_t fast_threshold, std::span<const std::uint64_t> seeds,
                           Binning binning, const RunOptions& options) {
  if (seeds.empty()) throw StructuralError("repeated trials need at least one seed");
  TrialStats stats;
  stats.algorithm = alg;
  stats.fast_threshold = fast_threshold;
  stats.seeds.assign(seeds.begin(), seeds.end());
  for (std::uint64_t seed : seeds) {
    const auto data = experiment_sample(truth, sample_size, seed, binning);
    const RunResult run = run_algorithm(alg, init, data, stop, truth, options);
    ++stats.runs;
    stats.iterations.push_back(run.iterations_used);
    stats.outcomes.push_back(run.outcome);
    if (run.outcome != Outcome::Global) ++stats.invalid_count;
    if (run.iterations_used > 500) ++stats.over500_count;
    if (run.outcome == Outcome::Global && run.iterations_used < fast_threshold) ++stats.fast_count;
  }
  return stats;
}

// ---------------------------------------------------------------------------

double horizontal_gap_error(const MixtureModel& fitted, const MixtureModel& truth) {
  if (fitted.dim() != 2 || fitted.size() != 2 || truth.dim() != 2 || truth.size() != 2) {
    throw UnsupportedError("horizontal gap is defined for 2-D two-component mixtures");
  }
  const double fit_gap =
      std::abs(fitted.component(0).mean().x() - fitted.component(1).mean().x());
  const double true_gap = std::abs(truth.component(0).mean().x() - truth.component(1).mean().x());
  return std::abs(fit_gap - true_gap);
}

std::vector<PairOutcome> example3_runner(const Example3Config& config) {
  if (config.pairs.empty()) throw StructuralError("example3 needs at least one pair");
  StopSpec limits;
  limits.max_iter = config.max_iter;
  limits.validate();

  std::vector<PairOutcome> out;
  for (std::size_t k = 0; k < config.pairs.size(); ++k) {
    const PairScenario& pair = config.pairs[k];
    if (pair.truth.dim() != 2 || pair.init.dim() != 2 || pair.truth.size() != 2 ||
        pair.init.size() != 2) {
      throw UnsupportedError("example3 pairs must be 2-D two-component mixtures");
    }
    const auto data = draw_sample(pair.truth, config.sample_size, hash_seed({config.seed, k}));
    const double tol = config.horizontal_tol;
    auto converged = [&](const MixtureModel& m, const DiagnosticRecord&) {
      return horizontal_gap_error(m, pair.truth) < tol;
    };
    PairOutcome po;
    po.name = pair.name;
    po.run = run_algorithm(config.algorithm, pair.init, data, limits, converged, config.run);
    po.converged = po.run.outcome == Outcome::Global;
    po.iterations = po.run.iterations_used;
    const MixtureModel& fin = po.run.final_model();
    po.horizontal_distance = std::abs(fin.component(0).mean().x() - fin.component(1).mean().x());
    out.push_back(std::move(po));
  }
  return out;
}

}  // namespace fairmix
