#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "fairmix/diagnostics.hpp"
#include "fairmix/empirical.hpp"
#include "fairmix/mixture.hpp"
#include "fairmix/steps.hpp"

namespace fairmix {

enum class Algorithm { EM, CMEM, E3M };
enum class Outcome { Global, Local, Boundary, MaxIter };
enum class StopMode { TruthAware, KLOnly };

std::string_view to_string(Algorithm a) noexcept;
std::string_view to_string(Outcome o) noexcept;
std::string_view to_string(StopMode m) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view text) noexcept;

struct StopSpec {
  double mu_tol = 1.0;
  double sigma_tol = 1.0;
  double weight_tol = 0.033;
  double kl_tol = 0.005;  // bits
  StopMode mode = StopMode::TruthAware;
  std::size_t max_iter = 1000;
  double boundary_weight_floor = 1e-3;

  // Throws StructuralError unless every tolerance is > 0 and max_iter >= 1.
  void validate() const;

  friend bool operator==(const StopSpec&, const StopSpec&) = default;
};

// Large-sample thresholds: (1, 1, 0.033, 0.005 bit).
StopSpec large_sample_stop();

// ---------------------------------------------------------------------------
// CM inner loop

struct FixedRepetitions {
  std::size_t count = 3;
};

struct ConvergedMode {
  double tol = 1e-6;
  std::size_t cap = 1000;
};

using InnerLoopMode = std::variant<FixedRepetitions, ConvergedMode>;

struct InnerLoopResult {
  MixtureModel model;                 // weights updated, components untouched
  Responsibilities responsibilities;  // from the last E-step; model.weights = m1(this)
  std::size_t repetitions = 0;
  bool capped = false;
};

InnerLoopResult cm_inner_loop(const MixtureModel& m, const EmpiricalDistribution& d,
                              const InnerLoopMode& mode);

// One plain EM iteration (E, M1, M2) with default M2 options for d.
MixtureModel em_iteration(const MixtureModel& m, const EmpiricalDistribution& d);
MixtureModel em_iteration(const MixtureModel& m, const EmpiricalDistribution& d,
                          const M2Options& options);

// ---------------------------------------------------------------------------
// Alignment and stop checks

/// perm[j] is the candidate component aligned with truth component j, chosen to
/// minimize the summed mean distance. Ties keep the identity.
std::vector<std::size_t> match_components(const MixtureModel& candidate, const MixtureModel& truth);

bool check_stop(const MixtureModel& m, const EmpiricalDistribution& d, const StopSpec& stop,
                const std::optional<MixtureModel>& truth);

// Same test with a precomputed H(P || P_theta).
bool check_stop_with_kl(const MixtureModel& m, double kl_bits, const StopSpec& stop,
                        const std::optional<MixtureModel>& truth);

// ---------------------------------------------------------------------------
// Runs

struct TraceRecord {
  std::size_t iteration = 0;
  MixtureModel model;
  DiagnosticRecord diagnostics;
  bool boundary = false;                 // some component frozen this iteration
  std::size_t inner_repetitions = 0;     // E+M1 repetitions (1 for EM)
};

struct RunResult {
  std::vector<TraceRecord> trace;  // initial state plus one record per iteration
  Outcome outcome = Outcome::MaxIter;
  std::size_t iterations_used = 0;
  std::size_t underflow_rows = 0;
  std::size_t capped_inner_loops = 0;
  std::size_t sigma_floor_hits = 0;

  const MixtureModel& final_model() const { return trace.back().model; }
};

struct RunOptions {
  ConvergedMode converged{};
  std::size_t e3m_repetitions = 3;
  std::size_t stall_window = 10;          // iterations for Local / Boundary detection
  double stall_motion = 1e-7;             // per-coordinate motion regarded as a stall
};

using StopPredicate = std::function<bool(const MixtureModel&, const DiagnosticRecord&)>;

/// Iterates `alg` from `init` until the stop check passes (Global), a weight
/// stays under the boundary floor for a full window (Boundary), parameters stall
/// (Local), or max_iter M2-steps have run (MaxIter).
RunResult run_algorithm(Algorithm alg, const MixtureModel& init, const EmpiricalDistribution& d,
                        const StopSpec& stop, const std::optional<MixtureModel>& truth = std::nullopt,
                        const RunOptions& options = {});

// Same loop with a caller-supplied convergence rule; `limits` provides max_iter
// and the boundary floor.
RunResult run_algorithm(Algorithm alg, const MixtureModel& init, const EmpiricalDistribution& d,
                        const StopSpec& limits, const StopPredicate& converged,
                        const RunOptions& options = {});

}  // namespace fairmix
