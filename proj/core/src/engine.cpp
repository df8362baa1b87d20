#include "fairmix/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fairmix/errors.hpp"

namespace fairmix {

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::EM: return "em";
    case Algorithm::CMEM: return "cmem";
    case Algorithm::E3M: return "e3m";
  }
  return "?";
}

std::string_view to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::Global: return "Global";
    case Outcome::Local: return "Local";
    case Outcome::Boundary: return "Boundary";
    case Outcome::MaxIter: return "MaxIter";
  }
  return "?";
}

std::string_view to_string(StopMode m) noexcept {
  return m == StopMode::TruthAware ? "truth-aware" : "kl-only";
}

std::optional<Algorithm> parse_algorithm(std::string_view text) noexcept {
  if (text == "em") return Algorithm::EM;
  if (text == "cmem") return Algorithm::CMEM;
  if (text == "e3m") return Algorithm::E3M;
  return std::nullopt;
}

void StopSpec::validate() const {
  const bool ok = mu_tol > 0.0 && sigma_tol > 0.0 && weight_tol > 0.0 && kl_tol > 0.0 &&
                  boundary_weight_floor > 0.0 && max_iter >= 1;
  if (!ok) throw StructuralError("stop tolerances must be > 0 and max_iter >= 1");
}

StopSpec large_sample_stop() { return StopSpec{}; }

InnerLoopResult cm_inner_loop(const MixtureModel& m, const EmpiricalDistribution& d,
                              const InnerLoopMode& mode) {
  std::size_t limit = 0;
  double tol = 0.0;
  if (const auto* fixed = std::get_if<FixedRepetitions>(&mode)) {
    if (fixed->count < 1) throw StructuralError("inner loop needs at least one repetition");
    limit = fixed->count;
  } else {
    const auto& conv = std::get<ConvergedMode>(mode);
    if (!(conv.tol > 0.0) || conv.cap < 1) throw StructuralError("converged mode needs tol > 0, cap >= 1");
    limit = conv.cap;
    tol = conv.tol;
  }
  const bool converged_mode = std::holds_alternative<ConvergedMode>(mode);

  MixtureModel current = m;
  Responsibilities r = e_step(current, d);
  std::size_t reps = 0;
  bool settled = false;
  while (true) {
    auto next = m1_step(r, d);
    double delta = 0.0;
    for (std::size_t j = 0; j < next.size(); ++j) delta = std::max(delta, std::abs(next[j] - current.weight(j)));
    current = current.with_weights(std::move(next));
    ++reps;
    if (converged_mode && delta < tol) {
      settled = true;
      break;
    }
    if (reps >= limit) break;
    r = e_step(current, d);
  }
  return InnerLoopResult{std::move(current), std::move(r), reps, converged_mode && !settled};
}

MixtureModel em_iteration(const MixtureModel& m, const EmpiricalDistribution& d,
                          const M2Options& options) {
  const Responsibilities r = e_step(m, d);
  auto weights = m1_step(r, d);
  M2Result m2 = m2_step(r, d, weights, m, options);
  return MixtureModel(std::move(m2.components), std::move(weights));
}

MixtureModel em_iteration(const MixtureModel& m, const EmpiricalDistribution& d) {
  return em_iteration(m, d, default_m2_options(d));
}

std::vector<std::size_t> match_components(const MixtureModel& candidate, const MixtureModel& truth) {
  if (candidate.size() != truth.size()) throw StructuralError("component counts differ");
  if (candidate.dim() != truth.dim()) throw StructuralError("model dimensions differ");
  const std::size_t n = truth.size();
  if (n > 9) throw UnsupportedError("permutation matching is limited to 9 components");
  auto distance = [&](std::size_t c, std::size_t t) {
    const Point& a = candidate.component(c).mean();
    const Point& b = truth.component(t).mean();
    if (a.dim() == 1) return std::abs(a[0] - b[0]);
    return std::hypot(a[0] - b[0], a[1] - b[1]);
  };
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t j = 0; j < n; ++j) cost += distance(perm[j], j);
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

bool check_stop_with_kl(const MixtureModel& m, double kl_bits, const StopSpec& stop,
                        const std::optional<MixtureModel>& truth) {
  if (!(kl_bits < stop.kl_tol)) return false;
  if (stop.mode == StopMode::KLOnly) return true;
  if (!truth) throw StructuralError("truth-aware stop check needs a truth model");
  const auto perm = match_components(m, *truth);
  for (std::size_t j = 0; j < truth->size(); ++j) {
    const GaussianComponent& c = m.component(perm[j]);
    const GaussianComponent& t = truth->component(j);
    for (std::size_t a = 0; a < t.dim(); ++a) {
      if (!(std::abs(c.mean()[a] - t.mean()[a]) < stop.mu_tol)) return false;
      if (!(std::abs(c.sigma(a) - t.sigma(a)) < stop.sigma_tol)) return false;
    }
    if (!(std::abs(m.weight(perm[j]) - truth->weight(j)) < stop.weight_tol)) return false;
  }
  return true;
}

bool check_stop(const MixtureModel& m, const EmpiricalDistribution& d, const StopSpec& stop,
                const std::optional<MixtureModel>& truth) {
  if (stop.mode == StopMode::TruthAware && !truth) {
    throw StructuralError("truth-aware stop check needs a truth model");
  }
  // Infinite tolerance disables the KL condition; skip the grid pass entirely.
  const double kl = std::isinf(stop.kl_tol) ? 0.0 : relative_entropy(d, m);
  return check_stop_with_kl(m, kl, stop, truth);
}

namespace {

double max_motion(const MixtureModel& a, const MixtureModel& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const auto& ca = a.component(j);
    const auto& cb = b.component(j);
    for (std::size_t k = 0; k < ca.dim(); ++k) {
      worst = std::max(worst, std::abs(ca.mean()[k] - cb.mean()[k]));
      worst = std::max(worst, std::abs(ca.sigma(k) - cb.sigma(k)));
    }
    worst = std::max(worst, std::abs(ca.rho() - cb.rho()));
    worst = std::max(worst, std::abs(a.weight(j) - b.weight(j)));
  }
  return worst;
}

RunResult run_loop(Algorithm alg, const MixtureModel& init, const EmpiricalDistribution& d,
                   const StopSpec& limits, const StopPredicate& converged,
                   const RunOptions& options) {
  limits.validate();
  if (init.dim() != d.dim()) throw StructuralError("model and data dimensions differ");
  const M2Options m2_options = default_m2_options(d, limits.boundary_weight_floor);

  RunResult result;
  result.trace.reserve(std::min<std::size_t>(limits.max_iter, 4096) + 1);
  result.trace.push_back(TraceRecord{0, init, evaluate(init, d), false, 0});
  if (converged(init, result.trace.back().diagnostics)) {
    result.outcome = Outcome::Global;
    return result;
  }

  std::size_t boundary_streak = 0;
  std::size_t stall_streak = 0;
  for (std::size_t it = 1; it <= limits.max_iter; ++it) {
    const MixtureModel& current = result.trace.back().model;

    std::optional<Responsibilities> r;
    std::vector<double> weights;
    std::size_t reps = 1;
    if (alg == Algorithm::EM) {
      r = e_step(current, d);
      weights = m1_step(*r, d);
    } else {
      const InnerLoopMode mode = alg == Algorithm::E3M
                                     ? InnerLoopMode{FixedRepetitions{options.e3m_repetitions}}
                                     : InnerLoopMode{options.converged};
      InnerLoopResult inner = cm_inner_loop(current, d, mode);
      if (inner.capped) ++result.capped_inner_loops;
      reps = inner.repetitions;
      weights = inner.model.weights();
      r = std::move(inner.responsibilities);
    }
    result.underflow_rows += r->underflow_rows;
    M2Result m2 = m2_step(*r, d, weights, current, m2_options);
    result.sigma_floor_hits += m2.sigma_floor_hits;
    MixtureModel next(std::move(m2.components), std::move(weights));

    const double motion = max_motion(current, next);
    DiagnosticRecord diag = evaluate(next, d);
    const bool under_floor =
        std::any_of(next.weights().begin(), next.weights().end(),
                    [&](double w) { return w < limits.boundary_weight_floor; });
    result.trace.push_back(TraceRecord{it, std::move(next), diag, m2.boundary(), reps});
    result.iterations_used = it;

    const MixtureModel& latest = result.trace.back().model;
    if (converged(latest, diag)) {
      result.outcome = Outcome::Global;
      return result;
    }
    boundary_streak = under_floor ? boundary_streak + 1 : 0;
    if (boundary_streak >= options.stall_window) {
      result.outcome = Outcome::Boundary;
      return result;
    }
    stall_streak = motion < options.stall_motion ? stall_streak + 1 : 0;
    if (stall_streak >= options.stall_window) {
      result.outcome = Outcome::Local;
      return result;
    }
  }
  result.outcome = Outcome::MaxIter;
  return result;
}

}  // namespace

RunResult run_algorithm(Algorithm alg, const MixtureModel& init, const EmpiricalDistribution& d,
                        const StopSpec& stop, const std::optional<MixtureModel>& truth,
                        const RunOptions& options) {
  stop.validate();
  if (stop.mode == StopMode::TruthAware) {
    if (!truth) throw StructuralError("truth-aware stop mode needs a truth model");
    if (truth->size() != init.size() || truth->dim() != init.dim()) {
      throw StructuralError("truth and initial model are not comparable");
    }
  }
  auto predicate = [&](const MixtureModel& m, const DiagnosticRecord& diag) {
    return check_stop_with_kl(m, std::isinf(stop.kl_tol) ? 0.0 : diag.KL, stop, truth);
  };
  return run_loop(alg, init, d, stop, predicate, options);
}

RunResult run_algorithm(Algorithm alg, const MixtureModel& init, const EmpiricalDistribution& d,
                        const StopSpec& limits, const StopPredicate& converged,
                        const RunOptions& options) {
  if (!converged) throw StructuralError("custom stop predicate is empty");
  return run_loop(alg, init, d, limits, converged, options);
}

}  // namespace fairmix
