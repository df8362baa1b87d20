#include "fairmix_cli/cli.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "CLI11.hpp"
#include "fairmix/diagnostics.hpp"
#include "fairmix/empirical.hpp"
#include "fairmix/engine.hpp"
#include "fairmix/errors.hpp"
#include "fairmix/experiments.hpp"
#include "fairmix/report.hpp"
#include "fairmix/scenario.hpp"

namespace fairmix::cli {
namespace {

struct Flags {
  std::string scenario;
  std::string out;
  std::string svg;
  std::optional<std::uint64_t> seed;
  std::string algo;
};

// Thrown for problems found after the scenario parsed but before anything ran.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Sink {
  std::unique_ptr<std::ofstream> file;
  std::ostream* csv;
  std::ostream* summary;
};

Sink open_sink(const Flags& flags, const ScenarioFile& s, std::ostream& out, std::ostream& err) {
  std::string path = flags.out;
  if (path.empty() && s.outputs.csv) path = *s.outputs.csv;
  if (path.empty()) return {nullptr, &out, &err};
  auto file = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*file) throw IoError("cannot write " + path);
  std::ostream* csv = file.get();
  return {std::move(file), csv, &out};
}

void apply_overrides(const Flags& flags, ScenarioFile& s) {
  if (flags.seed) {
    s.seed = *flags.seed;
    s.seeds.clear();
  }
  if (!flags.algo.empty()) {
    const auto alg = parse_algorithm(flags.algo);
    if (!alg) throw UsageError("--algo must be one of em, cmem, e3m");
    s.algorithms = {*alg};
  }
}

Provenance provenance_for(const ScenarioFile& s) {
  Provenance meta(scenario_hash(s));
  meta.add("kind", std::string(to_string(s.kind)));
  return meta;
}

std::string join_algorithms(const std::vector<Algorithm>& algs) {
  std::string out;
  for (auto a : algs) {
    if (!out.empty()) out += '+';
    out += to_string(a);
  }
  return out;
}

// ---------------------------------------------------------------------------

int do_sweep(const ScenarioFile& s, Sink& sink) {
  const auto nodes = s.grid->nodes();
  const auto rows = sweep_sigma(*s.truth, nodes, s.sigmas->values());
  auto meta = provenance_for(s);
  meta.add("grid_points", std::to_string(nodes.size()));
  write_sweep_csv(*sink.csv, meta, rows);
  auto best = [&](auto field) {
    return std::max_element(rows.begin(), rows.end(),
                            [&](const SweepRow& a, const SweepRow& b) { return field(a) < field(b); });
  };
  const auto l = best([](const SweepRow& r) { return r.L; });
  const auto q = best([](const SweepRow& r) { return r.Q; });
  *sink.summary << "sweep-sigma: " << rows.size() << " rows; argmax L at sigma=" << format_number(l->sigma)
                << " (L=" << format_number(l->L) << " bits); argmax Q at sigma=" << format_number(q->sigma)
                << " (Q=" << format_number(q->Q) << " bits)\n";
  return kOk;
}

EmpiricalDistribution fit_data(const ScenarioFile& s, Provenance& meta) {
  if (s.grid) {
    meta.add("data", "discretized-truth");
    return discretize_truth(*s.truth, s.grid->nodes());
  }
  if (!s.sample_size || !s.seed) throw UsageError("fit needs either grid or sample_size and seed");
  const auto binning = s.binning.value_or(Binning::Grid);
  meta.add("data", "sample").add("binning", std::string(to_string(binning)));
  return experiment_sample(*s.truth, *s.sample_size, *s.seed, binning);
}

int do_fit(const ScenarioFile& s, Sink& sink) {
  auto meta = provenance_for(s);
  const auto data = fit_data(s, meta);
  std::vector<std::pair<Algorithm, RunResult>> runs;
  for (auto alg : s.algorithms) runs.emplace_back(alg, run_algorithm(alg, *s.init, data, *s.stop, s.truth));
  write_trace_csv(*sink.csv, meta, runs);
  *sink.summary << "fit:";
  for (const auto& [alg, run] : runs) {
    const auto& first = run.trace.front().diagnostics;
    const auto& last = run.trace.back().diagnostics;
    *sink.summary << ' ' << to_string(alg) << '=' << to_string(run.outcome) << '@' << run.iterations_used
                  << " (L " << format_number(first.L) << "->" << format_number(last.L) << ", Q "
                  << format_number(first.Q) << "->" << format_number(last.Q) << ")";
    if (&runs.back().first != &alg) *sink.summary << ';';
  }
  *sink.summary << '\n';
  return kOk;
}

int do_map(const ScenarioFile& s, const Flags& flags, Sink& sink) {
  MapSpec spec{.truth = *s.truth,
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
               .upper_triangle = s.map->upper_triangle,
               .run = {}};
  spec.validate();
  const auto map = init_map(spec);
  auto meta = provenance_for(s);
  const auto grid = default_experiment_grid(*s.truth);
  meta.add("sample_grid", format_number(grid.axis(0).from) + ".." + format_number(grid.axis(0).to))
      .add("algorithms", join_algorithms(s.algorithms));
  write_map_csv(*sink.csv, meta, map);

  std::string svg = flags.svg;
  if (svg.empty() && s.outputs.svg) svg = *s.outputs.svg;
  if (!svg.empty()) emit_heatmap_svg(map, *s.truth, meta, svg);

  *sink.summary << "init-map: " << map.cells.size() << " cells";
  for (const auto& sum : map.summary) {
    *sink.summary << "; " << to_string(sum.algorithm) << " mean=" << format_number(sum.mean_iterations)
                  << " global=" << format_number(sum.global_rate);
  }
  if (map.summary.size() >= 2 && map.summary[0].mean_iterations > 0) {
    *sink.summary << "; ratio " << to_string(map.summary[1].algorithm) << '/' << to_string(map.summary[0].algorithm)
                  << '=' << format_number(map.summary[1].mean_iterations / map.summary[0].mean_iterations);
  }
  *sink.summary << '\n';
  return kOk;
}

int do_trials(const ScenarioFile& s, Sink& sink) {
  const auto seeds = s.seeds.empty() ? derive_seeds(*s.seed, *s.runs) : s.seeds;
  const auto binning = s.binning.value_or(Binning::Grid);
  std::vector<TrialStats> stats;
  for (auto alg : s.algorithms) {
    stats.push_back(repeated_trials(alg, *s.truth, *s.init, *s.sample_size, *s.stop, *s.fast_threshold, seeds,
                                    binning));
  }
  auto meta = provenance_for(s);
  meta.add("binning", std::string(to_string(binning)))
      .add("fast_threshold", std::to_string(*s.fast_threshold));
  write_trials_csv(*sink.csv, meta, stats);
  *sink.summary << "trials: " << seeds.size() << " runs";
  for (const auto& t : stats) {
    *sink.summary << "; " << to_string(t.algorithm) << " invalid/over500/fast=" << t.invalid_count << '/'
                  << t.over500_count << '/' << t.fast_count;
  }
  *sink.summary << '\n';
  return kOk;
}

int do_example3(const ScenarioFile& s, Sink& sink) {
  Example3Config config{.pairs = s.pairs,
                        .sample_size = *s.sample_size,
                        .algorithm = s.algorithms.front(),
                        .max_iter = s.stop->max_iter,
                        .horizontal_tol = s.horizontal_tol.value_or(1.0),
                        .seed = *s.seed,
                        .run = {}};
  const auto pairs = example3_runner(config);
  auto meta = provenance_for(s);
  meta.add("algorithm", std::string(to_string(config.algorithm)))
      .add("horizontal_tol", format_number(config.horizontal_tol));
  write_example3_csv(*sink.csv, meta, pairs);
  *sink.summary << "example3:";
  const char* sep = " ";
  for (const auto& p : pairs) {
    *sink.summary << sep << p.name << '=' << (p.converged ? "converged" : "not-converged") << '@' << p.iterations;
    sep = "; ";
  }
  *sink.summary << '\n';
  return kOk;
}

int run_experiment(ExperimentKind kind, const Flags& flags, std::ostream& out, std::ostream& err) {
  ScenarioFile s;
  try {
    s = load_scenario(flags.scenario);
    if (s.kind != kind) {
      throw UsageError("scenario kind is \"" + std::string(to_string(s.kind)) + "\" but the subcommand is \"" +
                       std::string(to_string(kind)) + "\"");
    }
    if (!flags.svg.empty() && kind != ExperimentKind::InitMap) throw UsageError("--svg applies to init-map only");
    apply_overrides(flags, s);
    validate_scenario(s);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }

  try {
    auto sink = open_sink(flags, s, out, err);
    int code = kOk;
    switch (kind) {
      case ExperimentKind::SweepSigma: code = do_sweep(s, sink); break;
      case ExperimentKind::Fit: code = do_fit(s, sink); break;
      case ExperimentKind::InitMap: code = do_map(s, flags, sink); break;
      case ExperimentKind::Trials: code = do_trials(s, sink); break;
      case ExperimentKind::Example3: code = do_example3(s, sink); break;
    }
    sink.csv->flush();
    if (!*sink.csv) throw IoError("failed while writing CSV output");
    return code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const StructuralError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    err << "experiment failed: " << e.what() << '\n';
    return kExperimentFailure;
  }
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian mixture EM / CM-EM experiments", "fairmix"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  Flags flags;
  struct Entry {
    ExperimentKind kind;
    CLI::App* cmd;
  };
  std::vector<Entry> entries;
  const std::pair<ExperimentKind, const char*> kinds[] = {
      {ExperimentKind::Fit, "Run EM / CM-EM / E3M from one initialization and write the trace"},
      {ExperimentKind::SweepSigma, "Sweep a shared sigma and tabulate L, Q, H(Y|X) and KL"},
      {ExperimentKind::InitMap, "Iteration counts over a grid of initial means"},
      {ExperimentKind::Trials, "Repeated runs on fresh samples with outcome tallies"},
      {ExperimentKind::Example3, "Two-dimensional pair fits"},
  };
  for (const auto& [kind, help] : kinds) {
    auto* cmd = app.add_subcommand(std::string(to_string(kind)), help);
    cmd->add_option("--scenario", flags.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", flags.out, "CSV output path (default: scenario outputs.csv, else stdout)");
    if (kind == ExperimentKind::InitMap) cmd->add_option("--svg", flags.svg, "Heatmap SVG output path");
    cmd->add_option("--seed", flags.seed, "Override the scenario seed");
    cmd->add_option("--algo", flags.algo, "Override the algorithm list")
        ->check(CLI::IsMember({"em", "cmem", "e3m"}));
    entries.push_back({kind, cmd});
  }
  auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream r;
    const int code = app.exit(e, o, r);
    out << o.str();
    err << r.str();
    return code == 0 ? kOk : kValidationError;
  }

  if (selftest->parsed()) return run_selftest(out) ? kOk : kExperimentFailure;
  for (const auto& e : entries) {
    if (e.cmd->parsed()) return run_experiment(e.kind, flags, out, err);
  }
  return kValidationError;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run_cli(args, out, err);
}

}  // namespace fairmix::cli
