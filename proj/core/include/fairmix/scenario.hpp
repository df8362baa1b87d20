#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fairmix/empirical.hpp"
#include "fairmix/engine.hpp"
#include "fairmix/experiments.hpp"
#include "fairmix/mixture.hpp"

namespace fairmix {

inline constexpr int kScenarioSchemaVersion = 1;

enum class ExperimentKind { Fit, SweepSigma, InitMap, Trials, Example3 };

std::string_view to_string(ExperimentKind k) noexcept;
std::optional<ExperimentKind> parse_experiment_kind(std::string_view text) noexcept;

// A map axis: either {from, to, step} or an explicit list of values.
struct AxisSpec {
  std::variant<AxisRange, std::vector<double>> spec;

  std::vector<double> values() const;
  friend bool operator==(const AxisSpec&, const AxisSpec&) = default;
};

struct MapRanges {
  AxisSpec mu1;
  AxisSpec mu2;
  double init_sigma = 7.0;
  std::vector<double> init_weights{0.5, 0.5};
  std::size_t trials_per_cell = 3;
  bool upper_triangle = false;

  friend bool operator==(const MapRanges&, const MapRanges&) = default;
};

struct OutputPaths {
  std::optional<std::string> csv;
  std::optional<std::string> svg;

  friend bool operator==(const OutputPaths&, const OutputPaths&) = default;
};

/// One experiment description. Which optional members are required depends on
/// `kind`; parse_scenario enforces that.
struct ScenarioFile {
  int schema_version = kScenarioSchemaVersion;
  ExperimentKind kind = ExperimentKind::Fit;
  std::optional<std::string> description;
  std::optional<MixtureModel> truth;
  std::optional<MixtureModel> init;
  std::optional<RegularGrid> grid;
  std::optional<AxisRange> sigmas;
  std::optional<MapRanges> map;
  std::optional<std::size_t> sample_size;
  std::optional<Binning> binning;
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  std::optional<StopSpec> stop;
  std::vector<Algorithm> algorithms;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> fast_threshold;
  std::vector<PairScenario> pairs;
  std::optional<double> horizontal_tol;
  OutputPaths outputs;

  friend bool operator==(const ScenarioFile&, const ScenarioFile&) = default;
};

/// Parses and validates a scenario document. Throws ParseError naming the
/// offending location ("line:col" for syntax, a JSON pointer otherwise).
ScenarioFile parse_scenario(std::string_view text);

// Structural checks applied by parse_scenario; exposed for programmatic builds.
void validate_scenario(const ScenarioFile& s);

ScenarioFile load_scenario(const std::filesystem::path& path);

// Pretty JSON; parse_scenario(emit_scenario(s)) == s.
std::string emit_scenario(const ScenarioFile& s);

// FNV-1a over the compact canonical form.
std::uint64_t scenario_hash(const ScenarioFile& s);

}  // namespace fairmix
