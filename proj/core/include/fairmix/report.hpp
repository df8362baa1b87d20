#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairmix/diagnostics.hpp"
#include "fairmix/engine.hpp"
#include "fairmix/experiments.hpp"

namespace fairmix {

std::string_view tool_version() noexcept;

// 6 significant digits, '.' separator, locale independent.
std::string format_number(double v);

/// Key/value metadata rendered as one line: "tool=fairmix version=... k=v ...".
class Provenance {
 public:
  explicit Provenance(std::uint64_t scenario_hash);

  Provenance& add(std::string key, std::string value);
  std::string line() const;

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

/// Comma-separated rows with a '#' metadata line and a header. Cells are
/// written verbatim; callers pass pre-formatted numbers.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const Provenance& meta, std::vector<std::string> header);

  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

void write_sweep_csv(std::ostream& out, const Provenance& meta, std::span<const SweepRow> rows);

// One row per trace record; component parameter columns follow the diagnostics.
void write_trace_csv(std::ostream& out, const Provenance& meta,
                     std::span<const std::pair<Algorithm, RunResult>> runs);

void write_map_csv(std::ostream& out, const Provenance& meta, const MapResult& map);

void write_trials_csv(std::ostream& out, const Provenance& meta, std::span<const TrialStats> stats);

void write_example3_csv(std::ostream& out, const Provenance& meta,
                        std::span<const PairOutcome> pairs);

/// SVG 1.1 heatmap of the map: color = median iterations of the first
/// algorithm on a log scale, labels "a/b" for the first two algorithms when
/// cells are wide enough, hatching where any modal outcome is not Global, and
/// the 45/135 degree reference lines through the truth.
std::string render_heatmap_svg(const MapResult& map, const MixtureModel& truth,
                               const Provenance& meta);

// Throws IoError when the path cannot be written.
void emit_heatmap_svg(const MapResult& map, const MixtureModel& truth, const Provenance& meta,
                      const std::filesystem::path& path);

}  // namespace fairmix
