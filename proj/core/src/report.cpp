#include "fairmix/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fairmix/errors.hpp"

namespace fairmix {

std::string_view tool_version() noexcept { return FAIRMIX_VERSION; }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // no "-0"
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 6);
  return std::string(buf.data(), res.ptr);
}

Provenance::Provenance(std::uint64_t scenario_hash) {
  std::array<char, 17> hex{};
  std::snprintf(hex.data(), hex.size(), "%016llx", static_cast<unsigned long long>(scenario_hash));
  fields_.emplace_back("tool", "fairmix");
  fields_.emplace_back("version", std::string(tool_version()));
  fields_.emplace_back("scenario_hash", hex.data());
}

Provenance& Provenance::add(std::string key, std::string value) {
  for (char& c : value) {
    if (c == ' ' || c == '\n' || c == ',') c = '_';
  }
  fields_.emplace_back(std::move(key), std::move(value));
  return *this;
}

std::string Provenance::line() const {
  std::string out;
  for (const auto& [k, v] : fields_) {
    if (!out.empty()) out += ' ';
    out += k + "=" + v;
  }
  return out;
}

CsvWriter::CsvWriter(std::ostream& out, const Provenance& meta, std::vector<std::string> header)
    : out_(out), columns_(header.size()) {
  out_ << "# " << meta.line() << '\n';
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw StructuralError("CSV row has the wrong number of cells");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) out_ << ',';
    out_ << cells[k];
  }
  out_ << '\n';
}

void write_sweep_csv(std::ostream& out, const Provenance& meta, std::span<const SweepRow> rows) {
  CsvWriter csv(out, meta, {"sigma", "L_bits", "Q_bits", "Hcond_bits", "KL_bits"});
  for (const auto& r : rows) {
    csv.row({format_number(r.sigma), format_number(r.L), format_number(r.Q), format_number(r.H_cond),
             format_number(r.KL)});
  }
}

namespace {

std::vector<std::string> parameter_header(const MixtureModel& m) {
  std::vector<std::string> h;
  for (std::size_t j = 1; j <= m.size(); ++j) {
    const std::string s = std::to_string(j);
    if (m.dim() == 1) {
      h.insert(h.end(), {"mu_" + s, "sigma_" + s, "weight_" + s});
    } else {
      h.insert(h.end(), {"mu_x_" + s, "mu_y_" + s, "sigma_x_" + s, "sigma_y_" + s, "rho_" + s,
                         "weight_" + s});
    }
  }
  return h;
}

void append_parameters(std::vector<std::string>& row, const MixtureModel& m) {
  for (std::size_t j = 0; j < m.size(); ++j) {
    const auto& c = m.component(j);
    if (c.dim() == 1) {
      row.insert(row.end(), {format_number(c.mean()[0]), format_number(c.sigma(0))});
    } else {
      row.insert(row.end(), {format_number(c.mean()[0]), format_number(c.mean()[1]),
                             format_number(c.sigma(0)), format_number(c.sigma(1)),
                             format_number(c.rho())});
    }
    row.push_back(format_number(m.weight(j)));
  }
}

}  // namespace

void write_trace_csv(std::ostream& out, const Provenance& meta,
                     std::span<const std::pair<Algorithm, RunResult>> runs) {
  if (runs.empty()) throw StructuralError("no runs to write");
  std::vector<std::string> header{"algorithm", "iteration", "L_bits", "Q_bits", "Hcond_bits",
                                  "KL_bits", "mismatch", "inner_reps"};
  const auto params = parameter_header(runs.front().second.final_model());
  header.insert(header.end(), params.begin(), params.end());
  CsvWriter csv(out, meta, header);
  for (const auto& [alg, run] : runs) {
    for (const auto& rec : run.trace) {
      const auto& d = rec.diagnostics;
      std::vector<std::string> row{std::string(to_string(alg)), std::to_string(rec.iteration),
                                   format_number(d.L), format_number(d.Q), format_number(d.H_cond),
                                   format_number(d.KL), format_number(d.mismatch),
                                   std::to_string(rec.inner_repetitions)};
      append_parameters(row, rec.model);
      csv.row(row);
    }
  }
}

void write_map_csv(std::ostream& out, const Provenance& meta, const MapResult& map) {
  std::vector<std::string> header{"mu1", "mu2", "init_mu1", "init_mu2", "region", "dist_fair", "dist_equal"};
  std::vector<Algorithm> algs;
  if (!map.cells.empty()) {
    for (const auto& a : map.cells.front().per_algorithm) algs.push_back(a.algorithm);
  }
  for (auto a : algs) {
    const std::string n(to_string(a));
    header.insert(header.end(), {n + "_median_iterations", n + "_outcome", n + "_trials"});
  }
  CsvWriter csv(out, meta, header);
  for (const auto& cell : map.cells) {
    std::vector<std::string> row{format_number(cell.mu1),       format_number(cell.mu2),
                                 format_number(cell.init_mu1),  format_number(cell.init_mu2),
                                 std::string(to_string(cell.region.label)),
                                 format_number(cell.region.dist_fair),
                                 format_number(cell.region.dist_equal)};
    for (const auto& a : cell.per_algorithm) {
      std::string trials;
      for (std::size_t k = 0; k < a.trial_iterations.size(); ++k) {
        if (k) trials += ';';
        trials += std::to_string(a.trial_iterations[k]);
      }
      row.insert(row.end(), {std::to_string(a.median_iterations),
                             std::string(to_string(a.modal_outcome)), trials});
    }
    csv.row(row);
  }
}

void write_trials_csv(std::ostream& out, const Provenance& meta, std::span<const TrialStats> stats) {
  CsvWriter csv(out, meta, {"algorithm", "run", "seed", "iterations", "outcome", "fast"});
  for (const auto& s : stats) {
    for (std::size_t k = 0; k < s.runs; ++k) {
      const bool fast = s.outcomes[k] == Outcome::Global && s.iterations[k] < s.fast_threshold;
      csv.row({std::string(to_string(s.algorithm)), std::to_string(k), std::to_string(s.seeds[k]),
               std::to_string(s.iterations[k]), std::string(to_string(s.outcomes[k])),
               fast ? "1" : "0"});
    }
  }
}

void write_example3_csv(std::ostream& out, const Provenance& meta,
                        std::span<const PairOutcome> pairs) {
  if (pairs.empty()) throw StructuralError("no pairs to write");
  std::vector<std::string> header{"pair", "iterations", "converged", "outcome", "horizontal_distance"};
  const auto params = parameter_header(pairs.front().run.final_model());
  header.insert(header.end(), params.begin(), params.end());
  CsvWriter csv(out, meta, header);
  for (const auto& p : pairs) {
    std::vector<std::string> row{p.name, std::to_string(p.iterations), p.converged ? "1" : "0",
                                 std::string(to_string(p.run.outcome)),
                                 format_number(p.horizontal_distance)};
    append_parameters(row, p.run.final_model());
    csv.row(row);
  }
}

// ---------------------------------------------------------------------------
// SVG heatmap

namespace {

struct Rgb {
  double r, g, b;
};

// Sampled viridis ramp.
constexpr std::array<Rgb, 6> kRamp{{{68, 1, 84},
                                    {65, 68, 135},
                                    {42, 120, 142},
                                    {34, 168, 132},
                                    {122, 209, 81},
                                    {253, 231, 37}}};

std::string ramp_color(double t) {
  t = std::clamp(t, 0.0, 1.0) * static_cast<double>(kRamp.size() - 1);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(t), kRamp.size() - 2);
  const double f = t - static_cast<double>(k);
  const Rgb& a = kRamp[k];
  const Rgb& b = kRamp[k + 1];
  std::array<char, 8> buf{};
  std::snprintf(buf.data(), buf.size(), "#%02x%02x%02x",
                static_cast<int>(std::lround(a.r + f * (b.r - a.r))),
                static_cast<int>(std::lround(a.g + f * (b.g - a.g))),
                static_cast<int>(std::lround(a.b + f * (b.b - a.b))));
  return buf.data();
}

// Piecewise-linear map from axis value to pixel position of the cell centers.
class AxisMap {
 public:
  AxisMap(std::vector<double> values, double first_px, double step_px)
      : values_(std::move(values)), first_px_(first_px), step_px_(step_px) {
    std::sort(values_.begin(), values_.end());
    values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
  }

  std::size_t size() const { return values_.size(); }
  std::size_t index(double v) const {
    return static_cast<std::size_t>(std::lower_bound(values_.begin(), values_.end(), v) - values_.begin());
  }
  const std::vector<double>& values() const { return values_; }

  double px(double v) const {
    if (values_.size() == 1) return first_px_ + (v - values_[0]) * step_px_ / 10.0;
    auto it = std::upper_bound(values_.begin(), values_.end(), v);
    std::size_t k = it == values_.begin() ? 0 : static_cast<std::size_t>(it - values_.begin()) - 1;
    k = std::min(k, values_.size() - 2);
    const double f = (v - values_[k]) / (values_[k + 1] - values_[k]);
    return first_px_ + (static_cast<double>(k) + f) * step_px_;
  }

 private:
  std::vector<double> values_;
  double first_px_;
  double step_px_;
};

std::string fmt_px(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.2f", v);
  return buf.data();
}

}  // namespace

std::string render_heatmap_svg(const MapResult& map, const MixtureModel& truth,
                               const Provenance& meta) {
  if (map.cells.empty()) throw StructuralError("cannot render an empty map");
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& c : map.cells) {
    xs.push_back(c.mu1);
    ys.push_back(c.mu2);
  }
  const std::size_t n_cols_guess = std::max<std::size_t>(1, [&] {
    auto v = xs;
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
  }());
  const double cell = std::clamp(720.0 / static_cast<double>(n_cols_guess), 18.0, 90.0);
  const double left = 80.0;
  const double top = 50.0;

  AxisMap xmap(xs, left + cell / 2.0, cell);
  // Rows run top-down in pixels while mu2 increases upward.
  AxisMap yindex(ys, 0.0, 1.0);
  const std::size_t nx = xmap.size();
  const std::size_t ny = yindex.size();
  const double plot_w = cell * static_cast<double>(nx);
  const double plot_h = cell * static_cast<double>(ny);
  const double width = std::max(left + plot_w + 40.0, 620.0);
  const double height = top + plot_h + 90.0;
  auto ypx = [&](double v) { return top + plot_h - cell / 2.0 - yindex.px(v) * cell; };

  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto& c : map.cells) {
    const double v = std::log10(1.0 + static_cast<double>(c.per_algorithm.front().median_iterations));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const bool show_pairs = cell >= 44.0;
  const double font = std::clamp(cell / 5.0, 7.0, 14.0);

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<!-- " << meta.line() << " -->\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt_px(width)
    << "\" height=\"" << fmt_px(height) << "\" viewBox=\"0 0 " << fmt_px(width) << ' '
    << fmt_px(height) << "\" font-family=\"sans-serif\">\n";
  s << "<defs>\n"
    << "<pattern id=\"hatch\" patternUnits=\"userSpaceOnUse\" width=\"6\" height=\"6\" "
       "patternTransform=\"rotate(45)\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" "
       "stroke=\"#000000\" stroke-width=\"1.5\" stroke-opacity=\"0.6\"/></pattern>\n"
    << "<clipPath id=\"plot\"><rect x=\"" << fmt_px(left) << "\" y=\"" << fmt_px(top)
    << "\" width=\"" << fmt_px(plot_w) << "\" height=\"" << fmt_px(plot_h) << "\"/></clipPath>\n"
    << "</defs>\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << fmt_px(width) << "\" height=\"" << fmt_px(height)
    << "\" fill=\"#ffffff\"/>\n";

  std::string names;
  for (std::size_t a = 0; a < std::min<std::size_t>(2, map.cells.front().per_algorithm.size()); ++a) {
    if (a) names += "/";
    std::string n(to_string(map.cells.front().per_algorithm[a].algorithm));
    for (char& ch : n) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    names += n;
  }
  s << "<text x=\"" << fmt_px(left) << "\" y=\"24\" font-size=\"15\">Median iterations by initial "
    << "means (" << names << ")</text>\n";

  for (const auto& c : map.cells) {
    const double x = xmap.px(c.mu1) - cell / 2.0;
    const double y = ypx(c.mu2) - cell / 2.0;
    const auto& first = c.per_algorithm.front();
    const double v = std::log10(1.0 + static_cast<double>(first.median_iterations));
    const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
    s << "<g class=\"cell\" data-mu1=\"" << format_number(c.mu1) << "\" data-mu2=\""
      << format_number(c.mu2) << "\">";
    s << "<rect x=\"" << fmt_px(x) << "\" y=\"" << fmt_px(y) << "\" width=\"" << fmt_px(cell)
      << "\" height=\"" << fmt_px(cell) << "\" fill=\"" << ramp_color(t)
      << "\" stroke=\"#ffffff\" stroke-width=\"0.5\"/>";
    const bool bad = std::any_of(c.per_algorithm.begin(), c.per_algorithm.end(),
                                 [](const AlgorithmCell& a) { return a.modal_outcome != Outcome::Global; });
    if (bad) {
      s << "<rect class=\"hatched\" x=\"" << fmt_px(x) << "\" y=\"" << fmt_px(y) << "\" width=\""
        << fmt_px(cell) << "\" height=\"" << fmt_px(cell) << "\" fill=\"url(#hatch)\"/>";
    }
    std::string label = std::to_string(first.median_iterations);
    if (show_pairs && c.per_algorithm.size() >= 2) {
      label += "/" + std::to_string(c.per_algorithm[1].median_iterations);
    }
    if (show_pairs || c.per_algorithm.size() == 1 || map.cells.size() == 1) {
      s << "<text x=\"" << fmt_px(x + cell / 2.0) << "\" y=\"" << fmt_px(y + cell / 2.0 + font / 3.0)
        << "\" font-size=\"" << fmt_px(font) << "\" text-anchor=\"middle\" fill=\""
        << (t > 0.6 ? "#000000" : "#ffffff") << "\">" << label << "</text>";
    }
    s << "</g>\n";
  }

  // Reference lines through the truth: mu2 = mu1 and mu1 + mu2 = mu1* + mu2*.
  const double sum = truth.component(0).mean()[0] + truth.component(1).mean()[0];
  const double vmin = std::min(xs.front(), *std::min_element(ys.begin(), ys.end())) - 1000.0;
  const double vmax = std::max(xs.back(), *std::max_element(ys.begin(), ys.end())) + 1000.0;
  auto polyline = [&](auto fy, const char* color, const char* dash, const char* cls) {
    s << "<polyline class=\"" << cls << "\" clip-path=\"url(#plot)\" fill=\"none\" stroke=\""
      << color << "\" stroke-width=\"2\"" << dash << " points=\"";
    const auto& xv = xmap.values();
    std::vector<double> samples{vmin};
    for (double v : xv) samples.push_back(v);
    samples.push_back(vmax);
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
      for (int step = 0; step < 16; ++step) {
        const double v = samples[k] + (samples[k + 1] - samples[k]) * step / 16.0;
        s << fmt_px(xmap.px(v)) << ',' << fmt_px(ypx(fy(v))) << ' ';
      }
    }
    s << fmt_px(xmap.px(vmax)) << ',' << fmt_px(ypx(fy(vmax))) << "\"/>\n";
  };
  polyline([](double v) { return v; }, "#d62728", "", "equality-line");
  polyline([sum](double v) { return sum - v; }, "#2ca02c", " stroke-dasharray=\"6,4\"", "fair-line");

  s << "<rect x=\"" << fmt_px(left) << "\" y=\"" << fmt_px(top) << "\" width=\"" << fmt_px(plot_w)
    << "\" height=\"" << fmt_px(plot_h) << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  for (double v : xmap.values()) {
    s << "<text x=\"" << fmt_px(xmap.px(v)) << "\" y=\"" << fmt_px(top + plot_h + 16.0)
      << "\" font-size=\"10\" text-anchor=\"middle\">" << format_number(v) << "</text>\n";
  }
  for (double v : yindex.values()) {
    s << "<text x=\"" << fmt_px(left - 6.0) << "\" y=\"" << fmt_px(ypx(v) + 3.0)
      << "\" font-size=\"10\" text-anchor=\"end\">" << format_number(v) << "</text>\n";
  }
  s << "<text x=\"" << fmt_px(left + plot_w / 2.0) << "\" y=\"" << fmt_px(top + plot_h + 36.0)
    << "\" font-size=\"12\" text-anchor=\"middle\">initial mu1</text>\n";
  s << "<text x=\"18\" y=\"" << fmt_px(top + plot_h / 2.0)
    << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << fmt_px(top + plot_h / 2.0) << ")\">initial mu2</text>\n";
  s << "<text x=\"" << fmt_px(left) << "\" y=\"" << fmt_px(top + plot_h + 58.0)
    << "\" font-size=\"10\">color: log median iterations (" << names.substr(0, names.find('/'))
    << "); hatched: outcome not Global; solid: mu1 = mu2; dashed: mu1 + mu2 = "
    << format_number(sum) << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

void emit_heatmap_svg(const MapResult& map, const MixtureModel& truth, const Provenance& meta,
                      const std::filesystem::path& path) {
  const std::string svg = render_heatmap_svg(map, truth, meta);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << svg;
  if (!out) throw IoError("failed while writing " + path.string());
}

}  // namespace fairmix
