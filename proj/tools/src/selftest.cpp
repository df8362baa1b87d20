#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fairmix/diagnostics.hpp"
#include "fairmix/empirical.hpp"
#include "fairmix/engine.hpp"
#include "fairmix/experiments.hpp"
#include "fairmix/scenario.hpp"
#include "fairmix_cli/cli.hpp"

namespace fairmix::cli {
namespace {

struct Check {
  std::string name;
  std::function<bool()> body;
};

EmpiricalDistribution example1_data() {
  const RegularGrid grid(AxisRange{1, 150, 1});
  return discretize_truth(binary_mixture(65, 95, 15, 15, 0.5), grid.nodes());
}

}  // namespace

bool run_selftest(std::ostream& out) {
  const auto data = example1_data();
  const auto truth = binary_mixture(65, 95, 15, 15, 0.5);

  const std::vector<Check> checks{
      {"q-equals-l-minus-h",
       [&] {
         for (double s : {8.0, 11.25, 15.0, 22.0}) {
           const auto m = equal_sigma_model(truth, s);
           const double gap = complete_q(m, data) - (log_likelihood(m, data) - conditional_entropy(m, data));
           if (std::abs(gap) > 1e-9) return false;
         }
         return true;
       }},
      {"kl-nonnegative-and-zero-at-truth",
       [&] {
         const double at_truth = relative_entropy(data, truth);
         const double off = relative_entropy(data, binary_mixture(70, 90, 12, 18, 0.4));
         return std::abs(at_truth) < 1e-9 && off > 0.0;
       }},
      {"label-swap-symmetry",
       [&] {
         const auto m = binary_mixture(60, 100, 12, 17, 0.3);
         const std::vector<std::size_t> swap{1, 0};
         const auto a = evaluate(m, data);
         const auto b = evaluate(m.permuted(swap), data);
         return std::abs(a.L - b.L) < 1e-12 && std::abs(a.Q - b.Q) < 1e-12 && std::abs(a.KL - b.KL) < 1e-12;
       }},
      {"responsibility-rows-sum-to-one",
       [&] {
         const auto r = e_step(binary_mixture(20, 140, 3, 3, 0.5), data);
         for (std::size_t i = 0; i < r.rows(); ++i) {
           double sum = 0;
           for (double v : r.row(i)) sum += v;
           if (std::abs(sum - 1.0) > 1e-12) return false;
         }
         return true;
       }},
      {"em-likelihood-monotone",
       [&] {
         auto m = binary_mixture(80, 81, 7, 7, 0.5);
         double prev = log_likelihood(m, data);
         for (int k = 0; k < 60; ++k) {
           m = em_iteration(m, data);
           const double next = log_likelihood(m, data);
           if (next < prev - 1e-9) return false;
           prev = next;
         }
         return true;
       }},
      {"cm-inner-loop-fixed-point",
       [&] {
         const auto res = cm_inner_loop(binary_mixture(80, 110, 9, 11, 0.2), data, ConvergedMode{});
         return !res.capped && channel_mismatch(res.model, data) < 1e-6;
       }},
      {"region-labels",
       [&] {
         const auto t = binary_mixture(100, 125, 10, 10, 0.7);
         return region_classify(80, 145, t).label == RegionLabel::GLLG &&
                region_classify(80, 95, t).label == RegionLabel::GGLL &&
                region_classify(110, 115, t).label == RegionLabel::LGGL &&
                region_classify(90, 110, t).label == RegionLabel::GLGL;
       }},
      {"scenario-round-trip",
       [&] {
         ScenarioFile s;
         s.kind = ExperimentKind::SweepSigma;
         s.truth = truth;
         s.grid = RegularGrid(AxisRange{1, 150, 1});
         s.sigmas = AxisRange{5, 30, 0.25};
         return parse_scenario(emit_scenario(s)) == s;
       }},
  };

  bool all = true;
  for (const auto& c : checks) {
    bool ok = false;
    std::string note;
    try {
      ok = c.body();
    } catch (const std::exception& e) {
      note = std::string(" (") + e.what() + ")";
    }
    out << (ok ? "PASS " : "FAIL ") << c.name << note << '\n';
    all = all && ok;
  }
  out << "selftest: " << (all ? "all checks passed" : "failures present") << '\n';
  return all;
}

}  // namespace fairmix::cli
