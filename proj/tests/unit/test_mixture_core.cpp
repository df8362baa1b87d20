#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "doctest.h"
#include "fairmix/empirical.hpp"
#include "fairmix/errors.hpp"
#include "fairmix/mixture.hpp"
#include "fairmix/random.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

using namespace fairmix;
using doctest::Approx;

TEST_SUITE("mixture-core") {
  TEST_CASE("point dimensions and comparison") {
    const Point a(1.0);
    const Point b(1.0, 2.0);
    CHECK(a.dim() == 1);
    CHECK(b.dim() == 2);
    CHECK(b.y() == 2.0);
    CHECK(a == Point(1.0));
    CHECK_THROWS_AS(require_same_dim(a, b), StructuralError);
  }

  TEST_CASE("component density at the mode and in the tail") {
    CHECK(component_density(GaussianComponent::univariate(0, 1), Point(0.0)) ==
          Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(component_density(GaussianComponent::bivariate(Point(0, 0), 1, 1, 0), Point(0, 0)) ==
          Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(component_density(GaussianComponent::univariate(100, 10), Point(125.0)) ==
          Approx(oracle::normal_pdf(2.5, 0, 1) / 10.0).epsilon(1e-13));
  }

  TEST_CASE("correlated bivariate density matches the closed form") {
    const auto c = GaussianComponent::bivariate(Point(50, 30), 15, 4, 0.3);
    for (auto [x, y] : {std::pair{50.0, 30.0}, {40.0, 33.0}, {71.0, 22.5}, {10.0, 45.0}}) {
      CHECK(component_density(c, Point(x, y)) ==
            Approx(oracle::bivariate_pdf(x, y, 50, 30, 15, 4, 0.3)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(component_density(c, Point(1.0)), StructuralError);
  }

  TEST_CASE("component parameters are validated") {
    CHECK_THROWS_AS(GaussianComponent::univariate(0, 0), StructuralError);
    CHECK_THROWS_AS(GaussianComponent::univariate(0, -1), StructuralError);
    CHECK_THROWS_AS(GaussianComponent::bivariate(Point(0, 0), 1, 1, 1.0), StructuralError);
    CHECK_THROWS_AS(GaussianComponent::bivariate(Point(0, 0), 1, 1, -1.2), StructuralError);
    CHECK_THROWS_AS(GaussianComponent::bivariate(Point(0, 0), 1, 0, 0.0), StructuralError);
  }

  TEST_CASE("mixture model invariants") {
    const auto c = GaussianComponent::univariate(0, 1);
    CHECK_THROWS_AS(MixtureModel({}, {}), StructuralError);
    CHECK_THROWS_AS(MixtureModel({c, c}, {1.0}), StructuralError);
    CHECK_THROWS_AS(MixtureModel({c, c}, {1.2, -0.2}), StructuralError);
    CHECK_THROWS_AS(MixtureModel({c, GaussianComponent::bivariate(Point(0, 0), 1, 1, 0)}, {0.5, 0.5}),
                    StructuralError);
    try {
      MixtureModel({c, c}, {0.6, 0.6});
      FAIL("weights summing to 1.2 were accepted");
    } catch (const StructuralError& e) {
      CHECK(std::string(e.what()).find("weights must sum to 1") != std::string::npos);
    }
    const MixtureModel ok({c, c}, {0.3, 0.7});
    CHECK(ok.size() == 2);
    CHECK(ok.dim() == 1);
  }

  TEST_CASE("predictive density") {
    const Point x(100.0);
    const MixtureModel single({GaussianComponent::univariate(3, 2)}, {1.0});
    CHECK(predictive_density(single, Point(4.0)) == Approx(component_density(single.component(0), Point(4.0))));

    const auto twin = binary_mixture(5, 5, 2, 2, 0.5);
    CHECK(predictive_density(twin, Point(6.0)) == Approx(component_density(twin.component(0), Point(6.0))));

    const auto m = fixtures::example2_truth();
    CHECK(predictive_density(m, x) ==
          Approx(0.7 * oracle::normal_pdf(0, 0, 1) / 10 + 0.3 * oracle::normal_pdf(2.5, 0, 1) / 10).epsilon(1e-13));
    CHECK_THROWS_AS(predictive_density(m, Point(1, 2)), StructuralError);
  }

  TEST_CASE("log predictive density stays finite where the density underflows") {
    const auto m = binary_mixture(0, 1, 0.01, 0.01, 0.5);
    CHECK(predictive_density(m, Point(50.0)) == 0.0);
    const double lp = log_predictive_density(m, Point(50.0));
    CHECK(std::isfinite(lp));
    // Dominated by the nearer component.
    CHECK(lp == Approx(std::log(0.5) + m.component(1).log_density(Point(50.0))).epsilon(1e-12));
    CHECK(log_predictive_density(m, Point(0.02)) == Approx(std::log(predictive_density(m, Point(0.02)))));
  }

  TEST_CASE("label swap leaves the predictive density unchanged") {
    std::mt19937_64 rng(17);
    const std::vector<std::size_t> swap{1, 0};
    for (int k = 0; k < 50; ++k) {
      const auto m = fixtures::random_binary(rng);
      const auto s = m.permuted(swap);
      CHECK(s.weight(0) == m.weight(1));
      for (double x = 0; x <= 200; x += 7.5) {
        CHECK(std::abs(predictive_density(m, Point(x)) - predictive_density(s, Point(x))) <= 1e-12);
      }
    }
  }

  TEST_CASE("axis ranges and grids") {
    CHECK(AxisRange{1, 150, 1}.count() == 150);
    CHECK(AxisRange{5, 30, 0.25}.count() == 101);
    CHECK(AxisRange{5, 30, 0.25}.values().back() == Approx(30.0));
    CHECK_THROWS_AS(AxisRange({1, 0, 1}).count(), StructuralError);
    CHECK_THROWS_AS(AxisRange({0, 1, 0}).count(), StructuralError);

    const RegularGrid g(AxisRange{0, 2, 1}, AxisRange{10, 11, 1});
    const auto nodes = g.nodes();
    REQUIRE(nodes.size() == 6);
    CHECK(nodes[1] == Point(1, 10));  // x varies fastest
    CHECK(nodes[3] == Point(0, 11));
    CHECK(g.nearest(Point(1.4, 10.6)) == 4);
    CHECK(g.nearest(Point(-50, 99)) == 3);

    const auto eg = default_experiment_grid(fixtures::example2_truth());
    CHECK(eg.axis(0).from == 50);
    CHECK(eg.axis(0).to == 175);
    CHECK(eg.axis(0).step == 1);
  }

  TEST_CASE("empirical distribution invariants") {
    CHECK_THROWS_AS(EmpiricalDistribution::grid({Point(0.0), Point(1.0)}, {0.5, 0.6}), StructuralError);
    CHECK_THROWS_AS(EmpiricalDistribution::grid({Point(0.0), Point(0.0)}, {0.5, 0.5}), StructuralError);
    CHECK_THROWS_AS(EmpiricalDistribution::grid({Point(0.0), Point(1.0)}, {1.5, -0.5}), StructuralError);
    const auto s = EmpiricalDistribution::sample({Point(1.0), Point(1.0), Point(4.0), Point(5.0)});
    CHECK(s.mode() == SupportMode::Sample);
    CHECK(s.probs()[2] == 0.25);
    CHECK(s.sample_size() == 4);
    CHECK(s.extent()[0] == 4.0);
  }

  TEST_CASE("discretize_truth") {
    const auto m = fixtures::example1_truth();
    SUBCASE("single node") {
      const std::vector<Point> one{Point(70.0)};
      const auto d = discretize_truth(m, one);
      CHECK(d.probs() == std::vector<double>{1.0});
    }
    SUBCASE("mirror symmetry") {
      // Means mirrored about 80 on the grid 0..160.
      const auto sym = binary_mixture(65, 95, 15, 15, 0.5);
      const auto d = discretize_truth(sym, RegularGrid(AxisRange{0, 160, 1}).nodes());
      for (std::size_t i = 0; i < d.size(); ++i) CHECK(d.probs()[i] == Approx(d.probs()[d.size() - 1 - i]).epsilon(1e-12));
    }
    SUBCASE("example 1 matches direct normalization") {
      const auto d = fixtures::example1_data();
      const auto ref = oracle::discretize(fixtures::to_oracle(m), 1, 150, 1);
      double sum = 0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(d.probs()[i] == Approx(ref.p[i]).epsilon(1e-12));
        sum += d.probs()[i];
      }
      CHECK(std::abs(sum - 1.0) < 1e-12);
      // Means exactly 2 sigma apart: a single flat-topped mode at the midpoint.
      std::vector<double> modes;
      for (std::size_t i = 1; i + 1 < d.size(); ++i) {
        if (d.probs()[i] > d.probs()[i - 1] && d.probs()[i] > d.probs()[i + 1]) modes.push_back(d.support()[i][0]);
      }
      CHECK(modes == std::vector<double>{80.0});
      // p(65) / p(80) = (phi(0) + phi(2)) / (2 phi(1))
      CHECK(d.probs()[64] / d.probs()[79] == Approx((1 + std::exp(-2.0)) / (2 * std::exp(-0.5))).epsilon(1e-12));
    }
    SUBCASE("degenerate grid") {
      const std::vector<Point> far{Point(1e6), Point(1e6 + 1)};
      CHECK_THROWS_AS(discretize_truth(m, far), DegenerateGridError);
    }
  }

  TEST_CASE("grid entropy approximates the differential entropy") {
    const auto m = fixtures::example1_truth();
    const auto o = fixtures::to_oracle(m);
    const double diff = oracle::simpson(
        [&](double x) {
          const double p = o.density(x);
          return p > 0 ? -p * std::log2(p) : 0.0;
        },
        -100, 260, 36000);
    const auto d = fixtures::example1_data();
    const double grid_h = oracle::entropy(d.probs());
    CHECK(std::abs(grid_h - (diff + std::log2(1.0))) < 0.05);
  }

  TEST_CASE("draw_sample") {
    const auto m = fixtures::example2_truth();
    SUBCASE("single draw") {
      const auto d = draw_sample(m, 1, 5);
      CHECK(d.size() == 1);
      CHECK(d.probs()[0] == 1.0);
    }
    SUBCASE("deterministic in the seed") {
      const auto a = draw_sample(m, 500, 42);
      const auto b = draw_sample(m, 500, 42);
      const auto c = draw_sample(m, 500, 43);
      CHECK(a.support() == b.support());
      CHECK(a.support() != c.support());
      CHECK(a.kl_grid() != nullptr);
    }
    SUBCASE("binned mean follows the analytic mixture mean") {
      const auto d = draw_sample(m, 50000, 9, default_experiment_grid(m));
      CHECK(d.mode() == SupportMode::Grid);
      CHECK(d.sample_size() == 50000);
      double mean = 0;
      double sum = 0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        mean += d.probs()[i] * d.support()[i][0];
        sum += d.probs()[i];
      }
      CHECK(std::abs(sum - 1.0) < 1e-12);
      CHECK(std::abs(mean - (0.7 * 100 + 0.3 * 125)) < 0.2);
    }
    SUBCASE("bivariate draws carry the correlation") {
      const MixtureModel one({GaussianComponent::bivariate(Point(0, 0), 2, 3, -0.6)}, {1.0});
      const auto d = draw_sample(one, 40000, 3);
      double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
      for (const auto& p : d.support()) {
        sx += p[0];
        sy += p[1];
        sxx += p[0] * p[0];
        syy += p[1] * p[1];
        sxy += p[0] * p[1];
      }
      const double n = static_cast<double>(d.size());
      const double cov = sxy / n - sx * sy / n / n;
      const double vx = sxx / n - sx * sx / n / n;
      const double vy = syy / n - sy * sy / n / n;
      CHECK(std::sqrt(vx) == Approx(2).epsilon(0.03));
      CHECK(std::sqrt(vy) == Approx(3).epsilon(0.03));
      CHECK(cov / std::sqrt(vx * vy) == Approx(-0.6).epsilon(0.03));
    }
  }

  TEST_CASE("bin_onto accumulates mass on nearest nodes") {
    const auto s = EmpiricalDistribution::sample({Point(0.2), Point(0.9), Point(1.1), Point(7.0)});
    const auto b = bin_onto(s, RegularGrid(AxisRange{0, 3, 1}));
    REQUIRE(b.size() == 4);
    CHECK(b.probs()[0] == 0.25);
    CHECK(b.probs()[1] == 0.5);
    CHECK(b.probs()[2] == 0.0);
    CHECK(b.probs()[3] == 0.25);
  }

  TEST_CASE("random streams") {
    SplitMix64 a(1), b(1);
    for (int k = 0; k < 10; ++k) CHECK(a() == b());
    NormalSampler n(7);
    double mean = 0;
    for (int k = 0; k < 20000; ++k) {
      const double u = n.uniform_open();
      CHECK((u > 0.0 && u < 1.0));
      mean += n();
    }
    CHECK(std::abs(mean / 20000) < 0.03);
    CHECK(seed_word(-0.0) == seed_word(0.0));
    CHECK(hash_seed({1, 2}) != hash_seed({2, 1}));
    std::set<std::uint64_t> seen;
    for (std::uint64_t k = 0; k < 1000; ++k) seen.insert(hash_seed({5, k}));
    CHECK(seen.size() == 1000);
  }
}
