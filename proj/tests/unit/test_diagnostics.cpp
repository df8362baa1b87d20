#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fairmix/diagnostics.hpp"
#include "fairmix/engine.hpp"
#include "fairmix/errors.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

using namespace fairmix;
using doctest::Approx;

TEST_SUITE("diagnostics") {
  TEST_CASE("example 1 values") {
    const auto d = fixtures::example1_data();
    const auto truth = fixtures::example1_truth();
    const auto narrow = equal_sigma_model(truth, 11.25);
    CHECK(std::abs(log_likelihood(truth, d) - -6.43) <= 0.05);
    CHECK(std::abs(log_likelihood(narrow, d) - -6.51) <= 0.05);
    CHECK(std::abs(complete_q(narrow, d) - -6.82) <= 0.05);
    CHECK(std::abs(complete_q(truth, d) - -6.95) <= 0.05);
    // Counterexample: Q prefers the narrow model while L prefers the truth.
    CHECK(complete_q(narrow, d) > complete_q(truth, d));
    CHECK(log_likelihood(truth, d) > log_likelihood(narrow, d));
  }

  TEST_CASE("conditional entropy at sigma 15 equals L - Q from the oracle") {
    const auto d = fixtures::example1_data();
    const auto m = equal_sigma_model(fixtures::example1_truth(), 15);
    const auto ref = oracle::diagnostics(fixtures::to_oracle(m), fixtures::to_oracle(d));
    CHECK(conditional_entropy(m, d) == Approx(ref[0] - ref[1]).epsilon(1e-9));
    CHECK(std::abs(conditional_entropy(m, d) - 0.52) <= 0.1);
  }

  TEST_CASE("library diagnostics agree with the closed-form oracle") {
    std::mt19937_64 rng(3);
    const auto d = fixtures::example1_data();
    const auto g = fixtures::to_oracle(d);
    for (int k = 0; k < 40; ++k) {
      const auto m = fixtures::random_binary(rng, 30, 130);
      const auto ref = oracle::diagnostics(fixtures::to_oracle(m), g);
      const auto rec = evaluate(m, d);
      CHECK(rec.L == Approx(ref[0]).epsilon(1e-10));
      CHECK(rec.Q == Approx(ref[1]).epsilon(1e-10));
      CHECK(rec.H_cond == Approx(ref[2]).epsilon(1e-9));
      CHECK(rec.KL == Approx(ref[3]).epsilon(1e-9));
      CHECK(log_likelihood(m, d) == Approx(rec.L).epsilon(1e-13));
      CHECK(complete_q(m, d) == Approx(rec.Q).epsilon(1e-13));
      CHECK(conditional_entropy(m, d) == Approx(rec.H_cond).epsilon(1e-12));
      CHECK(relative_entropy(d, m) == Approx(rec.KL).epsilon(1e-12));
      CHECK(channel_mismatch(m, d) == Approx(rec.mismatch).epsilon(1e-12));
    }
  }

  TEST_CASE("Q = L - H_cond and nonnegativity on 1-D and 2-D models") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    const auto d1 = fixtures::example1_data();
    for (int k = 0; k < 30; ++k) {
      const auto m = fixtures::random_binary(rng, 20, 140);
      const auto r = evaluate(m, d1);
      CHECK(std::abs(r.Q - (r.L - r.H_cond)) <= 1e-9);
      CHECK(r.H_cond >= 0.0);
      CHECK(r.KL >= 0.0);
    }
    const MixtureModel t2({GaussianComponent::bivariate(Point(50, 30), 15, 4, 0.3),
                           GaussianComponent::bivariate(Point(50, 30), 4, 12, -0.3)},
                          {0.5, 0.5});
    const auto d2 = draw_sample(t2, 3000, 5);
    for (int k = 0; k < 10; ++k) {
      const MixtureModel m({GaussianComponent::bivariate(Point(30 + 40 * u(rng), 20 + 20 * u(rng)), 3 + 10 * u(rng),
                                                         3 + 10 * u(rng), 1.6 * u(rng) - 0.8),
                            GaussianComponent::bivariate(Point(30 + 40 * u(rng), 20 + 20 * u(rng)), 3 + 10 * u(rng),
                                                         3 + 10 * u(rng), 1.6 * u(rng) - 0.8)},
                           {0.4, 0.6});
      const auto r = evaluate(m, d2);
      CHECK(std::abs(r.Q - (r.L - r.H_cond)) <= 1e-9);
      CHECK(r.KL >= 0.0);
    }
  }

  TEST_CASE("log likelihood on a model's own discretization is minus the grid entropy") {
    const auto m = fixtures::example1_truth();
    const auto d = discretize_truth(m, RegularGrid(AxisRange{-200, 400, 1}).nodes());
    CHECK(log_likelihood(m, d) == Approx(-entropy_bits(d)).epsilon(1e-9));
    CHECK(entropy_bits(d) == Approx(oracle::entropy(d.probs())).epsilon(1e-13));
  }

  TEST_CASE("relative entropy") {
    const auto d = fixtures::example1_data();
    const auto truth = fixtures::example1_truth();
    CHECK(std::abs(relative_entropy(d, truth)) < 1e-9);
    const auto narrow = equal_sigma_model(truth, 11.25);
    // Cross-check: KL = H_theta(X) - H(X) with P_theta renormalized on the grid.
    const auto o = fixtures::to_oracle(narrow);
    double z = 0;
    for (const auto& p : d.support()) z += o.density(p[0]);
    double cross = 0;
    for (std::size_t i = 0; i < d.size(); ++i) cross -= d.probs()[i] * std::log2(o.density(d.support()[i][0]) / z);
    CHECK(relative_entropy(d, narrow) == Approx(cross - oracle::entropy(d.probs())).epsilon(1e-9));
    CHECK(relative_entropy(d, narrow) > 0.0);
  }

  TEST_CASE("relative entropy on samples uses the companion grid") {
    const auto t = fixtures::example2_truth();
    const auto s = draw_sample(t, 2000, 1);
    REQUIRE(s.kl_grid() != nullptr);
    CHECK(relative_entropy(s, t) == Approx(relative_entropy(*s.kl_grid(), t)).epsilon(1e-14));
    const auto bare = EmpiricalDistribution::sample(s.support());
    CHECK_THROWS_AS(relative_entropy(bare, t), DomainError);
    CHECK(std::isnan(evaluate(t, bare).KL));
  }

  TEST_CASE("conditional entropy and complete Q edge cases") {
    const auto d = fixtures::example1_data();
    const MixtureModel one({GaussianComponent::univariate(80, 20)}, {1.0});
    CHECK(conditional_entropy(one, d) == 0.0);
    CHECK(complete_q(one, d) == Approx(log_likelihood(one, d)).epsilon(1e-14));
    CHECK(conditional_entropy(binary_mixture(80, 80, 20, 20, 0.5), d) == Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("channel mismatch") {
    const auto truth = fixtures::example1_truth();
    const auto d = discretize_truth(truth, RegularGrid(AxisRange{-100, 260, 1}).nodes());
    CHECK(channel_mismatch(truth, d) < 1e-6);

    const auto t2 = fixtures::example2_truth();
    const auto sample = draw_sample(t2, 50000, 6, default_experiment_grid(t2));
    const auto init = binary_mixture(80, 95, 5, 5, 0.5);
    // Oracle: one E-step and M1-step written out directly.
    const auto o = fixtures::to_oracle(init);
    double w1 = 0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      const double x = sample.support()[i][0];
      w1 += sample.probs()[i] * o.w[0] * o.component(0, x) / o.density(x);
    }
    const double expected = std::abs(w1 - 0.5);
    CHECK(channel_mismatch(init, sample) == Approx(expected).epsilon(1e-10));
    CHECK(channel_mismatch(init, sample) > 0.1);
  }

  TEST_CASE("clamped log values") {
    const auto m = binary_mixture(0, 1, 0.01, 0.01, 0.5);
    std::vector<Point> nodes{Point(0.0), Point(300.0)};
    const auto d = EmpiricalDistribution::grid(nodes, {0.5, 0.5});
    const auto r = evaluate(m, d);
    CHECK(r.clamped_points == 1);
    CHECK(std::isfinite(r.L));
    CHECK(r.L <= 0.5 * kLogClampBits + 10);
    CHECK(std::abs(r.Q - (r.L - r.H_cond)) <= 1e-9);
  }

  TEST_CASE("sigma sweep") {
    const auto truth = fixtures::example1_truth();
    const auto nodes = fixtures::example1_grid().nodes();
    SUBCASE("single row equals direct calls") {
      const std::vector<double> one{12.0};
      const auto rows = sweep_sigma(truth, nodes, one);
      REQUIRE(rows.size() == 1);
      const auto d = fixtures::example1_data();
      const auto m = equal_sigma_model(truth, 12.0);
      CHECK(rows[0].L == Approx(log_likelihood(m, d)).epsilon(1e-14));
      CHECK(rows[0].Q == Approx(complete_q(m, d)).epsilon(1e-14));
      CHECK(rows[0].H_cond == Approx(conditional_entropy(m, d)).epsilon(1e-13));
      CHECK(rows[0].KL == Approx(relative_entropy(d, m)).epsilon(1e-12));
    }
    SUBCASE("ordered output and argmax locations") {
      const std::vector<double> sigmas{30, 5, 15, 11.25, 20, 14, 16, 10.5, 12};
      const auto rows = sweep_sigma(truth, nodes, sigmas);
      CHECK(std::is_sorted(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.sigma < b.sigma; }));
      const auto range = AxisRange{5, 30, 0.25}.values();
      const auto full = sweep_sigma(truth, nodes, range);
      const auto l = std::max_element(full.begin(), full.end(), [](auto& a, auto& b) { return a.L < b.L; });
      const auto q = std::max_element(full.begin(), full.end(), [](auto& a, auto& b) { return a.Q < b.Q; });
      CHECK(l->sigma >= 14.0);
      CHECK(l->sigma <= 16.0);
      CHECK(q->sigma >= 10.5);
      CHECK(q->sigma <= 12.0);
    }
    SUBCASE("equal_sigma_model") {
      const auto m = equal_sigma_model(binary_mixture(1, 2, 3, 4, 0.25), 9);
      CHECK(m == binary_mixture(1, 2, 9, 9, 0.25));
    }
  }

  TEST_CASE("finite-difference dH/dsigma") {
    const auto truth = fixtures::example1_truth();
    const auto nodes = fixtures::example1_grid().nodes();
    CHECK(fd_dH_dsigma(truth, nodes, 15, 0.01) > 0.0);
    CHECK(fd_dH_dsigma(truth, nodes, 7, 0.01) > 0.0);
    CHECK(std::abs(fd_dH_dsigma(binary_mixture(75, 75, 10, 10, 0.5), nodes, 12, 0.01)) < 1e-8);
    CHECK_THROWS_AS(fd_dH_dsigma(truth, nodes, 0.005, 0.01), DomainError);
    CHECK_THROWS_AS(fd_dH_dsigma(truth, nodes, 10, 0.0), DomainError);
    // Agrees with a difference of independently computed entropies.
    const auto d = fixtures::example1_data();
    const auto g = fixtures::to_oracle(d);
    const auto hp = oracle::diagnostics(fixtures::to_oracle(equal_sigma_model(truth, 12.01)), g)[2];
    const auto hm = oracle::diagnostics(fixtures::to_oracle(equal_sigma_model(truth, 11.99)), g)[2];
    CHECK(fd_dH_dsigma(truth, nodes, 12, 0.01) == Approx((hp - hm) / 0.02).epsilon(1e-6));
  }

  TEST_CASE("shrunken sigma raises Q on a few symmetric truths") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> sig(5, 15), gap(1, 3);
    for (int k = 0; k < 5; ++k) {
      const double s = sig(rng);
      const double mu1 = 100;
      const double mu2 = mu1 + gap(rng) * s;
      const auto truth = binary_mixture(mu1, mu2, s, s, 0.5);
      const auto d = discretize_truth(truth, RegularGrid(AxisRange{mu1 - 8 * s, mu2 + 8 * s, s / 10}).nodes());
      CHECK(complete_q(equal_sigma_model(truth, 0.75 * s), d) > complete_q(truth, d));
    }
  }
}
