#include <doctest.h>

#include <cmath>
#include <vector>

#include "thermoprep/cost_model.hpp"
#include "thermoprep/errors.hpp"
#include "thermoprep/random.hpp"
#include "thermoprep/reference/reference.hpp"

using namespace thermoprep;

TEST_CASE("step_time") {
  SUBCASE("dominant term at eps beta ||h|| = 1/e") {
    const double eps = std::exp(-1.0);
    const StepTime t = step_time(eps, 1.0, 1.0);
    CHECK(t.dephasing == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
    CHECK(t.conjugation == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  }
  SUBCASE("halving eps roughly quadruples the dominant term") {
    const double a = step_time(0.01, 1.0, 2.0).dephasing;
    const double b = step_time(0.005, 1.0, 2.0).dephasing;
    const double log_ratio = std::log(1.0 / 0.01) / std::log(1.0 / 0.02);
    CHECK(b / a == doctest::Approx(4.0 * log_ratio).epsilon(1e-12));
  }
  SUBCASE("monotone decreasing in eps") {
    double last = 1e300;
    for (double eps = 0.01; eps < 0.5; eps += 0.01) {
      const double t = step_time(eps, 1.0, 2.0).total();
      CHECK(t < last);
      last = t;
    }
  }
  SUBCASE("independent evaluator agrees") {
    for (double eps : {0.001, 0.02, 0.3}) {
      for (double beta : {0.5, 1.0, 2.0}) {
        for (double hn : {0.1, 1.0, 1.5}) {
          if (eps * beta * hn > 1.0) continue;
          CHECK(step_time(eps, beta, hn).total() ==
                doctest::Approx(reference::step_time_reference(eps, beta, hn)).epsilon(1e-13));
        }
      }
    }
  }
  SUBCASE("zero coupling costs nothing; out of range throws") {
    CHECK(step_time(0.1, 1.0, 0.0).total() == 0.0);
    CHECK(step_time(0.0, 1.0, 3.0).total() == 0.0);
    CHECK_THROWS_AS(step_time(0.6, 1.0, 2.0), ParameterError);
    CHECK_THROWS_AS(step_time(0.1, 0.0, 1.0), ParameterError);
    CHECK_THROWS_AS(step_time(-0.1, 1.0, 1.0), ParameterError);
  }
}

TEST_CASE("restart_predictions") {
  SUBCASE("Markov chain equals the closed form") {
    for (double p : {0.5, 0.9, 0.99}) {
      for (std::size_t n : {1u, 5u, 20u}) {
        const auto markov = restart_predictions(p, n);
        const auto closed = reference::success_run_closed_form(p, n);
        CHECK(std::abs(markov.mean_steps - closed.mean_steps) <= 1e-10 * closed.mean_steps);
        CHECK(std::abs(markov.mean_failures - closed.mean_failures) <= 1e-10 * std::max(1.0, closed.mean_failures));
      }
    }
  }
  SUBCASE("p = 1") {
    const auto r = restart_predictions(1.0, 7);
    CHECK(r.mean_steps == doctest::Approx(7.0));
    CHECK(r.mean_failures == 0.0);
    CHECK(r.mean_attempts() == 1.0);
  }
  SUBCASE("one step is geometric") {
    const auto r = restart_predictions(0.25, 1);
    CHECK(r.mean_steps == doctest::Approx(4.0));
    CHECK(r.mean_failures == doctest::Approx(3.0));
  }
  SUBCASE("visits sum to the mean step count") {
    const std::vector<double> p = {0.9, 0.8, 0.95, 0.7};
    const auto r = restart_predictions(p);
    double sum = 0.0;
    for (double v : r.step_visits) sum += v;
    CHECK(sum == doctest::Approx(r.mean_steps).epsilon(1e-14));
    CHECK(r.step_visits.front() == doctest::Approx(r.mean_failures + 1.0).epsilon(1e-14));
  }
  SUBCASE("p = 0.9, n = 10 against Monte Carlo") {
    RandomStream rng(2718);
    const std::vector<double> p(10, 0.9);
    const auto mc = reference::success_run_monte_carlo(p, 1000000, rng);
    const auto r = restart_predictions(p);
    CHECK(std::abs(mc.mean_steps - r.mean_steps) <= 3.0 * mc.steps_stderr);
    CHECK(std::abs(mc.mean_failures - r.mean_failures) <= 3.0 * mc.failures_stderr);
  }
  SUBCASE("invalid input") {
    CHECK_THROWS_AS(restart_predictions(0.0, 3), ParameterError);
    CHECK_THROWS_AS(restart_predictions(1.1, 3), ParameterError);
    CHECK_THROWS_AS(restart_predictions(0.5, 0), ParameterError);
  }
}

TEST_CASE("recursion_prediction") {
  SUBCASE("no rebuilds: tau = m at every level") {
    const auto r = recursion_prediction(5.0, 0.0, 4);
    for (std::size_t k = 1; k <= 4; ++k) CHECK(r.tau[k] == doctest::Approx(5.0));
  }
  SUBCASE("m = 1, rebuild 1 gives 2^k - 1") {
    const auto r = recursion_prediction(1.0, 1.0, 5);
    CHECK(r.tau[0] == 0.0);
    for (std::size_t k = 1; k <= 5; ++k) {
      CHECK(r.tau[k] == doctest::Approx(std::pow(2.0, static_cast<double>(k)) - 1.0));
      CHECK(r.closed_form[k] == doctest::Approx(r.tau[k]));
    }
  }
  SUBCASE("closed form matches the iteration") {
    const auto r = recursion_prediction(3.7, 2.3, 6);
    for (std::size_t k = 0; k <= 6; ++k) CHECK(r.closed_form[k] == doctest::Approx(r.tau[k]).epsilon(1e-12));
  }
  SUBCASE("monotone in k, m and rebuild") {
    const auto base = recursion_prediction(2.0, 1.2, 5);
    const auto more_m = recursion_prediction(2.5, 1.2, 5);
    const auto more_r = recursion_prediction(2.0, 1.5, 5);
    for (std::size_t k = 1; k <= 5; ++k) {
      CHECK(base.tau[k] > base.tau[k - 1]);
      CHECK(more_m.tau[k] > base.tau[k]);
      if (k >= 2) CHECK(more_r.tau[k] > base.tau[k]);
    }
  }
  SUBCASE("level-dependent coefficients") {
    const std::vector<double> m = {1.0, 2.0, 3.0};
    const std::vector<double> rebuild = {1.0, 1.5, 2.0};
    const auto tau = recursion_prediction(m, rebuild);
    REQUIRE(tau.size() == 4);
    CHECK(tau[1] == doctest::Approx(1.0));
    CHECK(tau[2] == doctest::Approx(2.0 * 1.5 * 1.0 + 2.0));
    CHECK(tau[3] == doctest::Approx(2.0 * 2.0 * 5.0 + 3.0));
  }
  SUBCASE("negative coefficients throw") {
    CHECK_THROWS_AS(recursion_prediction(-1.0, 1.0, 2), ParameterError);
  }
}

TEST_CASE("aggregate predictors") {
  SUBCASE("one site gives beta / eps_bar^2") {
    CHECK(total_time_prediction(1.0, 2.0, 1.3, 0.1) == doctest::Approx(200.0));
  }
  SUBCASE("halving eps_bar quadruples the time") {
    CHECK(total_time_prediction(8.0, 1.0, 2.0, 0.05) / total_time_prediction(8.0, 1.0, 2.0, 0.1) ==
          doctest::Approx(4.0));
    CHECK(d_dim_prediction(4.0, 2, 1.0, 1.0, 0.05) / d_dim_prediction(4.0, 2, 1.0, 1.0, 0.1) == doctest::Approx(4.0));
  }
  SUBCASE("log-log slope in N equals beta ||h||") {
    const double a = total_time_prediction(4.0, 0.7, 1.5, 0.1);
    const double b = total_time_prediction(64.0, 0.7, 1.5, 0.1);
    CHECK(std::log(b / a) / std::log(16.0) == doctest::Approx(0.7 * 1.5));
  }
  SUBCASE("higher dimension grows monotonically") {
    double last = 0.0;
    for (int d = 1; d <= 3; ++d) {
      const double v = d_dim_prediction(4.0, d, 1.0, 1.0, 0.1);
      CHECK(v > last);
      last = v;
    }
  }
  SUBCASE("asymptotic step growth") {
    CHECK(asymptotic_steps(1.0, 3) == doctest::Approx(std::exp(3.0 * (1.0 + std::log(2.0)))));
  }
  SUBCASE("nonpositive arguments throw") {
    CHECK_THROWS_AS(total_time_prediction(0.0, 1.0, 1.0, 0.1), ParameterError);
    CHECK_THROWS_AS(d_dim_prediction(4.0, 0, 1.0, 1.0, 0.1), ParameterError);
  }
}
