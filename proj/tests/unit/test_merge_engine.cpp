#include <doctest.h>

#include <cmath>
#include <vector>

#include "thermoprep/errors.hpp"
#include "thermoprep/gibbs_oracle.hpp"
#include "thermoprep/merge_engine.hpp"
#include "thermoprep/reference/reference.hpp"

using namespace thermoprep;

namespace {

HermitianOperator diag_op(std::vector<double> d) { return HermitianOperator::diagonal(d); }

struct TwoSite {
  ChainModel model = transverse_field_ising(2, 1.0, 1.0);
  HermitianOperator left = build_block_hamiltonian(model, 0, 0);
  HermitianOperator right = build_block_hamiltonian(model, 1, 1);
  HermitianOperator h0 = build_block_hamiltonian(model, 0, 1) - link_term(model, 0, 0, 1);
  ShiftedOperator link = shifted_link_term(model, 0, 0, 1);
  double beta = 1.0;

  DensityMatrix product() const { return tensor_product(gibbs_state(left, beta), gibbs_state(right, beta)); }
  DensityMatrix target(double coupling) const {
    return gibbs_state(HermitianOperator(h0.matrix() + coupling * link.shifted.matrix()), beta);
  }
  // Error of one ideal step from the exact product state.
  double first_step_error(double eps) const {
    const auto schedule = MergeSchedule::create(eps, beta, link.shifted.operator_norm());
    const auto ch = step_channels(product(), h0, link.shifted, 0.0, eps, schedule);
    return trace_distance(ch.state, target(eps));
  }
};

PrepareOptions options_eps(double eps, CostMode mode = CostMode::single_pass) {
  PrepareOptions o;
  o.eps = eps;
  o.cost_mode = mode;
  return o;
}

}  // namespace

TEST_CASE("MergeSchedule") {
  SUBCASE("steps land exactly on coupling one") {
    for (double eps : {1.0, 0.3, 0.1, 0.07, 0.00625}) {
      const auto s = MergeSchedule::create(eps, 1.0, 1.0);
      CHECK(s.n_steps == static_cast<std::size_t>(std::ceil(1.0 / eps - 1e-9)));
      CHECK(s.coupling(0) == 0.0);
      CHECK(s.coupling(s.n_steps) == 1.0);
      double sum = 0.0;
      for (std::size_t i = 0; i < s.n_steps; ++i) {
        CHECK(s.step_size(i) > 0.0);
        CHECK(s.step_size(i) <= eps * (1 + 1e-12));
        sum += s.step_size(i);
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  SUBCASE("derived imperfect defaults") {
    FidelitySettings f;
    f.mode = FidelityMode::imperfect;
    const double eps = 0.05, beta = 1.0, hn = 2.0;
    const auto s = MergeSchedule::create(eps, beta, hn, f);
    CHECK(s.fidelity.zeta == doctest::Approx(eps * eps * beta * hn * hn));
    CHECK(s.fidelity.delta == doctest::Approx(eps * beta * hn * hn));
    CHECK(s.fidelity.eps_pe == doctest::Approx(eps * eps * beta * beta * hn * hn));
    CHECK(s.fidelity.pe_time == doctest::Approx(0.25));
    CHECK(s.fidelity.c >= 1.0);
  }
  SUBCASE("explicit settings win") {
    FidelitySettings f;
    f.mode = FidelityMode::imperfect;
    f.zeta = 0.3;
    f.c = 2.0;
    const auto s = MergeSchedule::create(0.1, 1.0, 1.0, f);
    CHECK(s.fidelity.zeta == 0.3);
    CHECK(s.fidelity.c == 2.0);
  }
  SUBCASE("invalid step sizes") {
    CHECK_THROWS_AS(MergeSchedule::create(0.0, 1.0, 1.0), ParameterError);
    CHECK_THROWS_AS(MergeSchedule::create(1.5, 1.0, 1.0), ParameterError);
    CHECK_THROWS_AS(MergeSchedule::create(0.6, 1.0, 2.0), ParameterError);
  }
}

TEST_CASE("perturbative_step") {
  SUBCASE("h = 0 always succeeds and leaves the state alone") {
    RandomStream rng(1);
    const HermitianOperator H(random_hermitian(4, rng));
    const auto rho = gibbs_state(H, 1.0);
    const auto schedule = MergeSchedule::create(0.5, 1.0, 0.0);
    for (int i = 0; i < 20; ++i) {
      const auto out = perturbative_step(rho, H, HermitianOperator::zero(4), 0.0, 0.5, schedule, rng);
      REQUIRE(out.succeeded);
      CHECK(trace_distance(*out.state, rho) < 1e-13);
      CHECK(out.success_probability == doctest::Approx(1.0));
      CHECK(out.evolution_time_charged == 0.0);
    }
  }
  SUBCASE("single qubit step") {
    const auto schedule = MergeSchedule::create(0.1, 1.0, 2.0);
    const auto ch = step_channels(DensityMatrix::maximally_mixed(2), HermitianOperator::zero(2), diag_op({2.0, 0.0}),
                                  0.0, 0.1, schedule);
    const double z = std::exp(-0.2) + 1.0;
    Matrix target = Matrix::Zero(2, 2);
    target(0, 0) = std::exp(-0.2) / z;
    target(1, 1) = 1.0 / z;
    // numpy: diag(0.450166, 0.549834)
    CHECK(target(0, 0).real() == doctest::Approx(0.45016600268752216));
    CHECK(trace_distance(ch.state, DensityMatrix(target)) <= 0.01);
    CHECK(ch.ledger.conjugation_second_order == doctest::Approx(0.04));
  }
  SUBCASE("second-order scaling in the step size") {
    const TwoSite t;
    const double e1 = t.first_step_error(0.05);
    const double e2 = t.first_step_error(0.025);
    const double e3 = t.first_step_error(0.0125);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.25));
    CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.25));
  }
  SUBCASE("error bound of one step") {
    const TwoSite t;
    const double hn = t.link.shifted.operator_norm();
    for (double eps : {0.1, 0.05, 0.02}) {
      CHECK(t.first_step_error(eps) <= eps * eps * t.beta * t.beta * hn * hn);
    }
  }
  SUBCASE("success frequency matches the probability") {
    const TwoSite t;
    const double eps = 0.1, hn = t.link.shifted.operator_norm();
    const auto schedule = MergeSchedule::create(eps, t.beta, hn);
    RandomStream rng(99);
    const auto rho = t.product();
    const int trials = 10000;
    int ok = 0;
    double p = 0.0;
    for (int i = 0; i < trials; ++i) {
      const auto out = perturbative_step(rho, t.h0, t.link.shifted, 0.0, eps, schedule, rng);
      ok += out.succeeded ? 1 : 0;
      p = out.success_probability;
    }
    const double freq = static_cast<double>(ok) / trials;
    const double se = std::sqrt(p * (1 - p) / trials);
    CHECK(freq >= 1.0 - eps * t.beta * hn - 3.0 * se);
    CHECK(std::abs(freq - p) <= 4.0 * se);
  }
  SUBCASE("dimension mismatch") {
    const auto schedule = MergeSchedule::create(0.1, 1.0, 1.0);
    RandomStream rng(1);
    CHECK_THROWS_AS(perturbative_step(DensityMatrix::maximally_mixed(2), HermitianOperator::zero(4),
                                      HermitianOperator::zero(4), 0.0, 0.1, schedule, rng),
                    ValidationError);
  }
}

TEST_CASE("merge_blocks") {
  const TwoSite t;
  const auto rho_l = gibbs_state(t.left, t.beta);
  const auto rho_r = gibbs_state(t.right, t.beta);

  SUBCASE("zero link returns the product state") {
    const auto schedule = MergeSchedule::create(0.1, t.beta, 0.0);
    RandomStream rng(2);
    const auto r = merge_blocks(rho_l, rho_r, t.left, t.right, HermitianOperator::zero(4), schedule, rng);
    REQUIRE(r.state);
    CHECK(trace_distance(*r.state, tensor_product(rho_l, rho_r)) < 1e-13);
    CHECK(r.stats.steps_attempted == schedule.n_steps);
  }
  SUBCASE("two Ising sites at eps = 0.02") {
    const auto schedule = MergeSchedule::create(0.02, t.beta, t.link.shifted.operator_norm());
    RandomStream rng(3);
    std::optional<MergeResult> done;
    int attempts = 0;
    while (!done && attempts < 1000) {
      ++attempts;
      auto r = merge_blocks(rho_l, rho_r, t.left, t.right, t.link.shifted, schedule, rng);
      if (r.state) done = std::move(r);
      else CHECK(r.failed_step.has_value());
    }
    REQUIRE(done);
    CHECK(trace_distance(*done->state, t.target(1.0)) <= 0.02);
    const auto traj = merge_trajectory(rho_l, rho_r, t.left, t.right, t.link.shifted, schedule);
    CHECK(trace_distance(*done->state, traj.final_state) < 1e-14);
  }
  SUBCASE("failure reports the failing step and its cost") {
    const auto schedule = MergeSchedule::create(0.2, 2.0, t.link.shifted.operator_norm());
    RandomStream rng(4);
    for (int i = 0; i < 50; ++i) {
      const auto r = merge_blocks(rho_l, rho_r, t.left, t.right, t.link.shifted, schedule, rng);
      if (r.failed_step) {
        CHECK(r.stats.steps_attempted == *r.failed_step + 1);
        CHECK(r.stats.charged_time > 0.0);
        CHECK_FALSE(r.state);
        return;
      }
    }
    FAIL("no failure in 50 attempts");
  }
}

TEST_CASE("error accumulation over one merge") {
  const TwoSite t;
  const double eps = 0.01;
  const auto schedule = MergeSchedule::create(eps, t.beta, t.link.shifted.operator_norm());
  DensityMatrix rho = t.product();
  std::vector<double> steps, errors;
  for (std::size_t i = 0; i < schedule.n_steps; ++i) {
    const auto ch = step_channels(rho, t.h0, t.link.shifted, schedule.coupling(i), schedule.coupling(i + 1), schedule);
    rho = ch.state;
    if ((i + 1) % 10 == 0) {
      steps.push_back(static_cast<double>(i + 1));
      errors.push_back(trace_distance(rho, t.target(schedule.coupling(i + 1))));
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double x = std::log(steps[i]), y = std::log(errors[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope <= 1.2);
  CHECK(slope >= 0.8);
}

TEST_CASE("imperfect fidelity is never more accurate than ideal") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ChainModel model = random_nearest_neighbor(2, 2, seed);
    PrepareOptions ideal = options_eps(0.05);
    PrepareOptions imperfect = ideal;
    imperfect.fidelity.mode = FidelityMode::imperfect;
    const auto a = plan_chain(model, 1.0, ideal);
    const auto b = plan_chain(model, 1.0, imperfect);
    const auto exact = gibbs_state(a.hamiltonian, 1.0);
    CHECK(trace_distance(b.state, exact) >= trace_distance(a.state, exact) - 1e-12);
    CHECK(b.ledger.total() >= a.ledger.total());
  }
}

TEST_CASE("plan_chain and prepare_chain") {
  SUBCASE("one site is exact and free") {
    const ChainModel model = transverse_field_ising(1, 1.0, 0.7);
    PrepareOptions o;
    o.eps_bar = 0.1;
    RandomStream rng(5);
    const auto prep = prepare_chain(model, 1.0, o, rng);
    CHECK(trace_distance(prep.state, gibbs_state(build_block_hamiltonian(model, 0, 0), 1.0)) < 1e-15);
    CHECK(prep.report.total_charged_time == 0.0);
    CHECK(prep.report.levels.empty());
  }
  SUBCASE("four-site Ising at eps_bar = 0.1") {
    const ChainModel model = transverse_field_ising(4, 1.0, 1.0);
    PrepareOptions o;
    o.eps_bar = 0.1;
    const auto plan = plan_chain(model, 1.0, o);
    CHECK(plan.schedule.eps == doctest::Approx(0.1 / (4.0 * 4.0)));
    CHECK(trace_distance(plan.state, gibbs_state(plan.hamiltonian, 1.0)) <= 0.1);
    CHECK(plan.levels == 2);
    CHECK(plan.merges[0].size() == 2);
    CHECK(plan.merges[1].size() == 1);
  }
  SUBCASE("zero links give a product state and never fail") {
    const ChainModel model = transverse_field_ising(8, 0.0, 0.8, 0.3);
    PrepareOptions o;
    o.eps_bar = 0.1;
    o.cost_mode = CostMode::faithful;
    RandomStream rng(6);
    const auto prep = prepare_chain(model, 1.0, o, rng);
    DensityMatrix product = gibbs_state(build_block_hamiltonian(model, 0, 0), 1.0);
    for (std::size_t s = 1; s < 8; ++s) product = tensor_product(product, gibbs_state(build_block_hamiltonian(model, s, s), 1.0));
    CHECK(trace_distance(prep.state, product) < 1e-12);
    for (const auto& c : prep.report.levels) CHECK(c.failures == 0);
  }
  SUBCASE("resource cap and chain length") {
    CHECK_THROWS_AS(plan_chain(transverse_field_ising(8, 1.0, 1.0), 1.0, [] {
                      PrepareOptions o;
                      o.eps = 0.1;
                      o.max_dim = 128;
                      return o;
                    }()),
                    ResourceError);
    CHECK_THROWS_AS(plan_chain(transverse_field_ising(3, 1.0, 1.0), 1.0, options_eps(0.1)), ParameterError);
    CHECK_THROWS_AS(plan_chain(transverse_field_ising(2, 1.0, 1.0), 0.0, options_eps(0.1)), ParameterError);
    PrepareOptions none;
    CHECK_THROWS_AS(plan_chain(transverse_field_ising(2, 1.0, 1.0), 1.0, none), ParameterError);
  }
}

TEST_CASE("sequence_error_budget") {
  CHECK(sequence_error_budget(0.0, 1.0, 2.0, 8) == 0.0);
  CHECK(sequence_error_budget(0.01, 1.0, 2.0, 8) == doctest::Approx(2.0 * sequence_error_budget(0.01, 1.0, 2.0, 4)));
  CHECK(sequence_error_budget(0.01, 2.0, 3.0, 2) == doctest::Approx(2 * 0.01 * 4 * 9));

  // The constant fitted from chains of 2, 4 and 8 sites stays put.
  std::vector<double> cs;
  for (std::size_t n : {2u, 4u, 8u}) {
    const auto plan = plan_chain(transverse_field_ising(n, 1.0, 1.0), 1.0, options_eps(0.05));
    const double d = trace_distance(plan.state, gibbs_state(plan.hamiltonian, 1.0));
    cs.push_back(d / sequence_error_budget(plan.schedule, n));
  }
  const double mean = (cs[0] + cs[1] + cs[2]) / 3.0;
  for (double c : cs) CHECK(std::abs(c / mean - 1.0) <= 0.5);
}

TEST_CASE("restart accounting") {
  const ChainModel model = transverse_field_ising(4, 1.0, 1.0);
  const auto plan = plan_chain(model, 1.0, options_eps(0.05, CostMode::faithful));

  SUBCASE("charged time is steps times step time") {
    const double per_step = step_time(0.05, 1.0, plan.schedule.h_norm).total();
    RandomStream rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      const auto report = simulate_restarts(plan, rng);
      std::uint64_t steps = 0;
      double time = 0.0;
      for (const auto& c : report.levels) {
        CHECK(c.charged_time == doctest::Approx(static_cast<double>(c.steps_attempted) * per_step).epsilon(1e-12));
        CHECK(c.merge_attempts == c.blocks_built + c.failures);
        CHECK(c.tau_samples.size() == c.blocks_built);
        steps += c.steps_attempted;
        time += c.charged_time;
      }
      CHECK(report.total_steps == steps);
      CHECK(report.total_charged_time == doctest::Approx(time).epsilon(1e-15));
      CHECK(report.levels.back().blocks_built == 1);
    }
  }
  SUBCASE("same seed, same report") {
    RandomStream a(8), b(8);
    const auto ra = simulate_restarts(plan, a);
    const auto rb = simulate_restarts(plan, b);
    REQUIRE(ra.levels.size() == rb.levels.size());
    for (std::size_t k = 0; k < ra.levels.size(); ++k) {
      CHECK(ra.levels[k].steps_attempted == rb.levels[k].steps_attempted);
      CHECK(ra.levels[k].failures == rb.levels[k].failures);
      CHECK(ra.levels[k].charged_time == rb.levels[k].charged_time);
      CHECK(ra.levels[k].tau_samples == rb.levels[k].tau_samples);
    }
    const auto p1 = plan_chain(model, 1.0, options_eps(0.05));
    CHECK((plan.state.matrix().array() == p1.state.matrix().array()).all());
  }
  SUBCASE("merge step counts follow the success-run model") {
    const MergeRecord& top = plan.merges.back().front();
    RandomStream rng(9);
    double sum = 0.0, sum2 = 0.0;
    std::size_t count = 0;
    for (int trial = 0; trial < 3000; ++trial) {
      const auto report = simulate_restarts(plan, rng);
      for (double m : report.levels.back().m_samples) {
        sum += m;
        sum2 += m * m;
        ++count;
      }
    }
    const double mean = sum / static_cast<double>(count);
    const double var = sum2 / static_cast<double>(count) - mean * mean;
    const double se = std::sqrt(var / static_cast<double>(count));
    CHECK(std::abs(mean - top.prediction.mean_steps) <= 3.0 * se);
  }
  SUBCASE("single-pass expectations") {
    const auto report = expected_costs(plan);
    CHECK(report.total_steps == 0);
    CHECK(report.predicted_total_steps == doctest::Approx(report.predictions.back().tau));
    CHECK(report.predictions.back().expected_processes == 1.0);
    double total = 0.0;
    for (const auto& c : report.levels) total += c.charged_time;
    CHECK(report.total_charged_time == doctest::Approx(total));
  }
  SUBCASE("step budget is enforced") {
    RandomStream rng(10);
    CHECK_THROWS_AS(simulate_restarts(plan, rng, 5), ResourceError);
  }
}
