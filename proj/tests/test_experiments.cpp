#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cascade/costs.hpp"
#include "cascade/experiments.hpp"
#include "cascade/liability.hpp"
#include "cascade/solvers.hpp"

using namespace cascade;

TEST_CASE("single-agent single-instance simulation") {
    SimConfig cfg;
    cfg.agents = 1;
    cfg.reps = 1;
    cfg.seed = 3;
    const SimResult res = run_simulation(cfg);
    REQUIRE(res.means.size() == 1);
    const SimRecord& m = res.means[0];
    CHECK(m.p_indirect == 0.0);
    CHECK(m.indirect_liability == 0.0);
    // C_1 = (1 - p(x*)) l + x* for a lone agent.
    const double p = cfg.technology.eval(m.investment);
    CHECK(m.expected_cost ==
          doctest::Approx((1.0 - p) * m.direct_liability + m.investment).epsilon(1e-12));
    CHECK(m.p_direct == doctest::Approx(1.0 - p).epsilon(1e-12));
}

TEST_CASE("simulation is deterministic given the seed and sensitive to it") {
    SimConfig cfg;
    cfg.agents = 4;
    cfg.reps = 40;
    cfg.seed = 11;
    const std::string a = simulation_csv(run_simulation(cfg));
    const std::string b = simulation_csv(run_simulation(cfg));
    CHECK(a == b);
    cfg.seed = 12;
    CHECK(simulation_csv(run_simulation(cfg)) != a);
}

TEST_CASE("per-instance records satisfy the equilibrium cost identity") {
    SimConfig cfg;
    cfg.agents = 5;
    cfg.reps = 25;
    cfg.seed = 21;
    cfg.per_instance = true;
    const SimResult res = run_simulation(cfg);
    REQUIRE(res.instances.size() == cfg.reps);
    for (const auto& inst : res.instances) {
        for (std::size_t i = 1; i < cfg.agents; ++i) {
            CHECK(std::abs(inst[i].expected_cost -
                           (inst[i].indirect_liability + inst[i].investment)) <= 1e-6);
            CHECK(inst[i].p_direct >= 0.0);
            CHECK(inst[i].p_direct <= 1.0);
            CHECK(inst[i].p_indirect >= inst[i - 1].p_indirect);  // prefix products shrink
        }
    }
}

TEST_CASE("simulation csv format") {
    SimConfig cfg;
    cfg.agents = 2;
    cfg.reps = 3;
    cfg.seed = 5;
    const std::string csv = simulation_csv(run_simulation(cfg));
    CHECK(csv.rfind("agent,direct_liability,indirect_liability,investment,p_direct,p_indirect,"
                    "expected_cost\n",
                    0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + one row per agent
}

TEST_CASE("simulation config validation") {
    SimConfig cfg;
    cfg.reps = 0;
    CHECK_THROWS_AS(run_simulation(cfg), std::invalid_argument);
    cfg.reps = 1;
    cfg.loss_low = 0.0;
    CHECK_THROWS_AS(run_simulation(cfg), std::invalid_argument);
    cfg.loss_low = 2.0;
    cfg.loss_high = 1.0;
    CHECK_THROWS_AS(run_simulation(cfg), std::invalid_argument);
}

TEST_CASE("simulation svg renders two panels") {
    SimConfig cfg;
    cfg.agents = 3;
    cfg.reps = 5;
    cfg.seed = 2;
    const std::string svg = simulation_svg(run_simulation(cfg));
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(std::count(svg.begin(), svg.end(), 'g') >= 2);
    CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("worst-case technology calibration") {
    for (std::size_t n : {1ul, 4ul, 10ul, 16ul}) {
        const double eps = 0.01;
        const Technology tech = calibrate_poa_technology(n, eps);
        const double z = 1.0 - eps;
        const double delta = -std::expm1(std::log1p(-eps) / static_cast<double>(n + 1));
        const double target = 1.0 - delta;

        CHECK(std::abs(tech.eval(z) - target) <= 1e-10);
        // Slope band, rewritten through (1-delta)^{n+1} = 1-eps.
        const double lo = target * target / z;
        const double hi = target / z;
        const double slope = tech.deriv(z);
        CHECK(slope > lo);
        CHECK(slope < hi);
        // Strict concavity at the calibrated point: p(z) > z p'(z).
        CHECK(tech.eval(z) > z * slope);
        CHECK(tech.sup() < 1.0);

        const Problem pr({1.0}, {tech});
        CHECK(validate_problem(pr).empty());
    }

    CHECK_THROWS_AS(calibrate_poa_technology(10, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(calibrate_poa_technology(10, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(calibrate_poa_technology(0, 0.5), std::invalid_argument);
}

TEST_CASE("worst-case efficiency loss run") {
    PoaConfig cfg;
    cfg.agents = 10;
    cfg.epsilon = 0.01;
    const PoaResult res = run_poa(cfg);

    CHECK(res.certified);
    for (double x : res.x_hat) CHECK(x > 1.0 - cfg.epsilon);
    CHECK(res.c_star < 1.0 + 9.0 * cfg.epsilon);
    // Certified runs clear the analytic lower bound n(1-eps)/(1+(n-1)eps).
    const double bound = 10.0 * (1.0 - cfg.epsilon) / (1.0 + 9.0 * cfg.epsilon);
    CHECK(res.ratio > bound);
    CHECK(res.ratio >= 5.0);

    PoaConfig small;
    small.agents = 4;
    small.epsilon = 0.01;
    PoaConfig large;
    large.agents = 16;
    large.epsilon = 0.01;
    const PoaResult r4 = run_poa(small);
    const PoaResult r16 = run_poa(large);
    CHECK(r4.certified);
    CHECK(r16.certified);
    CHECK(r4.ratio < res.ratio);
    CHECK(res.ratio < r16.ratio);
}

TEST_CASE("poa json shape") {
    PoaConfig cfg;
    cfg.agents = 4;
    cfg.epsilon = 0.05;
    const std::string json = poa_json(run_poa(cfg));
    for (const char* key : {"\"n\"", "\"epsilon\"", "\"delta\"", "\"ratio\"", "\"certified\"",
                            "\"c_hat\"", "\"c_star\""})
        CHECK(json.find(key) != std::string::npos);
}
