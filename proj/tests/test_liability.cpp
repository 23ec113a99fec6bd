#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cascade/liability.hpp"
#include "cascade/rng.hpp"
#include "cascade/solvers.hpp"
#include "oracles.hpp"

using namespace cascade;

namespace {

PiWeights weights(std::vector<double> pi) { return PiWeights{std::move(pi)}; }

Problem sqrt_problem(std::vector<double> losses) {
    return Problem(losses, std::vector<Technology>(losses.size(), Technology::sqrt_saturating(1.0)));
}

}  // namespace

TEST_CASE("pi solution matches the three-agent closed form") {
    // pi_3 = 9/10 makes agent 3's indirect liability one tenth of its loss.
    const double l2 = 2.0, l3 = 7.0;
    const LiabilityMatrix phi = make_pi_solution({5.0, l2, l3}, weights({0.0, 0.4, 0.9}));
    CHECK(phi(1, 2) == doctest::Approx(l3 / 10.0).epsilon(1e-15));
    CHECK(phi(1, 1) == doctest::Approx(l2 + 0.9 * l3).epsilon(1e-15));
    CHECK(phi(2, 2) == doctest::Approx(l3).epsilon(1e-15));
    CHECK(phi(2, 0) == 0.0);
    CHECK(phi(1, 0) == 0.0);
}

TEST_CASE("pi solution worked example") {
    const LiabilityMatrix phi = make_pi_solution({10.0, 20.0, 30.0}, weights({0.0, 0.5, 0.9}));
    CHECK(phi(2, 2) == doctest::Approx(30.0));
    CHECK(phi(1, 2) == doctest::Approx(3.0));
    CHECK(phi(1, 1) == doctest::Approx(47.0));
    CHECK(phi(0, 2) == doctest::Approx(3.0));
    CHECK(phi(0, 1) == doctest::Approx(23.5));
    CHECK(phi(0, 0) == doctest::Approx(33.5));
    // Row balance doubles as the oracle for the closed form.
    CHECK(phi(0, 0) + phi(0, 1) + phi(0, 2) == doctest::Approx(60.0).epsilon(1e-12));
}

TEST_CASE("all-one weights reproduce disruptor-pays") {
    const std::vector<double> losses{1.0, 2.0, 3.0};
    const LiabilityMatrix pays = make_disruptor_pays(losses);
    CHECK(pays(0, 0) == 6.0);
    CHECK(pays(1, 1) == 5.0);
    CHECK(pays(2, 2) == 3.0);
    CHECK(pays(0, 1) == 0.0);

    const LiabilityMatrix pi_one = make_pi_solution(losses, weights({1.0, 1.0, 1.0}));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(pi_one(i, j) == doctest::Approx(pays(i, j)));

    const LiabilityMatrix single = make_disruptor_pays({5.0});
    CHECK(single(0, 0) == 5.0);
}

TEST_CASE("own-loss solution") {
    const std::vector<double> losses{1.0, 2.0, 3.0};
    const LiabilityMatrix own = make_own_loss(losses);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i; j < 3; ++j) CHECK(own(i, j) == losses[j]);
    CHECK(own(2, 0) == 0.0);
    CHECK(own(2, 1) == 0.0);

    const LiabilityMatrix pi_zero = make_pi_solution(losses, weights({0.0, 0.0, 0.0}));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(pi_zero(i, j) == doctest::Approx(own(i, j)));

    double row0 = 0.0;
    for (std::size_t j = 0; j < 3; ++j) row0 += own(0, j);
    CHECK(row0 == doctest::Approx(6.0));
}

TEST_CASE("weight validation") {
    CHECK_THROWS_AS(make_pi_solution({1.0, 2.0}, weights({0.0, 1.5})), std::domain_error);
    CHECK_THROWS_AS(make_pi_solution({1.0, 2.0}, weights({0.0, -0.1})), std::domain_error);
    CHECK_THROWS_AS(make_pi_solution({1.0, 2.0}, weights({0.5})), std::domain_error);
    CHECK_THROWS_AS(make_pi_solution({1.0, -2.0}, weights({0.0, 0.5})), std::invalid_argument);
}

TEST_CASE("first-best direct liabilities") {
    SUBCASE("two agents with p2 = 1/2") {
        const Problem pr = sqrt_problem({1.0, 2.0});
        const auto diag = first_best_direct_liabilities(pr, {1.0, 1.0});  // p(1) = 1/2
        CHECK(diag[0] == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(diag[1] == doctest::Approx(2.0).epsilon(1e-15));
    }
    SUBCASE("last entry is always the last loss") {
        const Problem pr = sqrt_problem({3.0, 4.0, 5.0});
        const auto diag = first_best_direct_liabilities(pr, {0.4, 0.2, 0.9});
        CHECK(diag[2] == 5.0);
    }
    SUBCASE("recursion agrees with the nested-product sum") {
        const Problem pr = sqrt_problem({1.0, 1.0, 1.0});
        const Profile x{0.7, 0.4, 0.9};
        std::vector<double> p(3);
        for (std::size_t i = 0; i < 3; ++i) p[i] = pr.technologies[i].eval(x[i]);
        const auto expected = oracles::direct_liabilities_nested(pr.losses, p);
        const auto diag = first_best_direct_liabilities(pr, x);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(diag[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }
    SUBCASE("positivity precondition") {
        const Problem pr = sqrt_problem({1.0, 2.0});
        CHECK_THROWS_AS(first_best_direct_liabilities(pr, {0.0, 1.0}), std::domain_error);
    }
}

TEST_CASE("phi star structure") {
    const Problem pr = sqrt_problem({1.0, 2.0});
    const LiabilityMatrix phi = make_phi_star(pr, {1.0, 1.0});
    CHECK(phi(0, 0) == doctest::Approx(2.0));
    CHECK(phi(0, 1) == doctest::Approx(1.0));
    CHECK(phi(1, 1) == doctest::Approx(2.0));
    CHECK(phi(0, 0) + phi(0, 1) == doctest::Approx(3.0));

    // Entrywise equal to the pi-family at pi_j = p_j(x*_j).
    const Problem pr3 = sqrt_problem({1.0, 1.0, 1.0});
    const Profile x{0.8, 0.5, 0.3};
    std::vector<double> pi(3);
    for (std::size_t i = 0; i < 3; ++i) pi[i] = pr3.technologies[i].eval(x[i]);
    const LiabilityMatrix a = make_phi_star(pr3, x);
    const LiabilityMatrix b = make_pi_solution(pr3.losses, weights(pi));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(a(i, j) == doctest::Approx(b(i, j)).epsilon(1e-12));
    CHECK(check_axioms(a).all());
}

TEST_CASE("axiom audit passes constructions and flags violations") {
    SplitMix64 rng(2024);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 2 + rng.next() % 5;
        std::vector<double> losses(n);
        for (double& l : losses) l = rng.uniform(1e-3, 1e3);
        PiWeights w;
        w.pi.resize(n);
        for (double& v : w.pi) v = rng.uniform();
        const LiabilityMatrix phi = make_pi_solution(losses, w);
        CHECK(check_axioms(phi).all());

        // Diagonal sits between the own-loss and disruptor-pays diagonals.
        const LiabilityMatrix own = make_own_loss(losses);
        const LiabilityMatrix pays = make_disruptor_pays(losses);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(phi(i, i) >= own(i, i) - 1e-12 * pays(0, 0));
            CHECK(phi(i, i) <= pays(i, i) + 1e-12 * pays(0, 0));
            CHECK(phi(i, i) >= losses[i] - 1e-12 * pays(0, 0));
        }
    }

    SUBCASE("disruptor-pays satisfies both axioms") {
        CHECK(check_axioms(make_disruptor_pays({1.0, 2.0, 3.0})).all());
    }

    SUBCASE("unequal indirect entries are flagged") {
        LiabilityMatrix phi = make_own_loss({1.0, 1.0, 1.0});
        // Shift row 0's mass between columns: still balanced, not independent.
        phi.at(0, 2) = 0.2;
        phi.at(0, 1) = 1.0 + (1.0 - 0.2);
        const AxiomReport rep = check_axioms(phi);
        CHECK(rep.balance);
        CHECK_FALSE(rep.independent_indirect);
        CHECK_FALSE(rep.all());
    }

    SUBCASE("indirect above direct is flagged") {
        LiabilityMatrix phi = make_disruptor_pays({1.0, 2.0, 3.0});
        phi.at(0, 2) = 3.5;
        phi.at(0, 0) = 6.0 - 3.5;
        const AxiomReport rep = check_axioms(phi);
        CHECK(rep.balance);
        CHECK_FALSE(rep.higher_direct);
    }

    SUBCASE("unbalanced row is flagged") {
        LiabilityMatrix phi = make_disruptor_pays({1.0, 2.0, 3.0});
        phi.at(1, 1) *= 2.0;
        CHECK_FALSE(check_axioms(phi).balance);
    }
}

TEST_CASE("pi weights round-trip") {
    SUBCASE("named solutions") {
        const PiWeights pays = recover_pi(make_disruptor_pays({1.0, 2.0, 3.0}));
        CHECK(pays.pi[1] == doctest::Approx(1.0));
        CHECK(pays.pi[2] == doctest::Approx(1.0));
        const PiWeights own = recover_pi(make_own_loss({1.0, 2.0, 3.0}));
        CHECK(own.pi[1] == doctest::Approx(0.0));
        CHECK(own.pi[2] == doctest::Approx(0.0));
    }
    SUBCASE("worked example") {
        const PiWeights w =
            recover_pi(make_pi_solution({10.0, 20.0, 30.0}, weights({0.0, 0.5, 0.9})));
        CHECK(w.pi[1] == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(w.pi[2] == doctest::Approx(0.9).epsilon(1e-14));
    }
    SUBCASE("random round trips at 1e-12, strict mode included") {
        SplitMix64 rng(99);
        for (int t = 0; t < 200; ++t) {
            const std::size_t n = 2 + rng.next() % 6;
            std::vector<double> losses(n);
            for (double& l : losses) l = rng.uniform(1e-3, 1e3);
            PiWeights w;
            w.pi.resize(n);
            for (double& v : w.pi) v = rng.uniform();
            const LiabilityMatrix phi = make_pi_solution(losses, w);
            const PiWeights back = recover_pi(phi, true);
            for (std::size_t j = 1; j < n; ++j) CHECK(std::abs(back.pi[j] - w.pi[j]) <= 1e-12);

            // Rebuilding from the recovered weights reproduces the matrix.
            const LiabilityMatrix again = make_pi_solution(losses, back);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i; j < n; ++j)
                    CHECK(std::abs(again(i, j) - phi(i, j)) <=
                          1e-9 * std::max(1.0, std::abs(phi(i, j))));
        }
    }
    SUBCASE("axiom violation is rejected") {
        LiabilityMatrix phi = make_disruptor_pays({1.0, 2.0, 3.0});
        phi.at(0, 0) *= 1.5;
        CHECK_THROWS_AS(recover_pi(phi), std::domain_error);
    }
}
