#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>

#include "cascade/costs.hpp"
#include "cascade/io.hpp"
#include "cascade/liability.hpp"
#include "cascade/rng.hpp"
#include "cascade/solvers.hpp"

using namespace cascade;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        const auto tick = std::chrono::steady_clock::now().time_since_epoch().count();
        path = fs::temp_directory_path() /
               ("cascade_io_test_" + std::to_string(SplitMix64(tick).next()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("g17 formatting round-trips doubles") {
    SplitMix64 rng(404);
    for (int t = 0; t < 1000; ++t) {
        double v = rng.uniform(-1e6, 1e6);
        if (t % 3 == 0) v *= 1e-9;
        CHECK(std::stod(io::format_g17(v)) == v);
    }
    CHECK(io::format_g17(0.5) == "0.5");
}

TEST_CASE("problem json round trip") {
    const Problem pr({1.5, 2.0, 3.0},
                     {Technology::sqrt_saturating(0.7),
                      Technology::power_exponential(0.9, 1.1, 0.45),
                      Technology::soft_cap(0.05, 1.0, 0.5, 1.0, 0.1)});
    const Problem back = io::parse_problem(io::problem_json(pr));
    REQUIRE(back.n() == 3);
    CHECK(back.losses == pr.losses);
    CHECK(back.technologies[0].scale() == 0.7);
    CHECK(back.technologies[1].ceiling() == 0.9);
    CHECK(back.technologies[1].rate() == 1.1);
    CHECK(back.technologies[1].exponent() == 0.45);
    CHECK(back.technologies[2].knee() == 1.0);
}

TEST_CASE("problem json rejects malformed input") {
    CHECK_THROWS_AS(io::parse_problem("not json"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_problem("{\"losses\": [1.0]}"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_problem(R"({"losses":[1.0],"technologies":[]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        io::parse_problem(R"({"losses":[1.0],"technologies":[{"family":"mystery"}]})"),
        std::invalid_argument);
    CHECK_THROWS_AS(io::parse_problem(R"({"losses":[1.0],"technologies":[{"family":"sqrt"}]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        io::parse_problem(R"({"losses":[1.0],"technologies":[{"family":"sqrt","scale":-1}]})"),
        std::invalid_argument);
}

TEST_CASE("matrix csv round trip and validation") {
    TempDir tmp;
    const std::vector<double> losses{10.0, 20.0, 30.0};
    const LiabilityMatrix phi = make_pi_solution(losses, PiWeights{{0.0, 0.5, 0.9}});
    const fs::path file = tmp.path / "phi.csv";
    io::atomic_write(file, io::matrix_csv(phi));

    const LiabilityMatrix back = io::load_matrix_csv(file, losses);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(back(i, j) == phi(i, j));

    io::atomic_write(tmp.path / "short.csv", "1,2\n");
    CHECK_THROWS_AS(io::load_matrix_csv(tmp.path / "short.csv", losses), std::invalid_argument);
    io::atomic_write(tmp.path / "neg.csv", "1,2,-3\n0,1,1\n0,0,1\n");
    CHECK_THROWS_AS(io::load_matrix_csv(tmp.path / "neg.csv", losses), std::invalid_argument);
    io::atomic_write(tmp.path / "lower.csv", "1,2,3\n4,1,1\n0,0,1\n");
    CHECK_THROWS_AS(io::load_matrix_csv(tmp.path / "lower.csv", losses), std::invalid_argument);
    io::atomic_write(tmp.path / "words.csv", "a,b,c\n0,1,1\n0,0,1\n");
    CHECK_THROWS_AS(io::load_matrix_csv(tmp.path / "words.csv", losses), std::invalid_argument);
    CHECK_THROWS_AS(io::load_matrix_csv(tmp.path / "missing.csv", losses), std::invalid_argument);
}

TEST_CASE("pi weights file") {
    TempDir tmp;
    const fs::path file = tmp.path / "pi.json";
    io::atomic_write(file, "[1.0, 0.5, 0.9]\n");
    const PiWeights w = io::load_pi_json(file, 3);
    CHECK(w.pi == std::vector<double>{1.0, 0.5, 0.9});
    CHECK_THROWS_AS(io::load_pi_json(file, 4), std::invalid_argument);
    io::atomic_write(file, "{\"pi\": 1}\n");
    CHECK_THROWS_AS(io::load_pi_json(file, 3), std::invalid_argument);
}

TEST_CASE("solve and cost csv formats") {
    SolveResult res;
    res.profile = {0.5, 0.25};
    res.residuals = {1e-12, -2e-12};
    const std::string s = io::solve_csv(res);
    CHECK(s.rfind("agent,investment,residual\n", 0) == 0);
    CHECK(s.find("1,0.5,") != std::string::npos);

    const Problem pr({1.0, 2.0},
                     {Technology::sqrt_saturating(1.0), Technology::sqrt_saturating(1.0)});
    const CostReport rep = make_cost_report(pr, make_disruptor_pays(pr.losses), {1.0, 1.0});
    const std::string c = io::cost_csv(rep, {1.0, 1.0});
    CHECK(c.rfind("agent,expected_cost,investment,p_disrupt\n", 0) == 0);
    CHECK(c.find("\nnone,,,0.25\n") != std::string::npos);
}

TEST_CASE("atomic write replaces content and leaves no temp files") {
    TempDir tmp;
    const fs::path file = tmp.path / "out.txt";
    io::atomic_write(file, "first");
    io::atomic_write(file, "second");
    CHECK(io::read_file(file) == "second");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(tmp.path)) ++entries;
    CHECK(entries == 1);
}
