// Command-line driver: solve, liability, simulate, poa, verify.
//
// Exit codes: 0 success, 1 input/validation error, 2 numerical failure
// (non-convergence or calibration failure).

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cascade/costs.hpp"
#include "cascade/experiments.hpp"
#include "cascade/io.hpp"
#include "cascade/liability.hpp"
#include "cascade/model.hpp"
#include "cascade/solvers.hpp"
#include "cascade/verify.hpp"

namespace {

using namespace cascade;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct TechFlags {
    std::string family = "sqrt";
    double scale = 1.0;
    double ceiling = 0.9, rate = 1.0, exponent = 0.5;
    double sqrt_weight = 0.01, sqrt_scale = 1.0, slope = 0.9, knee = 1.0, width = 0.05;

    void attach(CLI::App* cmd) {
        cmd->add_option("--tech", family, "technology family: sqrt|powerexp|softcap")
            ->check(CLI::IsMember({"sqrt", "powerexp", "softcap"}));
        cmd->add_option("--scale", scale, "sqrt family scale c > 0");
        cmd->add_option("--ceiling", ceiling, "powerexp ceiling in (0,1)");
        cmd->add_option("--rate", rate, "powerexp rate > 0");
        cmd->add_option("--exponent", exponent, "powerexp exponent in (0,1)");
        cmd->add_option("--sqrt-weight", sqrt_weight, "softcap sqrt weight");
        cmd->add_option("--sqrt-scale", sqrt_scale, "softcap sqrt scale");
        cmd->add_option("--slope", slope, "softcap ramp slope");
        cmd->add_option("--knee", knee, "softcap knee position");
        cmd->add_option("--width", width, "softcap knee width");
    }

    Technology build() const {
        if (family == "sqrt") return Technology::sqrt_saturating(scale);
        if (family == "powerexp") return Technology::power_exponential(ceiling, rate, exponent);
        return Technology::soft_cap(sqrt_weight, sqrt_scale, slope, knee, width);
    }
};

void require_valid(const Problem& pr) {
    const std::vector<std::string> violations = validate_problem(pr);
    if (!violations.empty()) {
        std::ostringstream os;
        os << "problem validation failed:";
        for (const std::string& v : violations) os << "\n  - " << v;
        throw std::invalid_argument(os.str());
    }
}

// Solution specs: phi-star | disruptor-pays | own-loss | pi:<file> | matrix:<file>.
LiabilityMatrix resolve_solution(const std::string& spec, const Problem& pr,
                                 const SolveOptions& opts) {
    if (spec == "disruptor-pays") return make_disruptor_pays(pr.losses);
    if (spec == "own-loss") return make_own_loss(pr.losses);
    if (spec == "phi-star") {
        const SolveResult eff = solve_efficient(pr, opts);
        if (!eff.converged)
            throw std::runtime_error("efficient solve failed while building phi-star");
        return make_phi_star(pr, eff.profile);
    }
    if (spec.rfind("pi:", 0) == 0)
        return make_pi_solution(pr.losses, io::load_pi_json(spec.substr(3), pr.n()));
    if (spec.rfind("matrix:", 0) == 0) {
        LiabilityMatrix phi = io::load_matrix_csv(spec.substr(7), pr.losses);
        const AxiomReport rep = check_axioms(phi);
        if (!rep.balance) {
            std::ostringstream os;
            os << "matrix is not balanced: worst row deviation " << io::format_g17(rep.worst_balance)
               << " exceeds tolerance " << io::format_g17(rep.tolerance);
            throw std::invalid_argument(os.str());
        }
        return phi;
    }
    throw std::invalid_argument("unknown solution spec \"" + spec +
                                "\" (expected phi-star, disruptor-pays, own-loss, pi:<file> or "
                                "matrix:<file>)");
}

std::string axiom_report_json(const AxiomReport& rep) {
    std::ostringstream os;
    os << "{\n"
       << "  \"balance\": " << (rep.balance ? "true" : "false") << ",\n"
       << "  \"higher_direct\": " << (rep.higher_direct ? "true" : "false") << ",\n"
       << "  \"independent_indirect\": " << (rep.independent_indirect ? "true" : "false") << ",\n"
       << "  \"worst_balance\": " << io::format_g17(rep.worst_balance) << ",\n"
       << "  \"worst_higher_direct\": " << io::format_g17(rep.worst_higher_direct) << ",\n"
       << "  \"worst_independent\": " << io::format_g17(rep.worst_independent) << ",\n"
       << "  \"tolerance\": " << io::format_g17(rep.tolerance) << "\n"
       << "}\n";
    return os.str();
}

int run(int argc, char** argv) {
    CLI::App app{"liability solutions and investment equilibria for disruption chains"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    double tol = 1e-10;
    std::string out = "cascade_out";
    app.add_option("--seed", seed, "random seed")->capture_default_str();
    app.add_option("--tol", tol, "solver FOC residual tolerance")->capture_default_str();
    app.add_option("--out", out, "output path (or prefix for multi-file commands)")
        ->capture_default_str();
    app.fallthrough();

    // solve
    CLI::App* solve = app.add_subcommand("solve", "efficient profile or equilibrium under a solution");
    std::string problem_file, mode = "efficient", solution_spec;
    solve->add_option("--problem", problem_file, "problem JSON file")->required();
    solve->add_option("--mode", mode, "efficient|equilibrium")
        ->check(CLI::IsMember({"efficient", "equilibrium"}));
    solve->add_option("--solution", solution_spec,
                      "solution spec (required for equilibrium mode; efficient mode uses it "
                      "for the cost report, default phi-star)");

    // liability
    CLI::App* liability = app.add_subcommand("liability", "emit a solution matrix and its axiom audit");
    std::string l_problem, l_spec;
    liability->add_option("--problem", l_problem, "problem JSON file")->required();
    liability->add_option("--solution", l_spec, "solution spec")->required();

    // simulate
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo study of phi* at the efficient profile");
    SimConfig sim_cfg;
    TechFlags sim_tech;
    bool want_svg = false;
    simulate->add_option("--agents", sim_cfg.agents, "agent count")->capture_default_str();
    simulate->add_option("--reps", sim_cfg.reps, "instance count")->capture_default_str();
    simulate->add_option("--loss-min", sim_cfg.loss_low, "loss lower bound")->capture_default_str();
    simulate->add_option("--loss-max", sim_cfg.loss_high, "loss upper bound")->capture_default_str();
    sim_tech.attach(simulate);
    simulate->add_flag("--svg", want_svg, "also render the two-panel chart");
    simulate->add_flag("--per-instance", sim_cfg.per_instance,
                       "also write per-instance records");

    // poa
    CLI::App* poa = app.add_subcommand("poa", "worst-case efficiency loss of disruptor-pays");
    PoaConfig poa_cfg;
    poa->add_option("--agents", poa_cfg.agents, "agent count")->capture_default_str();
    poa->add_option("--epsilon", poa_cfg.epsilon, "loss parameter in (0,1)")->capture_default_str();
    poa->add_option("--bound", poa_cfg.target_bound, "require ratio > bound for certification")
        ->capture_default_str();

    // verify
    CLI::App* verify = app.add_subcommand("verify", "numerical verification report");
    std::vector<std::size_t> sizes{2, 3, 5, 8};
    verify->add_option("--sizes", sizes, "problem sizes to verify")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    SolveOptions opts;
    opts.tolerance = tol;
    opts.seed = seed == 0 ? SolveOptions{}.seed : seed;

    if (*solve) {
        const Problem pr = io::load_problem(problem_file);
        require_valid(pr);
        if (mode == "equilibrium" && solution_spec.empty())
            throw std::invalid_argument("equilibrium mode needs --solution");
        const std::string spec = solution_spec.empty() ? "phi-star" : solution_spec;
        const LiabilityMatrix phi = resolve_solution(spec, pr, opts);
        const SolveResult res =
            mode == "efficient" ? solve_efficient(pr, opts) : solve_equilibrium(pr, phi, opts);
        io::atomic_write(out + ".solve.csv", io::solve_csv(res));
        io::atomic_write(out + ".costs.csv",
                         io::cost_csv(make_cost_report(pr, phi, res.profile), res.profile));
        std::cout << (res.converged ? "converged" : "not converged") << ", outputs at " << out
                  << ".solve.csv / " << out << ".costs.csv\n";
        return res.converged ? kExitOk : kExitNumerical;
    }

    if (*liability) {
        const Problem pr = io::load_problem(l_problem);
        require_valid(pr);
        const LiabilityMatrix phi = resolve_solution(l_spec, pr, opts);
        io::atomic_write(out + ".csv", io::matrix_csv(phi));
        std::cout << axiom_report_json(check_axioms(phi));
        return kExitOk;
    }

    if (*simulate) {
        sim_cfg.technology = sim_tech.build();
        sim_cfg.seed = seed;
        const SimResult result = run_simulation(sim_cfg);
        io::atomic_write(out + ".csv", simulation_csv(result));
        if (want_svg) io::atomic_write(out + ".svg", simulation_svg(result));
        if (sim_cfg.per_instance) {
            std::ostringstream os;
            os << "instance,agent,direct_liability,indirect_liability,investment,p_direct,"
                  "p_indirect,expected_cost\n";
            for (std::size_t r = 0; r < result.instances.size(); ++r)
                for (std::size_t i = 0; i < result.instances[r].size(); ++i) {
                    const SimRecord& rec = result.instances[r][i];
                    os << r << ',' << i + 1 << ',' << io::format_g17(rec.direct_liability) << ','
                       << io::format_g17(rec.indirect_liability) << ','
                       << io::format_g17(rec.investment) << ',' << io::format_g17(rec.p_direct)
                       << ',' << io::format_g17(rec.p_indirect) << ','
                       << io::format_g17(rec.expected_cost) << '\n';
                }
            io::atomic_write(out + ".instances.csv", os.str());
        }
        std::cout << "wrote " << out << ".csv\n";
        return kExitOk;
    }

    if (*poa) {
        const PoaResult result = run_poa(poa_cfg);
        const std::string json = poa_json(result);
        io::atomic_write(out + ".json", json);
        std::cout << json;
        return kExitOk;
    }

    if (*verify) {
        const VerificationReport report = verify_all(seed, sizes);
        io::atomic_write(out + ".json", report_json(report));
        std::cout << report_text(report);
        return report.all_pass() ? kExitOk : kExitNumerical;
    }

    return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}
