#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cascade/model.hpp"
#include "cascade/solvers.hpp"

namespace cascade {

/// Monte Carlo study configuration. The defaults reproduce the reference
/// protocol: 8 agents, 10,000 instances, losses uniform on [1, 100], the
/// unit sqrt-saturating technology for everyone.
struct SimConfig {
    std::size_t agents = 8;
    std::size_t reps = 10000;
    double loss_low = 1.0;
    double loss_high = 100.0;
    Technology technology = Technology::sqrt_saturating(1.0);
    std::uint64_t seed = 0;
    bool per_instance = false;  ///< keep per-instance records alongside the means
};

/// Per-agent simulation quantities (one instance or the across-instance mean).
struct SimRecord {
    double direct_liability = 0.0;    ///< phi*(i,i)
    double indirect_liability = 0.0;  ///< phi*(1,i); zero for agent 1
    double investment = 0.0;          ///< x*_i
    double p_direct = 0.0;            ///< prob. agent i is the disruptor
    double p_indirect = 0.0;          ///< prob. someone before i fails
    double expected_cost = 0.0;       ///< C_i(x*; phi*)
};

struct SimResult {
    std::vector<SimRecord> means;                   ///< one per agent
    std::vector<std::vector<SimRecord>> instances;  ///< reps x agents, when requested
};

/// Runs the seeded study: per instance, draw losses, solve the efficient
/// profile, build phi* and record the per-agent quantities; means use
/// pairwise summation in fixed agent order. Instance r draws from the
/// SplitMix64 stream (seed, r), so results are reproducible and
/// order-independent. A solver failure aborts with the failing instance
/// index in the message.
SimResult run_simulation(const SimConfig& cfg);

/// Header + rows of the 7-column simulation CSV (means).
std::string simulation_csv(const SimResult& result);

/// Two-panel SVG line chart of the means: investments with the direct /
/// indirect liability probabilities, and expected costs with the direct /
/// indirect liabilities.
std::string simulation_svg(const SimResult& result);

/// Worst-case efficiency-loss experiment configuration. Losses are fixed
/// internally to (epsilon, ..., epsilon, 1).
struct PoaConfig {
    std::size_t agents = 10;
    double epsilon = 0.01;
    double target_bound = 0.0;  ///< optional extra certification: ratio must exceed it
};

struct PoaResult {
    std::size_t n = 0;
    double epsilon = 0.0;
    double delta = 0.0;    ///< solves (1 - delta)^{n+1} = 1 - epsilon
    double ratio = 0.0;    ///< total cost under disruptor-pays / efficient total cost
    double c_hat = 0.0;
    double c_star = 0.0;
    bool certified = false;
    Profile x_hat;
    Profile x_star;
};

/// Technology for the worst-case construction: at z = 1 - epsilon it hits
/// p(z) = 1 - delta exactly and places p'(z) at the geometric midpoint of
/// the open interval ((1-delta)^2/(1-eps), (1-delta)/(1-eps)), with the
/// ceiling strictly below 1. Throws std::runtime_error when no such
/// technology exists at the requested parameters.
Technology calibrate_poa_technology(std::size_t n, double epsilon);

/// Builds the calibrated problem, solves the disruptor-pays equilibrium and
/// the efficient profile, and certifies the construction: every
/// disruptor-pays investment exceeds 1 - epsilon and the efficient total
/// cost stays below 1 + (n-1) epsilon.
PoaResult run_poa(const PoaConfig& cfg);

std::string poa_json(const PoaResult& result);

}  // namespace cascade
