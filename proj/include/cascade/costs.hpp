#pragma once

#include <cstddef>
#include <vector>

#include "cascade/liability.hpp"
#include "cascade/model.hpp"

namespace cascade {

/// Expected costs at one profile under one solution.
struct CostReport {
    std::vector<double> per_agent;       ///< C_k(x; phi)
    double total = 0.0;                  ///< C(x); phi-independent
    std::vector<double> disruptor_probs; ///< length n+1, last = nobody fails
};

/// C_k(x; phi): expected indirect liability from earlier disruptions,
/// expected direct liability, plus the investment paid upfront. Agent
/// indices are 0-based.
double expected_cost(const Problem& pr, const LiabilityMatrix& phi, const Profile& x,
                     std::size_t k);

/// Total system cost C(x) = sum_j (1 - prod_{i<=j} p_i(x_i)) l_j + sum_j x_j.
double total_cost(const Problem& pr, const Profile& x);

/// dC/dx_i = 1 - (p_i'/p_i) sum_{k>=i} prod_{j<=k} p_j(x_j) l_k. Requires
/// x_i > 0.
double partial_total(const Problem& pr, const Profile& x, std::size_t i);

/// dC_k/dx_i in closed form: zero for i > k, the own-investment expression
/// for i = k, and the three-term expression (own indirect liability,
/// telescoping middle agents, direct-liability tail) for i < k. Requires
/// x_i > 0.
double partial_cost(const Problem& pr, const LiabilityMatrix& phi, const Profile& x,
                    std::size_t k, std::size_t i);

/// d2C_k/dx_i dx_k = -(p_i'/p_i)(p_k'/p_k) prod_{j<=k} p_j(x_j) phi(k,k)
/// for i < k; never positive. Requires x_i, x_k > 0.
double cross_partial(const Problem& pr, const LiabilityMatrix& phi, const Profile& x,
                     std::size_t k, std::size_t i);

/// Assembles per-agent costs, the total, and the disruptor distribution.
CostReport make_cost_report(const Problem& pr, const LiabilityMatrix& phi, const Profile& x);

}  // namespace cascade
