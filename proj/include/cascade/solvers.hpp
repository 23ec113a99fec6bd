#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cascade/liability.hpp"
#include "cascade/model.hpp"

namespace cascade {

struct SolveOptions {
    double tolerance = 1e-10;        ///< max |FOC residual| accepted
    int max_outer_iterations = 500;  ///< coordinate sweeps for the efficient solver
    double bracket_growth = 2.0;     ///< upper-bracket growth factor
    int multistart = 5;              ///< solves per call; extras verify uniqueness
    std::uint64_t seed = 0x5eed;     ///< seeds the multistart perturbations
};

struct SolveResult {
    Profile profile;
    std::vector<double> residuals;  ///< per-agent FOC residuals (0 at corners)
    bool converged = false;
    int iterations = 0;
    double total = 0.0;  ///< total cost at `profile`
    bool multistart_agreement = true;
    double multistart_gap = 0.0;  ///< worst relative spread across starts
};

/// Root of p'(x) * multiplier = 1 on the strictly decreasing slope map:
/// bracket [0, hi] grown geometrically until the sign flips, then bisection
/// down to adjacent doubles. Returns 0 when multiplier <= 0. Throws
/// ConvergenceError (std::runtime_error) if no bracket is found.
double solve_marginal_foc(const Technology& tech, double multiplier,
                          double bracket_growth = 2.0);

/// Unique Nash equilibrium of the game induced by `phi`, computed front to
/// back: agent 0 solves p'(x) phi(0,0) = 1; each later agent solves its FOC
/// given the earlier solutions. A zero multiplier puts the agent (and
/// everyone after) at the zero-investment corner.
SolveResult solve_equilibrium(const Problem& pr, const LiabilityMatrix& phi,
                              const SolveOptions& opts = {});

/// Efficient profile: cyclic per-agent FOC sweeps from an upper-bound
/// initialization, rerun from `multistart - 1` seeded perturbed starts. The
/// lowest-cost converged profile is returned; disagreement across starts is
/// reported through multistart_agreement/multistart_gap.
SolveResult solve_efficient(const Problem& pr, const SolveOptions& opts = {});

struct MatchReport {
    bool matches = false;
    double max_gap = 0.0;  ///< worst componentwise relative gap
};

/// Solves the equilibrium under `phi` and the efficient profile, and
/// reports whether they agree within 1e-6 relative per component.
MatchReport equilibrium_equals_efficient(const Problem& pr, const LiabilityMatrix& phi,
                                         const SolveOptions& opts = {});

/// Componentwise relative gap between two profiles.
double profile_gap(const Profile& a, const Profile& b);

}  // namespace cascade
