#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cascade/model.hpp"
#include "cascade/rng.hpp"
#include "cascade/solvers.hpp"

namespace cascade {

/// One named numerical check. `worst` is the largest violation observed and
/// `tolerance` the bound it was held to; the fingerprint identifies the
/// instance (seed and dimensions) so failures can be replayed.
struct CheckResult {
    std::string name;
    bool pass = false;
    double worst = 0.0;
    double tolerance = 0.0;
    std::string fingerprint;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    bool all_pass() const;
};

/// Both directions of first-best implementation. Forward: the equilibrium
/// under phi* matches the efficient profile within tol (relative per
/// component). Converse: inflating one direct liability by 5% (rebalanced
/// off-diagonal within the row) moves the equilibrium by more than
/// `break_tol` somewhere.
std::vector<CheckResult> verify_first_best(const Problem& pr, double tol,
                                           const std::string& fingerprint,
                                           double break_tol = 1e-4);

/// Both directions of the cross-effects property (needs n >= 3). Forward:
/// under phi* every dC_k/dx_i at the efficient profile is within tol of
/// zero. Converse: a balanced rebalance of indirect liabilities (chosen to
/// maximize the induced derivative) produces a violation above 10 * tol.
std::vector<CheckResult> verify_cross_effects(const Problem& pr, double tol,
                                              const std::string& fingerprint);

/// Analytic mixed partials d2C_k/dx_i dx_k are nonpositive and agree with
/// second-order central differences on `samples` random interior profiles
/// and random balanced solutions.
std::vector<CheckResult> verify_supermodularity(const Problem& pr, int samples,
                                                std::uint64_t seed,
                                                const std::string& fingerprint);

/// At the efficient profile under phi*, each later agent's expected cost
/// equals its indirect liability plus its own investment, within tol.
std::vector<CheckResult> verify_equilibrium_identity(const Problem& pr, double tol,
                                                     const std::string& fingerprint);

/// Runs every check above plus solution-axiom round-trips on seeded random
/// problems of each requested size, in a fixed order.
VerificationReport verify_all(std::uint64_t seed, const std::vector<std::size_t>& sizes);

/// Report renderings: one line per check, and a JSON array of check objects.
std::string report_text(const VerificationReport& report);
std::string report_json(const VerificationReport& report);

/// Seeded random problem with losses in [1, 100] and technologies drawn
/// from both closed-form families. Shared by verify_all and the test
/// suites.
Problem random_problem(std::size_t n, SplitMix64& rng);

}  // namespace cascade
