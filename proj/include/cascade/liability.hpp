#pragma once

#include <cstddef>
#include <vector>

#include "cascade/model.hpp"

namespace cascade {

/// Weight vector for the two-axiom family of solutions. pi[j] in [0,1] for
/// every j; pi[0] is carried for uniform indexing but enters no formula
/// (no agent precedes agent 1).
struct PiWeights {
    std::vector<double> pi;
};

/// A liability solution: operator()(i, j) is agent j's liability when agent
/// i is the disruptor (0-based). Entries below the diagonal are zero and a
/// balanced solution's row i sums to the suffix loss sum over j >= i. The
/// matrix carries the loss vector it was built against so balance can be
/// audited. Construction is permissive: broken matrices are representable
/// on purpose, and check_axioms reports their violations as data.
class LiabilityMatrix {
public:
    /// All-zero matrix over the given losses.
    explicit LiabilityMatrix(std::vector<double> losses);

    /// Wraps an existing row-major n*n matrix.
    LiabilityMatrix(std::vector<double> losses, std::vector<double> phi_row_major);

    std::size_t n() const { return losses_.size(); }
    double operator()(std::size_t i, std::size_t j) const { return phi_[i * n() + j]; }
    double& at(std::size_t i, std::size_t j) { return phi_[i * n() + j]; }
    const std::vector<double>& losses() const { return losses_; }
    const std::vector<double>& raw() const { return phi_; }

private:
    std::vector<double> losses_;
    std::vector<double> phi_;  // row-major, row = disruptor
};

/// Per-axiom audit of a solution. Worst violations are absolute residuals;
/// the pass flags apply a relative tolerance scaled by the loss sum.
struct AxiomReport {
    bool balance = false;
    bool higher_direct = false;
    bool independent_indirect = false;
    double worst_balance = 0.0;
    double worst_higher_direct = 0.0;
    double worst_independent = 0.0;
    double tolerance = 0.0;
    bool all() const { return balance && higher_direct && independent_indirect; }
};

/// Builds the solution with weights pi: direct liabilities by the backward
/// recursion phi(n,n) = l_n, phi(i,i) = l_i + pi_{i+1} phi(i+1,i+1), and
/// indirect entries phi(i,j) = (1 - pi_j) phi(j,j) for i < j. Throws
/// std::domain_error when a weight leaves [0,1].
LiabilityMatrix make_pi_solution(const std::vector<double>& losses, const PiWeights& weights);

/// Assigns each disruptor the full suffix loss; zero elsewhere. Equals the
/// pi-family at all weights one.
LiabilityMatrix make_disruptor_pays(const std::vector<double>& losses);

/// phi(i,j) = l_j for every j >= i; the pi-family at all weights zero.
LiabilityMatrix make_own_loss(const std::vector<double>& losses);

/// The unique direct liabilities that make the induced game's equilibrium
/// efficient: phi(i,i) = l_i + sum_{k>i} prod_{i<j<=k} p_j(x*_j) l_k,
/// computed by backward recursion. Requires x_star componentwise positive.
std::vector<double> first_best_direct_liabilities(const Problem& pr, const Profile& x_star);

/// The canonical efficient solution: first-best diagonal plus independent
/// indirect liabilities phi(i,j) = (1 - p_j(x*_j)) phi(j,j). Coincides with
/// make_pi_solution at pi_j = p_j(x*_j).
LiabilityMatrix make_phi_star(const Problem& pr, const Profile& x_star);

/// Audits balance, higher direct liability and independent indirect
/// liabilities at relative tolerance `rel_tol` scaled by the loss sum.
AxiomReport check_axioms(const LiabilityMatrix& phi, double rel_tol = 1e-9);

/// Recovers the weight vector of an axiom-satisfying solution via
/// pi_j = 1 - phi(0,j)/phi(j,j). pi[0] is not identified by any entry and
/// is set to 1 by convention. With `strict`, every row i < j is
/// cross-checked for agreement. Throws std::domain_error when the matrix
/// fails the axioms.
PiWeights recover_pi(const LiabilityMatrix& phi, bool strict = false);

}  // namespace cascade
