#include "cascade/liability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cascade {

namespace {

void require_losses(const std::vector<double>& losses) {
    if (losses.empty()) throw std::invalid_argument("losses must be nonempty");
    for (double l : losses)
        if (!(std::isfinite(l) && l > 0.0))
            throw std::invalid_argument("losses must be positive");
}

}  // namespace

LiabilityMatrix::LiabilityMatrix(std::vector<double> losses)
    : losses_(std::move(losses)), phi_(losses_.size() * losses_.size(), 0.0) {
    if (losses_.empty()) throw std::invalid_argument("losses must be nonempty");
}

LiabilityMatrix::LiabilityMatrix(std::vector<double> losses, std::vector<double> phi_row_major)
    : losses_(std::move(losses)), phi_(std::move(phi_row_major)) {
    if (losses_.empty()) throw std::invalid_argument("losses must be nonempty");
    if (phi_.size() != losses_.size() * losses_.size())
        throw std::invalid_argument("liability matrix must be n x n");
}

LiabilityMatrix make_pi_solution(const std::vector<double>& losses, const PiWeights& weights) {
    require_losses(losses);
    const std::size_t n = losses.size();
    if (weights.pi.size() != n) throw std::domain_error("pi weights must have one entry per agent");
    for (double w : weights.pi)
        if (!(w >= 0.0 && w <= 1.0)) throw std::domain_error("pi weights must lie in [0,1]");

    std::vector<double> diag(n);
    diag[n - 1] = losses[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        diag[i] = losses[i] + weights.pi[i + 1] * diag[i + 1];

    LiabilityMatrix phi(losses);
    for (std::size_t i = 0; i < n; ++i) {
        phi.at(i, i) = diag[i];
        for (std::size_t j = i + 1; j < n; ++j) phi.at(i, j) = (1.0 - weights.pi[j]) * diag[j];
    }
    return phi;
}

LiabilityMatrix make_disruptor_pays(const std::vector<double>& losses) {
    require_losses(losses);
    const std::size_t n = losses.size();
    LiabilityMatrix phi(losses);
    double suffix = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        suffix += losses[i];
        phi.at(i, i) = suffix;
    }
    return phi;
}

LiabilityMatrix make_own_loss(const std::vector<double>& losses) {
    require_losses(losses);
    const std::size_t n = losses.size();
    LiabilityMatrix phi(losses);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) phi.at(i, j) = losses[j];
    return phi;
}

std::vector<double> first_best_direct_liabilities(const Problem& pr, const Profile& x_star) {
    if (x_star.size() != pr.n()) throw std::invalid_argument("profile length mismatch");
    for (double x : x_star)
        if (!(x > 0.0)) throw std::domain_error("first-best liabilities need a positive profile");

    const std::size_t n = pr.n();
    std::vector<double> diag(n);
    diag[n - 1] = pr.losses[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        diag[i] = pr.losses[i] + pr.technologies[i + 1].eval(x_star[i + 1]) * diag[i + 1];
    return diag;
}

LiabilityMatrix make_phi_star(const Problem& pr, const Profile& x_star) {
    const std::vector<double> diag = first_best_direct_liabilities(pr, x_star);
    const std::size_t n = pr.n();
    LiabilityMatrix phi(pr.losses);
    for (std::size_t i = 0; i < n; ++i) {
        phi.at(i, i) = diag[i];
        for (std::size_t j = i + 1; j < n; ++j)
            phi.at(i, j) = (1.0 - pr.technologies[j].eval(x_star[j])) * diag[j];
    }
    return phi;
}

AxiomReport check_axioms(const LiabilityMatrix& phi, double rel_tol) {
    const std::size_t n = phi.n();
    const std::vector<double>& losses = phi.losses();
    double loss_sum = 0.0;
    for (double l : losses) loss_sum += l;

    AxiomReport rep;
    rep.tolerance = rel_tol * std::max(loss_sum, 1e-300);

    double suffix = 0.0;
    std::vector<double> suffixes(n);
    for (std::size_t i = n; i-- > 0;) {
        suffix += losses[i];
        suffixes[i] = suffix;
    }

    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = i; j < n; ++j) row += phi(i, j);
        rep.worst_balance = std::max(rep.worst_balance, std::abs(row - suffixes[i]));
        for (std::size_t j = 0; j < i; ++j)
            rep.worst_balance = std::max(rep.worst_balance, std::abs(phi(i, j)));
    }

    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k)
            rep.worst_higher_direct =
                std::max(rep.worst_higher_direct, phi(j, k) - phi(k, k));

    for (std::size_t k = 2; k < n; ++k)
        for (std::size_t i = 0; i + 1 < k; ++i)
            rep.worst_independent =
                std::max(rep.worst_independent, std::abs(phi(i, k) - phi(i + 1, k)));

    rep.balance = rep.worst_balance <= rep.tolerance;
    rep.higher_direct = rep.worst_higher_direct <= rep.tolerance;
    rep.independent_indirect = rep.worst_independent <= rep.tolerance;
    return rep;
}

PiWeights recover_pi(const LiabilityMatrix& phi, bool strict) {
    const AxiomReport rep = check_axioms(phi);
    if (!rep.all()) throw std::domain_error("matrix does not satisfy the solution axioms");

    const std::size_t n = phi.n();
    PiWeights w;
    w.pi.assign(n, 1.0);  // pi[0] stays at the convention value
    for (std::size_t j = 1; j < n; ++j) {
        if (!(phi(j, j) > 0.0))
            throw std::domain_error("axiom-satisfying solutions have positive direct liabilities");
        w.pi[j] = 1.0 - phi(0, j) / phi(j, j);
        w.pi[j] = std::clamp(w.pi[j], 0.0, 1.0);
        if (strict) {
            for (std::size_t i = 1; i < j; ++i) {
                const double alt = 1.0 - phi(i, j) / phi(j, j);
                if (std::abs(alt - w.pi[j]) > 1e-9)
                    throw std::domain_error("rows disagree on recovered weights");
            }
        }
    }
    return w;
}

}  // namespace cascade
