#include "cascade/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cascade/costs.hpp"
#include "cascade/rng.hpp"

namespace cascade {

double solve_marginal_foc(const Technology& tech, double multiplier, double bracket_growth) {
    if (!(multiplier > 0.0)) return 0.0;
    if (!(bracket_growth > 1.0)) throw std::invalid_argument("bracket growth must exceed 1");

    const auto above = [&](double x) { return tech.deriv(x) * multiplier >= 1.0; };

    double lo = 0.0, hi = 1.0;
    int grows = 0;
    while (above(hi)) {
        lo = hi;
        hi *= bracket_growth;
        if (++grows > 1200) throw std::runtime_error("FOC bracketing failed to find a sign change");
    }

    // Bisect to adjacent doubles; the slope map is strictly decreasing so
    // the bracket is exact.
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(lo < mid && mid < hi)) break;
        (above(mid) ? lo : hi) = mid;
    }
    // Roots below the normal floor collapse to the corner; subnormal
    // investments are zero for every quantity built on them.
    if (hi < std::numeric_limits<double>::min()) return 0.0;
    if (lo == 0.0) return hi;
    const double rlo = std::abs(tech.deriv(lo) * multiplier - 1.0);
    const double rhi = std::abs(tech.deriv(hi) * multiplier - 1.0);
    return rlo <= rhi ? lo : hi;
}

SolveResult solve_equilibrium(const Problem& pr, const LiabilityMatrix& phi,
                              const SolveOptions& opts) {
    if (phi.n() != pr.n()) throw std::invalid_argument("solution size mismatch");
    const std::size_t n = pr.n();

    SolveResult res;
    res.profile.assign(n, 0.0);
    res.residuals.assign(n, 0.0);
    bool failed = false;
    double prefix = 1.0;
    for (std::size_t k = 0; k < n && !failed; ++k) {
        const double multiplier = prefix * phi(k, k);
        try {
            const double xk =
                solve_marginal_foc(pr.technologies[k], multiplier, opts.bracket_growth);
            res.profile[k] = xk;
            res.residuals[k] =
                xk > 0.0 ? 1.0 - pr.technologies[k].deriv(xk) * multiplier : 0.0;
            prefix *= pr.technologies[k].eval(xk);
        } catch (const std::runtime_error&) {
            failed = true;  // keep the agents solved so far as partial state
            res.residuals[k] = 1.0;
        }
    }
    res.iterations = static_cast<int>(n);
    res.total = total_cost(pr, res.profile);
    bool ok = !failed;
    for (double r : res.residuals) ok = ok && std::abs(r) <= opts.tolerance;  // NaN fails
    res.converged = ok;
    return res;
}

namespace {

// Backward accumulation of l_i + sum_{k>i} prod_{i<j<=k} p_j(x_j) l_k for
// every i, given current success probabilities.
void direct_tails(const std::vector<double>& losses, const std::vector<double>& p,
                  std::vector<double>& tails) {
    const std::size_t n = losses.size();
    tails[n - 1] = losses[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) tails[i] = losses[i] + p[i + 1] * tails[i + 1];
}

struct SweepOutcome {
    Profile x;
    std::vector<double> residuals;
    bool converged = false;
    int sweeps = 0;
    double total = 0.0;
};

SweepOutcome run_sweeps(const Problem& pr, Profile x, const SolveOptions& opts) {
    const std::size_t n = pr.n();
    std::vector<double> p(n), tails(n);
    SweepOutcome out;
    out.residuals.assign(n, 0.0);

    for (std::size_t i = 0; i < n; ++i) p[i] = pr.technologies[i].eval(x[i]);

    for (int sweep = 1; sweep <= opts.max_outer_iterations; ++sweep) {
        double prefix = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            direct_tails(pr.losses, p, tails);
            try {
                x[i] = solve_marginal_foc(pr.technologies[i], prefix * tails[i],
                                          opts.bracket_growth);
            } catch (const std::runtime_error&) {
                out.x = std::move(x);
                out.total = total_cost(pr, out.x);
                return out;  // partial state, converged stays false
            }
            p[i] = pr.technologies[i].eval(x[i]);
            prefix *= p[i];
        }

        // Residuals are the exact total-cost gradient entries.
        double acc = 1.0;
        std::vector<double> pref(n);
        for (std::size_t i = 0; i < n; ++i) {
            acc *= p[i];
            pref[i] = acc;
        }
        double weighted = 0.0;
        bool ok = true;
        for (std::size_t i = n; i-- > 0;) {
            weighted += pref[i] * pr.losses[i];
            out.residuals[i] =
                x[i] > 0.0 ? 1.0 - pr.technologies[i].log_deriv(x[i]) * weighted : 0.0;
            ok = ok && std::abs(out.residuals[i]) <= opts.tolerance;  // NaN fails
        }
        out.sweeps = sweep;
        if (ok) {
            out.converged = true;
            break;
        }
    }
    out.x = std::move(x);
    out.total = total_cost(pr, out.x);
    return out;
}

}  // namespace

SolveResult solve_efficient(const Problem& pr, const SolveOptions& opts) {
    const std::size_t n = pr.n();

    // Upper-bound start: each agent solves alone against its full suffix loss.
    Profile init(n);
    double suffix = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        suffix += pr.losses[i];
        init[i] = solve_marginal_foc(pr.technologies[i], suffix, opts.bracket_growth);
    }

    SweepOutcome best = run_sweeps(pr, init, opts);
    int iterations = best.sweeps;
    bool agreement = true;
    double gap = 0.0;

    SplitMix64 rng(opts.seed);
    for (int s = 1; s < opts.multistart; ++s) {
        Profile start(n);
        for (std::size_t i = 0; i < n; ++i)
            start[i] = std::max(1e-9, rng.uniform() * 1.5) * init[i];
        SweepOutcome other = run_sweeps(pr, start, opts);
        iterations += other.sweeps;
        if (!other.converged) {
            agreement = false;  // a failed start certifies nothing
            continue;
        }
        if (best.converged) {
            const double g = profile_gap(best.x, other.x);
            gap = std::max(gap, g);
            if (g > 1e-6) agreement = false;
        }
        // Keep the lowest-cost stationary point.
        if (!best.converged || other.total < best.total) best = std::move(other);
    }

    SolveResult res;
    res.profile = best.x;
    res.residuals = best.residuals;
    res.converged = best.converged;
    res.iterations = iterations;
    res.total = best.total;
    res.multistart_agreement = agreement;
    res.multistart_gap = gap;
    return res;
}

double profile_gap(const Profile& a, const Profile& b) {
    if (a.size() != b.size()) throw std::invalid_argument("profile length mismatch");
    double gap = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max(std::abs(a[i]), std::abs(b[i]));
        if (scale < 1e-300) continue;
        gap = std::max(gap, std::abs(a[i] - b[i]) / scale);
    }
    return gap;
}

MatchReport equilibrium_equals_efficient(const Problem& pr, const LiabilityMatrix& phi,
                                         const SolveOptions& opts) {
    const SolveResult eff = solve_efficient(pr, opts);
    const SolveResult eq = solve_equilibrium(pr, phi, opts);
    if (!eff.converged || !eq.converged)
        throw std::runtime_error("solver did not converge while comparing profiles");
    MatchReport rep;
    rep.max_gap = profile_gap(eff.profile, eq.profile);
    rep.matches = rep.max_gap <= 1e-6;
    return rep;
}

}  // namespace cascade
