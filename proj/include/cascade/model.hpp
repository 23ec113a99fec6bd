#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace cascade {

/// Success-probability technology families. Every family is strictly
/// increasing, strictly concave, differentiable on (0, inf), has p(0) = 0,
/// p(x) < 1 for all x, and p'(x) -> inf as x -> 0+.
enum class TechFamily {
    SqrtSaturating,    ///< p(x) = sqrt(x/c) / (1 + sqrt(x/c)), scale c > 0
    PowerExponential,  ///< p(x) = A * (1 - exp(-(x/l)^b)), A in (0,1), l > 0, b in (0,1)
    SoftCap,           ///< a * sqrt(x)/(1+sqrt(x)) + m * ramp capped smoothly at `knee`
};

/// One agent's investment technology. Construct through the named factories,
/// which validate parameters; invalid parameters throw std::invalid_argument.
class Technology {
public:
    static Technology sqrt_saturating(double scale);
    static Technology power_exponential(double ceiling, double rate, double exponent);

    /// Near-linear ramp of the given slope that bends to a ceiling just past
    /// `knee` (transition width `width`), plus `sqrt_weight` times the
    /// sqrt-saturating curve at scale `sqrt_scale` so the slope still
    /// diverges at zero. Requires positive parameters and a total ceiling
    /// below 1.
    static Technology soft_cap(double sqrt_weight, double sqrt_scale, double slope, double knee,
                               double width);

    /// p(x). Requires x >= 0 (throws std::domain_error otherwise).
    double eval(double x) const;

    /// p'(x) in closed form. Requires x > 0; x = 0 throws std::domain_error
    /// (the derivative diverges there).
    double deriv(double x) const;

    /// p'(x)/p(x) evaluated jointly per family so the ratio stays accurate
    /// for small x. Requires x > 0.
    double log_deriv(double x) const;

    /// Least upper bound of p (1.0 for SqrtSaturating, the ceiling otherwise).
    double sup() const;

    TechFamily family() const { return family_; }

    // Parameters; meaning depends on the family. Unused slots are zero.
    double scale() const { return scale_; }
    double ceiling() const { return ceiling_; }
    double rate() const { return rate_; }
    double exponent() const { return exponent_; }
    double sqrt_weight() const { return sqrt_weight_; }
    double sqrt_scale() const { return sqrt_scale_; }
    double slope() const { return slope_; }
    double knee() const { return knee_; }
    double width() const { return width_; }

private:
    Technology() = default;

    TechFamily family_ = TechFamily::SqrtSaturating;
    double scale_ = 0.0;
    double ceiling_ = 0.0, rate_ = 0.0, exponent_ = 0.0;
    double sqrt_weight_ = 0.0, sqrt_scale_ = 0.0, slope_ = 0.0, knee_ = 0.0, width_ = 0.0;
};

/// A problem instance: one positive loss and one technology per agent.
/// Agents are indexed 0..n-1 internally; file formats and reports use
/// 1-based indices.
struct Problem {
    std::vector<double> losses;
    std::vector<Technology> technologies;

    Problem(std::vector<double> l, std::vector<Technology> t);

    std::size_t n() const { return losses.size(); }
    double loss_sum() const;
};

/// Investment profiles are plain nonnegative vectors, one entry per agent.
using Profile = std::vector<double>;

/// Checks all Problem invariants plus numeric spot checks of each
/// technology (monotonicity, strict slope decrease and divergence of the
/// slope at zero on a log-spaced grid over [1e-9, 1e3]). Violations are
/// returned as messages; an empty list means the problem is valid.
std::vector<std::string> validate_problem(const Problem& pr);

/// Converts strictly decreasing systemic losses L_1 > ... > L_n > 0 into
/// per-step marginal losses (l_i = L_i - L_{i+1}, l_n = L_n). Throws
/// std::domain_error when L is not strictly decreasing and positive.
std::vector<double> marginal_losses_from_systemic(const std::vector<double>& systemic);

/// Prefix success products: entry j holds prod_{i<=j} p_i(x_i).
std::vector<double> chain_success_prefix(const Problem& pr, const Profile& x);

/// Probability distribution of the disruptor identity. Entries 0..n-1 give
/// the probability that the corresponding agent is the first to fail; the
/// final entry is the probability that nobody fails. Sums to 1.
std::vector<double> disruptor_distribution(const Problem& pr, const Profile& x);

}  // namespace cascade
