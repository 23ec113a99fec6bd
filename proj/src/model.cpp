#include "cascade/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cascade {

namespace {

// log(1 + e^u) without overflow.
double softplus(double u) {
    if (u > 30.0) return u;
    if (u < -30.0) return std::exp(u);
    return std::log1p(std::exp(u));
}

// Smoothly capped ramp: T(0) = 0, T'(x) = 1/(1 + e^{2(x-knee)/width}),
// T(inf) = knee + (width/2) * log(1 + e^{-2 knee/width}).
double capped_ramp(double x, double knee, double width) {
    const double c0 = softplus(-2.0 * knee / width);
    return x - 0.5 * width * (softplus(2.0 * (x - knee) / width) - c0);
}

double capped_ramp_slope(double x, double knee, double width) {
    const double u = 2.0 * (x - knee) / width;
    if (u > 700.0) return 0.0;
    return 1.0 / (1.0 + std::exp(u));
}

double capped_ramp_sup(double knee, double width) {
    return knee + 0.5 * width * softplus(-2.0 * knee / width);
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

Technology Technology::sqrt_saturating(double scale) {
    require_finite(scale, "scale");
    if (scale <= 0.0) throw std::invalid_argument("sqrt technology needs scale > 0");
    Technology t;
    t.family_ = TechFamily::SqrtSaturating;
    t.scale_ = scale;
    return t;
}

Technology Technology::power_exponential(double ceiling, double rate, double exponent) {
    require_finite(ceiling, "ceiling");
    require_finite(rate, "rate");
    require_finite(exponent, "exponent");
    if (ceiling <= 0.0 || ceiling >= 1.0)
        throw std::invalid_argument("powerexp technology needs ceiling A in (0,1)");
    if (rate <= 0.0) throw std::invalid_argument("powerexp technology needs rate > 0");
    if (exponent <= 0.0 || exponent >= 1.0)
        throw std::invalid_argument("powerexp technology needs exponent b in (0,1)");
    Technology t;
    t.family_ = TechFamily::PowerExponential;
    t.ceiling_ = ceiling;
    t.rate_ = rate;
    t.exponent_ = exponent;
    return t;
}

Technology Technology::soft_cap(double sqrt_weight, double sqrt_scale, double slope, double knee,
                                double width) {
    require_finite(sqrt_weight, "sqrt_weight");
    require_finite(sqrt_scale, "sqrt_scale");
    require_finite(slope, "slope");
    require_finite(knee, "knee");
    require_finite(width, "width");
    if (sqrt_weight <= 0.0) throw std::invalid_argument("softcap technology needs sqrt_weight > 0");
    if (sqrt_scale <= 0.0) throw std::invalid_argument("softcap technology needs sqrt_scale > 0");
    if (slope <= 0.0) throw std::invalid_argument("softcap technology needs slope > 0");
    if (knee <= 0.0 || width <= 0.0)
        throw std::invalid_argument("softcap technology needs knee > 0 and width > 0");
    const double sup = sqrt_weight + slope * capped_ramp_sup(knee, width);
    if (sup >= 1.0) throw std::invalid_argument("softcap technology ceiling must stay below 1");
    Technology t;
    t.family_ = TechFamily::SoftCap;
    t.sqrt_weight_ = sqrt_weight;
    t.sqrt_scale_ = sqrt_scale;
    t.slope_ = slope;
    t.knee_ = knee;
    t.width_ = width;
    return t;
}

double Technology::eval(double x) const {
    if (!(x >= 0.0)) throw std::domain_error("technology evaluated at negative investment");
    switch (family_) {
        case TechFamily::SqrtSaturating: {
            const double s = std::sqrt(x / scale_);
            return s / (1.0 + s);
        }
        case TechFamily::PowerExponential: {
            if (x == 0.0) return 0.0;
            const double t = std::pow(x / rate_, exponent_);
            return ceiling_ * (-std::expm1(-t));
        }
        case TechFamily::SoftCap: {
            const double s = std::sqrt(x / sqrt_scale_);
            return sqrt_weight_ * s / (1.0 + s) + slope_ * capped_ramp(x, knee_, width_);
        }
    }
    return 0.0;
}

double Technology::deriv(double x) const {
    if (!(x > 0.0)) throw std::domain_error("technology slope diverges at zero investment");
    switch (family_) {
        case TechFamily::SqrtSaturating: {
            const double s = std::sqrt(x / scale_);
            const double onep = 1.0 + s;
            return 1.0 / (2.0 * scale_ * s * onep * onep);
        }
        case TechFamily::PowerExponential: {
            const double t = std::pow(x / rate_, exponent_);
            if (t > 700.0) return 0.0;
            return ceiling_ * std::exp(-t) * exponent_ * t / x;
        }
        case TechFamily::SoftCap: {
            const double s = std::sqrt(x / sqrt_scale_);
            const double onep = 1.0 + s;
            return sqrt_weight_ / (2.0 * sqrt_scale_ * s * onep * onep) +
                   slope_ * capped_ramp_slope(x, knee_, width_);
        }
    }
    return 0.0;
}

double Technology::log_deriv(double x) const {
    if (!(x > 0.0)) throw std::domain_error("p'/p requires positive investment");
    switch (family_) {
        case TechFamily::SqrtSaturating: {
            // p'/p = 1 / (2 x (1 + sqrt(x/c)))
            return 1.0 / (2.0 * x * (1.0 + std::sqrt(x / scale_)));
        }
        case TechFamily::PowerExponential: {
            // p'/p = b t / (x (e^t - 1)) with t = (x/l)^b
            const double t = std::pow(x / rate_, exponent_);
            if (t > 700.0) return 0.0;
            return exponent_ * t / (x * std::expm1(t));
        }
        case TechFamily::SoftCap:
            return deriv(x) / eval(x);
    }
    return 0.0;
}

double Technology::sup() const {
    switch (family_) {
        case TechFamily::SqrtSaturating: return 1.0;
        case TechFamily::PowerExponential: return ceiling_;
        case TechFamily::SoftCap:
            return sqrt_weight_ + slope_ * capped_ramp_sup(knee_, width_);
    }
    return 1.0;
}

Problem::Problem(std::vector<double> l, std::vector<Technology> t)
    : losses(std::move(l)), technologies(std::move(t)) {
    if (losses.empty()) throw std::invalid_argument("problem needs at least one agent");
    if (losses.size() != technologies.size())
        throw std::invalid_argument("losses and technologies must have equal length");
}

double Problem::loss_sum() const {
    double s = 0.0;
    for (double l : losses) s += l;
    return s;
}

std::vector<std::string> validate_problem(const Problem& pr) {
    std::vector<std::string> violations;
    auto flag = [&](const std::string& msg) { violations.push_back(msg); };

    for (std::size_t i = 0; i < pr.n(); ++i) {
        if (!(std::isfinite(pr.losses[i]) && pr.losses[i] > 0.0)) {
            std::ostringstream os;
            os << "loss " << i + 1 << " not positive";
            flag(os.str());
        }
    }

    // Log-spaced grid over [1e-9, 1e3]: monotone p, p < 1, strictly
    // decreasing slope. Points where p has saturated beyond double
    // resolution are skipped; the check is a numeric spot check of the
    // closed forms, not a proof.
    std::vector<double> grid;
    for (int k = 0; k <= 60; ++k) grid.push_back(std::pow(10.0, -9.0 + 12.0 * k / 60.0));

    for (std::size_t i = 0; i < pr.n(); ++i) {
        const Technology& t = pr.technologies[i];
        const std::string tag = "technology " + std::to_string(i + 1);
        if (t.eval(0.0) != 0.0) flag(tag + ": p(0) != 0");

        double prev_p = 0.0, prev_dp = std::numeric_limits<double>::infinity();
        const double sup = t.sup();
        for (double x : grid) {
            const double p = t.eval(x);
            const double dp = t.deriv(x);
            if (!(p >= 0.0 && p < 1.0)) {
                flag(tag + ": p outside [0,1)");
                break;
            }
            const bool saturated = sup - p <= 1e-14 * sup;
            if (!saturated && p <= prev_p) {
                flag(tag + ": p not strictly increasing");
                break;
            }
            if (!saturated && dp >= prev_dp) {
                flag(tag + ": slope not strictly decreasing");
                break;
            }
            prev_p = p;
            prev_dp = dp;
        }

        // Slope divergence at zero: p'(10^-k) keeps growing as k increases.
        double prev = t.deriv(1e-3);
        bool diverges = true;
        for (int k = 4; k <= 12; ++k) {
            const double d = t.deriv(std::pow(10.0, -k));
            if (d <= prev) {
                diverges = false;
                break;
            }
            prev = d;
        }
        if (!diverges || t.deriv(1e-12) < 1.05 * t.deriv(1e-3))
            flag(tag + ": slope does not diverge at zero");
    }

    return violations;
}

std::vector<double> marginal_losses_from_systemic(const std::vector<double>& systemic) {
    if (systemic.empty()) throw std::domain_error("systemic losses must be nonempty");
    const std::size_t n = systemic.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double next = i + 1 < n ? systemic[i + 1] : 0.0;
        if (!(std::isfinite(systemic[i]) && systemic[i] > next))
            throw std::domain_error("systemic losses must be strictly decreasing and positive");
    }
    std::vector<double> marginal(n);
    for (std::size_t i = 0; i + 1 < n; ++i) marginal[i] = systemic[i] - systemic[i + 1];
    marginal[n - 1] = systemic[n - 1];
    return marginal;
}

std::vector<double> chain_success_prefix(const Problem& pr, const Profile& x) {
    if (x.size() != pr.n()) throw std::invalid_argument("profile length mismatch");
    std::vector<double> prefix(pr.n());
    double acc = 1.0;
    for (std::size_t i = 0; i < pr.n(); ++i) {
        acc *= pr.technologies[i].eval(x[i]);
        prefix[i] = acc;
    }
    return prefix;
}

std::vector<double> disruptor_distribution(const Problem& pr, const Profile& x) {
    if (x.size() != pr.n()) throw std::invalid_argument("profile length mismatch");
    std::vector<double> dist(pr.n() + 1);
    double acc = 1.0;
    for (std::size_t i = 0; i < pr.n(); ++i) {
        const double p = pr.technologies[i].eval(x[i]);
        dist[i] = acc * (1.0 - p);
        acc *= p;
    }
    dist[pr.n()] = acc;
    return dist;
}

}  // namespace cascade
