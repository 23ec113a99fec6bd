#include "cascade/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cascade/costs.hpp"
#include "cascade/io.hpp"
#include "cascade/liability.hpp"
#include "cascade/rng.hpp"

namespace cascade {

namespace {

std::vector<SimRecord> instance_records(const Problem& pr, const Profile& x_star) {
    const std::size_t n = pr.n();
    const LiabilityMatrix phi = make_phi_star(pr, x_star);
    std::vector<SimRecord> rec(n);
    double prefix = 1.0;  // prod_{j<i} p_j
    for (std::size_t i = 0; i < n; ++i) {
        const double p = pr.technologies[i].eval(x_star[i]);
        rec[i].direct_liability = phi(i, i);
        rec[i].indirect_liability = i == 0 ? 0.0 : phi(0, i);
        rec[i].investment = x_star[i];
        rec[i].p_direct = prefix * (1.0 - p);
        rec[i].p_indirect = 1.0 - prefix;
        rec[i].expected_cost = expected_cost(pr, phi, x_star, i);
        prefix *= p;
    }
    return rec;
}

// Pairwise sum over the instance axis; keeps the reduction independent of
// accumulation chunking.
double pairwise(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise(v, lo, mid) + pairwise(v, mid, hi);
}

}  // namespace

SimResult run_simulation(const SimConfig& cfg) {
    if (cfg.agents < 1 || cfg.reps < 1)
        throw std::invalid_argument("simulation needs at least one agent and one instance");
    if (!(cfg.loss_low > 0.0 && cfg.loss_low <= cfg.loss_high))
        throw std::invalid_argument("loss bounds need 0 < low <= high");

    const std::size_t n = cfg.agents;
    SolveOptions opts;
    opts.multistart = 1;  // hot loop; uniqueness is certified on sampled instances elsewhere

    std::vector<std::vector<SimRecord>> all(cfg.reps);
    for (std::size_t r = 0; r < cfg.reps; ++r) {
        SplitMix64 rng = SplitMix64::stream(cfg.seed, r);
        std::vector<double> losses(n);
        for (double& l : losses) l = rng.uniform(cfg.loss_low, cfg.loss_high);
        Problem pr(std::move(losses), std::vector<Technology>(n, cfg.technology));

        const SolveResult sol = solve_efficient(pr, opts);
        if (!sol.converged)
            throw std::runtime_error("efficient solve failed at instance " + std::to_string(r) +
                                     " (seed " + std::to_string(cfg.seed) + ")");
        all[r] = instance_records(pr, sol.profile);
    }

    SimResult result;
    result.means.resize(n);
    std::vector<double> column(cfg.reps);
    const double scale = 1.0 / static_cast<double>(cfg.reps);
    for (std::size_t i = 0; i < n; ++i) {
        const auto mean_of = [&](double SimRecord::*field) {
            for (std::size_t r = 0; r < cfg.reps; ++r) column[r] = all[r][i].*field;
            return pairwise(column, 0, cfg.reps) * scale;
        };
        result.means[i].direct_liability = mean_of(&SimRecord::direct_liability);
        result.means[i].indirect_liability = mean_of(&SimRecord::indirect_liability);
        result.means[i].investment = mean_of(&SimRecord::investment);
        result.means[i].p_direct = mean_of(&SimRecord::p_direct);
        result.means[i].p_indirect = mean_of(&SimRecord::p_indirect);
        result.means[i].expected_cost = mean_of(&SimRecord::expected_cost);
    }
    if (cfg.per_instance) result.instances = std::move(all);
    return result;
}

std::string simulation_csv(const SimResult& result) {
    std::ostringstream os;
    os << "agent,direct_liability,indirect_liability,investment,p_direct,p_indirect,"
          "expected_cost\n";
    for (std::size_t i = 0; i < result.means.size(); ++i) {
        const SimRecord& m = result.means[i];
        os << i + 1 << ',' << io::format_g17(m.direct_liability) << ','
           << io::format_g17(m.indirect_liability) << ',' << io::format_g17(m.investment) << ','
           << io::format_g17(m.p_direct) << ',' << io::format_g17(m.p_indirect) << ','
           << io::format_g17(m.expected_cost) << '\n';
    }
    return os.str();
}

Technology calibrate_poa_technology(std::size_t n, double epsilon) {
    if (n < 1) throw std::invalid_argument("calibration needs at least one agent");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("calibration needs epsilon in (0,1)");

    const double z = 1.0 - epsilon;
    const double delta = -std::expm1(std::log1p(-epsilon) / static_cast<double>(n + 1));
    const double target_p = 1.0 - delta;
    const double band_low = target_p * target_p / z;
    const double band_high = target_p / z;
    const double target_slope = std::sqrt(band_low * band_high);
    if (!(band_low < target_slope && target_slope < band_high))
        throw std::runtime_error(
            "slope band collapsed at these parameters; retry with a larger epsilon");

    // The knee sits far enough past z that its slope leakage at z
    // (e^{-2 kappa}) stays two orders below delta, and the sqrt term is
    // scaled so it is nearly saturated at z and wastes little of the
    // ceiling headroom.
    const double width = delta / 50.0;
    const double kappa = std::max(6.0, 0.5 * std::log(50.0 / delta));
    const double knee = z + kappa * width;
    const double sqrt_scale = z / 100.0;

    // Solve the 2x2 system  a*u(z) + m*T(z) = 1-delta,
    //                       a*u'(z) + m*T'(z) = target_slope
    // for the sqrt weight a and ramp slope m.
    const double s = std::sqrt(z / sqrt_scale);
    const double uz = s / (1.0 + s);
    const double upz = 1.0 / (2.0 * sqrt_scale * s * (1.0 + s) * (1.0 + s));
    const double arg = 2.0 * (z - knee) / width;
    const double tpz = 1.0 / (1.0 + std::exp(arg));
    const double tz =
        z - 0.5 * width * (std::log1p(std::exp(arg)) - std::log1p(std::exp(-2.0 * knee / width)));
    const double det = uz * tpz - tz * upz;
    const double m = (uz * target_slope - upz * target_p) / det;
    const double a = (target_p - m * tz) / uz;
    if (!(a > 0.0 && m > 0.0))
        throw std::runtime_error(
            "calibration produced no valid technology; retry with a larger epsilon");

    Technology tech = Technology::soft_cap(a, sqrt_scale, m, knee, width);  // ceiling re-checked
    if (std::abs(tech.eval(z) - target_p) > 1e-10)
        throw std::runtime_error("calibration missed the target success probability");
    const double slope = tech.deriv(z);
    if (!(band_low < slope && slope < band_high))
        throw std::runtime_error("calibration missed the slope band");
    return tech;
}

PoaResult run_poa(const PoaConfig& cfg) {
    const std::size_t n = cfg.agents;
    const Technology tech = calibrate_poa_technology(n, cfg.epsilon);

    std::vector<double> losses(n, cfg.epsilon);
    losses[n - 1] = 1.0;
    Problem pr(std::move(losses), std::vector<Technology>(n, tech));

    SolveOptions opts;  // multistart default: the knee creates a second basin
    const SolveResult hat = solve_equilibrium(pr, make_disruptor_pays(pr.losses), opts);
    const SolveResult star = solve_efficient(pr, opts);
    if (!hat.converged || !star.converged)
        throw std::runtime_error("worst-case experiment solver failed to converge");

    PoaResult res;
    res.n = n;
    res.epsilon = cfg.epsilon;
    res.delta = -std::expm1(std::log1p(-cfg.epsilon) / static_cast<double>(n + 1));
    res.c_hat = hat.total;
    res.c_star = star.total;
    res.ratio = res.c_hat / res.c_star;
    res.x_hat = hat.profile;
    res.x_star = star.profile;

    const double floor = 1.0 - cfg.epsilon;
    bool all_above = true;
    for (double x : res.x_hat) all_above = all_above && x > floor;
    const double zero_cost = 1.0 + (static_cast<double>(n) - 1.0) * cfg.epsilon;
    res.certified = all_above && res.c_star < zero_cost &&
                    (cfg.target_bound <= 0.0 || res.ratio > cfg.target_bound);
    return res;
}

std::string poa_json(const PoaResult& result) {
    nlohmann::ordered_json j;
    j["n"] = result.n;
    j["epsilon"] = result.epsilon;
    j["delta"] = result.delta;
    j["ratio"] = result.ratio;
    j["certified"] = result.certified;
    j["c_hat"] = result.c_hat;
    j["c_star"] = result.c_star;
    return j.dump(2) + "\n";
}

namespace {

struct Series {
    std::vector<double> y;
    const char* dash;
    bool right_axis;
};

std::string panel_svg(double x0, const std::vector<Series>& series, std::size_t agents,
                      const std::string& title) {
    const double w = 360.0, h = 240.0, ml = 46.0, mr = 46.0, mt = 28.0, mb = 30.0;
    std::ostringstream os;

    double lo = 0.0, hi = 0.0;
    for (const Series& s : series)
        if (!s.right_axis)
            for (double v : s.y) hi = std::max(hi, v);
    if (hi <= 0.0) hi = 1.0;

    const auto xpix = [&](std::size_t i) {
        return x0 + ml + (w - ml - mr) * static_cast<double>(i) /
                             static_cast<double>(std::max<std::size_t>(agents - 1, 1));
    };
    const auto ypix = [&](double v, bool right) {
        const double top = right ? 1.0 : hi;
        return mt + (h - mt - mb) * (1.0 - (v - lo) / (top - lo));
    };

    os << "<g>\n<rect x=\"" << x0 + ml << "\" y=\"" << mt << "\" width=\"" << w - ml - mr
       << "\" height=\"" << h - mt - mb << "\" fill=\"none\" stroke=\"#888\"/>\n";
    os << "<text x=\"" << x0 + w / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"12\">"
       << title << "</text>\n";
    for (const Series& s : series) {
        os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.2\"";
        if (s.dash[0]) os << " stroke-dasharray=\"" << s.dash << "\"";
        os << " points=\"";
        for (std::size_t i = 0; i < s.y.size(); ++i)
            os << xpix(i) << ',' << ypix(s.y[i], s.right_axis) << ' ';
        os << "\"/>\n";
    }
    for (std::size_t i = 0; i < agents; ++i)
        os << "<text x=\"" << xpix(i) << "\" y=\"" << h - 10
           << "\" text-anchor=\"middle\" font-size=\"10\">" << i + 1 << "</text>\n";
    os << "<text x=\"" << x0 + ml - 6 << "\" y=\"" << ypix(hi, false) + 4
       << "\" text-anchor=\"end\" font-size=\"10\">" << io::format_g17(hi).substr(0, 6)
       << "</text>\n";
    os << "</g>\n";
    return os.str();
}

}  // namespace

std::string simulation_svg(const SimResult& result) {
    const std::size_t n = result.means.size();
    std::vector<double> inv(n), pdir(n), pind(n), dl(n), il(n), ec(n);
    for (std::size_t i = 0; i < n; ++i) {
        inv[i] = result.means[i].investment;
        pdir[i] = result.means[i].p_direct;
        pind[i] = result.means[i].p_indirect;
        dl[i] = result.means[i].direct_liability;
        il[i] = result.means[i].indirect_liability;
        ec[i] = result.means[i].expected_cost;
    }
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"740\" height=\"250\" "
          "viewBox=\"0 0 740 250\">\n";
    os << panel_svg(0.0,
                    {{inv, "", false}, {pdir, "2,2", true}, {pind, "6,3", true}},
                    n, "investment / liability probabilities");
    os << panel_svg(370.0,
                    {{ec, "", false}, {dl, "2,2", false}, {il, "6,3", false}},
                    n, "expected cost / liabilities");
    os << "</svg>\n";
    return os.str();
}

}  // namespace cascade
