#include "cascade/costs.hpp"

#include <cmath>
#include <stdexcept>

namespace cascade {

namespace {

void check_args(const Problem& pr, const LiabilityMatrix& phi, const Profile& x) {
    if (x.size() != pr.n() || phi.n() != pr.n())
        throw std::invalid_argument("dimension mismatch between problem, solution and profile");
}

}  // namespace

double expected_cost(const Problem& pr, const LiabilityMatrix& phi, const Profile& x,
                     std::size_t k) {
    check_args(pr, phi, x);
    if (k >= pr.n()) throw std::invalid_argument("agent index out of range");

    double cost = x[k];
    double prefix = 1.0;  // prod_{i<j} p_i(x_i)
    for (std::size_t j = 0; j < k; ++j) {
        const double pj = pr.technologies[j].eval(x[j]);
        cost += prefix * (1.0 - pj) * phi(j, k);
        prefix *= pj;
    }
    cost += prefix * (1.0 - pr.technologies[k].eval(x[k])) * phi(k, k);
    return cost;
}

double total_cost(const Problem& pr, const Profile& x) {
    if (x.size() != pr.n()) throw std::invalid_argument("profile length mismatch");
    double cost = 0.0, prefix = 1.0;
    for (std::size_t j = 0; j < pr.n(); ++j) {
        prefix *= pr.technologies[j].eval(x[j]);
        cost += (1.0 - prefix) * pr.losses[j] + x[j];
    }
    return cost;
}

double partial_total(const Problem& pr, const Profile& x, std::size_t i) {
    if (x.size() != pr.n()) throw std::invalid_argument("profile length mismatch");
    if (i >= pr.n()) throw std::invalid_argument("agent index out of range");
    if (!(x[i] > 0.0)) throw std::domain_error("partial_total needs x_i > 0");

    // sum_{k>=i} prod_{j<=k} p_j(x_j) l_k, accumulated backward.
    std::vector<double> prefix(pr.n());
    double acc = 1.0;
    for (std::size_t j = 0; j < pr.n(); ++j) {
        acc *= pr.technologies[j].eval(x[j]);
        prefix[j] = acc;
    }
    double weighted = 0.0;
    for (std::size_t k = pr.n(); k-- > i;) weighted += prefix[k] * pr.losses[k];
    return 1.0 - pr.technologies[i].log_deriv(x[i]) * weighted;
}

double partial_cost(const Problem& pr, const LiabilityMatrix& phi, const Profile& x,
                    std::size_t k, std::size_t i) {
    check_args(pr, phi, x);
    if (k >= pr.n() || i >= pr.n()) throw std::invalid_argument("agent index out of range");
    if (i > k) return 0.0;  // earlier costs never depend on later investments
    if (!(x[i] > 0.0)) throw std::domain_error("partial_cost needs x_i > 0");

    const double ratio = pr.technologies[i].log_deriv(x[i]);
    double prefix = 1.0;  // prod_{h<j} p_h(x_h), advanced as j moves
    for (std::size_t h = 0; h < i; ++h) prefix *= pr.technologies[h].eval(x[h]);

    if (i == k) {
        const double pk = pr.technologies[k].eval(x[k]);
        return 1.0 - ratio * prefix * pk * phi(k, k);
    }

    // i < k: own indirect term, middle agents, then the direct tail.
    const double pi_val = pr.technologies[i].eval(x[i]);
    double value = -ratio * prefix * pi_val * phi(i, k);
    prefix *= pi_val;
    for (std::size_t j = i + 1; j < k; ++j) {
        const double pj = pr.technologies[j].eval(x[j]);
        value += ratio * prefix * (1.0 - pj) * phi(j, k);
        prefix *= pj;
    }
    const double pk = pr.technologies[k].eval(x[k]);
    value += ratio * prefix * (1.0 - pk) * phi(k, k);
    return value;
}

double cross_partial(const Problem& pr, const LiabilityMatrix& phi, const Profile& x,
                     std::size_t k, std::size_t i) {
    check_args(pr, phi, x);
    if (k >= pr.n() || i >= k) throw std::invalid_argument("cross partial needs i < k <= n");
    if (!(x[i] > 0.0 && x[k] > 0.0)) throw std::domain_error("cross_partial needs interior x");

    double prefix = 1.0;
    for (std::size_t j = 0; j <= k; ++j) prefix *= pr.technologies[j].eval(x[j]);
    return -pr.technologies[i].log_deriv(x[i]) * pr.technologies[k].log_deriv(x[k]) * prefix *
           phi(k, k);
}

CostReport make_cost_report(const Problem& pr, const LiabilityMatrix& phi, const Profile& x) {
    CostReport rep;
    rep.per_agent.resize(pr.n());
    for (std::size_t k = 0; k < pr.n(); ++k) rep.per_agent[k] = expected_cost(pr, phi, x, k);
    rep.total = total_cost(pr, x);
    rep.disruptor_probs = disruptor_distribution(pr, x);
    return rep;
}

}  // namespace cascade
