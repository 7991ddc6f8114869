#include "tbdphd/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tbdphd {

CardinalityPmf::CardinalityPmf(std::vector<double> probabilities)
    : p(std::move(probabilities)) {
    if (p.empty()) {
        throw std::invalid_argument("cardinality pmf must not be empty");
    }
    double sum = 0.0;
    for (double x : p) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw std::invalid_argument("cardinality pmf entries must be nonnegative");
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("cardinality pmf must sum to 1 (got " +
                                    std::to_string(sum) + ")");
    }
}

CardinalityPmf CardinalityPmf::normalized(std::vector<double> masses) {
    double sum = 0.0;
    for (double x : masses) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw std::invalid_argument("pmf masses must be nonnegative and finite");
        }
        sum += x;
    }
    if (!(sum > 0.0)) {
        throw std::invalid_argument("pmf masses must not be all zero");
    }
    for (double& x : masses) x /= sum;
    return CardinalityPmf(std::move(masses));
}

double CardinalityPmf::mean() const {
    double m = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) m += static_cast<double>(n) * p[n];
    return m;
}

CardinalityPmf truncated_poisson(double lambda, int n_max) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("lambda must be nonnegative and finite");
    }
    if (n_max < 0) {
        throw std::invalid_argument("n_max must be nonnegative");
    }
    std::vector<double> masses(static_cast<std::size_t>(n_max) + 1, 0.0);
    if (lambda == 0.0) {
        masses[0] = 1.0;
        return CardinalityPmf(std::move(masses));
    }
    const double ll = std::log(lambda);
    for (int n = 0; n <= n_max; ++n) {
        masses[static_cast<std::size_t>(n)] =
            std::exp(n * ll - lambda - std::lgamma(n + 1.0));
    }
    return CardinalityPmf::normalized(std::move(masses));
}

double poisson_tail(double lambda, int n_max) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("lambda must be nonnegative and finite");
    }
    if (lambda == 0.0) return 0.0;
    if (lambda > n_max + 1.0) {
        // Most of the mass sits beyond the cutoff; the complement of the head
        // is >= the head itself, so 1 - cdf loses nothing here, while the
        // upward sum below would start from underflowed terms.
        double head = 0.0;
        for (int n = 0; n <= n_max; ++n) {
            head += std::exp(n * std::log(lambda) - lambda - std::lgamma(n + 1.0));
        }
        return 1.0 - head;
    }
    // Sum upward from n_max + 1; terms decay faster than geometrically once
    // n > lambda, so the partial sums converge quickly and keep precision
    // that 1 - cdf would lose.
    int n = n_max + 1;
    double term = std::exp(n * std::log(lambda) - lambda - std::lgamma(n + 1.0));
    double sum = 0.0;
    for (int i = 0; i < 1000000; ++i) {
        sum += term;
        ++n;
        term *= lambda / n;
        if (term < sum * 1e-20 + 1e-300) break;
    }
    return sum;
}

PoissonCardinality best_poisson(const CardinalityPmf& pmf) {
    return {pmf.mean()};
}

double kld_cardinality(const CardinalityPmf& q, const CardinalityPmf& pi) {
    double acc = 0.0;
    for (int n = 0; n <= q.n_max(); ++n) {
        const double qn = q.at(n);
        if (qn == 0.0) continue;
        const double pn = pi.at(n);
        if (!(pn > 0.0)) {
            throw std::domain_error("kld support violation: q(" + std::to_string(n) +
                                    ") > 0 but pi(" + std::to_string(n) + ") = 0");
        }
        acc += qn * std::log(qn / pn);
    }
    if (acc < 0.0 && acc > -1e-12) acc = 0.0;  // rounding on near-equal inputs
    return acc;
}

CardinalityPmf convolve(const CardinalityPmf& a, const CardinalityPmf& b) {
    std::vector<double> out(a.p.size() + b.p.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.p.size(); ++i) {
        for (std::size_t j = 0; j < b.p.size(); ++j) {
            out[i + j] += a.p[i] * b.p[j];
        }
    }
    return CardinalityPmf::normalized(std::move(out));
}

double total_variation(const CardinalityPmf& a, const CardinalityPmf& b) {
    const int top = std::max(a.n_max(), b.n_max());
    double acc = 0.0;
    for (int n = 0; n <= top; ++n) acc += std::abs(a.at(n) - b.at(n));
    return 0.5 * acc;
}

ExactPosterior exact_posterior(const DiscreteIntensity& prior,
                               const std::vector<double>& lr, int n_max) {
    const std::size_t cells = prior.v.size();
    if (cells < 1 || cells > 12) {
        throw std::invalid_argument("exact_posterior handles 1..12 cells");
    }
    if (lr.size() != cells) {
        throw std::invalid_argument("lr size must match cell count");
    }
    for (double x : prior.v) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw std::invalid_argument("prior intensity must be nonnegative and finite");
        }
    }
    for (double x : lr) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw std::invalid_argument("likelihood ratios must be nonnegative and finite");
        }
    }

    const double lambda = prior.total();
    // <L, v> controls how far right the posterior cardinality can reach.
    double lv = 0.0;
    for (std::size_t c = 0; c < cells; ++c) lv += lr[c] * prior.v[c];
    if (poisson_tail(lambda, n_max) >= 1e-12 || poisson_tail(lv, n_max) >= 1e-12) {
        throw std::domain_error("n_max too small: Poisson tail beyond n_max not < 1e-12");
    }

    ExactPosterior out{DiscreteIntensity{std::vector<double>(cells, 0.0)},
                       CardinalityPmf({1.0})};
    if (lambda == 0.0) {
        out.cardinality = truncated_poisson(0.0, n_max);
        return out;
    }

    // n i.i.d. targets with density pi = v/lambda see the separable likelihood
    // factorize, so summing the joint over all n-target configurations leaves
    // S^n with S = sum_c L(c) pi(c). Posterior cardinality is then
    // rho_prior(n) * S^n renormalized; nothing Poisson is assumed about it.
    const double S = lv / lambda;
    const CardinalityPmf rho = truncated_poisson(lambda, n_max);
    std::vector<double> post(static_cast<std::size_t>(n_max) + 1, 0.0);
    if (S == 0.0) {
        post[0] = 1.0;
        out.cardinality = CardinalityPmf(std::move(post));
        return out;  // likelihood kills every target; intensity all zero
    }
    const double logS = std::log(S);
    for (int n = 0; n <= n_max; ++n) {
        const double r = rho.at(n);
        post[static_cast<std::size_t>(n)] =
            r > 0.0 ? std::exp(std::log(r) + n * logS)
                    : 0.0;
    }
    out.cardinality = CardinalityPmf::normalized(std::move(post));

    // Expected count in cell c: E[n] times the single-target posterior
    // density L(c) pi(c) / S.
    const double mean = out.cardinality.mean();
    for (std::size_t c = 0; c < cells; ++c) {
        out.intensity.v[c] = mean * (lr[c] * prior.v[c] / lambda) / S;
    }
    return out;
}

}  // namespace tbdphd
