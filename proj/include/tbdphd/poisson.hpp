#pragma once

#include <vector>

#include "tbdphd/particles.hpp"

namespace tbdphd {

// Cardinality distribution on {0, ..., n_max}: p[n] is the probability of n
// targets. Entries are nonnegative and sum to 1 within 1e-12.
struct CardinalityPmf {
    explicit CardinalityPmf(std::vector<double> probabilities);

    // Rescales a nonnegative, nonzero vector to sum exactly to 1.
    static CardinalityPmf normalized(std::vector<double> masses);

    int n_max() const { return static_cast<int>(p.size()) - 1; }
    double at(int n) const {
        return (n >= 0 && n < static_cast<int>(p.size())) ? p[static_cast<std::size_t>(n)] : 0.0;
    }
    double mean() const;

    std::vector<double> p;
};

// Poisson pmf restricted to {0..n_max} and renormalized.
CardinalityPmf truncated_poisson(double lambda, int n_max);

// P(N > n_max) for N ~ Poisson(lambda), summed upward so tiny tails keep
// their precision.
double poisson_tail(double lambda, int n_max);

// Mean of the pmf: the rate of the Kullback-Leibler-closest Poisson.
PoissonCardinality best_poisson(const CardinalityPmf& pmf);

// sum_n q(n) log(q(n)/pi(n)) with 0 log(0/x) = 0. Throws when q puts mass
// where pi has none.
double kld_cardinality(const CardinalityPmf& q, const CardinalityPmf& pi);

// Distribution of N1 + N2 for independent cardinalities.
CardinalityPmf convolve(const CardinalityPmf& a, const CardinalityPmf& b);

// (1/2) sum_n |a(n) - b(n)|, supports padded with zeros.
double total_variation(const CardinalityPmf& a, const CardinalityPmf& b);

// Intensity function over a tiny discrete state space (at most 12 cells).
struct DiscreteIntensity {
    std::vector<double> v;

    double total() const {
        double t = 0.0;
        for (double x : v) t += x;
        return t;
    }
};

struct ExactPosterior {
    DiscreteIntensity intensity;
    CardinalityPmf cardinality;
};

// Exact multi-target Bayes posterior for a Poisson prior with intensity
// `prior` and a separable per-cell likelihood ratio `lr`, computed by direct
// enumeration over target counts n <= n_max (the noise-only factor cancels).
// For n i.i.d. targets with density pi = v/lambda the joint likelihood ratio
// factorizes, so the unnormalized posterior cardinality is
//   p(n) proportional to rho_prior(n) * (sum_c lr(c) pi(c))^n
// and the per-cell posterior intensity is mean(p) times the single-target
// posterior density. No closed-form posterior identity is used anywhere, so
// the result can serve as an oracle for one. Throws unless the Poisson tails
// of both prior and posterior rates beyond n_max are below 1e-12.
ExactPosterior exact_posterior(const DiscreteIntensity& prior,
                               const std::vector<double>& lr, int n_max);

}  // namespace tbdphd
