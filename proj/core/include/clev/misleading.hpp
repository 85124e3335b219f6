#pragma once

#include <vector>

#include "clev/likelihood.hpp"
#include "clev/simulate.hpp"

namespace clev {

// Large-sample probability of misleading evidence at standardized distance
// c from the truth: Phi(-c/2 - log(k)/c). Zero for c <= 0 by convention;
// k <= 1 throws InvalidArgument.
double bump(double c, double k);

// Supremum of bump(., k) over c, attained at c = sqrt(2 log k):
// Phi(-sqrt(2 log k)).
double bump_max(double k);

struct BumpCurve {
    std::vector<double> c_values;
    std::vector<double> prob;
    double k = 0.0;
};

// bump evaluated over a grid of c values.
BumpCurve bump_curve(double k, const std::vector<double>& c_values);

struct MisleadingEstimate {
    std::vector<double> alt_values;           // alternative beta1 values
    std::vector<double> proportion_raw;       // fraction with LR >= k
    std::vector<double> proportion_adjusted;  // fraction with LR^(a/b) >= k
    std::vector<double> mc_se;  // binomial SE of proportion_adjusted
    int replicates = 0;         // successfully fitted replicates
    int fit_failures = 0;
    // Set when more than 1% of requested replicates failed to fit.
    bool reliability_warning = false;
    double k = 0.0;
    double mean_adjustment = 0.0;  // average a/b across used replicates
};

// Monte-Carlo estimate of the misleading-evidence probability: datasets are
// generated under config's parameters, and for each alternative the
// proportion of replicates with {CL_p(alt)/CL_p(truth)}^(a/b) >= k is
// recorded, a/b re-estimated per replicate at that replicate's MCLE. The
// truth is true_params.beta1; alt_grid must exclude it and replicates must
// be at least 100. Replicates failing to fit are skipped and counted.
// Deterministic for fixed config regardless of thread count.
MisleadingEstimate estimate_misleading(const SimConfig& config,
                                       const ModelParams& true_params,
                                       const std::vector<double>& alt_grid,
                                       double k, CLKind kind, int replicates,
                                       int threads = 1);

// Conservative family-wise bound min(1, n_eff * m0) for n_eff independent
// tests each with misleading-evidence probability m0.
double fwer_bound(long long n_eff, double m0);

}  // namespace clev
