#pragma once

#include <vector>

#include "clev/likelihood.hpp"
#include "clev/simulate.hpp"

namespace clev {

struct StudyResult {
    // estimates[kind][replicate]: MCLE of the interest component under
    // kinds[kind], NaN where that replicate failed to fit.
    std::vector<std::vector<double>> estimates;
    std::vector<int> fit_failures;  // per kind
    int replicates = 0;
};

// Mean over the non-NaN entries; throws InvalidArgument when all are NaN.
double study_mean(const std::vector<double>& estimates);
// Monte-Carlo standard error of that mean.
double study_se(const std::vector<double>& estimates);

// Repeated simulate-and-fit study: for each replicate one dataset is drawn
// from config and fitted under every requested kind, recording the MCLE
// component interest_index (pairwise kinds use the shared-psi structure, so
// index 2 is log psi). Failed or non-converged fits yield NaN and count as
// failures. Results are deterministic for fixed config regardless of thread
// count; replicate r always uses simulation substream r.
StudyResult mcle_study(const SimConfig& config,
                       const std::vector<CLKind>& kinds, int interest_index,
                       int replicates, int threads = 1);

}  // namespace clev
