#pragma once

#include <limits>
#include <string>
#include <vector>

#include "clev/dataset.hpp"
#include "clev/evidence.hpp"
#include "clev/likelihood.hpp"

namespace clev {

struct ScanRecord {
    std::string snp_id;
    long long position = 0;
    double mcle_or = std::numeric_limits<double>::quiet_NaN();
    // Adjusted likelihood ratio of the MCLE odds ratio against OR = 1;
    // at least 1 whenever the fit converged.
    double max_adjusted_lr = std::numeric_limits<double>::quiet_NaN();
    double adjustment = std::numeric_limits<double>::quiet_NaN();
    std::vector<SupportInterval> intervals;  // ascending k, nested
    bool separation = false;
    bool sparse_cells = false;
    bool fit_failure = false;
};

// Any phenotype-by-genotype cell with fewer usable members than this flags
// the SNP as sparse.
inline constexpr long kSparseCellMin = 5;

// One record per requested SNP: profile the composite likelihood, estimate
// the robust adjustment, locate the 1/k support intervals and the adjusted
// LR against the null. Fit problems mark the record fit_failure and the
// scan continues; the fit path draws no random numbers, so records are
// deterministic and identical across SNP subsets. k_values must all exceed
// 1 and every SNP must be indexed in the dataset.
std::vector<ScanRecord> scan_region(const Dataset& dataset,
                                    const std::vector<std::string>& snps,
                                    const std::vector<double>& k_values,
                                    CLKind kind, int threads = 1);

}  // namespace clev
