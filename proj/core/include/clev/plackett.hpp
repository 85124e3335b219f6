#pragma once

#include <string>
#include <vector>

#include "clev/errors.hpp"

namespace clev {

// Margins of a binary pair plus the Plackett cross-product ratio
//   psi = p11*p00 / (p10*p01).
struct PairMargins {
    double p_i = 0.5;
    double p_j = 0.5;
    double psi = 1.0;

    // Throws unless 0 < p < 1 on both margins and psi finite, >= 0.
    void validate() const;
};

struct PairJoint {
    double p11 = 0.0;
    double p10 = 0.0;
    double p01 = 0.0;
    double p00 = 0.0;
};

// P(Y_i=1, Y_j=1): the admissible root of the Plackett quadratic, computed
// in a cancellation-free form. psi within 1e-9 of 1 takes the independence
// branch; Frechet-bound violations beyond 1e-12 throw rather than clamp.
double joint_prob(const PairMargins& m);

// All four cell probabilities, each clamped into [0,1] within rounding slack.
PairJoint joint_cells(const PairMargins& m);

// Pearson correlation of the binary pair:
//   delta = (p11 - p_i p_j) / sqrt(p_i q_i p_j q_j).
double pair_correlation(const PairMargins& m);

// p11 with first and second partial derivatives with respect to
// (p_i, p_j, psi), by implicit differentiation of the defining quadratic.
// The formulas stay valid through psi = 1.
struct JointDerivs {
    double p11 = 0.0;
    double d_pi = 0.0, d_pj = 0.0, d_psi = 0.0;
    double d_pipi = 0.0, d_pipj = 0.0, d_pipsi = 0.0;
    double d_pjpj = 0.0, d_pjpsi = 0.0, d_psipsi = 0.0;
};

JointDerivs joint_derivs(const PairMargins& m);

struct CompatibilityReport {
    bool ok = true;
    std::vector<std::string> violations;
};

// Necessary conditions for a multivariate binary vector with the given
// margins and pairwise p11 values (dense upper-triangular order, see
// pair_index): margins in [0,1], Frechet bounds per pair, and the triple
// condition p_i + p_j + p_l - p_ij - p_il - p_jl <= 1. Each checked with
// tolerance 1e-10.
CompatibilityReport check_compatibility(const std::vector<double>& margins,
                                        const std::vector<double>& joint_p11);

}  // namespace clev
