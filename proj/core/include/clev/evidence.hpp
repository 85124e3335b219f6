#pragma once

#include <Eigen/Dense>
#include <vector>

#include "clev/likelihood.hpp"

namespace clev {

// Empirical sensitivity, variability and Godambe matrices on the per-family
// scale: H = -(1/N) sum hess, J = (1/N) sum u u^T, G = H J^-1 H.
struct InformationEstimates {
    Eigen::MatrixXd H_hat;
    Eigen::MatrixXd J_hat;
    Eigen::MatrixXd G_hat;
    int n_families = 0;
};

// Information estimates from per-family scores and the total Hessian, both
// evaluated at the global MCLE. J_hat must be PSD (smallest eigenvalue no
// lower than -1e-8 relative to the largest); a condition number above 1e14
// throws SingularVariability, which includes every 2+ parameter model with
// n = 1 (rank bound).
InformationEstimates estimate_information(
    const std::vector<Eigen::VectorXd>& per_family_scores,
    const Eigen::MatrixXd& hessian, int n_families);

// Convenience overload reading both pieces from a cl_eval result.
InformationEstimates estimate_information(const CLEvaluation& eval);

// Robust adjustment exponent a/b = (H^-1)_ii / (G^-1)_ii for the scalar
// interest coordinate i; equals the ratio of model-based to sandwich
// variance, 1 when H = J. Throws InvalidInformation unless finite and > 0.
double adjustment_factor(const InformationEstimates& info, int interest_index);

// Adjusted likelihood ratio exp{(a/b) [l_p(log or_1) - l_p(log or_2)]} with
// a/b taken from the curve and values between grid points filled by a
// monotone cubic in (log OR, loglik). ORs outside the profiled range throw
// OutOfProfiledRange.
double adjusted_lr(const ProfileCurve& curve, double or_1, double or_2);

struct SupportInterval {
    double k = 0.0;
    double lower_or = 0.0;
    double upper_or = 0.0;
    // An open side means the standardized curve never reached 1/k before the
    // grid edge (separation pattern); the endpoint then reports the edge OR
    // and the true interval extends beyond it.
    bool lower_open = false;
    bool upper_open = false;
    // OR = 1 membership, with open sides treated as unbounded.
    bool contains_null = false;
};

// Outermost crossings of the standardized adjusted profile curve
// [CL_p(or)/CL_p(or_hat)]^(a/b) with 1/k, bisected to 1e-6 in log OR.
// Invariant under adding any constant to loglik_p. Requires k > 1.
SupportInterval support_interval(const ProfileCurve& curve, double k);

}  // namespace clev
