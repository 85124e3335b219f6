#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "clev/errors.hpp"
#include "clev/model.hpp"

namespace clev {

enum class CLKind {
    Independence,
    // Pair components weighted 1/(n_i - 1) per family; the marginal scale.
    PairwiseWeighted,
    // Unweighted pair components; the right object when psi is of interest.
    PairwiseUnweightedPsi,
};

const char* to_string(CLKind k);

// How the dependence parameters enter the free vector theta. Each
// relationship class either shares a free log-psi coordinate (group >= 0)
// or is held at a fixed psi value. theta layout: [beta0, beta1, delta_0,
// ..., delta_{G-1}] with delta = log psi.
struct PsiStructure {
    std::array<int, kNumRelationshipClasses> group{-1, -1, -1, -1, -1, -1};
    std::array<double, kNumRelationshipClasses> fixed_psi{1, 1, 1, 1, 1, 1};
    int n_groups = 0;

    int dim() const { return 2 + n_groups; }
    int delta_index(int g) const { return 2 + g; }

    double psi_for(RelationshipClass c, const Eigen::VectorXd& theta) const {
        const int g = group[static_cast<int>(c)];
        return g < 0 ? fixed_psi[static_cast<int>(c)]
                     : std::exp(theta[delta_index(g)]);
    }

    // One shared log-psi across every pair, unrelated ones included: the
    // scalar-psi pairwise likelihood. Fit default for pairwise kinds.
    static PsiStructure shared_all();
    // One free log-psi per relationship class occurring in the data's usable
    // pairs, except Unrelated which stays fixed at 1.
    static PsiStructure per_class_present(std::span<const FamilyData> data);
    // Every class pinned to the psi in params; dim() == 2.
    static PsiStructure all_fixed(const ModelParams& params);
};

inline constexpr int kBeta0Index = 0;
inline constexpr int kBeta1Index = 1;

struct CLEvaluation {
    double loglik = 0.0;
    Eigen::VectorXd score;
    Eigen::MatrixXd hessian;
    std::vector<Eigen::VectorXd> per_family_scores;
};

// Composite log-likelihood with analytic score and Hessian in theta.
// Individuals missing a phenotype or genotype drop out of marginal terms and
// of every pair containing them; a family whose usable count falls to one
// contributes its single Bernoulli factor in every kind. Pairwise cell
// probabilities at or below 1e-300 throw DegenerateCell.
CLEvaluation cl_eval(std::span<const FamilyData> data,
                     const Eigen::VectorXd& theta, CLKind kind,
                     const PsiStructure& structure,
                     bool with_per_family = true);

// Spec surface taking model-scale parameters: free dependence coordinates
// are one log-psi per class present in the data (Unrelated fixed), seeded
// from params.psi. Pairwise kinds require psi > 0 for present classes.
CLEvaluation cl_eval(std::span<const FamilyData> data, const ModelParams& params,
                     CLKind kind);

struct FitOptions {
    int max_iter = 50;
    double score_tol = 1e-8;
    double separation_beta1 = 15.0;
};

struct FitResult {
    Eigen::VectorXd theta;
    double loglik = 0.0;
    bool converged = false;
    bool separation = false;
    int iterations = 0;
};

// Thrown when Newton-Raphson exhausts its iteration cap away from both
// convergence and separation; carries the last iterate.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(std::string msg, std::vector<double> theta)
        : Error(std::move(msg)), last_theta_(std::move(theta)) {}
    const std::vector<double>& last_theta() const { return last_theta_; }

private:
    std::vector<double> last_theta_;
};

// Damped Newton-Raphson ascent on the composite score, with eigenvalue
// clamping for indefinite Hessians and a coordinate-bisection sweep when the
// Hessian's condition number exceeds 1e12. Coordinates listed in fixed stay
// at their init values. |beta1| beyond 15 sets the separation flag instead
// of erroring.
FitResult maximize_cl(std::span<const FamilyData> data, CLKind kind,
                      const PsiStructure& structure, const Eigen::VectorXd& init,
                      const std::vector<int>& fixed = {},
                      const FitOptions& options = {});

// Convenience overload: default structure (shared_all for pairwise kinds),
// beta0 at the logit of the overall case fraction, beta1 = 0, deltas 0.
FitResult maximize_cl(std::span<const FamilyData> data, CLKind kind,
                      const FitOptions& options = {});

Eigen::VectorXd default_init(std::span<const FamilyData> data,
                             const PsiStructure& structure);

struct ProfileCurve {
    int interest_index = kBeta1Index;
    std::vector<double> grid;
    std::vector<double> loglik_p;
    std::vector<Eigen::VectorXd> nuisance_hat;  // full theta per grid point
    std::vector<bool> ok;                       // per-point fit success
    double mcle_interest = 0.0;
    double mcle_loglik = 0.0;
    Eigen::VectorXd mcle_theta;
    // Robust adjustment exponent a/b; 1 until filled by the evidence layer.
    double adjustment = 1.0;
};

// Nuisance-maximized composite log-likelihood over a sorted grid of interest
// values, warm-starting each point from its neighbour, then golden-section
// refinement of the maximizer to 1e-6. Failed grid points are flagged in ok
// and carry NaN logliks.
ProfileCurve profile_cl(std::span<const FamilyData> data, CLKind kind,
                        const PsiStructure& structure, int interest_index,
                        const std::vector<double>& grid,
                        const FitOptions& options = {});

// Interest = beta1 with the default 401-point OR grid over [1/20, 20].
ProfileCurve profile_cl(std::span<const FamilyData> data, CLKind kind,
                        const FitOptions& options = {});

// log(1/20) .. log(20), 401 log-spaced OR values on the beta1 scale.
std::vector<double> default_beta1_grid();

// Profiled loglik at a single interest value (nuisance-maximized); used by
// the misleading-evidence estimator where only a few points are needed.
double profile_point(std::span<const FamilyData> data, CLKind kind,
                     const PsiStructure& structure, int interest_index,
                     double value, const Eigen::VectorXd& init,
                     const FitOptions& options = {});

// Max relative discrepancy between the analytic score/Hessian and central
// finite differences (step 1e-5, scaled by coordinate magnitude).
double check_gradient(std::span<const FamilyData> data,
                      const Eigen::VectorXd& theta, CLKind kind,
                      const PsiStructure& structure);

}  // namespace clev
