#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "clev/model.hpp"
#include "clev/pedigree.hpp"
#include "clev/rng.hpp"

namespace clev {

// Thresholded multivariate normal representation of one family's phenotype
// vector: Y_i = 1 iff Z_i <= thresholds[i], Z ~ N(0, rho).
struct LatentGaussianSpec {
    std::vector<double> thresholds;
    Eigen::MatrixXd rho;
};

struct PreparedFamilySpec {
    LatentGaussianSpec spec;
    // Symmetric PSD square root of rho; satisfies ||F F^T - rho||_inf <= 1e-10.
    Eigen::MatrixXd factor;
};

// Latent correlation matching a target binary-pair correlation delta:
// solves Phi2(z(p_i), z(p_j), rho) = p_i p_j + delta*sqrt(p_i q_i p_j q_j)
// by bisection over [-1+1e-9, 1-1e-9]. The result satisfies
// |Phi2 - target| <= 1e-8 with final bracket width <= 1e-7.
double solve_latent_rho(double p_i, double p_j, double delta);

// Thresholds and latent correlation matrix for given margins and pairwise
// correlations (dense upper-triangular order). Checks compatibility of the
// implied joints first; near-singular rho (min eigenvalue in [-1e-8, 1e-8])
// is regularized by 1e-8 on the diagonal and renormalized, anything below
// throws NonPsdLatentCorrelation.
LatentGaussianSpec build_latent_spec(const std::vector<double>& margins,
                                     const std::vector<double>& deltas);

// Latent spec plus its sampling factor.
PreparedFamilySpec prepare_family_spec(const std::vector<double>& margins,
                                       const std::vector<double>& deltas);

// Founders from Hardy-Weinberg at the given allele frequency; non-founders
// receive one allele from each parent by fair Mendelian transmission, with a
// population draw standing in for any absent parent. Returns one genotype
// per template member.
std::vector<Genotype> simulate_genotypes(const PedigreeTemplate& tmpl,
                                         double maf, Rng& rng);

// One correlated binary vector from a prepared spec.
std::vector<std::uint8_t> simulate_phenotypes(const PreparedFamilySpec& spec,
                                              Rng& rng);

struct SimConfig {
    int n_families = 1;
    PedigreeTemplate family_template;
    double maf = 0.2;
    ModelParams params;
    std::uint64_t seed = 0;

    // Throws unless n_families >= 1 and maf in (0,1); params validated too.
    void validate() const;
};

// Replicate generator for one SimConfig. Identical (config, replicate)
// arguments produce bit-identical datasets, independent of thread count and
// cache state: every family draws from its own (seed, replicate, family)
// substream.
//
// Two cache levels keep repeated-replicate studies cheap: latent pairwise
// correlations are precomputed per (genotype pair, relationship class) at
// construction, and prepared family specs are memoized by observed genotype
// vector (families with more than 32 observed members bypass the cache).
class Simulator {
public:
    explicit Simulator(SimConfig config);

    const SimConfig& config() const { return config_; }

    FamilyData simulate_family(std::uint64_t replicate, int family_index) const;
    std::vector<FamilyData> simulate_dataset(std::uint64_t replicate) const;

private:
    std::shared_ptr<const PreparedFamilySpec> spec_for(
        const std::vector<Genotype>& observed_genotypes) const;

    SimConfig config_;
    std::vector<int> observed_;
    std::vector<RelationshipClass> observed_classes_;
    double margin_by_genotype_[3];
    double rho_table_[3][3][kNumRelationshipClasses];
    double delta_table_[3][3][kNumRelationshipClasses];

    mutable std::shared_mutex cache_mutex_;
    mutable std::unordered_map<std::uint64_t,
                               std::shared_ptr<const PreparedFamilySpec>>
        spec_cache_;
};

}  // namespace clev
