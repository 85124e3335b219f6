#include "clev/simulate.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "clev/normal.hpp"
#include "clev/plackett.hpp"

namespace clev {

namespace {

constexpr double kRhoBracket = 1.0 - 1e-9;
constexpr double kEigMin = -1e-8;
constexpr double kEigRegularize = 1e-8;
constexpr std::size_t kSpecCacheCap = 1 << 18;

}  // namespace

double solve_latent_rho(double p_i, double p_j, double delta) {
    if (!(p_i > 0.0 && p_i < 1.0) || !(p_j > 0.0 && p_j < 1.0)) {
        throw InvalidArgument("solve_latent_rho: margins must be inside (0,1)");
    }
    if (delta == 0.0) return 0.0;
    const double z1 = norm_quantile(p_i);
    const double z2 = norm_quantile(p_j);
    const double target =
        p_i * p_j + delta * std::sqrt(p_i * (1.0 - p_i) * p_j * (1.0 - p_j));

    auto phi2 = [&](double rho) { return bvn_cdf(z1, z2, rho); };
    double lo = -kRhoBracket, hi = kRhoBracket;
    const double f_lo = phi2(lo), f_hi = phi2(hi);
    const double slack = 1e-10;
    if (target < f_lo - slack || target > f_hi + slack) {
        std::ostringstream msg;
        msg << "target correlation " << delta << " unattainable for margins ("
            << p_i << ", " << p_j << ")";
        throw IncompatibleCorrelation(msg.str());
    }
    if (target <= f_lo) return lo;
    if (target >= f_hi) return hi;

    // Phi2 is increasing in rho; 60 halvings shrink the bracket far below
    // the 1e-7 width contract, leaving the 1e-8 function tolerance limited
    // only by the quadrature (1e-10).
    double mid = 0.0;
    for (int it = 0; it < 60; ++it) {
        mid = 0.5 * (lo + hi);
        if (phi2(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mid = 0.5 * (lo + hi);
    if (std::abs(phi2(mid) - target) > 1e-8) {
        throw InternalConsistencyError(
            "latent correlation bisection failed to meet tolerance");
    }
    return mid;
}

LatentGaussianSpec build_latent_spec(const std::vector<double>& margins,
                                     const std::vector<double>& deltas) {
    const std::size_t n = margins.size();
    if (deltas.size() != num_pairs(n)) {
        throw InvalidArgument("build_latent_spec: need a delta for every pair");
    }
    std::vector<double> joints(num_pairs(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::size_t k = pair_index(i, j, n);
            joints[k] = margins[i] * margins[j] +
                        deltas[k] * std::sqrt(margins[i] * (1.0 - margins[i]) *
                                              margins[j] * (1.0 - margins[j]));
        }
    }
    const CompatibilityReport compat = check_compatibility(margins, joints);
    if (!compat.ok) {
        std::string msg = "incompatible margins/correlations:";
        for (const auto& v : compat.violations) msg += " " + v + ";";
        throw InvalidArgument(msg);
    }

    LatentGaussianSpec spec;
    spec.thresholds.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        spec.thresholds[i] = norm_quantile(margins[i]);
    }
    spec.rho = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            try {
                const double r =
                    solve_latent_rho(margins[i], margins[j], deltas[pair_index(i, j, n)]);
                spec.rho(i, j) = spec.rho(j, i) = r;
            } catch (const IncompatibleCorrelation& e) {
                std::ostringstream msg;
                msg << "pair (" << i << ", " << j << "): " << e.what();
                throw IncompatibleCorrelation(msg.str());
            }
        }
    }
    return spec;
}

namespace {

Eigen::MatrixXd psd_factor(Eigen::MatrixXd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rho);
    const double min_eig = eig.eigenvalues().minCoeff();
    if (min_eig < kEigMin) {
        std::ostringstream msg;
        msg << "latent correlation matrix is not positive semidefinite "
               "(smallest eigenvalue "
            << min_eig << ")";
        throw NonPsdLatentCorrelation(msg.str(), min_eig);
    }
    if (min_eig <= kEigRegularize) {
        const std::size_t n = rho.rows();
        rho = (rho + kEigRegularize * Eigen::MatrixXd::Identity(n, n)) /
              (1.0 + kEigRegularize);
        eig.compute(rho);
    }
    const Eigen::VectorXd sqrt_eval =
        eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * sqrt_eval.asDiagonal() *
           eig.eigenvectors().transpose();
}

}  // namespace

PreparedFamilySpec prepare_family_spec(const std::vector<double>& margins,
                                       const std::vector<double>& deltas) {
    PreparedFamilySpec out;
    out.spec = build_latent_spec(margins, deltas);
    out.factor = psd_factor(out.spec.rho);
    return out;
}

std::vector<Genotype> simulate_genotypes(const PedigreeTemplate& tmpl,
                                         double maf, Rng& rng) {
    if (!(maf >= 0.0 && maf <= 1.0)) {
        throw InvalidArgument("minor allele frequency must be in [0,1]");
    }
    const auto& members = tmpl.members();
    std::vector<int> counts(members.size(), -1);
    auto transmit = [&](int parent) {
        // Absent parent: population allele; otherwise one of the parent's
        // two alleles, uniformly.
        if (parent < 0) return rng.next_bernoulli(maf) ? 1 : 0;
        return rng.next_bernoulli(counts[parent] / 2.0) ? 1 : 0;
    };
    for (int idx : tmpl.generation_order()) {
        const auto& m = members[idx];
        if (m.father < 0 && m.mother < 0) {
            counts[idx] = (rng.next_bernoulli(maf) ? 1 : 0) +
                          (rng.next_bernoulli(maf) ? 1 : 0);
        } else {
            counts[idx] = transmit(m.father) + transmit(m.mother);
        }
    }
    std::vector<Genotype> out;
    out.reserve(counts.size());
    for (int c : counts) out.push_back(Genotype(c));
    return out;
}

std::vector<std::uint8_t> simulate_phenotypes(const PreparedFamilySpec& spec,
                                              Rng& rng) {
    const std::size_t n = spec.spec.thresholds.size();
    Eigen::VectorXd u(n);
    for (std::size_t i = 0; i < n; ++i) u(i) = rng.next_normal();
    const Eigen::VectorXd z = spec.factor * u;
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = z(i) <= spec.spec.thresholds[i] ? 1 : 0;
    }
    return y;
}

void SimConfig::validate() const {
    if (n_families < 1) throw InvalidArgument("n_families must be >= 1");
    if (family_template.size() == 0) {
        throw InvalidArgument("family template must have at least one member");
    }
    if (!(maf > 0.0 && maf < 1.0)) {
        throw InvalidArgument("minor allele frequency must be in (0,1)");
    }
    params.validate();
}

Simulator::Simulator(SimConfig config) : config_(std::move(config)) {
    config_.validate();
    observed_ = config_.family_template.observed_indices();
    if (observed_.empty()) {
        throw InvalidArgument("family template has no observed members");
    }
    const auto full_classes = config_.family_template.classify_pairs();
    const std::size_t n_all = config_.family_template.size();
    const std::size_t n_obs = observed_.size();
    observed_classes_.resize(num_pairs(n_obs));
    for (std::size_t a = 0; a < n_obs; ++a) {
        for (std::size_t b = a + 1; b < n_obs; ++b) {
            observed_classes_[pair_index(a, b, n_obs)] =
                full_classes[pair_index(observed_[a], observed_[b], n_all)];
        }
    }
    for (int x = 0; x < 3; ++x) {
        margin_by_genotype_[x] =
            marginal_prob(config_.params.beta0, config_.params.beta1, x);
    }
    for (int xa = 0; xa < 3; ++xa) {
        for (int xb = 0; xb < 3; ++xb) {
            for (int c = 0; c < kNumRelationshipClasses; ++c) {
                const double psi =
                    config_.params.psi_for(static_cast<RelationshipClass>(c));
                PairMargins m{margin_by_genotype_[xa], margin_by_genotype_[xb], psi};
                const double delta = pair_correlation(m);
                delta_table_[xa][xb][c] = delta;
                rho_table_[xa][xb][c] =
                    solve_latent_rho(m.p_i, m.p_j, delta);
            }
        }
    }
}

std::shared_ptr<const PreparedFamilySpec> Simulator::spec_for(
    const std::vector<Genotype>& observed_genotypes) const {
    const std::size_t n = observed_genotypes.size();
    const bool cacheable = n <= 32;
    std::uint64_t key = 0;
    if (cacheable) {
        for (std::size_t i = 0; i < n; ++i) {
            key = key << 2 | static_cast<std::uint64_t>(observed_genotypes[i].count());
        }
        std::shared_lock lock(cache_mutex_);
        auto it = spec_cache_.find(key);
        if (it != spec_cache_.end()) return it->second;
    }

    std::vector<double> margins(n);
    for (std::size_t i = 0; i < n; ++i) {
        margins[i] = margin_by_genotype_[observed_genotypes[i].count()];
    }
    std::vector<double> deltas(num_pairs(n));
    auto spec = std::make_shared<PreparedFamilySpec>();
    spec->spec.thresholds.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        spec->spec.thresholds[i] = norm_quantile(margins[i]);
    }
    spec->spec.rho = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const int xa = observed_genotypes[a].count();
            const int xb = observed_genotypes[b].count();
            const int c = static_cast<int>(observed_classes_[pair_index(a, b, n)]);
            deltas[pair_index(a, b, n)] = delta_table_[xa][xb][c];
            spec->spec.rho(a, b) = spec->spec.rho(b, a) = rho_table_[xa][xb][c];
        }
    }
    {
        // Same validity gate build_latent_spec applies, using the cached rho.
        std::vector<double> joints(num_pairs(n));
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                const std::size_t k = pair_index(a, b, n);
                joints[k] = margins[a] * margins[b] +
                            deltas[k] * std::sqrt(margins[a] * (1.0 - margins[a]) *
                                                  margins[b] * (1.0 - margins[b]));
            }
        }
        const CompatibilityReport compat = check_compatibility(margins, joints);
        if (!compat.ok) {
            std::string msg = "incompatible margins/correlations:";
            for (const auto& v : compat.violations) msg += " " + v + ";";
            throw InvalidArgument(msg);
        }
    }
    spec->factor = psd_factor(spec->spec.rho);

    if (cacheable) {
        std::unique_lock lock(cache_mutex_);
        if (spec_cache_.size() < kSpecCacheCap) {
            auto [it, inserted] = spec_cache_.try_emplace(key, spec);
            return it->second;
        }
    }
    return spec;
}

FamilyData Simulator::simulate_family(std::uint64_t replicate,
                                      int family_index) const {
    Rng rng_geno = Rng::substream(
        config_.seed, {replicate, static_cast<std::uint64_t>(family_index), 0});
    const auto all_genotypes =
        simulate_genotypes(config_.family_template, config_.maf, rng_geno);

    std::vector<Genotype> observed_genotypes;
    observed_genotypes.reserve(observed_.size());
    for (int idx : observed_) observed_genotypes.push_back(all_genotypes[idx]);

    const auto spec = spec_for(observed_genotypes);

    Rng rng_pheno = Rng::substream(
        config_.seed, {replicate, static_cast<std::uint64_t>(family_index), 1});
    const auto phenotypes = simulate_phenotypes(*spec, rng_pheno);

    FamilyData family;
    family.family_id = "F" + std::to_string(family_index + 1);
    family.phenotypes.assign(phenotypes.begin(), phenotypes.end());
    family.genotypes.assign(observed_genotypes.begin(), observed_genotypes.end());
    family.pair_classes = observed_classes_;
    return family;
}

std::vector<FamilyData> Simulator::simulate_dataset(std::uint64_t replicate) const {
    std::vector<FamilyData> families;
    families.reserve(config_.n_families);
    for (int f = 0; f < config_.n_families; ++f) {
        families.push_back(simulate_family(replicate, f));
    }
    return families;
}

}  // namespace clev
