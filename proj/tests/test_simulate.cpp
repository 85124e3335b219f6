#include "doctest.h"

#include <cmath>
#include <map>

#include "clev/normal.hpp"
#include "clev/plackett.hpp"
#include "clev/simulate.hpp"

using namespace clev;

TEST_CASE("median dichotomization has a closed-form latent correlation") {
    // For both margins 1/2 the tetrachoric relation collapses to
    // rho = sin(pi*delta/2) (Sheppard's theorem).
    for (double delta : {-0.8, -0.3, 0.0, 0.1, 0.5, 0.9}) {
        CHECK(std::abs(solve_latent_rho(0.5, 0.5, delta) -
                       std::sin(M_PI * delta / 2.0)) <= 1e-6);
    }
}

TEST_CASE("latent correlation reproduces the target joint") {
    for (double p1 : {0.1, 0.35, 0.6}) {
        for (double p2 : {0.2, 0.5, 0.85}) {
            for (double delta : {-0.05, 0.0, 0.1, 0.3}) {
                // Skip combinations outside the Frechet bounds for the margins.
                const double denom =
                    std::sqrt(p1 * (1 - p1) * p2 * (1 - p2));
                const double lo =
                    (std::max(p1 + p2 - 1.0, 0.0) - p1 * p2) / denom;
                const double hi = (std::min(p1, p2) - p1 * p2) / denom;
                if (delta <= lo + 1e-6 || delta >= hi - 1e-6) continue;
                const double rho = solve_latent_rho(p1, p2, delta);
                const double target = p1 * p2 + delta * denom;
                CHECK(std::abs(bvn_cdf(norm_quantile(p1), norm_quantile(p2), rho) -
                               target) <= 1e-8);
            }
        }
    }
}

TEST_CASE("unattainable correlations are rejected") {
    // Upper Frechet bound for margins (0.1, 0.9) caps delta at 1/9.
    CHECK_THROWS_AS(solve_latent_rho(0.1, 0.9, 0.9), IncompatibleCorrelation);
    // Lower bound for margins (0.3, 0.3) is -3/7.
    CHECK_THROWS_AS(solve_latent_rho(0.3, 0.3, -0.6), IncompatibleCorrelation);
}

TEST_CASE("prepared spec factor is a matrix square root") {
    // Sibling trio with a common correlation.
    const double rho_pair = solve_latent_rho(0.3, 0.3, 0.2);
    PreparedFamilySpec spec = prepare_family_spec({0.3, 0.3, 0.3}, {0.2, 0.2, 0.2});
    CHECK(spec.spec.rho(0, 1) == doctest::Approx(rho_pair).epsilon(1e-12));
    const Eigen::MatrixXd resid =
        spec.factor * spec.factor.transpose() - spec.spec.rho;
    CHECK(resid.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("genotype transmission is Mendelian at the margins") {
    const PedigreeTemplate tmpl = nuclear_family_template(2);
    Rng rng(5);
    // With maf ~ 1 every founder is homozygous carrier, children must be too.
    auto geno = simulate_genotypes(tmpl, 1.0 - 1e-12, rng);
    for (const auto& g : geno) CHECK(g.count() == 2);
    auto geno0 = simulate_genotypes(tmpl, 1e-12, rng);
    for (const auto& g : geno0) CHECK(g.count() == 0);
}

TEST_CASE("founder genotypes follow Hardy-Weinberg") {
    const PedigreeTemplate tmpl = sibling_template(2);
    const double maf = 0.2;
    Rng rng(77);
    const int n = 40000;
    std::map<int, int> founder_counts;
    for (int i = 0; i < n; ++i) {
        auto geno = simulate_genotypes(tmpl, maf, rng);
        founder_counts[geno[0].count()]++;  // first founder parent
    }
    const double expect[3] = {0.64, 0.32, 0.04};
    for (int x = 0; x < 3; ++x) {
        const double freq = founder_counts[x] / static_cast<double>(n);
        const double se = std::sqrt(expect[x] * (1 - expect[x]) / n);
        CHECK(std::abs(freq - expect[x]) <= 4 * se);
    }
}

TEST_CASE("simulated datasets are bit-identical across calls and sizes") {
    SimConfig config;
    config.n_families = 10;
    config.family_template = sibling_template(3);
    config.params.beta0 = -1.0;
    config.params.beta1 = 2.0;
    config.params.set_psi(RelationshipClass::Sibling, 3.0);
    config.seed = 42;

    const Simulator sim(config);
    const auto d1 = sim.simulate_dataset(7);
    const auto d2 = sim.simulate_dataset(7);
    REQUIRE(d1.size() == d2.size());
    for (std::size_t f = 0; f < d1.size(); ++f) {
        CHECK(d1[f].family_id == d2[f].family_id);
        CHECK(d1[f].phenotypes == d2[f].phenotypes);
        REQUIRE(d1[f].genotypes.size() == d2[f].genotypes.size());
        for (std::size_t i = 0; i < d1[f].genotypes.size(); ++i) {
            CHECK(d1[f].genotypes[i]->count() == d2[f].genotypes[i]->count());
        }
    }

    // Families draw from their own substreams, so family 3 does not depend
    // on how many siblings precede it in the dataset loop.
    SimConfig wide = config;
    wide.n_families = 200;
    const Simulator sim_wide(wide);
    const auto fam_a = sim.simulate_family(7, 3);
    const auto fam_b = sim_wide.simulate_family(7, 3);
    CHECK(fam_a.phenotypes == fam_b.phenotypes);
    for (std::size_t i = 0; i < fam_a.genotypes.size(); ++i) {
        CHECK(fam_a.genotypes[i]->count() == fam_b.genotypes[i]->count());
    }

    // Different replicate, different data (overwhelmingly).
    const auto d3 = sim.simulate_dataset(8);
    bool any_diff = false;
    for (std::size_t f = 0; f < d1.size(); ++f) {
        any_diff = any_diff || d1[f].phenotypes != d3[f].phenotypes;
        for (std::size_t i = 0; i < d1[f].genotypes.size(); ++i) {
            any_diff = any_diff ||
                       d1[f].genotypes[i]->count() != d3[f].genotypes[i]->count();
        }
    }
    CHECK(any_diff);
}

TEST_CASE("sibling template drops the founder parents from the data") {
    SimConfig config;
    config.n_families = 1;
    config.family_template = sibling_template(5);
    config.params.beta0 = -1.0;
    config.params.beta1 = 2.0;
    config.params.set_psi(RelationshipClass::Sibling, 5.0);
    config.seed = 1;
    const Simulator sim(config);
    const auto fam = sim.simulate_family(0, 0);
    CHECK(fam.size() == 5);
    CHECK(fam.pair_classes.size() == 10);
    for (auto c : fam.pair_classes) CHECK(c == RelationshipClass::Sibling);
}

TEST_CASE("phenotype margins and pair correlation track the model") {
    SimConfig config;
    config.n_families = 4000;
    config.family_template = sibling_template(2);
    config.params.beta0 = -2.38;
    config.params.beta1 = 1.76;
    config.params.set_psi(RelationshipClass::Sibling, 3.0);
    config.seed = 99;
    const Simulator sim(config);

    // Conditioned on the genotype pair (1,1): margin sigma(-0.62) and the
    // published correlation 0.253 for psi = 3.
    long n11 = 0, y_sum = 0, yy_sum = 0;
    long n_any = 0, y_any = 0;
    const auto data = sim.simulate_dataset(0);
    for (const auto& fam : data) {
        const int xa = fam.genotypes[0]->count(), xb = fam.genotypes[1]->count();
        const int ya = *fam.phenotypes[0], yb = *fam.phenotypes[1];
        n_any += 2;
        y_any += ya + yb;
        if (xa == 1 && xb == 1) {
            ++n11;
            y_sum += ya + yb;
            yy_sum += ya * yb;
        }
    }
    REQUIRE(n11 > 300);
    const double p = marginal_prob(-2.38, 1.76, 1);
    const double phat = y_sum / (2.0 * n11);
    CHECK(std::abs(phat - p) <= 4 * std::sqrt(p * (1 - p) / (2.0 * n11)));
    const double p11_hat = yy_sum / static_cast<double>(n11);
    const double delta_hat =
        (p11_hat - phat * phat) / (phat * (1.0 - phat));
    CHECK(std::abs(delta_hat - 0.253) <= 0.05);
    (void)n_any;
    (void)y_any;
}
