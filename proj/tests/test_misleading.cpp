#include "clev/misleading.hpp"

#include <cmath>
#include <vector>

#include "clev/errors.hpp"
#include "clev/pedigree.hpp"
#include "doctest.h"

using namespace clev;

namespace {

SimConfig singleton_config(double beta0, double beta1, int n,
                           std::uint64_t seed) {
    SimConfig config;
    config.n_families = n;
    config.family_template = sibling_template(1);
    config.maf = 0.2;
    config.params.beta0 = beta0;
    config.params.beta1 = beta1;
    config.seed = seed;
    return config;
}

}  // namespace

TEST_CASE("bump matches independent normal-CDF values") {
    // Phi(-0.5 - log 8) and Phi(-1.5 - log(8)/3), 30-digit reference.
    CHECK(std::abs(bump(1.0, 8.0) - 0.004948010322485065) <= 1e-12);
    CHECK(std::abs(bump(3.0, 8.0) - 0.014148388332427411) <= 1e-12);
    CHECK(bump(0.0, 8.0) == 0.0);
    CHECK(bump(-2.0, 8.0) == 0.0);
    CHECK(bump(1e-8, 8.0) <= 1e-300);  // c -> 0+ limit
    CHECK(bump(1e9, 8.0) == 0.0);      // c -> infinity limit
    CHECK_THROWS_AS(bump(1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(bump(1.0, 0.5), InvalidArgument);
}

TEST_CASE("bump_max values") {
    CHECK(std::abs(bump_max(8.0) - 0.020708353243684176) <= 1e-12);
    CHECK(std::abs(bump_max(8.0) - 0.021) <= 0.0005);
    CHECK(std::abs(bump_max(32.0) - 0.0042345982537675040) <= 1e-12);
    CHECK(std::abs(bump_max(1000.0) - 0.00010083225935770045) <= 1e-14);
    const double near_one = bump_max(1.0 + 1e-12);
    CHECK(near_one < 0.5);
    CHECK(near_one > 0.4999);
    CHECK_THROWS_AS(bump_max(1.0), InvalidArgument);
}

TEST_CASE("bump is unimodal with its maximum at sqrt(2 log k)") {
    const double k = 8.0;
    const double c_star = std::sqrt(2.0 * std::log(k));
    std::vector<double> grid;
    for (double c = 0.25; c <= 6.0; c += 0.002) grid.push_back(c);
    const BumpCurve curve = bump_curve(k, grid);
    CHECK(curve.k == k);
    REQUIRE(curve.prob.size() == grid.size());

    std::size_t argmax = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (curve.prob[i] > curve.prob[argmax]) argmax = i;
        CHECK(curve.prob[i] <= bump_max(k) + 1e-15);
        CHECK(curve.prob[i] == bump(grid[i], k));
    }
    CHECK(std::abs(grid[argmax] - c_star) <= 0.0021);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (i <= argmax) {
            CHECK(curve.prob[i] > curve.prob[i - 1]);
        } else {
            CHECK(curve.prob[i] < curve.prob[i - 1]);
        }
    }
}

TEST_CASE("fwer bound arithmetic") {
    CHECK(fwer_bound(1413, 0.0) == 0.0);
    CHECK(fwer_bound(1413, 1.3e-4) == doctest::Approx(0.18369).epsilon(1e-12));
    CHECK(fwer_bound(1413, 0.01) == 1.0);  // cap
    CHECK(fwer_bound(1, 1.0) == 1.0);
    CHECK_THROWS_AS(fwer_bound(0, 0.5), InvalidArgument);
    CHECK_THROWS_AS(fwer_bound(10, -0.1), InvalidArgument);
    CHECK_THROWS_AS(fwer_bound(10, 1.5), InvalidArgument);
}

TEST_CASE("fwer bound is monotone in both arguments") {
    double prev = -1.0;
    for (double m0 : {0.0, 1e-5, 1e-4, 1e-3, 0.5, 1.0}) {
        const double b = fwer_bound(100, m0);
        CHECK(b >= prev);
        CHECK(b <= 1.0);
        prev = b;
    }
    prev = -1.0;
    for (long long n : {1LL, 10LL, 1000LL, 100000LL}) {
        const double b = fwer_bound(n, 3e-4);
        CHECK(b >= prev);
        prev = b;
    }
}

TEST_CASE("estimate_misleading rejects bad requests") {
    const SimConfig config = singleton_config(-0.5, 0.3, 50, 3);
    ModelParams truth = config.params;
    const std::vector<double> alts = {1.0};
    CHECK_THROWS_AS(estimate_misleading(config, truth, alts, 8.0,
                                        CLKind::Independence, 50),
                    InvalidArgument);  // too few replicates
    CHECK_THROWS_AS(estimate_misleading(config, truth, {}, 8.0,
                                        CLKind::Independence, 200),
                    InvalidArgument);  // empty grid
    CHECK_THROWS_AS(estimate_misleading(config, truth, {0.3}, 8.0,
                                        CLKind::Independence, 200),
                    InvalidArgument);  // alternative equals the truth
    CHECK_THROWS_AS(estimate_misleading(config, truth, alts, 1.0,
                                        CLKind::Independence, 200),
                    InvalidArgument);  // k must exceed 1
}

TEST_CASE("misleading proportions behave on correct singleton data") {
    // Working model correct: a/b near 1, so raw and adjusted proportions
    // track each other; the alternative sits near the bump maximum.
    const SimConfig config = singleton_config(-0.5, 0.3, 100, 17);
    const ModelParams truth = config.params;
    const std::vector<double> alts = {1.05, 1.8};
    const MisleadingEstimate est = estimate_misleading(
        config, truth, alts, 8.0, CLKind::Independence, 150);

    CHECK(est.replicates + est.fit_failures == 150);
    CHECK(est.fit_failures <= 1);
    CHECK(est.k == 8.0);
    CHECK(est.alt_values == alts);
    CHECK(est.mean_adjustment > 0.7);
    CHECK(est.mean_adjustment < 1.3);
    for (std::size_t i = 0; i < alts.size(); ++i) {
        CHECK(est.proportion_raw[i] >= 0.0);
        CHECK(est.proportion_raw[i] <= 1.0);
        CHECK(est.proportion_adjusted[i] >= 0.0);
        CHECK(est.proportion_adjusted[i] <= 0.15);
        CHECK(std::abs(est.proportion_raw[i] - est.proportion_adjusted[i]) <=
              0.05);
        const double p = est.proportion_adjusted[i];
        CHECK(est.mc_se[i] ==
              doctest::Approx(std::sqrt(p * (1 - p) / est.replicates))
                  .epsilon(1e-12));
    }
}

TEST_CASE("larger k can only shrink the hit sets") {
    const SimConfig config = singleton_config(-0.5, 0.3, 80, 29);
    const ModelParams truth = config.params;
    const std::vector<double> alts = {0.9, 1.4};
    const MisleadingEstimate at2 = estimate_misleading(
        config, truth, alts, 2.0, CLKind::Independence, 120);
    const MisleadingEstimate at8 = estimate_misleading(
        config, truth, alts, 8.0, CLKind::Independence, 120);
    for (std::size_t i = 0; i < alts.size(); ++i) {
        CHECK(at8.proportion_raw[i] <= at2.proportion_raw[i]);
        CHECK(at8.proportion_adjusted[i] <= at2.proportion_adjusted[i]);
    }
}

TEST_CASE("estimates are deterministic and thread-count independent") {
    const SimConfig config = singleton_config(-0.2, 0.5, 60, 41);
    const ModelParams truth = config.params;
    const std::vector<double> alts = {1.3};
    const MisleadingEstimate serial = estimate_misleading(
        config, truth, alts, 8.0, CLKind::Independence, 100, 1);
    const MisleadingEstimate threaded = estimate_misleading(
        config, truth, alts, 8.0, CLKind::Independence, 100, 3);
    CHECK(serial.proportion_raw == threaded.proportion_raw);
    CHECK(serial.proportion_adjusted == threaded.proportion_adjusted);
    CHECK(serial.replicates == threaded.replicates);
    CHECK(serial.mean_adjustment ==
          doctest::Approx(threaded.mean_adjustment).epsilon(1e-12));
}
