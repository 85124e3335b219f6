// Microbenchmarks for the numerical hot paths: the bivariate normal CDF and
// latent-correlation solver that dominate simulator construction, the
// composite-likelihood evaluations that dominate fitting, and the top-level
// fit/profile/simulate entry points.

#include <benchmark/benchmark.h>

#include <vector>

#include "clev/evidence.hpp"
#include "clev/likelihood.hpp"
#include "clev/model.hpp"
#include "clev/normal.hpp"
#include "clev/pedigree.hpp"
#include "clev/plackett.hpp"
#include "clev/simulate.hpp"

using namespace clev;

namespace {

SimConfig sibling_config(int n_families) {
    SimConfig config;
    config.n_families = n_families;
    config.family_template = sibling_template(4);
    config.maf = 0.25;
    config.params.beta0 = -1.0;
    config.params.beta1 = 0.8;
    config.params.set_psi(RelationshipClass::Sibling, 2.5);
    config.seed = 7;
    return config;
}

std::vector<FamilyData> sibling_data(int n_families) {
    return Simulator(sibling_config(n_families)).simulate_dataset(0);
}

void bm_norm_cdf(benchmark::State& state) {
    double x = -6.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(norm_cdf(x));
        x += 0.01;
        if (x > 6.0) x = -6.0;
    }
}
BENCHMARK(bm_norm_cdf);

void bm_bvn_cdf(benchmark::State& state) {
    const double rho = state.range(0) / 100.0;
    double h = -2.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bvn_cdf(h, 0.7, rho));
        h += 0.05;
        if (h > 2.0) h = -2.0;
    }
}
BENCHMARK(bm_bvn_cdf)->Arg(30)->Arg(90)->Arg(99);

void bm_solve_latent_rho(benchmark::State& state) {
    double delta = 0.05;
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_latent_rho(0.3, 0.6, delta));
        delta += 0.01;
        if (delta > 0.4) delta = 0.05;
    }
}
BENCHMARK(bm_solve_latent_rho);

void bm_joint_derivs(benchmark::State& state) {
    double psi = 1.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(joint_derivs({0.3, 0.55, psi}));
        psi += 0.1;
        if (psi > 8.0) psi = 1.1;
    }
}
BENCHMARK(bm_joint_derivs);

void bm_cl_eval(benchmark::State& state) {
    const auto data = sibling_data(200);
    const CLKind kind = static_cast<CLKind>(state.range(0));
    const PsiStructure structure = kind == CLKind::Independence
                                       ? PsiStructure{}
                                       : PsiStructure::shared_all();
    Eigen::VectorXd theta(structure.dim());
    theta.setZero();
    theta[kBeta0Index] = -0.9;
    theta[kBeta1Index] = 0.7;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cl_eval(data, theta, kind, structure));
    }
    state.SetItemsProcessed(state.iterations() * data.size());
}
BENCHMARK(bm_cl_eval)->Arg(0)->Arg(1)->Arg(2);

void bm_maximize_cl(benchmark::State& state) {
    const auto data = sibling_data(200);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            maximize_cl(data, CLKind::Independence, PsiStructure{},
                        default_init(data, PsiStructure{})));
    }
}
BENCHMARK(bm_maximize_cl);

void bm_profile_cl(benchmark::State& state) {
    const auto data = sibling_data(200);
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(-1.0 + 0.05 * i);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cl_eval(data, Eigen::Vector2d(-0.9, 0.7),
                                         CLKind::Independence, PsiStructure{},
                                         false));
        benchmark::DoNotOptimize(profile_cl(data, CLKind::Independence,
                                            PsiStructure{}, kBeta1Index, grid));
    }
}
BENCHMARK(bm_profile_cl);

void bm_simulate_dataset(benchmark::State& state) {
    const Simulator sim(sibling_config(200));
    std::uint64_t rep = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sim.simulate_dataset(rep++));
    }
    state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(bm_simulate_dataset);

void bm_simulator_construction(benchmark::State& state) {
    const SimConfig config = sibling_config(50);
    for (auto _ : state) {
        Simulator sim(config);
        benchmark::DoNotOptimize(sim.simulate_family(0, 0));
    }
}
BENCHMARK(bm_simulator_construction);

void bm_support_interval(benchmark::State& state) {
    const auto data = sibling_data(200);
    ProfileCurve curve = profile_cl(data, CLKind::Independence);
    curve.adjustment = 0.8;
    for (auto _ : state) {
        benchmark::DoNotOptimize(support_interval(curve, 32.0));
    }
}
BENCHMARK(bm_support_interval);

}  // namespace

BENCHMARK_MAIN();
