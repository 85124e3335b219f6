#include "clev/misleading.hpp"

#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "clev/errors.hpp"
#include "clev/evidence.hpp"
#include "clev/normal.hpp"

namespace clev {

namespace {

void require_threshold(double k) {
    if (!(k > 1) || !std::isfinite(k)) {
        throw InvalidArgument("evidence threshold k must exceed 1");
    }
}

}  // namespace

double bump(double c, double k) {
    require_threshold(k);
    if (c <= 0) return 0.0;
    return norm_cdf(-0.5 * c - std::log(k) / c);
}

double bump_max(double k) {
    require_threshold(k);
    return norm_cdf(-std::sqrt(2.0 * std::log(k)));
}

BumpCurve bump_curve(double k, const std::vector<double>& c_values) {
    require_threshold(k);
    BumpCurve curve;
    curve.k = k;
    curve.c_values = c_values;
    curve.prob.reserve(c_values.size());
    for (double c : c_values) curve.prob.push_back(bump(c, k));
    return curve;
}

namespace {

struct ReplicateOutcome {
    bool ok = false;
    double adjustment = 0.0;
    std::vector<std::uint8_t> raw_hit;
    std::vector<std::uint8_t> adj_hit;
};

ReplicateOutcome run_replicate(const Simulator& sim, double true_beta1,
                               const std::vector<double>& alt_grid, double log_k,
                               CLKind kind, const PsiStructure& structure,
                               std::uint64_t replicate) {
    ReplicateOutcome out;
    out.raw_hit.assign(alt_grid.size(), 0);
    out.adj_hit.assign(alt_grid.size(), 0);
    try {
        const std::vector<FamilyData> data = sim.simulate_dataset(replicate);
        const FitResult fit =
            maximize_cl(data, kind, structure, default_init(data, structure));
        const CLEvaluation eval = cl_eval(data, fit.theta, kind, structure);
        const double ab =
            adjustment_factor(estimate_information(eval), kBeta1Index);
        const double lp_true = profile_point(data, kind, structure, kBeta1Index,
                                             true_beta1, fit.theta);
        for (std::size_t i = 0; i < alt_grid.size(); ++i) {
            const double lp_alt = profile_point(data, kind, structure,
                                                kBeta1Index, alt_grid[i],
                                                fit.theta);
            const double log_lr = lp_alt - lp_true;
            out.raw_hit[i] = log_lr >= log_k;
            out.adj_hit[i] = ab * log_lr >= log_k;
        }
        out.adjustment = ab;
        out.ok = true;
    } catch (const Error&) {
        out.ok = false;
    }
    return out;
}

}  // namespace

MisleadingEstimate estimate_misleading(const SimConfig& config,
                                       const ModelParams& true_params,
                                       const std::vector<double>& alt_grid,
                                       double k, CLKind kind, int replicates,
                                       int threads) {
    require_threshold(k);
    config.validate();
    true_params.validate();
    if (replicates < 100) {
        throw InvalidArgument(
            "misleading-evidence estimation needs at least 100 replicates");
    }
    if (alt_grid.empty()) {
        throw InvalidArgument("alternative grid must be nonempty");
    }
    for (double alt : alt_grid) {
        if (std::fabs(alt - true_params.beta1) <= 1e-9) {
            throw InvalidArgument(
                "alternative grid must exclude the true beta1");
        }
    }

    const Simulator sim(config);
    const PsiStructure structure = kind == CLKind::Independence
                                       ? PsiStructure{}
                                       : PsiStructure::shared_all();
    const double log_k = std::log(k);
    std::vector<ReplicateOutcome> outcomes(replicates);

    const auto worker_count =
        std::max(1, std::min(threads, replicates));
    if (worker_count == 1) {
        for (int r = 0; r < replicates; ++r) {
            outcomes[r] = run_replicate(sim, true_params.beta1, alt_grid, log_k,
                                        kind, structure, r);
        }
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(worker_count);
        for (int t = 0; t < worker_count; ++t) {
            pool.emplace_back([&] {
                for (int r = next.fetch_add(1); r < replicates;
                     r = next.fetch_add(1)) {
                    outcomes[r] = run_replicate(sim, true_params.beta1,
                                                alt_grid, log_k, kind,
                                                structure, r);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    MisleadingEstimate est;
    est.k = k;
    est.alt_values = alt_grid;
    std::vector<long> raw(alt_grid.size(), 0), adj(alt_grid.size(), 0);
    double ab_sum = 0.0;
    for (const auto& out : outcomes) {
        if (!out.ok) {
            ++est.fit_failures;
            continue;
        }
        ++est.replicates;
        ab_sum += out.adjustment;
        for (std::size_t i = 0; i < alt_grid.size(); ++i) {
            raw[i] += out.raw_hit[i];
            adj[i] += out.adj_hit[i];
        }
    }
    if (est.replicates == 0) {
        throw InvalidInformation(
            "every replicate failed to fit; no misleading-evidence estimate");
    }
    est.reliability_warning = est.fit_failures > 0.01 * replicates;
    est.mean_adjustment = ab_sum / est.replicates;
    const double n = est.replicates;
    for (std::size_t i = 0; i < alt_grid.size(); ++i) {
        const double p_raw = raw[i] / n;
        const double p_adj = adj[i] / n;
        est.proportion_raw.push_back(p_raw);
        est.proportion_adjusted.push_back(p_adj);
        est.mc_se.push_back(std::sqrt(p_adj * (1 - p_adj) / n));
    }
    return est;
}

double fwer_bound(long long n_eff, double m0) {
    if (n_eff < 1) {
        throw InvalidArgument("effective test count must be at least 1");
    }
    if (!(m0 >= 0) || !(m0 <= 1)) {
        throw InvalidArgument("misleading probability must lie in [0, 1]");
    }
    return std::min(1.0, static_cast<double>(n_eff) * m0);
}

}  // namespace clev
