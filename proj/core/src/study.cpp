#include "clev/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "clev/errors.hpp"

namespace clev {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> usable(const std::vector<double>& estimates) {
    std::vector<double> out;
    out.reserve(estimates.size());
    for (double e : estimates) {
        if (!std::isnan(e)) out.push_back(e);
    }
    if (out.empty()) {
        throw InvalidArgument("no successful replicates to summarize");
    }
    return out;
}

}  // namespace

double study_mean(const std::vector<double>& estimates) {
    const std::vector<double> v = usable(estimates);
    double sum = 0.0;
    for (double e : v) sum += e;
    return sum / static_cast<double>(v.size());
}

double study_se(const std::vector<double>& estimates) {
    const std::vector<double> v = usable(estimates);
    if (v.size() < 2) return kNaN;
    const double mean = study_mean(estimates);
    double ss = 0.0;
    for (double e : v) ss += (e - mean) * (e - mean);
    const double n = static_cast<double>(v.size());
    return std::sqrt(ss / (n - 1.0) / n);
}

StudyResult mcle_study(const SimConfig& config,
                       const std::vector<CLKind>& kinds, int interest_index,
                       int replicates, int threads) {
    config.validate();
    if (kinds.empty()) throw InvalidArgument("at least one CL kind required");
    if (replicates < 1) throw InvalidArgument("replicates must be positive");

    std::vector<PsiStructure> structures;
    structures.reserve(kinds.size());
    for (CLKind kind : kinds) {
        const PsiStructure structure = kind == CLKind::Independence
                                           ? PsiStructure{}
                                           : PsiStructure::shared_all();
        if (interest_index < 0 || interest_index >= structure.dim()) {
            throw InvalidArgument(
                "interest index " + std::to_string(interest_index) +
                " out of range for " + to_string(kind));
        }
        structures.push_back(structure);
    }

    const Simulator simulator(config);
    StudyResult result;
    result.replicates = replicates;
    result.estimates.assign(kinds.size(),
                            std::vector<double>(replicates, kNaN));
    result.fit_failures.assign(kinds.size(), 0);

    const auto run_one = [&](int rep) {
        const std::vector<FamilyData> data =
            simulator.simulate_dataset(static_cast<std::uint64_t>(rep));
        for (std::size_t k = 0; k < kinds.size(); ++k) {
            try {
                const FitResult fit =
                    maximize_cl(data, kinds[k], structures[k],
                                default_init(data, structures[k]));
                if (fit.converged) {
                    result.estimates[k][rep] = fit.theta[interest_index];
                }
            } catch (const Error&) {
                // NaN slot marks the failure; counted below.
            }
        }
    };

    const int worker_count =
        std::max(1, std::min(threads, replicates));
    if (worker_count == 1) {
        for (int rep = 0; rep < replicates; ++rep) run_one(rep);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(worker_count);
        for (int t = 0; t < worker_count; ++t) {
            pool.emplace_back([&] {
                for (int rep = next.fetch_add(1); rep < replicates;
                     rep = next.fetch_add(1)) {
                    run_one(rep);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    for (std::size_t k = 0; k < kinds.size(); ++k) {
        for (double e : result.estimates[k]) {
            if (std::isnan(e)) ++result.fit_failures[k];
        }
    }
    return result;
}

}  // namespace clev
