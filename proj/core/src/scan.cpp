#include "clev/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "clev/errors.hpp"

namespace clev {

namespace {

bool has_sparse_cell(const std::vector<FamilyData>& data) {
    long cells[2][3] = {};
    for (const FamilyData& fam : data) {
        for (std::size_t m = 0; m < fam.size(); ++m) {
            if (!fam.phenotypes[m].has_value() || !fam.genotypes[m].has_value()) {
                continue;
            }
            ++cells[*fam.phenotypes[m]][fam.genotypes[m]->count()];
        }
    }
    for (const auto& row : cells) {
        for (long c : row) {
            if (c < kSparseCellMin) return true;
        }
    }
    return false;
}

ScanRecord scan_one(const Dataset& dataset, const std::string& snp,
                    const std::vector<double>& k_values, CLKind kind) {
    ScanRecord record;
    record.snp_id = snp;
    const auto pos = dataset.positions.find(snp);
    record.position = pos == dataset.positions.end() ? 0 : pos->second;

    const std::vector<FamilyData> data = dataset_for_snp(dataset, snp);
    record.sparse_cells = has_sparse_cell(data);

    try {
        const PsiStructure structure = kind == CLKind::Independence
                                           ? PsiStructure{}
                                           : PsiStructure::shared_all();
        const FitResult fit =
            maximize_cl(data, kind, structure, default_init(data, structure));
        record.separation = fit.separation;

        ProfileCurve curve = profile_cl(data, kind, structure, kBeta1Index,
                                        default_beta1_grid());
        const CLEvaluation eval = cl_eval(data, curve.mcle_theta, kind, structure);
        curve.adjustment =
            adjustment_factor(estimate_information(eval), kBeta1Index);

        record.adjustment = curve.adjustment;
        record.mcle_or = std::exp(curve.mcle_interest);
        for (double k : k_values) {
            record.intervals.push_back(support_interval(curve, k));
        }
        record.max_adjusted_lr = adjusted_lr(curve, record.mcle_or, 1.0);
    } catch (const Error&) {
        record.fit_failure = true;
        record.intervals.clear();
    }
    return record;
}

}  // namespace

std::vector<ScanRecord> scan_region(const Dataset& dataset,
                                    const std::vector<std::string>& snps,
                                    const std::vector<double>& k_values,
                                    CLKind kind, int threads) {
    std::vector<double> ks = k_values;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (double k : ks) {
        if (!(k > 1)) {
            throw InvalidArgument("every scan threshold k must exceed 1");
        }
    }
    for (const std::string& snp : snps) {
        if (dataset.snp_index.find(snp) == dataset.snp_index.end()) {
            throw InvalidArgument("SNP '" + snp + "' is not in the dataset");
        }
    }

    std::vector<ScanRecord> records(snps.size());
    const int worker_count = std::max(
        1, std::min<int>(threads, static_cast<int>(snps.size())));
    if (worker_count == 1) {
        for (std::size_t i = 0; i < snps.size(); ++i) {
            records[i] = scan_one(dataset, snps[i], ks, kind);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(worker_count);
        for (int t = 0; t < worker_count; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < snps.size();
                     i = next.fetch_add(1)) {
                    records[i] = scan_one(dataset, snps[i], ks, kind);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    return records;
}

}  // namespace clev
