#include "clev/scan.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "clev/errors.hpp"
#include "clev/rng.hpp"
#include "clev/simulate.hpp"
#include "doctest.h"

using namespace clev;

namespace {

// Nuclear families (all members observed, so the simulator output lines up
// with the template) genotyped at one causal SNP, a few independently drawn
// null SNPs, and optionally a monomorphic column.
Dataset make_dataset(int n_families, double beta1, std::uint64_t seed,
                     int n_null_snps, bool monomorphic_snp = false) {
    SimConfig config;
    config.n_families = n_families;
    config.family_template = nuclear_family_template(3);
    config.maf = 0.3;
    config.params.beta0 = -0.5;
    config.params.beta1 = beta1;
    config.params.set_psi(RelationshipClass::Sibling, 2.0);
    config.params.set_psi(RelationshipClass::ParentOffspring, 1.5);
    config.seed = seed;
    const Simulator sim(config);
    std::vector<FamilyData> families = sim.simulate_dataset(0);

    Dataset ds;
    ds.snp_ids.push_back("rs_causal");
    for (int s = 0; s < n_null_snps; ++s) {
        ds.snp_ids.push_back("rs_null" + std::to_string(s + 1));
    }
    if (monomorphic_snp) ds.snp_ids.push_back("rs_mono");
    for (std::size_t s = 0; s < ds.snp_ids.size(); ++s) {
        ds.snp_index[ds.snp_ids[s]] = static_cast<int>(s);
    }
    ds.positions["rs_causal"] = 1000;

    for (int f = 0; f < n_families; ++f) {
        FamilyData fam = std::move(families[f]);
        std::vector<std::vector<std::optional<Genotype>>> columns(
            fam.size(),
            std::vector<std::optional<Genotype>>(ds.snp_ids.size()));
        for (std::size_t m = 0; m < fam.size(); ++m) {
            columns[m][0] = fam.genotypes[m];
        }
        for (int s = 0; s < n_null_snps; ++s) {
            Rng rng = Rng::substream(
                seed ^ 0x5caULL,
                {static_cast<std::uint64_t>(f), static_cast<std::uint64_t>(s)});
            const std::vector<Genotype> g =
                simulate_genotypes(config.family_template, config.maf, rng);
            for (std::size_t m = 0; m < fam.size(); ++m) {
                columns[m][1 + s] = g[m];
            }
        }
        if (monomorphic_snp) {
            for (std::size_t m = 0; m < fam.size(); ++m) {
                columns[m][ds.snp_ids.size() - 1] = Genotype(0);
            }
        }
        std::fill(fam.genotypes.begin(), fam.genotypes.end(), std::nullopt);
        ds.families.push_back(std::move(fam));
        ds.templates.push_back(config.family_template);
        ds.genotypes.push_back(std::move(columns));
    }
    return ds;
}

// Singleton-only dataset realizing a fixed phenotype-by-genotype table.
Dataset singleton_table_dataset(const long (&counts)[2][3]) {
    Dataset ds;
    ds.snp_ids.push_back("rs_skewed");
    ds.snp_index["rs_skewed"] = 0;
    int id = 0;
    for (int y = 0; y < 2; ++y) {
        for (int g = 0; g < 3; ++g) {
            for (long c = 0; c < counts[y][g]; ++c) {
                PedigreeMember pm;
                pm.id = "S" + std::to_string(++id);
                FamilyData fam;
                fam.family_id = pm.id;
                fam.phenotypes.push_back(static_cast<std::uint8_t>(y));
                fam.genotypes.push_back(std::nullopt);
                ds.families.push_back(std::move(fam));
                ds.templates.push_back(PedigreeTemplate({pm}));
                ds.genotypes.push_back({{Genotype(g)}});
            }
        }
    }
    return ds;
}

bool same_interval(const SupportInterval& a, const SupportInterval& b) {
    return a.k == b.k && a.lower_or == b.lower_or && a.upper_or == b.upper_or &&
           a.lower_open == b.lower_open && a.upper_open == b.upper_open &&
           a.contains_null == b.contains_null;
}

bool same_record(const ScanRecord& a, const ScanRecord& b) {
    if (a.snp_id != b.snp_id || a.position != b.position) return false;
    const auto same_double = [](double x, double y) {
        return (std::isnan(x) && std::isnan(y)) || x == y;
    };
    if (!same_double(a.mcle_or, b.mcle_or) ||
        !same_double(a.max_adjusted_lr, b.max_adjusted_lr) ||
        !same_double(a.adjustment, b.adjustment)) {
        return false;
    }
    if (a.separation != b.separation || a.sparse_cells != b.sparse_cells ||
        a.fit_failure != b.fit_failure) {
        return false;
    }
    if (a.intervals.size() != b.intervals.size()) return false;
    for (std::size_t i = 0; i < a.intervals.size(); ++i) {
        if (!same_interval(a.intervals[i], b.intervals[i])) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("scan records carry fits, adjustments and nested intervals") {
    const Dataset ds = make_dataset(150, 1.0, 41, 2);
    const std::vector<std::string> snps = ds.snp_ids;
    const std::vector<ScanRecord> records =
        scan_region(ds, snps, {8.0, 32.0}, CLKind::PairwiseWeighted);

    REQUIRE(records.size() == 3);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const ScanRecord& r = records[i];
        CHECK(r.snp_id == snps[i]);
        CHECK_FALSE(r.fit_failure);
        CHECK_FALSE(r.separation);
        CHECK_FALSE(r.sparse_cells);
        CHECK(r.mcle_or > 0.0);
        CHECK(r.adjustment > 0.0);
        // The MCLE is the maximizer, so its adjusted LR against the null
        // cannot fall below 1.
        CHECK(r.max_adjusted_lr >= 1.0);

        REQUIRE(r.intervals.size() == 2);
        CHECK(r.intervals[0].k == 8.0);
        CHECK(r.intervals[1].k == 32.0);
        const SupportInterval& inner = r.intervals[0];
        const SupportInterval& outer = r.intervals[1];
        // Larger k relaxes the interval on both sides.
        if (!inner.lower_open) {
            CHECK((outer.lower_open || outer.lower_or <= inner.lower_or));
        }
        if (!inner.upper_open) {
            CHECK((outer.upper_open || outer.upper_or >= inner.upper_or));
        }
        for (const SupportInterval& si : r.intervals) {
            if (!si.lower_open && !si.upper_open) {
                CHECK(si.lower_or < si.upper_or);
                CHECK(si.lower_or <= r.mcle_or);
                CHECK(si.upper_or >= r.mcle_or);
            }
            const bool expected = (si.lower_open || si.lower_or <= 1.0) &&
                                  (si.upper_open || si.upper_or >= 1.0);
            CHECK(si.contains_null == expected);
        }
    }

    // Positions come from the map when present, 0 otherwise.
    CHECK(records[0].position == 1000);
    CHECK(records[1].position == 0);

    // The causal SNP was simulated at log OR 1; with 150 families the MCLE
    // cannot plausibly land below 1.
    CHECK(records[0].mcle_or > 1.0);
    CHECK(records[0].max_adjusted_lr > records[1].max_adjusted_lr);
    // The null SNPs were drawn independently of the phenotypes, so their
    // intervals keep OR = 1 (deterministic for this seed).
    CHECK(records[1].intervals[0].contains_null);
    CHECK(records[2].intervals[0].contains_null);
}

TEST_CASE("a sparse genotype table completes with a skewed curve") {
    // 2x3 cell counts with a thin upper-genotype tail: 1281 genotype-0,
    // 159 genotype-1 and only 4 genotype-2 individuals, none of the
    // genotype-2 carriers affected.
    const long counts[2][3] = {{1160, 153, 4}, {121, 6, 0}};
    const Dataset ds = singleton_table_dataset(counts);
    const std::vector<ScanRecord> records =
        scan_region(ds, {"rs_skewed"}, {8.0, 32.0}, CLKind::Independence);

    const ScanRecord& r = records[0];
    CHECK_FALSE(r.fit_failure);
    CHECK_FALSE(r.separation);
    CHECK(r.sparse_cells);
    // Minor alleles deplete cases here, so the fitted OR is protective.
    CHECK(r.mcle_or == doctest::Approx(0.3685).epsilon(0.01));
    // Singletons only: the independence model is correctly specified and
    // the adjustment stays near 1.
    CHECK(std::abs(r.adjustment - 1.0) < 0.05);
    // Sparsity skews the curve: the lower arm of the 1/8 interval is much
    // longer than the upper arm on the log scale.
    const SupportInterval& si = r.intervals[0];
    REQUIRE_FALSE(si.lower_open);
    REQUIRE_FALSE(si.upper_open);
    const double up = std::log(si.upper_or / r.mcle_or);
    const double down = std::log(r.mcle_or / si.lower_or);
    CHECK(down / up > 1.15);
}

TEST_CASE("records are independent of the requested SNP subset and order") {
    const Dataset ds = make_dataset(60, 0.5, 7, 2);
    const std::vector<ScanRecord> all = scan_region(
        ds, {"rs_causal", "rs_null1", "rs_null2"}, {8.0}, CLKind::PairwiseWeighted);
    const std::vector<ScanRecord> one =
        scan_region(ds, {"rs_null2"}, {8.0}, CLKind::PairwiseWeighted);
    const std::vector<ScanRecord> flipped = scan_region(
        ds, {"rs_null2", "rs_causal"}, {8.0}, CLKind::PairwiseWeighted);
    REQUIRE(one.size() == 1);
    REQUIRE(flipped.size() == 2);
    CHECK(same_record(one[0], all[2]));
    CHECK(same_record(flipped[0], all[2]));
    CHECK(same_record(flipped[1], all[0]));
}

TEST_CASE("thread count does not change scan output") {
    const Dataset ds = make_dataset(60, 0.5, 11, 3);
    const std::vector<std::string> snps = ds.snp_ids;
    const std::vector<ScanRecord> serial =
        scan_region(ds, snps, {8.0, 32.0}, CLKind::PairwiseWeighted, 1);
    const std::vector<ScanRecord> threaded =
        scan_region(ds, snps, {8.0, 32.0}, CLKind::PairwiseWeighted, 3);
    REQUIRE(serial.size() == threaded.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(same_record(serial[i], threaded[i]));
    }
}

TEST_CASE("thresholds are sorted and deduplicated") {
    const Dataset ds = make_dataset(60, 0.5, 13, 0);
    const std::vector<ScanRecord> records = scan_region(
        ds, {"rs_causal"}, {32.0, 8.0, 8.0}, CLKind::PairwiseWeighted);
    REQUIRE(records[0].intervals.size() == 2);
    CHECK(records[0].intervals[0].k == 8.0);
    CHECK(records[0].intervals[1].k == 32.0);
}

TEST_CASE("a monomorphic column is flagged sparse and the scan continues") {
    const Dataset ds = make_dataset(60, 0.5, 17, 1, true);
    const std::vector<ScanRecord> records = scan_region(
        ds, {"rs_mono", "rs_null1"}, {8.0}, CLKind::PairwiseWeighted);
    REQUIRE(records.size() == 2);
    // Two of the six phenotype-by-genotype cells are empty.
    CHECK(records[0].sparse_cells);
    // A fit problem on one SNP must not disturb its neighbours.
    CHECK_FALSE(records[1].sparse_cells);
    CHECK_FALSE(records[1].fit_failure);
    CHECK(records[1].intervals.size() == 1);
    if (records[0].fit_failure) {
        CHECK(records[0].intervals.empty());
        CHECK(std::isnan(records[0].mcle_or));
        CHECK(std::isnan(records[0].max_adjusted_lr));
    }
}

TEST_CASE("independence and pairwise kinds both run") {
    const Dataset ds = make_dataset(60, 0.5, 19, 0);
    for (const CLKind kind : {CLKind::Independence, CLKind::PairwiseWeighted,
                              CLKind::PairwiseUnweightedPsi}) {
        const std::vector<ScanRecord> records =
            scan_region(ds, {"rs_causal"}, {8.0}, kind);
        REQUIRE(records.size() == 1);
        CHECK_FALSE(records[0].fit_failure);
        CHECK(records[0].max_adjusted_lr >= 1.0);
    }
}

TEST_CASE("scan preconditions") {
    const Dataset ds = make_dataset(20, 0.5, 23, 0);
    CHECK_THROWS_AS(
        scan_region(ds, {"rs_causal"}, {1.0}, CLKind::PairwiseWeighted),
        InvalidArgument);
    CHECK_THROWS_AS(
        scan_region(ds, {"rs_causal"}, {0.5}, CLKind::PairwiseWeighted),
        InvalidArgument);
    CHECK_THROWS_AS(
        scan_region(ds, {"rs_missing"}, {8.0}, CLKind::PairwiseWeighted),
        InvalidArgument);
}
