// Command-line surface: simulate family datasets, fit and scan SNPs, run
// replicate and misleading-evidence studies, and bound the family-wise
// error rate. Subcommand options may come from a JSON config file
// (--config); explicit flags win over config values.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clev/dataset.hpp"
#include "clev/errors.hpp"
#include "clev/evidence.hpp"
#include "clev/io.hpp"
#include "clev/likelihood.hpp"
#include "clev/misleading.hpp"
#include "clev/pedigree.hpp"
#include "clev/scan.hpp"
#include "clev/simulate.hpp"
#include "clev/study.hpp"
#include "json.hpp"

namespace {

using clev::CLKind;
using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------------------
// flag-value parsing

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw clev::InvalidArgument(what + ": expected a number, got '" + s + "'");
}

long parse_long(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const long v = std::stol(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw clev::InvalidArgument(what + ": expected an integer, got '" + s + "'");
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw clev::InvalidArgument(what +
                                ": expected a nonnegative integer, got '" + s +
                                "'");
}

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& what) {
    std::vector<double> out;
    for (const std::string& part : split(text, ',')) {
        out.push_back(parse_double(part, what));
    }
    return out;
}

std::vector<long> parse_long_list(const std::string& text,
                                  const std::string& what) {
    std::vector<long> out;
    for (const std::string& part : split(text, ',')) {
        out.push_back(parse_long(part, what));
    }
    return out;
}

// "lo:hi:points" -> linearly spaced grid, inclusive of both ends.
std::vector<double> parse_linspace(const std::string& text,
                                   const std::string& what) {
    const std::vector<std::string> parts = split(text, ':');
    if (parts.size() != 3) {
        throw clev::InvalidArgument(what + ": expected lo:hi:points, got '" +
                                    text + "'");
    }
    const double lo = parse_double(parts[0], what);
    const double hi = parse_double(parts[1], what);
    const long points = parse_long(parts[2], what);
    if (!(lo < hi) || points < 2) {
        throw clev::InvalidArgument(what + ": need lo < hi and points >= 2");
    }
    std::vector<double> grid(points);
    for (long i = 0; i < points; ++i) {
        grid[i] = lo + (hi - lo) * static_cast<double>(i) /
                           static_cast<double>(points - 1);
    }
    return grid;
}

// "lo:hi:points" on the OR scale -> log-spaced beta1 grid.
std::vector<double> parse_or_grid(const std::string& text) {
    const std::vector<std::string> parts = split(text, ':');
    if (parts.size() != 3) {
        throw clev::InvalidArgument("--grid-or: expected lo:hi:points, got '" +
                                    text + "'");
    }
    const double lo = parse_double(parts[0], "--grid-or");
    const double hi = parse_double(parts[1], "--grid-or");
    const long points = parse_long(parts[2], "--grid-or");
    if (!(lo > 0) || !(lo < hi) || points < 2) {
        throw clev::InvalidArgument(
            "--grid-or: need 0 < lo < hi and points >= 2");
    }
    std::vector<double> grid(points);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (long i = 0; i < points; ++i) {
        grid[i] = llo + (lhi - llo) * static_cast<double>(i) /
                            static_cast<double>(points - 1);
    }
    return grid;
}

CLKind parse_kind(const std::string& name) {
    if (name == "independence") return CLKind::Independence;
    if (name == "pairwise") return CLKind::PairwiseWeighted;
    if (name == "pairwise-psi") return CLKind::PairwiseUnweightedPsi;
    throw clev::InvalidArgument(
        "--cl: expected independence, pairwise or pairwise-psi, got '" + name +
        "'");
}

std::vector<CLKind> parse_kind_list(const std::string& text) {
    std::vector<CLKind> kinds;
    for (const std::string& part : split(text, ',')) {
        kinds.push_back(parse_kind(part));
    }
    return kinds;
}

const char* kind_name(CLKind kind) {
    switch (kind) {
        case CLKind::Independence: return "independence";
        case CLKind::PairwiseWeighted: return "pairwise";
        case CLKind::PairwiseUnweightedPsi: return "pairwise-psi";
    }
    return "?";
}

// "three-generation", "siblings:K" or "nuclear:K".
clev::PedigreeTemplate parse_template(const std::string& name) {
    if (name == "three-generation") return clev::three_generation_template();
    const std::vector<std::string> parts = split(name, ':');
    if (parts.size() == 2) {
        const long k = parse_long(parts[1], "--template");
        if (parts[0] == "siblings") {
            return clev::sibling_template(static_cast<int>(k));
        }
        if (parts[0] == "nuclear") {
            return clev::nuclear_family_template(static_cast<int>(k));
        }
    }
    throw clev::InvalidArgument(
        "--template: expected three-generation, siblings:K or nuclear:K, "
        "got '" +
        name + "'");
}

// One shared value or five per-class values in the order sibling,
// parent-offspring, avuncular, grandparental, cousin.
void apply_psi(clev::ModelParams& params, const std::string& text) {
    const std::vector<double> values = parse_double_list(text, "--psi");
    const clev::RelationshipClass classes[5] = {
        clev::RelationshipClass::Sibling,
        clev::RelationshipClass::ParentOffspring,
        clev::RelationshipClass::Avuncular,
        clev::RelationshipClass::Grandparental,
        clev::RelationshipClass::Cousin,
    };
    if (values.size() == 1) {
        for (const auto c : classes) params.set_psi(c, values[0]);
        return;
    }
    if (values.size() == 5) {
        for (int i = 0; i < 5; ++i) params.set_psi(classes[i], values[i]);
        return;
    }
    throw clev::InvalidArgument("--psi: expected 1 or 5 comma-separated values");
}

// ---------------------------------------------------------------------------
// config file support

// The config file is a flat JSON object whose keys are long option names
// without the leading dashes; a flag given on the command line overrides
// the config value. Values may be numbers/booleans or the same strings the
// flags accept; list-valued options also accept JSON arrays.
json load_config(int argc, char** argv) {
    std::string path;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) {
            path = argv[i + 1];
        } else if (arg.rfind("--config=", 0) == 0) {
            path = arg.substr(9);
        }
    }
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw clev::IoError("cannot open config '" + path + "'");
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::exception& e) {
        throw clev::ParseError("config '" + path + "': " + e.what());
    }
    if (!cfg.is_object()) {
        throw clev::ParseError("config '" + path + "' must be a JSON object");
    }
    return cfg;
}

std::string config_scalar(const json& value, const std::string& key) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number() || value.is_boolean()) {
        std::ostringstream s;
        s.imbue(std::locale::classic());
        s << std::setprecision(17);
        if (value.is_number_integer()) {
            s << value.get<long long>();
        } else if (value.is_number()) {
            s << value.get<double>();
        } else {
            s << (value.get<bool>() ? "1" : "0");
        }
        return s.str();
    }
    if (value.is_array()) {
        std::string joined;
        for (const json& item : value) {
            if (!joined.empty()) joined += ',';
            joined += config_scalar(item, key);
        }
        return joined;
    }
    throw clev::ParseError("config key '" + key + "' has an unusable type");
}

// Applies cfg onto the subcommand's bound string variables and rejects keys
// the subcommand does not know.
class ConfigBinder {
public:
    explicit ConfigBinder(json cfg) : cfg_(std::move(cfg)) {}

    void bind(const std::string& key, std::string& var) {
        known_.push_back(key);
        const auto it = cfg_.find(key);
        if (it != cfg_.end()) var = config_scalar(*it, key);
    }

    void finish() const {
        for (const auto& [key, value] : cfg_.items()) {
            (void)value;
            if (key == "config") continue;
            if (std::find(known_.begin(), known_.end(), key) == known_.end()) {
                throw clev::ParseError("config key '" + key +
                                       "' is not an option of this command");
            }
        }
    }

private:
    json cfg_;
    std::vector<std::string> known_;
};

// ---------------------------------------------------------------------------
// output plumbing

void require(bool ok, const std::string& message) {
    if (!ok) throw clev::InvalidArgument(message);
}

void check_format(const std::string& format) {
    require(format == "csv" || format == "json",
            "--format: expected csv or json, got '" + format + "'");
}

// Runs the writer against stdout for "-" or an opened file otherwise.
template <typename Fn>
void with_output(const std::string& path, Fn&& writer) {
    if (path == "-") {
        writer(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw clev::IoError("cannot open '" + path + "' for writing");
    writer(out);
    if (!out) throw clev::IoError("write to '" + path + "' failed");
}

void prepare_stream(std::ostream& out) {
    out.imbue(std::locale::classic());
    out << std::setprecision(17);
}

// ---------------------------------------------------------------------------
// shared option bundles

struct DesignOpts {
    std::string tmpl = "three-generation";
    std::string beta0 = "-2.38";
    std::string beta1 = "1.76";
    std::string psi = "3,2.5,2,1.5,1.2";
    std::string maf = "0.2";
    std::string seed = "0";

    void add(CLI::App* cmd, ConfigBinder& cfg) {
        cfg.bind("template", tmpl);
        cfg.bind("beta0", beta0);
        cfg.bind("beta1", beta1);
        cfg.bind("psi", psi);
        cfg.bind("maf", maf);
        cfg.bind("seed", seed);
        cmd->add_option("--template", tmpl,
                        "Family design: three-generation, siblings:K or "
                        "nuclear:K");
        cmd->add_option("--beta0", beta0, "Marginal intercept");
        cmd->add_option("--beta1", beta1, "Marginal log odds ratio");
        cmd->add_option("--psi", psi,
                        "Dependence odds ratios: one shared value or five "
                        "(sibling,parent-offspring,avuncular,grandparental,"
                        "cousin)");
        cmd->add_option("--maf", maf, "Minor allele frequency");
        cmd->add_option("--seed", seed, "RNG seed");
    }

    clev::SimConfig config(long n_families) const {
        clev::SimConfig config;
        config.n_families = static_cast<int>(n_families);
        config.family_template = parse_template(tmpl);
        config.maf = parse_double(maf, "--maf");
        config.params.beta0 = parse_double(beta0, "--beta0");
        config.params.beta1 = parse_double(beta1, "--beta1");
        apply_psi(config.params, psi);
        config.seed = parse_u64(seed, "--seed");
        config.validate();
        return config;
    }
};

struct DataOpts {
    std::string ped, geno, map;

    void add(CLI::App* cmd, ConfigBinder& cfg) {
        cfg.bind("ped", ped);
        cfg.bind("geno", geno);
        cfg.bind("map", map);
        cmd->add_option("--ped", ped, "Pedigree file (tab-separated)");
        cmd->add_option("--geno", geno, "Genotype matrix file");
        cmd->add_option("--map", map, "Optional SNP position map");
    }

    clev::Dataset parse() const {
        require(!ped.empty(), "--ped is required");
        require(!geno.empty(), "--geno is required");
        return clev::parse_dataset(ped, geno, map);
    }
};

// ---------------------------------------------------------------------------
// subcommands

struct SimulateCmd {
    DesignOpts design;
    std::string out_prefix;
    std::string families = "100";
    std::string replicate = "0";
    std::string null_snps = "0";

    int run() const {
        require(!out_prefix.empty(), "--out-prefix is required");
        const long n = parse_long(families, "--families");
        const long n_null = parse_long(null_snps, "--null-snps");
        require(n_null >= 0, "--null-snps must be nonnegative");
        const std::uint64_t rep = parse_u64(replicate, "--replicate");
        const clev::SimConfig config = design.config(n);
        const clev::Simulator simulator(config);
        const std::vector<int> observed =
            config.family_template.observed_indices();
        const auto& members = config.family_template.members();

        clev::Dataset ds;
        const long n_snps = 1 + n_null;
        for (long s = 0; s < n_snps; ++s) {
            const std::string id = "rs" + std::to_string(s + 1);
            ds.snp_index[id] = static_cast<int>(s);
            ds.snp_ids.push_back(id);
            ds.positions[id] = 10000 * (s + 1);
        }

        for (long f = 0; f < n; ++f) {
            const clev::FamilyData sim_fam =
                simulator.simulate_family(rep, static_cast<int>(f));

            clev::FamilyData fam;
            fam.family_id = "F" + std::to_string(f + 1);
            fam.phenotypes.assign(members.size(), std::nullopt);
            fam.genotypes.assign(members.size(), std::nullopt);
            fam.pair_classes = config.family_template.classify_pairs();
            std::vector<std::vector<std::optional<clev::Genotype>>> columns(
                members.size(),
                std::vector<std::optional<clev::Genotype>>(n_snps));
            for (std::size_t j = 0; j < observed.size(); ++j) {
                fam.phenotypes[observed[j]] = sim_fam.phenotypes[j];
                columns[observed[j]][0] = sim_fam.genotypes[j];
            }
            // Null columns are fresh transmission draws, independent of the
            // phenotypes; substream tags continue the simulator's per-family
            // numbering (0 and 1 are taken).
            for (long s = 0; s < n_null; ++s) {
                clev::Rng rng = clev::Rng::substream(
                    config.seed,
                    {rep, static_cast<std::uint64_t>(f),
                     static_cast<std::uint64_t>(2 + s)});
                const std::vector<clev::Genotype> g = clev::simulate_genotypes(
                    config.family_template, config.maf, rng);
                for (int idx : observed) columns[idx][1 + s] = g[idx];
            }
            fam.validate();

            std::vector<clev::PedigreeMember> renamed = members;
            for (auto& m : renamed) m.id = fam.family_id + "_" + m.id;
            ds.families.push_back(std::move(fam));
            ds.templates.push_back(clev::PedigreeTemplate(std::move(renamed)));
            ds.genotypes.push_back(std::move(columns));
        }

        clev::write_dataset(ds, out_prefix + ".ped", out_prefix + ".geno",
                            out_prefix + ".map");
        std::cerr << "wrote " << n << " families x " << n_snps << " SNPs to "
                  << out_prefix << ".{ped,geno,map}\n";
        return 0;
    }
};

struct FitCmd {
    DataOpts data;
    std::string snp;
    std::string cl = "independence";
    std::string grid_or;
    std::string out = "-";
    std::string format = "csv";

    int run() const {
        require(!snp.empty(), "--snp is required");
        check_format(format);
        const CLKind kind = parse_kind(cl);
        const clev::Dataset ds = data.parse();
        const std::vector<clev::FamilyData> snp_data =
            clev::dataset_for_snp(ds, snp);
        const clev::PsiStructure structure =
            kind == CLKind::Independence ? clev::PsiStructure{}
                                         : clev::PsiStructure::shared_all();
        const std::vector<double> grid = grid_or.empty()
                                             ? clev::default_beta1_grid()
                                             : parse_or_grid(grid_or);
        clev::ProfileCurve curve = clev::profile_cl(
            snp_data, kind, structure, clev::kBeta1Index, grid);
        try {
            const clev::CLEvaluation eval =
                clev::cl_eval(snp_data, curve.mcle_theta, kind, structure);
            curve.adjustment = clev::adjustment_factor(
                clev::estimate_information(eval), clev::kBeta1Index);
        } catch (const clev::Error& e) {
            std::cerr << "warning: adjustment unavailable for " << snp << ": "
                      << e.what() << "\n";
            curve.adjustment = kNaN;
        }
        with_output(out, [&](std::ostream& o) {
            format == "csv" ? clev::write_curve_csv(curve, o)
                            : clev::write_curve_json(curve, o);
        });
        return 0;
    }
};

struct ScanCmd {
    DataOpts data;
    std::string snps;
    std::string k = "8,32";
    std::string cl = "independence";
    std::string threads = "1";
    std::string out = "-";
    std::string format = "csv";

    int run() const {
        check_format(format);
        const CLKind kind = parse_kind(cl);
        const std::vector<double> ks = parse_double_list(k, "--k");
        const clev::Dataset ds = data.parse();
        const std::vector<std::string> requested =
            snps.empty() ? ds.snp_ids : split(snps, ',');
        const std::vector<clev::ScanRecord> records = clev::scan_region(
            ds, requested, ks, kind,
            static_cast<int>(parse_long(threads, "--threads")));
        long flagged = 0;
        for (const auto& r : records) {
            if (r.fit_failure || r.separation || r.sparse_cells) ++flagged;
        }
        with_output(out, [&](std::ostream& o) {
            format == "csv" ? clev::write_scan_csv(records, o)
                            : clev::write_scan_json(records, o);
        });
        std::cerr << "scanned " << records.size() << " SNPs (" << flagged
                  << " flagged)\n";
        return 0;
    }
};

struct ReplicateCmd {
    DesignOpts design;
    std::string n = "100";
    std::string replicates = "1000";
    std::string cl = "independence";
    std::string interest = "beta1";
    std::string threads = "1";
    std::string out = "-";
    std::string format = "csv";

    int run() const {
        check_format(format);
        require(interest == "beta1" || interest == "psi",
                "--interest: expected beta1 or psi");
        const std::vector<CLKind> kinds = parse_kind_list(cl);
        const std::vector<long> sizes = parse_long_list(n, "--n");
        const int reps =
            static_cast<int>(parse_long(replicates, "--replicates"));
        const int n_threads =
            static_cast<int>(parse_long(threads, "--threads"));
        const int index = interest == "beta1" ? clev::kBeta1Index : 2;
        const char* interest_label =
            interest == "beta1" ? "beta1" : "log_psi";

        struct Row {
            long n;
            CLKind kind;
            int replicates, fit_failures;
            double mean, se;
        };
        std::vector<Row> rows;
        for (long size : sizes) {
            const clev::StudyResult study = clev::mcle_study(
                design.config(size), kinds, index, reps, n_threads);
            for (std::size_t kidx = 0; kidx < kinds.size(); ++kidx) {
                rows.push_back({size, kinds[kidx], study.replicates,
                                study.fit_failures[kidx],
                                clev::study_mean(study.estimates[kidx]),
                                clev::study_se(study.estimates[kidx])});
            }
        }

        with_output(out, [&](std::ostream& o) {
            prepare_stream(o);
            if (format == "csv") {
                o << "# clev replicate schema v1\n";
                o << "n,kind,interest,replicates,fit_failures,mean,mc_se\n";
                for (const Row& r : rows) {
                    o << r.n << ',' << kind_name(r.kind) << ','
                      << interest_label << ',' << r.replicates << ','
                      << r.fit_failures << ',' << r.mean << ',' << r.se
                      << "\n";
                }
            } else {
                json doc;
                doc["schema"] = "clev/replicate/v1";
                json items = json::array();
                for (const Row& r : rows) {
                    items.push_back({{"n", r.n},
                                     {"kind", kind_name(r.kind)},
                                     {"interest", interest_label},
                                     {"replicates", r.replicates},
                                     {"fit_failures", r.fit_failures},
                                     {"mean", r.mean},
                                     {"mc_se", r.se}});
                }
                doc["rows"] = std::move(items);
                o << doc.dump(2) << "\n";
            }
        });
        return 0;
    }
};

struct MisleadingCmd {
    DesignOpts design;
    std::string families = "300";
    std::string k = "8";
    std::string alt = "1.0:2.5:16";
    std::string replicates = "1000";
    std::string cl = "independence";
    std::string threads = "1";
    std::string out = "-";
    std::string format = "csv";
    std::string bump_out;
    std::string bump_grid = "0.05:6:120";

    int run() const {
        check_format(format);
        const double threshold = parse_double(k, "--k");
        const std::vector<double> alt_grid =
            alt.find(':') != std::string::npos
                ? parse_linspace(alt, "--alt")
                : parse_double_list(alt, "--alt");
        const clev::SimConfig config =
            design.config(parse_long(families, "--families"));
        const clev::MisleadingEstimate estimate = clev::estimate_misleading(
            config, config.params, alt_grid, threshold, parse_kind(cl),
            static_cast<int>(parse_long(replicates, "--replicates")),
            static_cast<int>(parse_long(threads, "--threads")));
        if (estimate.reliability_warning) {
            std::cerr << "warning: " << estimate.fit_failures
                      << " replicates failed to fit\n";
        }
        with_output(out, [&](std::ostream& o) {
            format == "csv" ? clev::write_misleading_csv(estimate, o)
                            : clev::write_misleading_json(estimate, o);
        });
        if (!bump_out.empty()) {
            const clev::BumpCurve curve = clev::bump_curve(
                threshold, parse_linspace(bump_grid, "--bump-grid"));
            with_output(bump_out, [&](std::ostream& o) {
                format == "csv" ? clev::write_bump_csv(curve, o)
                                : clev::write_bump_json(curve, o);
            });
        }
        return 0;
    }
};

struct FwerCmd {
    std::string n_eff;
    std::string m0;
    std::string misleading;
    std::string out = "-";
    std::string format = "csv";

    int run() const {
        check_format(format);
        require(!n_eff.empty(), "--n-eff is required");
        require(!m0.empty() || !misleading.empty(),
                "either --m0 or --misleading is required");
        const long long n = parse_long(n_eff, "--n-eff");
        double prob = kNaN;
        if (!m0.empty()) {
            prob = parse_double(m0, "--m0");
        } else {
            std::ifstream in(misleading);
            if (!in) {
                throw clev::IoError("cannot open '" + misleading + "'");
            }
            const clev::MisleadingEstimate est =
                clev::read_misleading_json(in);
            require(!est.proportion_adjusted.empty(),
                    "misleading estimate has no alternatives");
            prob = *std::max_element(est.proportion_adjusted.begin(),
                                     est.proportion_adjusted.end());
        }
        const double bound = clev::fwer_bound(n, prob);
        with_output(out, [&](std::ostream& o) {
            prepare_stream(o);
            if (format == "csv") {
                o << "# clev fwer schema v1\n";
                o << "n_eff,m0,bound\n";
                o << n << ',' << prob << ',' << bound << "\n";
            } else {
                const json doc{{"schema", "clev/fwer/v1"},
                               {"n_eff", n},
                               {"m0", prob},
                               {"bound", bound}};
                o << doc.dump(2) << "\n";
            }
        });
        return 0;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Evidential composite-likelihood analysis of family-based "
        "genetic association data"};
    app.require_subcommand(1);
    std::string config_path;  // consumed by load_config before parsing
    app.add_option("--config", config_path, "JSON config file");

    try {
        json cfg = load_config(argc, argv);
        ConfigBinder binder(std::move(cfg));

        SimulateCmd simulate;
        CLI::App* sim_cmd = app.add_subcommand(
            "simulate", "Write a simulated family dataset to files");
        sim_cmd->add_option("--config", config_path, "JSON config file");
        simulate.design.add(sim_cmd, binder);
        binder.bind("out-prefix", simulate.out_prefix);
        binder.bind("families", simulate.families);
        binder.bind("replicate", simulate.replicate);
        binder.bind("null-snps", simulate.null_snps);
        sim_cmd->add_option("--out-prefix", simulate.out_prefix,
                            "Output path prefix for .ped/.geno/.map");
        sim_cmd->add_option("--families", simulate.families,
                            "Number of families");
        sim_cmd->add_option("--replicate", simulate.replicate,
                            "Replicate substream to emit");
        sim_cmd->add_option("--null-snps", simulate.null_snps,
                            "Extra SNP columns simulated with no phenotype "
                            "effect");

        FitCmd fit;
        CLI::App* fit_cmd = app.add_subcommand(
            "fit", "Profile the composite likelihood of one SNP");
        fit_cmd->add_option("--config", config_path, "JSON config file");
        fit.data.add(fit_cmd, binder);
        binder.bind("snp", fit.snp);
        binder.bind("cl", fit.cl);
        binder.bind("grid-or", fit.grid_or);
        binder.bind("out", fit.out);
        binder.bind("format", fit.format);
        fit_cmd->add_option("--snp", fit.snp, "SNP id to fit");
        fit_cmd->add_option("--cl", fit.cl,
                            "independence, pairwise or pairwise-psi");
        fit_cmd->add_option("--grid-or", fit.grid_or,
                            "OR grid lo:hi:points (default 1/20:20:401)");
        fit_cmd->add_option("--out", fit.out, "Output path or - for stdout");
        fit_cmd->add_option("--format", fit.format, "csv or json");

        ScanCmd scan;
        CLI::App* scan_cmd = app.add_subcommand(
            "scan", "Scan SNPs and emit per-SNP evidence records");
        scan_cmd->add_option("--config", config_path, "JSON config file");
        scan.data.add(scan_cmd, binder);
        binder.bind("snps", scan.snps);
        binder.bind("k", scan.k);
        binder.bind("cl", scan.cl);
        binder.bind("threads", scan.threads);
        binder.bind("out", scan.out);
        binder.bind("format", scan.format);
        scan_cmd->add_option("--snps", scan.snps,
                             "Comma-separated SNP ids (default: all)");
        scan_cmd->add_option("--k", scan.k,
                             "Support-interval thresholds, e.g. 8,32,100,1000");
        scan_cmd->add_option("--cl", scan.cl,
                             "independence, pairwise or pairwise-psi");
        scan_cmd->add_option("--threads", scan.threads, "Worker threads");
        scan_cmd->add_option("--out", scan.out, "Output path or - for stdout");
        scan_cmd->add_option("--format", scan.format, "csv or json");

        ReplicateCmd replicate;
        CLI::App* rep_cmd = app.add_subcommand(
            "replicate",
            "Simulate-and-fit study of the MCLE across sample sizes");
        rep_cmd->add_option("--config", config_path, "JSON config file");
        replicate.design.add(rep_cmd, binder);
        binder.bind("n", replicate.n);
        binder.bind("replicates", replicate.replicates);
        binder.bind("cl", replicate.cl);
        binder.bind("interest", replicate.interest);
        binder.bind("threads", replicate.threads);
        binder.bind("out", replicate.out);
        binder.bind("format", replicate.format);
        rep_cmd->add_option("--n", replicate.n,
                            "Comma-separated family counts");
        rep_cmd->add_option("--replicates", replicate.replicates,
                            "Replicates per sample size");
        rep_cmd->add_option("--cl", replicate.cl,
                            "Comma-separated CL kinds to fit");
        rep_cmd->add_option("--interest", replicate.interest,
                            "beta1 or psi (psi reports log psi and needs a "
                            "pairwise kind)");
        rep_cmd->add_option("--threads", replicate.threads, "Worker threads");
        rep_cmd->add_option("--out", replicate.out,
                            "Output path or - for stdout");
        rep_cmd->add_option("--format", replicate.format, "csv or json");

        MisleadingCmd misleading;
        CLI::App* mis_cmd = app.add_subcommand(
            "misleading",
            "Monte-Carlo estimate of the misleading-evidence probability");
        mis_cmd->add_option("--config", config_path, "JSON config file");
        misleading.design.add(mis_cmd, binder);
        binder.bind("families", misleading.families);
        binder.bind("k", misleading.k);
        binder.bind("alt", misleading.alt);
        binder.bind("replicates", misleading.replicates);
        binder.bind("cl", misleading.cl);
        binder.bind("threads", misleading.threads);
        binder.bind("out", misleading.out);
        binder.bind("format", misleading.format);
        binder.bind("bump-out", misleading.bump_out);
        binder.bind("bump-grid", misleading.bump_grid);
        mis_cmd->add_option("--families", misleading.families,
                            "Families per replicate dataset");
        mis_cmd->add_option("--k", misleading.k, "Evidence threshold");
        mis_cmd->add_option("--alt", misleading.alt,
                            "Alternative beta1 values: lo:hi:points or a "
                            "comma list");
        mis_cmd->add_option("--replicates", misleading.replicates,
                            "Simulated datasets (>= 100)");
        mis_cmd->add_option("--cl", misleading.cl,
                            "independence, pairwise or pairwise-psi");
        mis_cmd->add_option("--threads", misleading.threads, "Worker threads");
        mis_cmd->add_option("--out", misleading.out,
                            "Output path or - for stdout");
        mis_cmd->add_option("--format", misleading.format, "csv or json");
        mis_cmd->add_option("--bump-out", misleading.bump_out,
                            "Also write the bump curve to this path");
        mis_cmd->add_option("--bump-grid", misleading.bump_grid,
                            "Bump curve c grid lo:hi:points");

        FwerCmd fwer;
        CLI::App* fwer_cmd = app.add_subcommand(
            "fwer", "Family-wise error bound min(1, n_eff * m0)");
        fwer_cmd->add_option("--config", config_path, "JSON config file");
        binder.bind("n-eff", fwer.n_eff);
        binder.bind("m0", fwer.m0);
        binder.bind("misleading", fwer.misleading);
        binder.bind("out", fwer.out);
        binder.bind("format", fwer.format);
        fwer_cmd->add_option("--n-eff", fwer.n_eff,
                             "Effective number of tests");
        fwer_cmd->add_option("--m0", fwer.m0,
                             "Misleading-evidence probability");
        fwer_cmd->add_option("--misleading", fwer.misleading,
                             "JSON misleading estimate; uses the largest "
                             "adjusted proportion");
        fwer_cmd->add_option("--out", fwer.out, "Output path or - for stdout");
        fwer_cmd->add_option("--format", fwer.format, "csv or json");

        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            return app.exit(e);
        }

        // Typo guard: a config key must be an option of some subcommand.
        binder.finish();

        if (sim_cmd->parsed()) return simulate.run();
        if (fit_cmd->parsed()) return fit.run();
        if (scan_cmd->parsed()) return scan.run();
        if (rep_cmd->parsed()) return replicate.run();
        if (mis_cmd->parsed()) return misleading.run();
        if (fwer_cmd->parsed()) return fwer.run();
        return 1;
    } catch (const clev::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
