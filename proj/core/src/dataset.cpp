#include "clev/dataset.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "clev/errors.hpp"

namespace clev {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

// Next nonempty line with its 1-based number; CRLF endings tolerated.
bool next_line(std::istream& in, std::string& line, long& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) return true;
    }
    return false;
}

std::optional<std::uint8_t> parse_phenotype(const std::string& s, long line) {
    if (s == "NA") return std::nullopt;
    if (s == "0") return std::uint8_t{0};
    if (s == "1") return std::uint8_t{1};
    throw ParseError("pedigree file: phenotype must be 0, 1 or NA, got '" + s +
                         "'",
                     line);
}

std::optional<Genotype> parse_genotype_entry(const std::string& s, long line) {
    if (s == "NA") return std::nullopt;
    if (s == "0" || s == "1" || s == "2") return Genotype(s[0] - '0');
    throw ParseError("genotype file: entry must be 0, 1, 2 or NA, got '" + s +
                         "'",
                     line);
}

struct PedRow {
    std::string individual_id, father_id, mother_id;
    std::optional<std::uint8_t> phenotype;
    long line = 0;
};

}  // namespace

Dataset parse_dataset(std::istream& pedigree, std::istream& genotypes,
                      std::istream* snp_map) {
    Dataset ds;

    // Pedigree rows, grouped by family in first-appearance order.
    std::vector<std::string> family_order;
    std::unordered_map<std::string, std::size_t> family_index;
    std::vector<std::vector<PedRow>> rows_by_family;
    // individual id -> (family, member); ids are global because the genotype
    // file is keyed by individual alone.
    std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> member_of;

    std::string line;
    long line_no = 0;
    while (next_line(pedigree, line, line_no)) {
        const std::vector<std::string> f = split_tabs(line);
        if (f.size() != 5) {
            throw ParseError(
                "pedigree file: expected 5 tab-separated fields, got " +
                    std::to_string(f.size()),
                line_no);
        }
        for (int i = 0; i < 4; ++i) {
            if (f[i].empty()) {
                throw ParseError("pedigree file: empty identifier field",
                                 line_no);
            }
        }
        auto [it, fresh] =
            family_index.try_emplace(f[0], rows_by_family.size());
        if (fresh) {
            family_order.push_back(f[0]);
            rows_by_family.emplace_back();
        }
        const std::size_t fi = it->second;
        if (!member_of
                 .try_emplace(f[1], fi, rows_by_family[fi].size())
                 .second) {
            throw ParseError("pedigree file: duplicate individual id '" + f[1] +
                                 "'",
                             line_no);
        }
        rows_by_family[fi].push_back(
            {f[1], f[2], f[3], parse_phenotype(f[4], line_no), line_no});
    }

    for (std::size_t fi = 0; fi < rows_by_family.size(); ++fi) {
        const std::vector<PedRow>& rows = rows_by_family[fi];
        std::unordered_map<std::string, int> local;
        for (std::size_t m = 0; m < rows.size(); ++m) {
            local.emplace(rows[m].individual_id, static_cast<int>(m));
        }
        std::vector<PedigreeMember> members;
        members.reserve(rows.size());
        for (const PedRow& row : rows) {
            PedigreeMember member;
            member.id = row.individual_id;
            member.observed = true;
            for (auto [parent_id, slot] :
                 {std::pair<const std::string&, int*>{row.father_id,
                                                      &member.father},
                  {row.mother_id, &member.mother}}) {
                if (parent_id == "0") {
                    *slot = -1;
                    continue;
                }
                const auto hit = local.find(parent_id);
                if (hit == local.end()) {
                    throw ParseError("pedigree file: parent id '" + parent_id +
                                         "' of individual '" +
                                         row.individual_id +
                                         "' is not in family '" +
                                         family_order[fi] + "'",
                                     row.line);
                }
                *slot = hit->second;
            }
            members.push_back(std::move(member));
        }
        PedigreeTemplate tmpl;
        try {
            tmpl = PedigreeTemplate(std::move(members));
        } catch (const Error& e) {
            throw ParseError("pedigree file: family '" + family_order[fi] +
                                 "': " + e.what(),
                             rows.front().line);
        }
        FamilyData family;
        family.family_id = family_order[fi];
        for (const PedRow& row : rows) family.phenotypes.push_back(row.phenotype);
        family.genotypes.assign(rows.size(), std::nullopt);
        family.pair_classes = tmpl.classify_pairs();
        family.validate();
        ds.families.push_back(std::move(family));
        ds.templates.push_back(std::move(tmpl));
    }

    // Genotype matrix.
    for (const auto& fam : ds.families) {
        ds.genotypes.emplace_back(fam.size());
    }
    line_no = 0;
    if (!next_line(genotypes, line, line_no)) {
        throw ParseError("genotype file: missing header row", 1);
    }
    {
        const std::vector<std::string> header = split_tabs(line);
        if (header.empty() || header[0] != "individual_id") {
            throw ParseError(
                "genotype file: header must start with 'individual_id'",
                line_no);
        }
        for (std::size_t s = 1; s < header.size(); ++s) {
            if (header[s].empty()) {
                throw ParseError("genotype file: empty SNP id in header",
                                 line_no);
            }
            if (!ds.snp_index
                     .emplace(header[s], static_cast<int>(s - 1))
                     .second) {
                throw ParseError("genotype file: duplicate SNP id '" +
                                     header[s] + "'",
                                 line_no);
            }
            ds.snp_ids.push_back(header[s]);
        }
    }
    const std::size_t n_snps = ds.snp_ids.size();
    for (auto& fam : ds.genotypes) {
        for (auto& member : fam) member.assign(n_snps, std::nullopt);
    }
    std::unordered_set<std::string> seen_geno_rows;
    while (next_line(genotypes, line, line_no)) {
        const std::vector<std::string> f = split_tabs(line);
        if (f.size() != 1 + n_snps) {
            throw ParseError("genotype file: expected " +
                                 std::to_string(1 + n_snps) +
                                 " tab-separated fields, got " +
                                 std::to_string(f.size()),
                             line_no);
        }
        const auto hit = member_of.find(f[0]);
        if (hit == member_of.end()) {
            throw ParseError("genotype file: individual '" + f[0] +
                                 "' does not appear in the pedigree",
                             line_no);
        }
        if (!seen_geno_rows.insert(f[0]).second) {
            throw ParseError("genotype file: duplicate row for individual '" +
                                 f[0] + "'",
                             line_no);
        }
        auto [fi, mi] = hit->second;
        for (std::size_t s = 0; s < n_snps; ++s) {
            ds.genotypes[fi][mi][s] = parse_genotype_entry(f[1 + s], line_no);
        }
    }

    if (snp_map != nullptr) {
        line_no = 0;
        while (next_line(*snp_map, line, line_no)) {
            const std::vector<std::string> f = split_tabs(line);
            if (f.size() != 2) {
                throw ParseError(
                    "map file: expected snp_id and position fields", line_no);
            }
            if (ds.snp_index.find(f[0]) == ds.snp_index.end()) {
                throw ParseError("map file: SNP '" + f[0] +
                                     "' is not in the genotype file",
                                 line_no);
            }
            long long pos = 0;
            std::size_t used = 0;
            try {
                pos = std::stoll(f[1], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != f[1].size() || f[1].empty() || pos < 0) {
                throw ParseError("map file: position must be a nonnegative "
                                 "integer, got '" +
                                     f[1] + "'",
                                 line_no);
            }
            if (!ds.positions.emplace(f[0], pos).second) {
                throw ParseError("map file: duplicate SNP '" + f[0] + "'",
                                 line_no);
            }
        }
    }
    return ds;
}

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

Dataset parse_dataset(const std::string& pedigree_path,
                      const std::string& genotype_path,
                      const std::string& map_path) {
    std::ifstream ped = open_input(pedigree_path);
    std::ifstream geno = open_input(genotype_path);
    if (map_path.empty()) return parse_dataset(ped, geno, nullptr);
    std::ifstream map = open_input(map_path);
    return parse_dataset(ped, geno, &map);
}

void write_dataset(const Dataset& dataset, std::ostream& pedigree,
                   std::ostream& genotypes, std::ostream* snp_map) {
    for (std::size_t fi = 0; fi < dataset.families.size(); ++fi) {
        const FamilyData& fam = dataset.families[fi];
        const auto& members = dataset.templates[fi].members();
        for (std::size_t m = 0; m < members.size(); ++m) {
            const PedigreeMember& member = members[m];
            const auto parent_id = [&](int idx) {
                return idx < 0 ? std::string("0") : members[idx].id;
            };
            pedigree << fam.family_id << '\t' << member.id << '\t'
                     << parent_id(member.father) << '\t'
                     << parent_id(member.mother) << '\t';
            if (fam.phenotypes[m].has_value()) {
                pedigree << static_cast<int>(*fam.phenotypes[m]);
            } else {
                pedigree << "NA";
            }
            pedigree << '\n';
        }
    }

    genotypes << "individual_id";
    for (const std::string& snp : dataset.snp_ids) genotypes << '\t' << snp;
    genotypes << '\n';
    for (std::size_t fi = 0; fi < dataset.families.size(); ++fi) {
        const auto& members = dataset.templates[fi].members();
        for (std::size_t m = 0; m < members.size(); ++m) {
            genotypes << members[m].id;
            for (std::size_t s = 0; s < dataset.snp_ids.size(); ++s) {
                const auto& g = dataset.genotypes[fi][m][s];
                genotypes << '\t';
                if (g.has_value()) {
                    genotypes << g->count();
                } else {
                    genotypes << "NA";
                }
            }
            genotypes << '\n';
        }
    }

    if (snp_map != nullptr) {
        for (const std::string& snp : dataset.snp_ids) {
            const auto hit = dataset.positions.find(snp);
            if (hit != dataset.positions.end()) {
                *snp_map << snp << '\t' << hit->second << '\n';
            }
        }
    }
}

void write_dataset(const Dataset& dataset, const std::string& pedigree_path,
                   const std::string& genotype_path,
                   const std::string& map_path) {
    std::ofstream ped = open_output(pedigree_path);
    std::ofstream geno = open_output(genotype_path);
    if (map_path.empty()) {
        write_dataset(dataset, ped, geno, nullptr);
        return;
    }
    std::ofstream map = open_output(map_path);
    write_dataset(dataset, ped, geno, &map);
}

std::vector<FamilyData> dataset_for_snp(const Dataset& dataset,
                                        const std::string& snp_id) {
    const auto hit = dataset.snp_index.find(snp_id);
    if (hit == dataset.snp_index.end()) {
        throw InvalidArgument("SNP '" + snp_id + "' is not in the dataset");
    }
    const int column = hit->second;
    std::vector<FamilyData> out = dataset.families;
    for (std::size_t fi = 0; fi < out.size(); ++fi) {
        for (std::size_t m = 0; m < out[fi].size(); ++m) {
            out[fi].genotypes[m] = dataset.genotypes[fi][m][column];
        }
    }
    return out;
}

}  // namespace clev
