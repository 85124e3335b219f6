#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clev/model.hpp"
#include "clev/pedigree.hpp"

namespace clev {

// A parsed study: families with phenotypes and relationship classes, plus a
// genotype matrix over the indexed SNPs. families[i] carries all pedigree
// rows of family i (all-missing genotypes at this level); genotypes[i][m][s]
// holds member m's genotype at SNP column s; templates[i] keeps the ids and
// parent pointers needed to classify pairs and to write the family back out.
struct Dataset {
    std::vector<FamilyData> families;
    std::vector<PedigreeTemplate> templates;
    std::vector<std::vector<std::vector<std::optional<Genotype>>>> genotypes;
    std::vector<std::string> snp_ids;  // genotype-file column order
    std::map<std::string, int> snp_index;
    std::map<std::string, long long> positions;  // from the optional SNP map

    std::size_t n_families() const { return families.size(); }
};

// Tab-separated pedigree rows family_id, individual_id, father_id,
// mother_id, phenotype (0 = founder parent, phenotype 0/1/NA), and a
// genotype matrix whose header row is individual_id followed by SNP ids,
// entries 0/1/2/NA. Individuals missing from the genotype file carry
// all-missing genotypes. The optional map stream holds snp_id, position
// rows. Malformed content throws ParseError with the line number; unknown
// parent or individual ids and duplicate ids are ParseErrors too.
Dataset parse_dataset(std::istream& pedigree, std::istream& genotypes,
                      std::istream* snp_map = nullptr);

// File path convenience; unreadable paths throw IoError.
Dataset parse_dataset(const std::string& pedigree_path,
                      const std::string& genotype_path,
                      const std::string& map_path = "");

// Inverse of parse_dataset, column order preserved. The map file is written
// only when a position is known for at least one SNP.
void write_dataset(const Dataset& dataset, std::ostream& pedigree,
                   std::ostream& genotypes, std::ostream* snp_map = nullptr);

void write_dataset(const Dataset& dataset, const std::string& pedigree_path,
                   const std::string& genotype_path,
                   const std::string& map_path = "");

// Families with the genotype column of one SNP, ready for cl_eval; the
// SNP must be indexed.
std::vector<FamilyData> dataset_for_snp(const Dataset& dataset,
                                        const std::string& snp_id);

}  // namespace clev
