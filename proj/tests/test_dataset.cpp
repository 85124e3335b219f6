#include "clev/dataset.hpp"

#include <sstream>
#include <string>

#include "clev/errors.hpp"
#include "doctest.h"

using namespace clev;

namespace {

// Singleton family plus a nuclear family of two parents and three children.
const char* kPed =
    "F1\tA1\t0\t0\t1\n"
    "F2\tP1\t0\t0\t0\n"
    "F2\tP2\t0\t0\t1\n"
    "F2\tC1\tP1\tP2\t1\n"
    "F2\tC2\tP1\tP2\t0\n"
    "F2\tC3\tP1\tP2\tNA\n";

const char* kGeno =
    "individual_id\trs1\trs2\n"
    "A1\t0\t2\n"
    "P1\t1\tNA\n"
    "P2\t0\t1\n"
    "C1\t1\t2\n"
    "C2\t0\t0\n";  // C3 absent: all genotypes missing

const char* kMap =
    "rs1\t10500\n"
    "rs2\t20750\n";

Dataset parse(const std::string& ped, const std::string& geno,
              const std::string* map = nullptr) {
    std::istringstream ped_in(ped), geno_in(geno);
    if (map == nullptr) return parse_dataset(ped_in, geno_in);
    std::istringstream map_in(*map);
    return parse_dataset(ped_in, geno_in, &map_in);
}

long parse_error_line(const std::string& ped, const std::string& geno,
                      const std::string* map = nullptr) {
    try {
        parse(ped, geno, map);
    } catch (const ParseError& e) {
        return e.line;
    }
    return -2;
}

}  // namespace

TEST_CASE("two-family dataset parses into the expected structure") {
    const Dataset ds = parse(kPed, kGeno);

    REQUIRE(ds.n_families() == 2);
    CHECK(ds.families[0].family_id == "F1");
    CHECK(ds.families[0].size() == 1);
    CHECK(ds.families[0].pair_classes.empty());
    CHECK(ds.families[0].phenotypes[0] == std::uint8_t{1});

    const FamilyData& fam = ds.families[1];
    REQUIRE(fam.size() == 5);
    CHECK(fam.phenotypes[0] == std::uint8_t{0});
    CHECK(fam.phenotypes[1] == std::uint8_t{1});
    CHECK_FALSE(fam.phenotypes[4].has_value());
    // Parents are a spouse pair, parents-to-children are parent-offspring,
    // children are full siblings.
    CHECK(fam.pair_class(0, 1) == RelationshipClass::Unrelated);
    CHECK(fam.pair_class(0, 2) == RelationshipClass::ParentOffspring);
    CHECK(fam.pair_class(1, 4) == RelationshipClass::ParentOffspring);
    CHECK(fam.pair_class(2, 3) == RelationshipClass::Sibling);
    CHECK(fam.pair_class(3, 4) == RelationshipClass::Sibling);

    REQUIRE(ds.snp_ids == std::vector<std::string>{"rs1", "rs2"});
    CHECK(ds.snp_index.at("rs1") == 0);
    CHECK(ds.snp_index.at("rs2") == 1);
    CHECK(ds.genotypes[0][0][1] == Genotype(2));
    CHECK_FALSE(ds.genotypes[1][0][1].has_value());  // P1 rs2 = NA
    // C3 never appears in the genotype file.
    CHECK_FALSE(ds.genotypes[1][4][0].has_value());
    CHECK_FALSE(ds.genotypes[1][4][1].has_value());
    // Family-level genotype vectors stay all-missing; SNP extraction fills them.
    for (const auto& g : ds.families[1].genotypes) CHECK_FALSE(g.has_value());

    CHECK(ds.positions.empty());
}

TEST_CASE("snp map populates positions") {
    const std::string map = kMap;
    const Dataset ds = parse(kPed, kGeno, &map);
    REQUIRE(ds.positions.size() == 2);
    CHECK(ds.positions.at("rs1") == 10500);
    CHECK(ds.positions.at("rs2") == 20750);
}

TEST_CASE("dataset_for_snp fills the requested column") {
    const Dataset ds = parse(kPed, kGeno);
    const std::vector<FamilyData> rs1 = dataset_for_snp(ds, "rs1");
    REQUIRE(rs1.size() == 2);
    CHECK(rs1[0].genotypes[0] == Genotype(0));
    CHECK(rs1[1].genotypes[0] == Genotype(1));
    CHECK(rs1[1].genotypes[3] == Genotype(0));
    CHECK_FALSE(rs1[1].genotypes[4].has_value());
    // Phenotypes and relationship classes carry over untouched.
    CHECK(rs1[1].pair_class(2, 3) == RelationshipClass::Sibling);

    const std::vector<FamilyData> rs2 = dataset_for_snp(ds, "rs2");
    CHECK(rs2[0].genotypes[0] == Genotype(2));
    CHECK_FALSE(rs2[1].genotypes[0].has_value());

    CHECK_THROWS_AS(dataset_for_snp(ds, "rs9"), InvalidArgument);
}

TEST_CASE("write_dataset is an inverse of parse_dataset") {
    const std::string map = kMap;
    const Dataset ds = parse(kPed, kGeno, &map);

    std::ostringstream ped_out, geno_out, map_out;
    write_dataset(ds, ped_out, geno_out, &map_out);

    // The fixture streams are already in canonical form, so the writer must
    // reproduce them byte for byte.
    CHECK(ped_out.str() ==
          "F1\tA1\t0\t0\t1\n"
          "F2\tP1\t0\t0\t0\n"
          "F2\tP2\t0\t0\t1\n"
          "F2\tC1\tP1\tP2\t1\n"
          "F2\tC2\tP1\tP2\t0\n"
          "F2\tC3\tP1\tP2\tNA\n");
    CHECK(geno_out.str() ==
          "individual_id\trs1\trs2\n"
          "A1\t0\t2\n"
          "P1\t1\tNA\n"
          "P2\t0\t1\n"
          "C1\t1\t2\n"
          "C2\t0\t0\n"
          "C3\tNA\tNA\n");
    CHECK(map_out.str() == kMap);

    // And the round trip parses back to the same dataset.
    const std::string ped2 = ped_out.str(), geno2 = geno_out.str(),
                      map2 = map_out.str();
    const Dataset back = parse(ped2, geno2, &map2);
    REQUIRE(back.n_families() == ds.n_families());
    CHECK(back.snp_ids == ds.snp_ids);
    CHECK(back.positions == ds.positions);
    for (std::size_t fi = 0; fi < ds.n_families(); ++fi) {
        CHECK(back.families[fi].family_id == ds.families[fi].family_id);
        CHECK(back.families[fi].phenotypes == ds.families[fi].phenotypes);
        CHECK(back.families[fi].pair_classes == ds.families[fi].pair_classes);
        CHECK(back.genotypes[fi] == ds.genotypes[fi]);
    }
}

TEST_CASE("blank lines and CRLF endings are tolerated") {
    const std::string ped = "F1\tA1\t0\t0\t1\r\n\r\n\nF1\tA2\t0\t0\t0\r\n";
    const std::string geno = "individual_id\trs1\r\nA1\t2\r\n\r\nA2\t0\r\n";
    const Dataset ds = parse(ped, geno);
    REQUIRE(ds.n_families() == 1);
    REQUIRE(ds.families[0].size() == 2);
    CHECK(ds.genotypes[0][0][0] == Genotype(2));
    CHECK(ds.genotypes[0][1][0] == Genotype(0));
}

TEST_CASE("pedigree errors carry the offending line number") {
    // Field count.
    CHECK(parse_error_line("F1\tA1\t0\t0\n", kGeno) == 1);
    // Bad phenotype on line 2.
    CHECK(parse_error_line("F1\tA1\t0\t0\t1\nF1\tA2\t0\t0\t7\n", kGeno) == 2);
    // Duplicate individual id, even across families.
    CHECK(parse_error_line("F1\tA1\t0\t0\t1\nF2\tA1\t0\t0\t0\n", kGeno) == 2);
    // Parent id missing from the family.
    CHECK(parse_error_line("F1\tA1\tP9\t0\t1\n", kGeno) == 1);
    // Parent present globally but in a different family.
    CHECK(parse_error_line("F1\tP1\t0\t0\t0\nF2\tC1\tP1\t0\t1\n", kGeno) == 2);
    // Empty identifier.
    CHECK(parse_error_line("F1\t\t0\t0\t1\n", kGeno) == 1);
    // Self-parent cycles surface as a ParseError at the family start.
    CHECK(parse_error_line("F1\tA1\tA1\t0\t1\n", kGeno) == 1);
}

TEST_CASE("genotype errors carry the offending line number") {
    const std::string ped = "F1\tA1\t0\t0\t1\nF1\tA2\t0\t0\t0\n";
    // Missing header.
    CHECK(parse_error_line(ped, "") == 1);
    CHECK(parse_error_line(ped, "id\trs1\nA1\t0\n") == 1);
    // Duplicate SNP column.
    CHECK(parse_error_line(ped, "individual_id\trs1\trs1\nA1\t0\t0\n") == 1);
    // Wrong field count.
    CHECK(parse_error_line(ped, "individual_id\trs1\nA1\t0\t1\n") == 2);
    // Bad entry value.
    CHECK(parse_error_line(ped, "individual_id\trs1\nA1\t0\nA2\t3\n") == 3);
    // Unknown individual.
    CHECK(parse_error_line(ped, "individual_id\trs1\nA9\t0\n") == 2);
    // Duplicate individual row.
    CHECK(parse_error_line(ped, "individual_id\trs1\nA1\t0\nA1\t1\n") == 3);
}

TEST_CASE("map errors carry the offending line number") {
    const std::string ped = "F1\tA1\t0\t0\t1\n";
    const std::string geno = "individual_id\trs1\nA1\t0\n";
    const auto map_line = [&](const std::string& map) {
        return parse_error_line(ped, geno, &map);
    };
    CHECK(map_line("rs1\n") == 1);
    CHECK(map_line("rs9\t100\n") == 1);
    CHECK(map_line("rs1\tabc\n") == 1);
    CHECK(map_line("rs1\t-5\n") == 1);
    CHECK(map_line("rs1\t100\nrs1\t200\n") == 2);
}

TEST_CASE("path overloads reject unreadable files") {
    CHECK_THROWS_AS(parse_dataset("/nonexistent/ped.tsv", "/nonexistent/g.tsv"),
                    IoError);
}
