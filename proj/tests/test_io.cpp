#include "clev/io.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "clev/errors.hpp"
#include "doctest.h"

using namespace clev;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool same_double(double x, double y) {
    return (std::isnan(x) && std::isnan(y)) || x == y;
}

std::vector<ScanRecord> sample_records() {
    ScanRecord good;
    good.snp_id = "rs1";
    good.position = 100;
    good.mcle_or = 2.0;
    good.max_adjusted_lr = 4.0;
    good.adjustment = 0.5;
    SupportInterval si;
    si.k = 8.0;
    si.lower_or = 0.5;
    si.upper_or = 4.0;
    si.contains_null = true;
    good.intervals.push_back(si);

    ScanRecord failed;
    failed.snp_id = "rs2";
    failed.fit_failure = true;

    return {good, failed};
}

ProfileCurve sample_curve() {
    ProfileCurve curve;
    curve.interest_index = 1;
    curve.grid = {-0.5, 0.0, 0.5};
    curve.loglik_p = {-10.25, kNaN, -10.5};
    curve.nuisance_hat.push_back(Eigen::Vector2d(-1.0, -0.5));
    curve.nuisance_hat.push_back(Eigen::Vector2d(kNaN, kNaN));
    curve.nuisance_hat.push_back(Eigen::Vector2d(-1.25, 0.5));
    curve.ok = {true, false, true};
    curve.mcle_interest = -0.25;
    curve.mcle_loglik = -10.125;
    curve.mcle_theta = Eigen::Vector2d(-1.125, -0.25);
    curve.adjustment = 0.875;
    return curve;
}

MisleadingEstimate sample_misleading() {
    MisleadingEstimate est;
    // Dyadic fractions so the CSV golden strings below are exact.
    est.alt_values = {0.5, 1.0};
    est.proportion_raw = {0.03125, 0.046875};
    est.proportion_adjusted = {0.0234375, 0.0390625};
    est.mc_se = {0.0048828125, 0.005859375};
    est.replicates = 1000;
    est.fit_failures = 3;
    est.reliability_warning = false;
    est.k = 8.0;
    est.mean_adjustment = 0.9375;
    return est;
}

}  // namespace

TEST_CASE("scan CSV uses the documented column layout") {
    std::ostringstream out;
    write_scan_csv(sample_records(), out);
    // Failed records are nan-filled so every row has the full column set.
    CHECK(out.str() ==
          "# clev scan schema v1\n"
          "snp_id,position,mcle_or,max_adjusted_lr,adjustment,separation,"
          "sparse_cells,fit_failure,"
          "k8_lower_or,k8_upper_or,k8_lower_open,k8_upper_open,"
          "k8_contains_null\n"
          "rs1,100,2,4,0.5,0,0,0,0.5,4,0,0,1\n"
          "rs2,0,nan,nan,nan,0,0,1,nan,nan,0,0,0\n");
}

TEST_CASE("scan JSON round trip preserves every field") {
    const std::vector<ScanRecord> records = sample_records();
    std::stringstream buf;
    write_scan_json(records, buf);
    const std::vector<ScanRecord> back = read_scan_json(buf);

    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const ScanRecord& a = records[i];
        const ScanRecord& b = back[i];
        CHECK(b.snp_id == a.snp_id);
        CHECK(b.position == a.position);
        CHECK(same_double(b.mcle_or, a.mcle_or));
        CHECK(same_double(b.max_adjusted_lr, a.max_adjusted_lr));
        CHECK(same_double(b.adjustment, a.adjustment));
        CHECK(b.separation == a.separation);
        CHECK(b.sparse_cells == a.sparse_cells);
        CHECK(b.fit_failure == a.fit_failure);
        REQUIRE(b.intervals.size() == a.intervals.size());
        for (std::size_t j = 0; j < a.intervals.size(); ++j) {
            CHECK(b.intervals[j].k == a.intervals[j].k);
            CHECK(b.intervals[j].lower_or == a.intervals[j].lower_or);
            CHECK(b.intervals[j].upper_or == a.intervals[j].upper_or);
            CHECK(b.intervals[j].lower_open == a.intervals[j].lower_open);
            CHECK(b.intervals[j].upper_open == a.intervals[j].upper_open);
            CHECK(b.intervals[j].contains_null == a.intervals[j].contains_null);
        }
    }
}

TEST_CASE("curve JSON round trip preserves every field") {
    const ProfileCurve curve = sample_curve();
    std::stringstream buf;
    write_curve_json(curve, buf);
    const ProfileCurve back = read_curve_json(buf);

    CHECK(back.interest_index == curve.interest_index);
    CHECK(back.grid == curve.grid);
    REQUIRE(back.loglik_p.size() == curve.loglik_p.size());
    for (std::size_t i = 0; i < curve.loglik_p.size(); ++i) {
        CHECK(same_double(back.loglik_p[i], curve.loglik_p[i]));
    }
    REQUIRE(back.nuisance_hat.size() == curve.nuisance_hat.size());
    for (std::size_t i = 0; i < curve.nuisance_hat.size(); ++i) {
        REQUIRE(back.nuisance_hat[i].size() == curve.nuisance_hat[i].size());
        for (Eigen::Index d = 0; d < curve.nuisance_hat[i].size(); ++d) {
            CHECK(same_double(back.nuisance_hat[i][d],
                              curve.nuisance_hat[i][d]));
        }
    }
    CHECK(back.ok == curve.ok);
    CHECK(back.mcle_interest == curve.mcle_interest);
    CHECK(back.mcle_loglik == curve.mcle_loglik);
    REQUIRE(back.mcle_theta.size() == curve.mcle_theta.size());
    for (Eigen::Index d = 0; d < curve.mcle_theta.size(); ++d) {
        CHECK(back.mcle_theta[d] == curve.mcle_theta[d]);
    }
    CHECK(back.adjustment == curve.adjustment);
}

TEST_CASE("curve CSV carries metadata comments and per-point rows") {
    std::ostringstream out;
    write_curve_csv(sample_curve(), out);
    const std::string text = out.str();
    CHECK(text.rfind("# clev curve schema v1\n", 0) == 0);
    CHECK(text.find("# mcle_interest -0.25\n") != std::string::npos);
    CHECK(text.find("# adjustment 0.875\n") != std::string::npos);
    CHECK(text.find("value,or,loglik_p,ok,theta0,theta1\n") !=
          std::string::npos);
    CHECK(text.find("0.5,1.6487212707001282,-10.5,1,-1.25,0.5\n") !=
          std::string::npos);
}

TEST_CASE("misleading JSON round trip preserves every field") {
    const MisleadingEstimate est = sample_misleading();
    std::stringstream buf;
    write_misleading_json(est, buf);
    const MisleadingEstimate back = read_misleading_json(buf);
    CHECK(back.alt_values == est.alt_values);
    CHECK(back.proportion_raw == est.proportion_raw);
    CHECK(back.proportion_adjusted == est.proportion_adjusted);
    CHECK(back.mc_se == est.mc_se);
    CHECK(back.replicates == est.replicates);
    CHECK(back.fit_failures == est.fit_failures);
    CHECK(back.reliability_warning == est.reliability_warning);
    CHECK(back.k == est.k);
    CHECK(back.mean_adjustment == est.mean_adjustment);
}

TEST_CASE("misleading CSV lists one row per alternative") {
    std::ostringstream out;
    write_misleading_csv(sample_misleading(), out);
    const std::string text = out.str();
    CHECK(text.rfind("# clev misleading schema v1\n", 0) == 0);
    CHECK(text.find("# k 8\n") != std::string::npos);
    CHECK(text.find("# replicates 1000\n") != std::string::npos);
    CHECK(text.find("alt_beta1,alt_or,proportion_raw,proportion_adjusted,"
                    "mc_se\n") != std::string::npos);
    CHECK(text.find("0.5,1.6487212707001282,0.03125,0.0234375,0.0048828125\n") !=
          std::string::npos);
}

TEST_CASE("bump writers emit the curve") {
    BumpCurve curve;
    curve.k = 8.0;
    curve.c_values = {0.5, 2.0};
    curve.prob = {0.0078125, 0.015625};
    std::ostringstream csv;
    write_bump_csv(curve, csv);
    CHECK(csv.str() ==
          "# clev bump schema v1\n"
          "# k 8\n"
          "c,prob\n"
          "0.5,0.0078125\n"
          "2,0.015625\n");
    std::stringstream json_buf;
    write_bump_json(curve, json_buf);
    CHECK(json_buf.str().find("\"schema\": \"clev/bump/v1\"") !=
          std::string::npos);
}

TEST_CASE("readers reject foreign and malformed documents") {
    const auto read_scan = [](const std::string& text) {
        std::istringstream in(text);
        return read_scan_json(in);
    };
    CHECK_THROWS_AS(read_scan("not json at all"), ParseError);
    CHECK_THROWS_AS(read_scan("[1,2,3]"), ParseError);
    CHECK_THROWS_AS(read_scan(R"({"schema":"clev/scan/v2","records":[]})"),
                    ParseError);
    CHECK_THROWS_AS(read_scan(R"({"records":[]})"), ParseError);
    // A valid document of a different kind is refused by its schema.
    std::stringstream curve_buf;
    write_curve_json(sample_curve(), curve_buf);
    CHECK_THROWS_AS(read_scan_json(curve_buf), ParseError);
    // Structurally broken records surface as ParseError, not json internals.
    CHECK_THROWS_AS(
        read_scan(R"({"schema":"clev/scan/v1","records":[{"snp_id":"rs1"}]})"),
        ParseError);
    std::istringstream bad_misleading(R"({"schema":"clev/misleading/v1"})");
    CHECK_THROWS_AS(read_misleading_json(bad_misleading), ParseError);
}

TEST_CASE("path overloads fail with IoError on unwritable paths") {
    CHECK_THROWS_AS(
        write_scan_json(sample_records(), "/nonexistent/dir/scan.json"),
        IoError);
}
