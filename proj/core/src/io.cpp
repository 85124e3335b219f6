#include "clev/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <locale>
#include <ostream>
#include <sstream>

#include "clev/errors.hpp"
#include "json.hpp"

namespace clev {

namespace {

using nlohmann::json;

// 17 significant digits, classic locale: every finite double round-trips.
void prepare_stream(std::ostream& out) {
    out.imbue(std::locale::classic());
    out << std::setprecision(17);
}

// nlohmann::json turns NaN into null on output; mirror that on input.
json num_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

double num_from(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

json interval_to_json(const SupportInterval& si) {
    return json{{"k", si.k},
                {"lower_or", si.lower_or},
                {"upper_or", si.upper_or},
                {"lower_open", si.lower_open},
                {"upper_open", si.upper_open},
                {"contains_null", si.contains_null}};
}

SupportInterval interval_from_json(const json& j) {
    SupportInterval si;
    si.k = j.at("k").get<double>();
    si.lower_or = j.at("lower_or").get<double>();
    si.upper_or = j.at("upper_or").get<double>();
    si.lower_open = j.at("lower_open").get<bool>();
    si.upper_open = j.at("upper_open").get<bool>();
    si.contains_null = j.at("contains_null").get<bool>();
    return si;
}

std::string schema_name(const char* kind) {
    return std::string("clev/") + kind + "/v" + std::to_string(kSchemaVersion);
}

json parse_document(std::istream& in, const char* kind) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("schema", "") != schema_name(kind)) {
        throw ParseError("expected schema '" + schema_name(kind) + "'");
    }
    return doc;
}

// Label for a threshold column: thresholds are typically round numbers, so
// print compactly but losslessly.
std::string k_label(double k) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << std::setprecision(17) << k;
    return s.str();
}

}  // namespace

void write_scan_csv(const std::vector<ScanRecord>& records, std::ostream& out) {
    prepare_stream(out);
    out << "# clev scan schema v" << kSchemaVersion << "\n";
    // Every successful record carries the same ascending thresholds.
    const std::vector<SupportInterval>* intervals = nullptr;
    for (const ScanRecord& r : records) {
        if (!r.intervals.empty()) {
            intervals = &r.intervals;
            break;
        }
    }
    out << "snp_id,position,mcle_or,max_adjusted_lr,adjustment,separation,"
           "sparse_cells,fit_failure";
    if (intervals != nullptr) {
        for (const SupportInterval& si : *intervals) {
            const std::string k = k_label(si.k);
            out << ",k" << k << "_lower_or,k" << k << "_upper_or,k" << k
                << "_lower_open,k" << k << "_upper_open,k" << k
                << "_contains_null";
        }
    }
    out << "\n";
    for (const ScanRecord& r : records) {
        out << r.snp_id << ',' << r.position << ',' << r.mcle_or << ','
            << r.max_adjusted_lr << ',' << r.adjustment << ',' << r.separation
            << ',' << r.sparse_cells << ',' << r.fit_failure;
        if (intervals != nullptr) {
            for (std::size_t i = 0; i < intervals->size(); ++i) {
                if (i < r.intervals.size()) {
                    const SupportInterval& si = r.intervals[i];
                    out << ',' << si.lower_or << ',' << si.upper_or << ','
                        << si.lower_open << ',' << si.upper_open << ','
                        << si.contains_null;
                } else {
                    out << ",nan,nan,0,0,0";
                }
            }
        }
        out << "\n";
    }
}

void write_scan_json(const std::vector<ScanRecord>& records, std::ostream& out) {
    prepare_stream(out);
    json doc;
    doc["schema"] = schema_name("scan");
    json items = json::array();
    for (const ScanRecord& r : records) {
        json item{{"snp_id", r.snp_id},
                  {"position", r.position},
                  {"mcle_or", num_or_null(r.mcle_or)},
                  {"max_adjusted_lr", num_or_null(r.max_adjusted_lr)},
                  {"adjustment", num_or_null(r.adjustment)},
                  {"separation", r.separation},
                  {"sparse_cells", r.sparse_cells},
                  {"fit_failure", r.fit_failure}};
        json intervals = json::array();
        for (const SupportInterval& si : r.intervals) {
            intervals.push_back(interval_to_json(si));
        }
        item["intervals"] = std::move(intervals);
        items.push_back(std::move(item));
    }
    doc["records"] = std::move(items);
    out << doc.dump(2) << "\n";
}

std::vector<ScanRecord> read_scan_json(std::istream& in) {
    const json doc = parse_document(in, "scan");
    std::vector<ScanRecord> records;
    try {
        for (const json& item : doc.at("records")) {
            ScanRecord r;
            r.snp_id = item.at("snp_id").get<std::string>();
            r.position = item.at("position").get<long long>();
            r.mcle_or = num_from(item.at("mcle_or"));
            r.max_adjusted_lr = num_from(item.at("max_adjusted_lr"));
            r.adjustment = num_from(item.at("adjustment"));
            r.separation = item.at("separation").get<bool>();
            r.sparse_cells = item.at("sparse_cells").get<bool>();
            r.fit_failure = item.at("fit_failure").get<bool>();
            for (const json& si : item.at("intervals")) {
                r.intervals.push_back(interval_from_json(si));
            }
            records.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed scan record: ") + e.what());
    }
    return records;
}

void write_curve_csv(const ProfileCurve& curve, std::ostream& out) {
    prepare_stream(out);
    out << "# clev curve schema v" << kSchemaVersion << "\n";
    out << "# interest_index " << curve.interest_index << "\n";
    out << "# mcle_interest " << curve.mcle_interest << "\n";
    out << "# mcle_loglik " << curve.mcle_loglik << "\n";
    out << "# adjustment " << curve.adjustment << "\n";
    const Eigen::Index dim =
        curve.nuisance_hat.empty() ? 0 : curve.nuisance_hat.front().size();
    out << "value,or,loglik_p,ok";
    for (Eigen::Index d = 0; d < dim; ++d) out << ",theta" << d;
    out << "\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        const bool ok = curve.ok.empty() || curve.ok[i];
        out << curve.grid[i] << ',' << std::exp(curve.grid[i]) << ','
            << curve.loglik_p[i] << ',' << ok;
        if (i < curve.nuisance_hat.size()) {
            for (Eigen::Index d = 0; d < curve.nuisance_hat[i].size(); ++d) {
                out << ',' << curve.nuisance_hat[i][d];
            }
        }
        out << "\n";
    }
}

void write_curve_json(const ProfileCurve& curve, std::ostream& out) {
    prepare_stream(out);
    json doc;
    doc["schema"] = schema_name("curve");
    doc["interest_index"] = curve.interest_index;
    doc["grid"] = curve.grid;
    json logliks = json::array();
    for (double v : curve.loglik_p) logliks.push_back(num_or_null(v));
    doc["loglik_p"] = std::move(logliks);
    json nuisance = json::array();
    for (const Eigen::VectorXd& theta : curve.nuisance_hat) {
        json row = json::array();
        for (Eigen::Index d = 0; d < theta.size(); ++d) {
            row.push_back(num_or_null(theta[d]));
        }
        nuisance.push_back(std::move(row));
    }
    doc["nuisance_hat"] = std::move(nuisance);
    doc["ok"] = std::vector<bool>(curve.ok.begin(), curve.ok.end());
    doc["mcle_interest"] = curve.mcle_interest;
    doc["mcle_loglik"] = curve.mcle_loglik;
    json mcle_theta = json::array();
    for (Eigen::Index d = 0; d < curve.mcle_theta.size(); ++d) {
        mcle_theta.push_back(curve.mcle_theta[d]);
    }
    doc["mcle_theta"] = std::move(mcle_theta);
    doc["adjustment"] = curve.adjustment;
    out << doc.dump(2) << "\n";
}

ProfileCurve read_curve_json(std::istream& in) {
    const json doc = parse_document(in, "curve");
    ProfileCurve curve;
    try {
        curve.interest_index = doc.at("interest_index").get<int>();
        curve.grid = doc.at("grid").get<std::vector<double>>();
        for (const json& v : doc.at("loglik_p")) {
            curve.loglik_p.push_back(num_from(v));
        }
        for (const json& row : doc.at("nuisance_hat")) {
            Eigen::VectorXd theta(row.size());
            for (std::size_t d = 0; d < row.size(); ++d) {
                theta[d] = num_from(row[d]);
            }
            curve.nuisance_hat.push_back(std::move(theta));
        }
        const auto ok = doc.at("ok").get<std::vector<bool>>();
        curve.ok.assign(ok.begin(), ok.end());
        curve.mcle_interest = doc.at("mcle_interest").get<double>();
        curve.mcle_loglik = doc.at("mcle_loglik").get<double>();
        const json& mcle_theta = doc.at("mcle_theta");
        curve.mcle_theta.resize(mcle_theta.size());
        for (std::size_t d = 0; d < mcle_theta.size(); ++d) {
            curve.mcle_theta[d] = mcle_theta[d].get<double>();
        }
        curve.adjustment = doc.at("adjustment").get<double>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed curve document: ") + e.what());
    }
    return curve;
}

void write_misleading_csv(const MisleadingEstimate& estimate,
                          std::ostream& out) {
    prepare_stream(out);
    out << "# clev misleading schema v" << kSchemaVersion << "\n";
    out << "# k " << estimate.k << "\n";
    out << "# replicates " << estimate.replicates << "\n";
    out << "# fit_failures " << estimate.fit_failures << "\n";
    out << "# reliability_warning " << estimate.reliability_warning << "\n";
    out << "# mean_adjustment " << estimate.mean_adjustment << "\n";
    out << "alt_beta1,alt_or,proportion_raw,proportion_adjusted,mc_se\n";
    for (std::size_t i = 0; i < estimate.alt_values.size(); ++i) {
        out << estimate.alt_values[i] << ',' << std::exp(estimate.alt_values[i])
            << ',' << estimate.proportion_raw[i] << ','
            << estimate.proportion_adjusted[i] << ',' << estimate.mc_se[i]
            << "\n";
    }
}

void write_misleading_json(const MisleadingEstimate& estimate,
                           std::ostream& out) {
    prepare_stream(out);
    json doc;
    doc["schema"] = schema_name("misleading");
    doc["k"] = estimate.k;
    doc["alt_values"] = estimate.alt_values;
    doc["proportion_raw"] = estimate.proportion_raw;
    doc["proportion_adjusted"] = estimate.proportion_adjusted;
    doc["mc_se"] = estimate.mc_se;
    doc["replicates"] = estimate.replicates;
    doc["fit_failures"] = estimate.fit_failures;
    doc["reliability_warning"] = estimate.reliability_warning;
    doc["mean_adjustment"] = estimate.mean_adjustment;
    out << doc.dump(2) << "\n";
}

MisleadingEstimate read_misleading_json(std::istream& in) {
    const json doc = parse_document(in, "misleading");
    MisleadingEstimate est;
    try {
        est.k = doc.at("k").get<double>();
        est.alt_values = doc.at("alt_values").get<std::vector<double>>();
        est.proportion_raw =
            doc.at("proportion_raw").get<std::vector<double>>();
        est.proportion_adjusted =
            doc.at("proportion_adjusted").get<std::vector<double>>();
        est.mc_se = doc.at("mc_se").get<std::vector<double>>();
        est.replicates = doc.at("replicates").get<int>();
        est.fit_failures = doc.at("fit_failures").get<int>();
        est.reliability_warning = doc.at("reliability_warning").get<bool>();
        est.mean_adjustment = doc.at("mean_adjustment").get<double>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed misleading document: ") +
                         e.what());
    }
    return est;
}

void write_bump_csv(const BumpCurve& curve, std::ostream& out) {
    prepare_stream(out);
    out << "# clev bump schema v" << kSchemaVersion << "\n";
    out << "# k " << curve.k << "\n";
    out << "c,prob\n";
    for (std::size_t i = 0; i < curve.c_values.size(); ++i) {
        out << curve.c_values[i] << ',' << curve.prob[i] << "\n";
    }
}

void write_bump_json(const BumpCurve& curve, std::ostream& out) {
    prepare_stream(out);
    json doc;
    doc["schema"] = schema_name("bump");
    doc["k"] = curve.k;
    doc["c_values"] = curve.c_values;
    doc["prob"] = curve.prob;
    out << doc.dump(2) << "\n";
}

namespace {

template <typename Writer, typename Value>
void write_path(Writer writer, const Value& value, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    writer(value, out);
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace

void write_scan_csv(const std::vector<ScanRecord>& records,
                    const std::string& path) {
    write_path(
        [](const std::vector<ScanRecord>& v, std::ostream& o) {
            write_scan_csv(v, o);
        },
        records, path);
}

void write_scan_json(const std::vector<ScanRecord>& records,
                     const std::string& path) {
    write_path(
        [](const std::vector<ScanRecord>& v, std::ostream& o) {
            write_scan_json(v, o);
        },
        records, path);
}

void write_curve_csv(const ProfileCurve& curve, const std::string& path) {
    write_path(
        [](const ProfileCurve& v, std::ostream& o) { write_curve_csv(v, o); },
        curve, path);
}

void write_curve_json(const ProfileCurve& curve, const std::string& path) {
    write_path(
        [](const ProfileCurve& v, std::ostream& o) { write_curve_json(v, o); },
        curve, path);
}

void write_misleading_csv(const MisleadingEstimate& estimate,
                          const std::string& path) {
    write_path(
        [](const MisleadingEstimate& v, std::ostream& o) {
            write_misleading_csv(v, o);
        },
        estimate, path);
}

void write_misleading_json(const MisleadingEstimate& estimate,
                           const std::string& path) {
    write_path(
        [](const MisleadingEstimate& v, std::ostream& o) {
            write_misleading_json(v, o);
        },
        estimate, path);
}

void write_bump_csv(const BumpCurve& curve, const std::string& path) {
    write_path(
        [](const BumpCurve& v, std::ostream& o) { write_bump_csv(v, o); },
        curve, path);
}

void write_bump_json(const BumpCurve& curve, const std::string& path) {
    write_path(
        [](const BumpCurve& v, std::ostream& o) { write_bump_json(v, o); },
        curve, path);
}

}  // namespace clev
