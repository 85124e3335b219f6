#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "clev/likelihood.hpp"
#include "clev/misleading.hpp"
#include "clev/scan.hpp"

namespace clev {

// Serialization of result objects. Every writer emits a schema identifier
// ("# clev <kind> schema v1" comment line for CSV, a "schema" field for
// JSON), uses '.' as the decimal separator regardless of locale, and keeps
// 17 significant digits so values survive a round trip. Column orders are
// fixed; see the README for the exact CSV schemas. JSON readers reject
// unknown schema identifiers with ParseError.

inline constexpr int kSchemaVersion = 1;

void write_scan_csv(const std::vector<ScanRecord>& records, std::ostream& out);
void write_scan_json(const std::vector<ScanRecord>& records, std::ostream& out);
std::vector<ScanRecord> read_scan_json(std::istream& in);

void write_curve_csv(const ProfileCurve& curve, std::ostream& out);
void write_curve_json(const ProfileCurve& curve, std::ostream& out);
ProfileCurve read_curve_json(std::istream& in);

void write_misleading_csv(const MisleadingEstimate& estimate, std::ostream& out);
void write_misleading_json(const MisleadingEstimate& estimate, std::ostream& out);
MisleadingEstimate read_misleading_json(std::istream& in);

void write_bump_csv(const BumpCurve& curve, std::ostream& out);
void write_bump_json(const BumpCurve& curve, std::ostream& out);

// Path conveniences; failures throw IoError naming the path.
void write_scan_csv(const std::vector<ScanRecord>& records,
                    const std::string& path);
void write_scan_json(const std::vector<ScanRecord>& records,
                     const std::string& path);
void write_curve_csv(const ProfileCurve& curve, const std::string& path);
void write_curve_json(const ProfileCurve& curve, const std::string& path);
void write_misleading_csv(const MisleadingEstimate& estimate,
                          const std::string& path);
void write_misleading_json(const MisleadingEstimate& estimate,
                           const std::string& path);
void write_bump_csv(const BumpCurve& curve, const std::string& path);
void write_bump_json(const BumpCurve& curve, const std::string& path);

}  // namespace clev
