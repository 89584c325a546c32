#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace qf {

enum class ReportFormat { Json, Csv, Both };

ReportFormat parse_report_format(const std::string& s);

// one command's output: header fields, table rows, summary; JSON plus a CSV mirror of the rows
struct Report {
    nlohmann::ordered_json header;
    std::vector<nlohmann::ordered_json> rows;
    nlohmann::ordered_json summary;

    nlohmann::ordered_json to_json() const;
    std::string to_csv() const;
    // writes dir/stem.json and/or dir/stem.csv; returns the written paths
    std::vector<std::string> write(const std::string& dir, const std::string& stem, ReportFormat fmt) const;
};

// min, max, spread = max/min over positive values
nlohmann::ordered_json summarize(const std::vector<double>& values);

// UTC, second resolution; the only nondeterministic report field
std::string utc_timestamp();

} // namespace qf
