#include "qf/report.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <ctime>
#include <fstream>

#include "qf/error.hpp"

namespace qf {

ReportFormat parse_report_format(const std::string& s)
{
    if (s == "json") return ReportFormat::Json;
    if (s == "csv") return ReportFormat::Csv;
    if (s == "both") return ReportFormat::Both;
    fail(ErrorKind::Config, "format must be json, csv or both");
}

nlohmann::ordered_json Report::to_json() const
{
    nlohmann::ordered_json j = header;
    j["rows"] = rows;
    j["summary"] = summary;
    return j;
}

namespace {

std::string csv_cell(const nlohmann::ordered_json& v)
{
    if (v.is_null()) return "";
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    if (v.is_structured()) return csv_cell(nlohmann::ordered_json(v.dump()));
    return v.dump();
}

} // namespace

std::string Report::to_csv() const
{
    std::vector<std::string> cols;
    for (const auto& r : rows)
        for (const auto& [k, _] : r.items())
            if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    std::string out;
    for (std::size_t c = 0; c < cols.size(); ++c) out += (c ? "," : "") + cols[c];
    out += "\n";
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) out += ",";
            if (r.contains(cols[c])) out += csv_cell(r.at(cols[c]));
        }
        out += "\n";
    }
    return out;
}

std::vector<std::string> Report::write(const std::string& dir, const std::string& stem, ReportFormat fmt) const
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    require(!ec, ErrorKind::Io, "cannot create output directory " + dir);
    std::vector<std::string> paths;
    auto put = [&](const std::string& ext, const std::string& body) {
        const std::string path = (std::filesystem::path(dir) / (stem + ext)).string();
        std::ofstream os(path, std::ios::binary);
        require(bool(os), ErrorKind::Io, "cannot write " + path);
        os << body;
        paths.push_back(path);
    };
    if (fmt != ReportFormat::Csv) put(".json", to_json().dump(2) + "\n");
    if (fmt != ReportFormat::Json) put(".csv", to_csv());
    return paths;
}

nlohmann::ordered_json summarize(const std::vector<double>& values)
{
    nlohmann::ordered_json s;
    if (values.empty()) return s;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s["min"] = *lo;
    s["max"] = *hi;
    s["spread"] = *lo > 0.0 ? nlohmann::ordered_json(*hi / *lo) : nlohmann::ordered_json();
    return s;
}

std::string utc_timestamp()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace qf
