#pragma once

// Machine-readable output: CSV tables (RFC 4180), JSON with 17 significant
// digits, and the run manifest that accompanies every artifact.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "kpzlab/fit.hpp"

namespace kpz {

using Json = nlohmann::ordered_json;

/// %.17g; non-finite values print as nan, inf, -inf.
std::string format_number(double x);

/// Quotes a field when it holds a comma, quote, CR or LF.
std::string csv_field(std::string_view s);

using CsvValue = std::variant<double, std::int64_t, std::string>;

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<CsvValue>> rows;

    void add(std::vector<CsvValue> row);
    std::string str() const;  // CRLF line endings
};

/// Serializes with every double at 17 significant digits; NaN and
/// infinities become null.
std::string dump_json(const Json& j, int indent = 2);

Json to_json(const FitResult& fit);

struct RunManifest {
    std::string command_line;
    std::vector<std::uint64_t> seeds;
    std::string version;
    std::string git_describe;
    std::string started_utc;  // ISO 8601
    double wall_seconds = 0.0;
    Json parameters = Json::object();

    Json to_json() const;
};

const char* library_version();
const char* library_git_describe();

/// Manifest stamped with version, git describe and the current UTC time.
RunManifest start_manifest(std::string command_line);

}  // namespace kpz
