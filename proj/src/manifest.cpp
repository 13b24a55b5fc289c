#include "kpzlab/manifest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

#ifndef KPZLAB_VERSION
#define KPZLAB_VERSION "0.0.0"
#endif
#ifndef KPZLAB_GIT_DESCRIBE
#define KPZLAB_GIT_DESCRIBE "unknown"
#endif

namespace kpz {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

void CsvTable::add(std::vector<CsvValue> row) {
    if (row.size() != header.size()) throw std::invalid_argument("csv row width differs from header");
    rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&](auto&& cells) {
        bool first = true;
        for (const auto& c : cells) {
            if (!first) out += ',';
            first = false;
            out += c;
        }
        out += "\r\n";
    };
    std::vector<std::string> cells;
    for (const auto& h : header) cells.push_back(csv_field(h));
    line(cells);
    for (const auto& row : rows) {
        cells.clear();
        for (const auto& v : row) {
            if (auto d = std::get_if<double>(&v)) cells.push_back(format_number(*d));
            else if (auto i = std::get_if<std::int64_t>(&v)) cells.push_back(std::to_string(*i));
            else cells.push_back(csv_field(std::get<std::string>(v)));
        }
        line(cells);
    }
    return out;
}

namespace {

void dump(const Json& j, int indent, int depth, std::string& out) {
    auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(std::size_t(indent * d), ' ');
    };
    switch (j.type()) {
    case Json::value_t::number_float: {
        const double x = j.get<double>();
        out += std::isfinite(x) ? format_number(x) : "null";
        break;
    }
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            break;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ',';
            first = false;
            newline(depth + 1);
            out += Json(it.key()).dump();
            out += indent < 0 ? ":" : ": ";
            dump(it.value(), indent, depth + 1, out);
        }
        newline(depth);
        out += '}';
        break;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            break;
        }
        out += '[';
        bool first = true;
        for (const auto& v : j) {
            if (!first) out += ',';
            first = false;
            newline(depth + 1);
            dump(v, indent, depth + 1, out);
        }
        newline(depth);
        out += ']';
        break;
    }
    default:
        out += j.dump(-1, ' ', false, nlohmann::detail::error_handler_t::replace);
    }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
    std::string out;
    dump(j, indent, 0, out);
    return out;
}

Json to_json(const FitResult& fit) {
    return Json{{"exponent", fit.exponent},       {"stderr", fit.std_error},   {"window_min", fit.window_min},
                {"window_max", fit.window_max},   {"r_squared", fit.r_squared}, {"intercept", fit.intercept},
                {"points", fit.points}};
}

const char* library_version() { return KPZLAB_VERSION; }
const char* library_git_describe() { return KPZLAB_GIT_DESCRIBE; }

Json RunManifest::to_json() const {
    Json modules = Json::object();
    for (const char* m : {"algebra", "models", "spectra", "walksim", "percsim", "slesim", "harmonic", "cli"})
        modules[m] = version;
    return Json{{"command_line", command_line}, {"seeds", seeds},           {"version", version},
                {"modules", modules},           {"git_describe", git_describe}, {"started_utc", started_utc},
                {"wall_seconds", wall_seconds}, {"parameters", parameters}};
}

RunManifest start_manifest(std::string command_line) {
    RunManifest m;
    m.command_line = std::move(command_line);
    m.version = library_version();
    m.git_describe = library_git_describe();
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    m.started_utc = buf;
    return m;
}

}  // namespace kpz
