#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "doctest.h"
#include "kpzlab/manifest.hpp"
#include "kpzlab/rng.hpp"

using namespace kpz;

namespace {

// minimal RFC 4180 reader, enough to invert CsvTable::str
std::vector<std::vector<std::string>> parse_csv(const std::string& s) {
    std::vector<std::vector<std::string>> rows(1);
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char ch = s[i];
        if (quoted) {
            if (ch == '"' && i + 1 < s.size() && s[i + 1] == '"') field += '"', ++i;
            else if (ch == '"') quoted = false;
            else field += ch;
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            rows.back().push_back(field), field.clear();
        } else if (ch == '\r' && i + 1 < s.size() && s[i + 1] == '\n') {
            rows.back().push_back(field), field.clear();
            rows.emplace_back();
            ++i;
        } else {
            field += ch;
        }
    }
    rows.pop_back();
    return rows;
}

}  // namespace

TEST_CASE("numbers round-trip through 17 significant digits") {
    CHECK(format_number(0.625) == "0.625");
    CHECK(format_number(11.0 / 12.0) == "0.91666666666666663");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CounterRng rng(7, 0);
    for (int i = 0; i < 20000; ++i) {
        const double x = (rng.uniform() - 0.5) * std::pow(10.0, double(rng.below(600)) - 300.0);
        CHECK(std::strtod(format_number(x).c_str(), nullptr) == x);
    }
    CHECK(std::strtod(format_number(std::numeric_limits<double>::denorm_min()).c_str(), nullptr) ==
          std::numeric_limits<double>::denorm_min());
}

TEST_CASE("csv fields and tables") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("two\nlines") == "\"two\nlines\"");

    CsvTable t{{"r", "n", "label"}, {}};
    t.add({2.5, std::int64_t(3), std::string("x, \"y\"")});
    t.add({1.0 / 3.0, std::int64_t(-1), std::string("line\r\nbreak")});
    CHECK_THROWS(t.add({1.0}));
    const std::string s = t.str();
    CHECK(s.substr(0, 12) == "r,n,label\r\n2");
    auto rows = parse_csv(s);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"r", "n", "label"});
    CHECK(rows[1][2] == "x, \"y\"");
    CHECK(std::strtod(rows[2][0].c_str(), nullptr) == 1.0 / 3.0);
    CHECK(rows[2][1] == "-1");
    CHECK(rows[2][2] == "line\r\nbreak");
}

TEST_CASE("json dump keeps full precision and parses back") {
    Json j{{"third", 1.0 / 3.0}, {"ints", {1, 2, 3}}, {"name", "a\"b\n"}, {"nested", {{"empty", Json::array()}}},
           {"flag", true}, {"none", nullptr}, {"bad", std::nan("")}};
    for (int indent : {-1, 0, 2}) {
        const std::string s = dump_json(j, indent);
        CHECK(s.find("0.33333333333333331") != std::string::npos);
        auto back = Json::parse(s);
        CHECK(back["third"].get<double>() == 1.0 / 3.0);
        CHECK(back["ints"] == j["ints"]);
        CHECK(back["name"] == "a\"b\n");
        CHECK(back["nested"]["empty"].empty());
        CHECK(back["bad"].is_null());
        std::vector<std::string> keys;
        for (auto it = back.begin(); it != back.end(); ++it) keys.push_back(it.key());
        CHECK(keys.front() == "third");
        CHECK(keys.back() == "bad");
    }
    CHECK(dump_json(Json{{"a", 1}}, -1) == "{\"a\":1}");
}

TEST_CASE("fit results and manifests") {
    FitResult f;
    f.exponent = 0.625;
    f.std_error = 0.01;
    f.points = 7;
    auto j = to_json(f);
    CHECK(j["exponent"] == 0.625);
    CHECK(j["stderr"] == 0.01);
    CHECK(j["points"] == 7);

    auto m = start_manifest("kpzlab exponents zeta --L 2");
    m.seeds = {42, 18446744073709551615ull};
    m.parameters["L"] = 2.0;
    auto mj = Json::parse(dump_json(m.to_json()));
    CHECK(mj["command_line"] == "kpzlab exponents zeta --L 2");
    CHECK(mj["seeds"][1].get<std::uint64_t>() == 18446744073709551615ull);
    CHECK(mj["version"] == std::string(library_version()));
    CHECK(mj["git_describe"] == std::string(library_git_describe()));
    CHECK(mj["modules"].size() == 8);
    const std::string t = mj["started_utc"];
    CHECK(t.size() == 20);
    CHECK(t[10] == 'T');
    CHECK(t.back() == 'Z');
    CHECK(mj["parameters"]["L"] == 2.0);
}
