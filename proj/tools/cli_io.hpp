#pragma once
// File formats used by the speclab command-line tool.

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "speclab/disk_steklov.hpp"
#include "speclab/error.hpp"
#include "speclab/geometry.hpp"

namespace speclab::cli {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

/// Shortest text that reads back to v.
inline std::string fmt_plain(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Compact JSON with every floating-point number written as %.12e.
inline std::string dump_json(const nlohmann::json& j) {
    using json = nlohmann::json;
    switch (j.type()) {
    case json::value_t::number_float: {
        const double v = j.get<double>();
        return std::isfinite(v) ? fmt(v) : "null";
    }
    case json::value_t::array: {
        std::string out = "[";
        for (std::size_t i = 0; i < j.size(); ++i) out += (i ? "," : "") + dump_json(j[i]);
        return out + "]";
    }
    case json::value_t::object: {
        std::string out = "{";
        bool first = true;
        for (const auto& [key, value] : j.items()) {
            out += (first ? "" : ",") + json(key).dump() + ":" + dump_json(value);
            first = false;
        }
        return out + "}";
    }
    default: return j.dump();
    }
}

inline nlohmann::json json_number(double v) { return v; }

inline nlohmann::json json_vector(const Point& x) {
    auto arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i) arr.push_back(json_number(x[i]));
    return arr;
}

// --- density JSON: {"M": int, "modes": [[m, re, im], ...]}, m >= 0 -------------

inline FourierDensity read_density_json(std::istream& in) {
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::ParseError, std::string("density JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("M") || !doc.contains("modes"))
        fail(ErrorKind::ParseError, "density JSON needs \"M\" and \"modes\"");
    if (!doc["M"].is_number_integer()) fail(ErrorKind::ParseError, "\"M\" must be an integer");
    const long long order = doc["M"].get<long long>();
    if (order < 0 || order > (1 << 20)) fail(ErrorKind::InvalidDensity, "\"M\" out of range");
    if (!doc["modes"].is_array()) fail(ErrorKind::ParseError, "\"modes\" must be an array");

    std::vector<std::complex<double>> coeffs(static_cast<std::size_t>(order) + 1, {0.0, 0.0});
    std::vector<bool> seen(coeffs.size(), false);
    for (const auto& row : doc["modes"]) {
        if (!row.is_array() || row.size() != 3 || !row[0].is_number_integer() || !row[1].is_number() || !row[2].is_number())
            fail(ErrorKind::ParseError, "each mode must be [m, re, im]");
        const long long m = row[0].get<long long>();
        if (m < 0) fail(ErrorKind::InvalidDensity, "negative modes are implied by conjugacy");
        if (m > order) fail(ErrorKind::InvalidDensity, "mode index exceeds M");
        if (seen[m]) fail(ErrorKind::InvalidDensity, "duplicate mode " + std::to_string(m));
        seen[m] = true;
        coeffs[m] = {row[1].get<double>(), row[2].get<double>()};
    }
    return FourierDensity::from_coefficients(std::move(coeffs));
}

inline void write_density_json(std::ostream& out, const FourierDensity& rho) {
    nlohmann::json doc;
    doc["M"] = rho.order();
    doc["modes"] = nlohmann::json::array();
    for (int m = 0; m <= rho.order(); ++m) {
        const auto c = rho.coefficient(m);
        doc["modes"].push_back({m, json_number(c.real()), json_number(c.imag())});
    }
    out << dump_json(doc) << '\n';
}

// --- flat TOML subset ---------------------------------------------------------
//
// key = value lines, [table] and [[array-of-tables]] headers, # comments.
// Values: basic strings, numbers, booleans and (nested) arrays of those.

struct TomlValue {
    using Array = std::vector<TomlValue>;
    std::variant<double, bool, std::string, std::shared_ptr<Array>> v;

    bool is_number() const { return std::holds_alternative<double>(v); }
    bool is_array() const { return std::holds_alternative<std::shared_ptr<Array>>(v); }
    double number() const {
        if (!is_number()) fail(ErrorKind::ParseError, "expected a number");
        return std::get<double>(v);
    }
    bool boolean() const {
        if (!std::holds_alternative<bool>(v)) fail(ErrorKind::ParseError, "expected a boolean");
        return std::get<bool>(v);
    }
    const std::string& string() const {
        if (!std::holds_alternative<std::string>(v)) fail(ErrorKind::ParseError, "expected a string");
        return std::get<std::string>(v);
    }
    const Array& array() const {
        if (!is_array()) fail(ErrorKind::ParseError, "expected an array");
        return *std::get<std::shared_ptr<Array>>(v);
    }
    std::vector<double> numbers() const {
        std::vector<double> out;
        for (const auto& x : array()) out.push_back(x.number());
        return out;
    }
};

using TomlTable = std::map<std::string, TomlValue>;

struct TomlDocument {
    TomlTable root;
    std::map<std::string, TomlTable> tables;
    std::map<std::string, std::vector<TomlTable>> table_arrays;
};

namespace detail {

class TomlLineParser {
public:
    TomlLineParser(const std::string& text, std::size_t line) : s_(text), line_(line) {}

    TomlValue value() {
        skip();
        if (pos_ >= s_.size()) error("missing value");
        const char c = s_[pos_];
        if (c == '"') return {string()};
        if (c == '[') return array();
        if (s_.compare(pos_, 4, "true") == 0) {
            pos_ += 4;
            return {true};
        }
        if (s_.compare(pos_, 5, "false") == 0) {
            pos_ += 5;
            return {false};
        }
        return {number()};
    }

    void finish() {
        skip();
        if (pos_ < s_.size() && s_[pos_] != '#') error("trailing characters");
    }

private:
    [[noreturn]] void error(const std::string& what) const {
        fail(ErrorKind::ParseError, "TOML line " + std::to_string(line_) + ": " + what);
    }

    void skip() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }

    std::string string() {
        ++pos_;
        std::string out;
        while (pos_ < s_.size() && s_[pos_] != '"') {
            if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
                const char e = s_[++pos_];
                out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
            } else {
                out += s_[pos_];
            }
            ++pos_;
        }
        if (pos_ >= s_.size()) error("unterminated string");
        ++pos_;
        return out;
    }

    double number() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                                    s_[pos_] == '-' || s_[pos_] == '+' || s_[pos_] == '_'))
            ++pos_;
        std::string text = s_.substr(start, pos_ - start);
        std::erase(text, '_');
        if (text.empty()) error("expected a value");
        if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
            try {
                std::size_t used = 0;
                const double v = static_cast<double>(std::stoull(text.substr(2), &used, 16));
                if (used == text.size() - 2) return v;
            } catch (const std::exception&) {
            }
            error("bad hexadecimal integer '" + text + "'");
        }
        try {
            return speclab::detail::parse_double(text);
        } catch (const Error&) {
            error("bad number '" + text + "'");
        }
    }

    TomlValue array() {
        ++pos_;
        auto arr = std::make_shared<TomlValue::Array>();
        for (;;) {
            skip();
            if (pos_ >= s_.size()) error("unterminated array");
            if (s_[pos_] == ']') {
                ++pos_;
                break;
            }
            arr->push_back(value());
            skip();
            if (pos_ < s_.size() && s_[pos_] == ',') ++pos_;
            else if (pos_ < s_.size() && s_[pos_] != ']') error("expected ',' or ']'");
        }
        return {arr};
    }

    const std::string& s_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace detail

inline TomlDocument parse_toml(std::istream& in) {
    TomlDocument doc;
    TomlTable* current = &doc.root;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string text = detail::trim(raw);
        if (text.empty() || text[0] == '#') continue;
        if (text.rfind("[[", 0) == 0) {
            const auto close = text.find("]]");
            if (close == std::string::npos) fail(ErrorKind::ParseError, "TOML line " + std::to_string(line) + ": bad header");
            auto& arr = doc.table_arrays[detail::trim(text.substr(2, close - 2))];
            arr.emplace_back();
            current = &arr.back();
            continue;
        }
        if (text[0] == '[') {
            const auto close = text.find(']');
            if (close == std::string::npos) fail(ErrorKind::ParseError, "TOML line " + std::to_string(line) + ": bad header");
            current = &doc.tables[detail::trim(text.substr(1, close - 1))];
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) fail(ErrorKind::ParseError, "TOML line " + std::to_string(line) + ": expected key = value");
        const std::string key = detail::trim(text.substr(0, eq));
        if (key.empty()) fail(ErrorKind::ParseError, "TOML line " + std::to_string(line) + ": empty key");
        const std::string rest = text.substr(eq + 1);
        detail::TomlLineParser parser(rest, line);
        TomlValue v = parser.value();
        parser.finish();
        if (!current->emplace(key, std::move(v)).second)
            fail(ErrorKind::ParseError, "TOML line " + std::to_string(line) + ": duplicate key " + key);
    }
    return doc;
}

// --- per-atom scalar CSV (header phi1) ---------------------------------------

inline std::vector<double> read_scalar_csv(std::istream& in, const std::string& column) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::ParseError, "empty " + column + " file");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
    if (detail::trim(line) != column) fail(ErrorKind::ParseError, "header must be '" + column + "'");
    std::vector<double> out;
    while (std::getline(in, line)) {
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        out.push_back(speclab::detail::parse_double(t));
    }
    return out;
}

} // namespace speclab::cli
