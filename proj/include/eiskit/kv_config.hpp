#pragma once

// Plain-text `key = value` configuration files. Blank lines and lines starting
// with '#' are ignored; a trailing `# comment` after a value is stripped.

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "eiskit/error.hpp"

namespace eiskit {

namespace detail {

inline std::string trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(std::string_view text, const std::string& what) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (t.empty() || ec != std::errc{} || ptr != last) {
        throw DataError("cannot parse number '" + t + "' for " + what);
    }
    return v;
}

inline long long parse_int(std::string_view text, const std::string& what) {
    const std::string t = trim(text);
    long long v = 0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (t.empty() || ec != std::errc{} || ptr != last) {
        throw DataError("cannot parse integer '" + t + "' for " + what);
    }
    return v;
}

}  // namespace detail

class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(std::istream& in, const std::string& source = "<stream>") {
        KeyValueConfig cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const std::string t = detail::trim(line);
            if (t.empty()) continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key=value");
            }
            std::string key = detail::trim(t.substr(0, eq));
            std::string value = detail::trim(t.substr(eq + 1));
            if (key.empty()) {
                throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
            }
            if (cfg.values_.count(key)) {
                throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
            }
            cfg.values_.emplace(std::move(key), std::move(value));
        }
        return cfg;
    }

    static KeyValueConfig parse_string(const std::string& text) {
        std::istringstream in(text);
        return parse(in, "<string>");
    }

    static KeyValueConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        return parse(in, path);
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    const std::string& get(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
        return it->second;
    }

    double get_double(const std::string& key) const {
        try {
            return detail::parse_double(get(key), key);
        } catch (const DataError& e) {
            throw ConfigError(e.what());
        }
    }

    double get_double(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    long long get_int(const std::string& key) const {
        try {
            return detail::parse_int(get(key), key);
        } catch (const DataError& e) {
            throw ConfigError(e.what());
        }
    }

    long long get_int(const std::string& key, long long fallback) const {
        return has(key) ? get_int(key) : fallback;
    }

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

    /// Throws if any key outside `allowed` is present.
    void require_only(const std::set<std::string>& allowed, const std::string& what) const {
        for (const auto& [k, v] : values_) {
            if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + what);
        }
    }

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace eiskit
