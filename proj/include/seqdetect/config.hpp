#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace seqdetect {

/// Flat `key = value` configuration with `[section]` headers. Keys are
/// addressed as "section.key"; keys before the first header live in the
/// empty section and are addressed by their bare name. '#' and ';' start
/// comments. Duplicate keys are errors.
class Config {
public:
    static Config parse(std::string_view text, std::string_view origin = "<config>");
    static Config load(const std::string& path);

    bool contains(const std::string& key) const { return values_.count(key) != 0; }
    std::optional<std::string> raw(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    /// Comma-separated list of reals.
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

    /// Throws ConfigError naming the first key not in `allowed`.
    void reject_unknown(const std::set<std::string>& allowed) const;

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, int> lines_;
    std::string origin_;
};

double parse_double(std::string_view text, std::string_view what);
std::int64_t parse_int(std::string_view text, std::string_view what);
std::uint64_t parse_uint(std::string_view text, std::string_view what);

}  // namespace seqdetect
