#include "seqdetect/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "seqdetect/errors.hpp"

namespace seqdetect {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool valid_name(std::string_view s)
{
    if (s.empty())
        return false;
    for (char c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_'
                        || c == '-';
        if (!ok)
            return false;
    }
    return true;
}

template <class T>
T parse_integer(std::string_view text, std::string_view what)
{
    const std::string_view t = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw ConfigError("invalid integer for " + std::string(what) + ": '" + std::string(text) + "'");
    return value;
}

}  // namespace

double parse_double(std::string_view text, std::string_view what)
{
    const std::string t(trim(text));
    try {
        std::size_t used = 0;
        const double value = std::stod(t, &used);
        if (used == t.size())
            return value;
    } catch (const std::exception&) {
    }
    throw ConfigError("invalid number for " + std::string(what) + ": '" + std::string(text) + "'");
}

std::int64_t parse_int(std::string_view text, std::string_view what)
{
    return parse_integer<std::int64_t>(text, what);
}

std::uint64_t parse_uint(std::string_view text, std::string_view what)
{
    return parse_integer<std::uint64_t>(text, what);
}

Config Config::parse(std::string_view text, std::string_view origin)
{
    Config cfg;
    cfg.origin_ = std::string(origin);
    std::string section;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        const auto comment = view.find_first_of("#;");
        if (comment != std::string_view::npos)
            view = view.substr(0, comment);
        view = trim(view);
        if (view.empty())
            continue;
        const std::string where = cfg.origin_ + ":" + std::to_string(line_no);
        if (view.front() == '[') {
            if (view.back() != ']')
                throw ConfigError(where + ": unterminated section header");
            const std::string_view name = trim(view.substr(1, view.size() - 2));
            if (!valid_name(name))
                throw ConfigError(where + ": invalid section name '" + std::string(name) + "'");
            section = std::string(name);
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(where + ": expected 'key = value', got '" + std::string(view) + "'");
        const std::string_view key = trim(view.substr(0, eq));
        const std::string_view value = trim(view.substr(eq + 1));
        if (!valid_name(key))
            throw ConfigError(where + ": invalid key '" + std::string(key) + "'");
        const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
        if (cfg.values_.count(full))
            throw ConfigError(where + ": duplicate key '" + full + "'");
        cfg.values_[full] = std::string(value);
        cfg.lines_[full] = line_no;
    }
    return cfg;
}

Config Config::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad())
        throw IoError("cannot read config file '" + path + "'");
    return parse(buffer.str(), path);
}

std::optional<std::string> Config::raw(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end())
        return std::nullopt;
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const
{
    return raw(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const
{
    const auto v = raw(key);
    return v ? parse_double(*v, key) : fallback;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const
{
    const auto v = raw(key);
    return v ? parse_int(*v, key) : fallback;
}

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) const
{
    const auto v = raw(key);
    return v ? parse_uint(*v, key) : fallback;
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const
{
    const auto v = raw(key);
    if (!v)
        return fallback;
    std::vector<double> out;
    std::string_view rest = *v;
    while (true) {
        const auto comma = rest.find(',');
        out.push_back(parse_double(rest.substr(0, comma), key));
        if (comma == std::string_view::npos)
            break;
        rest = rest.substr(comma + 1);
    }
    return out;
}

void Config::reject_unknown(const std::set<std::string>& allowed) const
{
    for (const auto& [key, value] : values_) {
        if (!allowed.count(key)) {
            const auto line = lines_.find(key);
            const std::string where = line == lines_.end() ? origin_ : origin_ + ":" + std::to_string(line->second);
            throw ConfigError(where + ": unknown configuration key '" + key + "'");
        }
    }
}

}  // namespace seqdetect
