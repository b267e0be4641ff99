#include "deshadow/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "deshadow/errors.hpp"
#include "deshadow/hashing.hpp"

namespace deshadow {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value', got '" +
                              stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        cfg.kv_[key] = value;
    }
    return cfg;
}

Config Config::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_string(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string Config::get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, std::optional<double> fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) {
        if (fallback) return *fallback;
        throw ConfigError("missing config key: " + key);
    }
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: '" + it->second + "'");
    }
}

std::int64_t Config::get_int(const std::string& key, std::optional<std::int64_t> fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) {
        if (fallback) return *fallback;
        throw ConfigError("missing config key: " + key);
    }
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not an integer: '" + it->second + "'");
    }
}

bool Config::get_bool(const std::string& key, std::optional<bool> fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) {
        if (fallback) return *fallback;
        throw ConfigError("missing config key: " + key);
    }
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key '" + key + "': not a boolean: '" + v + "'");
}

std::vector<double> Config::get_doubles(const std::string& key,
                                        std::optional<std::vector<double>> fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) {
        if (fallback) return *fallback;
        throw ConfigError("missing config key: " + key);
    }
    std::vector<double> out;
    for (const auto& item : split_commas(it->second)) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': not a number: '" + item + "'");
        }
    }
    return out;
}

std::vector<std::string> Config::get_strings(const std::string& key,
                                             std::optional<std::vector<std::string>> fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) {
        if (fallback) return *fallback;
        throw ConfigError("missing config key: " + key);
    }
    return split_commas(it->second);
}

void Config::set(const std::string& key, const std::string& value) {
    kv_[trim(key)] = trim(value);
}

void Config::set_double(const std::string& key, double value) {
    std::ostringstream out;
    out.precision(17);
    out << value;
    set(key, out.str());
}

void Config::set_int(const std::string& key, std::int64_t value) {
    set(key, std::to_string(value));
}

std::vector<std::string> Config::keys() const {
    std::vector<std::string> out;
    out.reserve(kv_.size());
    for (const auto& [k, _] : kv_) out.push_back(k);
    return out;
}

std::string Config::canonical() const {
    std::ostringstream out;
    for (const auto& [k, v] : kv_) out << k << " = " << v << "\n";
    return out.str();
}

std::uint64_t Config::hash() const {
    return fnv1a64(canonical());
}

void Config::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write config file: " + path.string());
    out << canonical();
    if (!out) throw IoError("error while writing config file: " + path.string());
}

}  // namespace deshadow
