#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace deshadow {

// Flat key = value configuration. Lines starting with '#' are comments.
// Keys are dotted lowercase identifiers; values keep their literal spelling
// so the canonical form (and hence the config hash) is reproducible.
class Config {
public:
    Config() = default;

    static Config parse_file(const std::filesystem::path& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, std::optional<double> fallback = {}) const;
    std::int64_t get_int(const std::string& key, std::optional<std::int64_t> fallback = {}) const;
    bool get_bool(const std::string& key, std::optional<bool> fallback = {}) const;
    // Comma-separated list of doubles.
    std::vector<double> get_doubles(const std::string& key,
                                    std::optional<std::vector<double>> fallback = {}) const;
    std::vector<std::string> get_strings(const std::string& key,
                                         std::optional<std::vector<std::string>> fallback = {}) const;

    void set(const std::string& key, const std::string& value);
    void set_double(const std::string& key, double value);
    void set_int(const std::string& key, std::int64_t value);

    // Keys in sorted order.
    std::vector<std::string> keys() const;

    // "key = value\n" lines, keys sorted. Parsing the canonical form yields
    // an equal Config.
    std::string canonical() const;

    // FNV-1a over the canonical form.
    std::uint64_t hash() const;

    void save(const std::filesystem::path& path) const;

private:
    std::map<std::string, std::string> kv_;
};

}  // namespace deshadow
