#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace srf {

/// Line-oriented `key = value...` document with `#` comments. Nested fields
/// use dotted keys (`rrt.step = 0.25`); list-valued fields repeat the key
/// (`obstacle = ...` per box). Solver configs and scenarios both use it.
class KvDocument {
public:
    struct Entry {
        std::string key;
        std::vector<std::string> tokens;
        int line = 0;
    };

    static KvDocument parse(std::string_view text, std::string origin = "<string>");
    static KvDocument parse_file(const std::filesystem::path& path);

    const std::string& origin() const { return origin_; }
    bool has(const std::string& key) const;

    // Scalar accessors. The no-default forms throw srf::Error with a
    // file:line diagnostic when the key is missing or malformed.
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// All numeric tokens of a single-occurrence key.
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

    /// One numeric row per occurrence of a repeated key (may be empty).
    std::vector<std::vector<double>> get_double_rows(const std::string& key) const;

    /// Raw token rows per occurrence of a repeated key.
    std::vector<std::vector<std::string>> get_rows(const std::string& key) const;

    const std::vector<Entry>& entries() const { return entries_; }

    [[noreturn]] void fail(const std::string& key, const std::string& message) const;

private:
    const Entry* find(const std::string& key) const;
    const Entry& require(const std::string& key) const;
    double token_as_double(const Entry& e, const std::string& token) const;

    std::string origin_;
    std::vector<Entry> entries_;
};

}  // namespace srf
