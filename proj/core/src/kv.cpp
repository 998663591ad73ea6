#include "srf/kv.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "srf/error.hpp"

namespace srf {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_tokens(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

}  // namespace

KvDocument KvDocument::parse(std::string_view text, std::string origin) {
    KvDocument doc;
    doc.origin_ = std::move(origin);
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        std::string line(raw);
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(doc.origin_ + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        Entry e;
        e.key = trim(line.substr(0, eq));
        e.tokens = split_tokens(trim(line.substr(eq + 1)));
        e.line = line_no;
        if (e.key.empty()) {
            throw Error(doc.origin_ + ":" + std::to_string(line_no) + ": empty key");
        }
        doc.entries_.push_back(std::move(e));
    }
    return doc;
}

KvDocument KvDocument::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

bool KvDocument::has(const std::string& key) const { return find(key) != nullptr; }

const KvDocument::Entry* KvDocument::find(const std::string& key) const {
    for (const auto& e : entries_)
        if (e.key == key) return &e;
    return nullptr;
}

const KvDocument::Entry& KvDocument::require(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) throw Error(origin_ + ": missing required key '" + key + "'");
    return *e;
}

double KvDocument::token_as_double(const Entry& e, const std::string& token) const {
    char* end = nullptr;
    double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') {
        throw Error(origin_ + ":" + std::to_string(e.line) + ": '" + token + "' is not a number");
    }
    return v;
}

std::string KvDocument::get_string(const std::string& key) const {
    const Entry& e = require(key);
    if (e.tokens.size() != 1) fail(key, "expected exactly one value");
    return e.tokens[0];
}

std::string KvDocument::get_string(const std::string& key, const std::string& fallback) const {
    return find(key) ? get_string(key) : fallback;
}

double KvDocument::get_double(const std::string& key) const {
    const Entry& e = require(key);
    if (e.tokens.size() != 1) fail(key, "expected exactly one value");
    return token_as_double(e, e.tokens[0]);
}

double KvDocument::get_double(const std::string& key, double fallback) const {
    return find(key) ? get_double(key) : fallback;
}

long long KvDocument::get_int(const std::string& key) const {
    const Entry& e = require(key);
    if (e.tokens.size() != 1) fail(key, "expected exactly one value");
    long long v = 0;
    auto [p, ec] = std::from_chars(e.tokens[0].data(), e.tokens[0].data() + e.tokens[0].size(), v);
    if (ec != std::errc() || p != e.tokens[0].data() + e.tokens[0].size()) {
        fail(key, "'" + e.tokens[0] + "' is not an integer");
    }
    return v;
}

long long KvDocument::get_int(const std::string& key, long long fallback) const {
    return find(key) ? get_int(key) : fallback;
}

bool KvDocument::get_bool(const std::string& key, bool fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    if (e->tokens.size() != 1) fail(key, "expected exactly one value");
    const std::string& t = e->tokens[0];
    if (t == "1" || t == "true" || t == "yes") return true;
    if (t == "0" || t == "false" || t == "no") return false;
    fail(key, "'" + t + "' is not a boolean");
}

std::vector<double> KvDocument::get_doubles(const std::string& key) const {
    const Entry& e = require(key);
    std::vector<double> out;
    out.reserve(e.tokens.size());
    for (const auto& t : e.tokens) out.push_back(token_as_double(e, t));
    return out;
}

std::vector<double> KvDocument::get_doubles(const std::string& key,
                                            const std::vector<double>& fallback) const {
    return find(key) ? get_doubles(key) : fallback;
}

std::vector<std::vector<double>> KvDocument::get_double_rows(const std::string& key) const {
    std::vector<std::vector<double>> rows;
    for (const auto& e : entries_) {
        if (e.key != key) continue;
        std::vector<double> row;
        row.reserve(e.tokens.size());
        for (const auto& t : e.tokens) row.push_back(token_as_double(e, t));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<std::vector<std::string>> KvDocument::get_rows(const std::string& key) const {
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : entries_)
        if (e.key == key) rows.push_back(e.tokens);
    return rows;
}

void KvDocument::fail(const std::string& key, const std::string& message) const {
    const Entry* e = find(key);
    std::string where = e ? origin_ + ":" + std::to_string(e->line) : origin_;
    throw Error(where + ": key '" + key + "': " + message);
}

}  // namespace srf
