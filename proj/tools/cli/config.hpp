#pragma once

// JSON run configuration: loading with `extends`, typed field access with
// path diagnostics, and a stable digest.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace ddspec::cli {

using nlohmann::json;

/// Any problem with a config file or a flag; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Objects are merged key by key; everything else in `over` replaces `base`.
inline json deep_merge(json base, const json& over) {
    if (!base.is_object() || !over.is_object()) return over;
    for (auto it = over.begin(); it != over.end(); ++it) {
        if (base.contains(it.key()))
            base[it.key()] = deep_merge(base[it.key()], it.value());
        else
            base[it.key()] = it.value();
    }
    return base;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError(p.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json parse_json_text(const std::string& text, const std::string& name) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
    }
}

namespace detail {

inline json load_rec(const std::filesystem::path& path, std::vector<std::filesystem::path>& chain) {
    const auto canon = std::filesystem::weakly_canonical(path);
    for (const auto& p : chain)
        if (p == canon) throw ConfigError(path.string() + ": `extends` cycle");
    chain.push_back(canon);
    json j = parse_json_text(read_file(path), path.string());
    if (!j.is_object()) throw ConfigError(path.string() + ": top level must be an object");
    if (j.contains("extends")) {
        if (!j["extends"].is_string()) throw ConfigError(path.string() + ": field 'extends': expected a path string");
        const auto parent = path.parent_path() / j["extends"].get<std::string>();
        json base = load_rec(parent, chain);
        j.erase("extends");
        j = deep_merge(std::move(base), j);
    }
    chain.pop_back();
    return j;
}

}  // namespace detail

/// Loads a config, resolving `extends` relative to each file's directory.
inline json load_config(const std::filesystem::path& path) {
    std::vector<std::filesystem::path> chain;
    return detail::load_rec(path, chain);
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string digest_string(const std::string& data) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

/// A view of one config object that remembers where it lives, so every
/// error names the offending field.
class Node {
public:
    Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {
        if (!j.is_object()) fail("expected an object");
    }

    const std::string& path() const { return path_; }
    bool has(const std::string& key) const { return j_->contains(key) && !(*j_)[key].is_null(); }

    /// Rejects keys outside the allowed set, which catches typos.
    void allow(std::initializer_list<const char*> keys) const {
        std::set<std::string> ok(keys.begin(), keys.end());
        for (auto it = j_->begin(); it != j_->end(); ++it)
            if (!ok.count(it.key())) throw ConfigError("field '" + join(it.key()) + "': unknown field");
    }

    Node child(const std::string& key) const {
        if (!has(key)) throw ConfigError("field '" + join(key) + "': missing");
        return Node(at(key), join(key));
    }

    double number(const std::string& key) const {
        if (!has(key)) throw ConfigError("field '" + join(key) + "': missing");
        return as_number(at(key), join(key));
    }
    double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    std::uint64_t count(const std::string& key) const {
        if (!has(key)) throw ConfigError("field '" + join(key) + "': missing");
        const json& v = at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw ConfigError("field '" + join(key) + "': expected a nonnegative integer");
        return v.get<std::uint64_t>();
    }
    std::uint64_t count(const std::string& key, std::uint64_t fallback) const { return has(key) ? count(key) : fallback; }

    bool flag(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        if (!at(key).is_boolean()) throw ConfigError("field '" + join(key) + "': expected true or false");
        return at(key).get<bool>();
    }

    std::string text(const std::string& key) const {
        if (!has(key)) throw ConfigError("field '" + join(key) + "': missing");
        if (!at(key).is_string()) throw ConfigError("field '" + join(key) + "': expected a string");
        return at(key).get<std::string>();
    }
    std::string text(const std::string& key, const std::string& fallback) const { return has(key) ? text(key) : fallback; }

    std::vector<double> numbers(const std::string& key) const {
        if (!has(key)) throw ConfigError("field '" + join(key) + "': missing");
        const json& v = at(key);
        if (!v.is_array() || v.empty()) throw ConfigError("field '" + join(key) + "': expected a nonempty array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back(as_number(v[i], join(key) + "[" + std::to_string(i) + "]"));
        return out;
    }

    std::vector<Node> objects(const std::string& key) const {
        if (!has(key)) throw ConfigError("field '" + join(key) + "': missing");
        const json& v = at(key);
        if (!v.is_array() || v.empty()) throw ConfigError("field '" + join(key) + "': expected a nonempty array of objects");
        std::vector<Node> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(v[i], join(key) + "[" + std::to_string(i) + "]");
        return out;
    }

    const json& raw() const { return *j_; }
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("field '" + (path_.empty() ? std::string("<root>") : path_) + "': " + what);
    }

private:
    const json& at(const std::string& key) const { return (*j_)[key]; }
    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    static double as_number(const json& v, const std::string& where) {
        if (!v.is_number()) throw ConfigError("field '" + where + "': expected a number");
        return v.get<double>();
    }

    const json* j_;
    std::string path_;
};

}  // namespace ddspec::cli
