#pragma once

// Flat "key = value" configuration. '#' starts a comment; the first key must be
// "version". Values are looked up by exact key.

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bwalk {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Config {
public:
    static constexpr int kSupportedVersion = 1;

    static Config parse(std::string_view text, const std::string& origin = "<string>")
    {
        Config c;
        c.origin_ = origin;
        std::istringstream in{std::string(text)};
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const std::string body = trim(line);
            if (body.empty()) continue;
            const auto eq = body.find('=');
            if (eq == std::string::npos) throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
            std::string key = trim(body.substr(0, eq)), value = trim(body.substr(eq + 1));
            if (key.empty() || value.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
            if (c.values_.empty() && key != "version") throw ConfigError(origin + ": first entry must be version");
            if (!c.values_.emplace(key, value).second) throw ConfigError(origin + ": duplicate key " + key);
        }
        if (c.values_.empty()) throw ConfigError(origin + ": empty config");
        if (c.get_int("version") != kSupportedVersion) throw ConfigError(origin + ": unsupported config version");
        return c;
    }

    static Config load(const std::string& path)
    {
        std::ifstream f(path);
        if (!f) throw ConfigError("cannot open config " + path);
        std::stringstream ss;
        ss << f.rdbuf();
        return parse(ss.str(), path);
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::string& origin() const { return origin_; }

    const std::string& get(const std::string& key) const
    {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError(origin_ + ": missing key " + key);
        return it->second;
    }

    double get_double(const std::string& key) const
    {
        const auto& v = get(key);
        std::size_t pos = 0;
        double d = 0;
        try {
            d = std::stod(v, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != v.size()) throw ConfigError(origin_ + ": key " + key + " is not a number");
        return d;
    }

    int get_int(const std::string& key) const
    {
        const auto& v = get(key);
        std::size_t pos = 0;
        int i = 0;
        try {
            i = std::stoi(v, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != v.size()) throw ConfigError(origin_ + ": key " + key + " is not an integer");
        return i;
    }

    double get_double(const std::string& key, double fallback) const { return has(key) ? get_double(key) : fallback; }
    int get_int(const std::string& key, int fallback) const { return has(key) ? get_int(key) : fallback; }

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    static std::string trim(const std::string& s)
    {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, std::string> values_;
    std::string origin_;
};

} // namespace bwalk
