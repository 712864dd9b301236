#include "config_file.hpp"

#include <fstream>

#include "tvcert/errors.hpp"

namespace tvcert::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::map<std::string, std::string> parse_config(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(t.substr(0, eq));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        if (key.empty())
            throw InvalidArgument("config line " + std::to_string(lineno) + ": empty key");
        if (!out.emplace(key, trim(t.substr(eq + 1))).second)
            throw InvalidArgument("config line " + std::to_string(lineno) + ": duplicate key '" +
                                  key + "'");
    }
    return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidArgument("cannot read config file " + path);
    return parse_config(f);
}

bool has_flag(const std::vector<std::string>& args, const std::string& key) {
    const std::string flag = "--" + key;
    for (const auto& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
}

std::optional<std::string> flag_value(const std::vector<std::string>& args,
                                      const std::string& key) {
    const std::string flag = "--" + key;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == flag && k + 1 < args.size()) return args[k + 1];
        if (args[k].rfind(flag + "=", 0) == 0) return args[k].substr(flag.size() + 1);
    }
    return std::nullopt;
}

}  // namespace tvcert::cli
