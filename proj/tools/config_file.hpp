#pragma once

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tvcert::cli {

/// Flat "key = value" lines; blank lines and lines starting with '#' are
/// skipped. Throws InvalidArgument on a line without '=' or an empty key,
/// or a key given twice.
std::map<std::string, std::string> parse_config(std::istream& in);
std::map<std::string, std::string> read_config_file(const std::string& path);

/// True when `args` already carries --key (as "--key" or "--key=...").
bool has_flag(const std::vector<std::string>& args, const std::string& key);

/// Value of --key in `args`, if present.
std::optional<std::string> flag_value(const std::vector<std::string>& args, const std::string& key);

}  // namespace tvcert::cli
