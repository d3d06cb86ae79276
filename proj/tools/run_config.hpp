#pragma once

// Key-value run configuration files.
//
//   # comment
//   dim = 10000
//   out = "runs/a"
//
// Every key is the long name of a flag of the subcommand. Values from the
// file are inserted ahead of the command-line arguments, so flags given on
// the command line win.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace CLI {
class App;
}

namespace hdqual::cli {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Throws Error(config) naming the line on malformed input.
KeyValues parse_config_text(const std::string& text, const std::string& where);

/// Finds "--config PATH" or "--config=PATH" among the arguments.
std::string find_config_arg(const std::vector<std::string>& args);

/// "--key=value" arguments for every entry; unknown keys are rejected.
std::vector<std::string> config_to_args(const KeyValues& kv, const CLI::App& sub,
                                        const std::string& where);

/// Effective settings of a parsed subcommand, in the file format above.
std::string effective_config(const CLI::App& sub);

}  // namespace hdqual::cli
