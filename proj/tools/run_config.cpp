#include "run_config.hpp"

#include "CLI11.hpp"
#include "hdqual/error.hpp"

namespace hdqual::cli {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Options that never belong in a config file.
bool is_meta(const std::string& name) { return name == "help" || name == "config"; }

}  // namespace

KeyValues parse_config_text(const std::string& text, const std::string& where) {
  KeyValues out;
  std::size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::config,
                  where + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) {
      throw Error(ErrorCode::config, where + ":" + std::to_string(line_no) + ": empty key");
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::string find_config_arg(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw Error(ErrorCode::config, "--config needs a file path");
      return args[i + 1];
    }
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

std::vector<std::string> config_to_args(const KeyValues& kv, const CLI::App& sub,
                                        const std::string& where) {
  std::vector<std::string> args;
  for (const auto& [key, value] : kv) {
    const CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr || is_meta(key)) {
      throw Error(ErrorCode::config, where + ": unknown key '" + key + "' for '" +
                                         sub.get_name() + "'");
    }
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

std::string effective_config(const CLI::App& sub) {
  std::string out = "# hdqual " + sub.get_name() + " run configuration\n";
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (is_meta(name)) continue;
    std::string value;
    if (opt->count() > 0) {
      value = opt->results().back();
    } else if (opt->get_expected_min() == 0) {
      value = "false";
    } else {
      value = opt->get_default_str();
      if (value.empty()) continue;
    }
    out += name + " = " + value + "\n";
  }
  return out;
}

}  // namespace hdqual::cli
