#include "iontrap/cli_config.hpp"

#include <cstdlib>
#include <sstream>

namespace iontrap {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

RunConfig parse_config(const std::string& text, ConfigErrors& errors) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.messages.push_back("line " + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      errors.messages.push_back("line " + std::to_string(line_no) + ": empty key or value");
      continue;
    }
    if (config.values.count(key)) {
      errors.messages.push_back("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
      continue;
    }
    if (key == "scenario")
      config.scenario = value;
    else
      config.values[key] = value;
  }
  return config;
}

std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  out << "scenario = " << config.scenario << "\n";
  for (const auto& [key, value] : config.values) out << key << " = " << value << "\n";
  return out.str();
}

double ParamReader::number(const std::string& key, double default_value) {
  const auto it = config_.values.find(key);
  double value = default_value;
  bool is_default = true;
  if (it != config_.values.end()) {
    consumed_.insert(key);
    char* end = nullptr;
    const double parsed = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0') {
      errors_.messages.push_back("key '" + key + "': cannot parse number '" + it->second + "'");
      return default_value;
    }
    value = parsed;
    is_default = false;
  }
  std::ostringstream line;
  line.precision(17);
  line << key << " = " << value << (is_default ? "  (default)" : "");
  provenance_.push_back(line.str());
  return value;
}

long ParamReader::integer(const std::string& key, long default_value) {
  const double v = number(key, static_cast<double>(default_value));
  const long n = static_cast<long>(v);
  if (static_cast<double>(n) != v)
    errors_.messages.push_back("key '" + key + "': expected an integer");
  return n;
}

std::string ParamReader::text(const std::string& key, const std::string& default_value) {
  const auto it = config_.values.find(key);
  std::string value = default_value;
  bool is_default = true;
  if (it != config_.values.end()) {
    consumed_.insert(key);
    value = it->second;
    is_default = false;
  }
  provenance_.push_back(key + " = " + value + (is_default ? "  (default)" : ""));
  return value;
}

void ParamReader::finish() {
  for (const auto& [key, value] : config_.values)
    if (!consumed_.count(key))
      errors_.messages.push_back("unknown key '" + key + "'");
}

}  // namespace iontrap
