#ifndef IONTRAP_CLI_CONFIG_HPP
#define IONTRAP_CLI_CONFIG_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace iontrap {

// Flat key = value configuration. Keys carry unit suffixes; conversion to
// SI happens when a scenario reads them, never inside the library.
struct RunConfig {
  std::string scenario;
  std::map<std::string, std::string> values;
  std::string output_path;
  std::uint64_t seed = 0;
  bool seed_overridden = false;
};

struct ConfigErrors {
  std::vector<std::string> messages;
  bool ok() const { return messages.empty(); }
};

// Parses `key = value` lines, '#' comments, blank lines. All errors are
// collected, not just the first.
RunConfig parse_config(const std::string& text, ConfigErrors& errors);

std::string serialize_config(const RunConfig& config);

// Typed, default-tracking view over RunConfig used by scenarios. Every
// read is recorded so the provenance header can echo the effective value,
// and unread keys are reported as unknown.
class ParamReader {
 public:
  explicit ParamReader(const RunConfig& config) : config_(config) {}

  double number(const std::string& key, double default_value);
  long integer(const std::string& key, long default_value);
  std::string text(const std::string& key, const std::string& default_value);

  // Keys present in the config but never read.
  void finish();

  const std::vector<std::string>& provenance() const { return provenance_; }
  const ConfigErrors& errors() const { return errors_; }
  bool ok() const { return errors_.ok(); }
  void add_error(const std::string& message) { errors_.messages.push_back(message); }
  void add_note(const std::string& line) { provenance_.push_back(line); }

 private:
  const RunConfig& config_;
  std::set<std::string> consumed_;
  std::vector<std::string> provenance_;
  ConfigErrors errors_;
};

}  // namespace iontrap

#endif
