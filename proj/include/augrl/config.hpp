#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace augrl {

inline constexpr const char* kToolVersion = "augrl 1.0.0";

// Flat `key = value` configuration with `#` comments. Keys are validated by
// the consumer; order is preserved. Values keep their textual form until a
// typed getter parses them.
class ConfigMap {
 public:
  // Insert or overwrite.
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;  // throws if missing

  int get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;      // true/false
  std::uint64_t get_u64(const std::string& key) const;

  const std::vector<std::pair<std::string, std::string>>& items() const {
    return items_;
  }

  // Serialized back to `key = value` lines, insertion order.
  std::string to_text() const;

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

// Parses a config file; malformed lines are reported with their line number.
ConfigMap load_config_file(const std::filesystem::path& path);

// Comma-separated integer list, e.g. "2,4,8".
std::vector<int> parse_int_list(const std::string& s);

// Identity record of one command invocation, written to manifest.json in the
// run directory before work starts and finalized afterwards. Re-running the
// command with the recorded config reproduces every artifact byte for byte;
// only the timestamps differ.
struct RunManifest {
  std::string command;
  ConfigMap config;  // fully resolved, every key present
  std::vector<std::string> artifacts;
  std::string tool_version = kToolVersion;
  std::string started_at;
  std::string finished_at;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

std::string utc_timestamp();

}  // namespace augrl
