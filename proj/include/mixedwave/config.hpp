#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mixedwave {

/// Invalid or inconsistent setting. key() names the offending setting.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

private:
  std::string key_;
};

enum class StudyKind { single, h, tau };

struct RunConfig {
  std::string case_name = "smooth";
  StudyKind study = StudyKind::single;
  std::vector<int> levels{4};
  double tau = 1e-3;
  int steps = 1000;
  std::vector<double> taus{0.25, 0.125, 0.0625, 0.03125};
  double final_time = 1.0;
  std::filesystem::path output_dir = ".";
  bool export_fields = true;
  bool export_energy = false;
  bool export_matrices = false;
  int threads = 1;
  bool deep = false;  // allow levels above kMaxDefaultLevel
};

/// Largest n accepted without `deep = true`.
inline constexpr int kMaxDefaultLevel = 32;

/// Ordered (key, value) pairs; later entries win.
using Settings = std::vector<std::pair<std::string, std::string>>;

/// Reads `key = value` assignments, one or more per line separated by
/// commas. Text after '#' is ignored.
Settings read_settings(std::istream& is);
Settings read_settings(std::string_view text);

/// Applies `file` then `overrides` on top of the defaults and validates
/// the result.
RunConfig parse_config(const Settings& file, const Settings& overrides = {});

/// Reads and parses a settings file; a missing file is a ConfigError.
RunConfig parse_config_file(const std::filesystem::path& path, const Settings& overrides = {});

std::string to_string(StudyKind kind);

}  // namespace mixedwave
