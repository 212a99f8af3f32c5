#include "mixedwave/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace mixedwave {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> words(const std::string& value) {
  std::istringstream is(value);
  std::vector<std::string> out;
  for (std::string w; is >> w;) {
    out.push_back(w);
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(key, "cannot parse '" + text + "' as a number");
  }
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key, "cannot parse '" + text + "' as an integer");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "on" || text == "1") {
    return true;
  }
  if (text == "false" || text == "no" || text == "off" || text == "0") {
    return false;
  }
  throw ConfigError(key, "cannot parse '" + text + "' as a boolean");
}

struct Pending {
  bool tau = false;
  bool steps = false;
};

void apply(RunConfig& c, Pending& pending, const std::string& key, const std::string& value) {
  if (value.empty()) {
    throw ConfigError(key, "missing value");
  }
  if (key == "case") {
    if (value != "smooth" && value != "nonsmooth" && value != "manufactured" && value != "static") {
      throw ConfigError(key, "unknown case '" + value + "' (expected smooth, nonsmooth or manufactured)");
    }
    c.case_name = value;
  } else if (key == "study") {
    if (value == "single") {
      c.study = StudyKind::single;
    } else if (value == "h" || value == "h-study") {
      c.study = StudyKind::h;
    } else if (value == "tau" || value == "tau-study") {
      c.study = StudyKind::tau;
    } else {
      throw ConfigError(key, "unknown study '" + value + "' (expected single, h or tau)");
    }
  } else if (key == "levels" || key == "n") {
    c.levels.clear();
    for (const auto& w : words(value)) {
      c.levels.push_back(to_int(key, w));
    }
  } else if (key == "tau") {
    c.tau = to_double(key, value);
    pending.tau = true;
  } else if (key == "N") {
    c.steps = to_int(key, value);
    pending.steps = true;
  } else if (key == "taus") {
    c.taus.clear();
    for (const auto& w : words(value)) {
      c.taus.push_back(to_double(key, w));
    }
  } else if (key == "T") {
    c.final_time = to_double(key, value);
  } else if (key == "output") {
    c.output_dir = value;
  } else if (key == "fields") {
    c.export_fields = to_bool(key, value);
  } else if (key == "energy") {
    c.export_energy = to_bool(key, value);
  } else if (key == "matrices") {
    c.export_matrices = to_bool(key, value);
  } else if (key == "threads") {
    c.threads = to_int(key, value);
  } else if (key == "deep") {
    c.deep = to_bool(key, value);
  } else {
    throw ConfigError(key, "unknown key");
  }
}

void validate(RunConfig& c, const Pending& pending) {
  if (!(c.final_time > 0.0)) {
    throw ConfigError("T", "final time must be positive");
  }
  if (pending.tau && !(c.tau > 0.0)) {
    throw ConfigError("tau", "time step must be positive");
  }
  if (pending.steps && c.steps < 1) {
    throw ConfigError("N", "step count must be at least 1");
  }
  if (pending.tau && pending.steps) {
    if (std::abs(c.tau * c.steps - c.final_time) > 1e-12) {
      throw ConfigError("tau", "tau * N must equal T");
    }
  } else if (pending.steps) {
    c.tau = c.final_time / c.steps;
  } else {
    if (!(c.tau > 0.0)) {
      throw ConfigError("tau", "time step must be positive");
    }
    const double n = std::round(c.final_time / c.tau);
    if (n < 1.0 || std::abs(n * c.tau - c.final_time) > 1e-12) {
      throw ConfigError("tau", "T must be an integer multiple of tau");
    }
    c.steps = static_cast<int>(n);
  }
  if (c.levels.empty()) {
    throw ConfigError("levels", "at least one level is required");
  }
  for (std::size_t i = 0; i < c.levels.size(); ++i) {
    if (c.levels[i] < 1) {
      throw ConfigError("levels", "levels must be positive");
    }
    if (i > 0 && c.levels[i] <= c.levels[i - 1]) {
      throw ConfigError("levels", "levels must be strictly increasing");
    }
    if (c.levels[i] > kMaxDefaultLevel && !c.deep) {
      throw ConfigError("levels", "level " + std::to_string(c.levels[i]) + " exceeds " +
                                      std::to_string(kMaxDefaultLevel) + " (set deep = true)");
    }
  }
  if (c.study != StudyKind::h && c.levels.size() != 1) {
    throw ConfigError("levels", "exactly one level is required unless study = h");
  }
  if (c.study == StudyKind::tau) {
    if (c.taus.empty()) {
      throw ConfigError("taus", "at least one time step is required");
    }
    for (std::size_t i = 0; i < c.taus.size(); ++i) {
      const double t = c.taus[i];
      if (!(t > 0.0)) {
        throw ConfigError("taus", "time steps must be positive");
      }
      if (i > 0 && !(t < c.taus[i - 1])) {
        throw ConfigError("taus", "time steps must be strictly decreasing");
      }
      const double n = std::round(c.final_time / t);
      if (n < 1.0 || std::abs(n * t - c.final_time) > 1e-12) {
        throw ConfigError("taus", "T must be an integer multiple of every time step");
      }
    }
  }
  if (c.threads < 1) {
    throw ConfigError("threads", "thread count must be at least 1");
  }
}

}  // namespace

Settings read_settings(std::istream& is) {
  Settings out;
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream parts(line);
    for (std::string part; std::getline(parts, part, ',');) {
      const std::string item = trim(part);
      if (item.empty()) {
        continue;
      }
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(item, "line " + std::to_string(number) + ": expected 'key = value'");
      }
      out.emplace_back(trim(std::string_view(item).substr(0, eq)), trim(std::string_view(item).substr(eq + 1)));
    }
  }
  return out;
}

Settings read_settings(std::string_view text) {
  std::istringstream is{std::string(text)};
  return read_settings(is);
}

RunConfig parse_config(const Settings& file, const Settings& overrides) {
  RunConfig c;
  Pending pending;
  for (const auto& [k, v] : file) {
    apply(c, pending, k, v);
  }
  for (const auto& [k, v] : overrides) {
    if (k == "tau") {
      pending.steps = false;
    } else if (k == "N") {
      pending.tau = false;
    }
    apply(c, pending, k, v);
  }
  validate(c, pending);
  return c;
}

RunConfig parse_config_file(const std::filesystem::path& path, const Settings& overrides) {
  std::ifstream is(path);
  if (!is) {
    throw ConfigError("config", "cannot read '" + path.string() + "'");
  }
  return parse_config(read_settings(is), overrides);
}

std::string to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::single:
      return "single";
    case StudyKind::h:
      return "h";
    case StudyKind::tau:
      return "tau";
  }
  return "single";
}

}  // namespace mixedwave
