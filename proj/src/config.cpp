// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#include "mmcal/config.hpp"

#include <algorithm>
#include <fstream>

namespace mmcal {

namespace {
std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}
}  // namespace

Config Config::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw CalibError(ErrorCode::IoError,
                     "cannot open config file: " + path.string());
  }
  Config cfg;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw CalibError(ErrorCode::ParseError,
                       path.string() + ":" + std::to_string(line_no) +
                           ": expected key=value");
    }
    cfg.set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  if (key.empty()) {
    throw CalibError(ErrorCode::ParseError, "config: empty key");
  }
  map_[key] = value;
}

void Config::merge_line(const std::string& line) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw CalibError(ErrorCode::ParseError,
                     "config override must be key=value: " + line);
  }
  set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
}

bool Config::has(const std::string& key) const { return map_.count(key) > 0; }

double Config::get_double(const std::string& key, double fallback) const {
  auto it = map_.find(key);
  if (it == map_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw CalibError(ErrorCode::ParseError,
                     "config: '" + key + "' is not a number: " + it->second);
  }
}

int Config::get_int(const std::string& key, int fallback) const {
  auto it = map_.find(key);
  if (it == map_.end()) return fallback;
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw CalibError(ErrorCode::ParseError,
                     "config: '" + key + "' is not an integer: " + it->second);
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = map_.find(key);
  if (it == map_.end()) return fallback;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw CalibError(ErrorCode::ParseError,
                   "config: '" + key + "' is not a boolean: " + it->second);
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  auto it = map_.find(key);
  return it == map_.end() ? fallback : it->second;
}

}  // namespace mmcal
