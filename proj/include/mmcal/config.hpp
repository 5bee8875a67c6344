// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "mmcal/error.hpp"

namespace mmcal {

// Flat key=value configuration ('#' comments, dotted keys). Every named
// default of the toolkit lives here; command-line flags override entries.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::filesystem::path& path);
  void set(const std::string& key, const std::string& value);
  void merge_line(const std::string& line);  // "key=value"

  bool has(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;

  const std::map<std::string, std::string>& entries() const { return map_; }

 private:
  std::map<std::string, std::string> map_;
};

}  // namespace mmcal
