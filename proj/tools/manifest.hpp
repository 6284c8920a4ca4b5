#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace gpd::cli {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Record of one command run: what was asked, what was written and the
/// digest of every output.
class RunManifest {
 public:
  RunManifest(std::vector<std::string> argv, std::uint64_t seed);

  // `name` is the file path, or "-" for standard output.
  void add_output(const std::string& name, std::string_view bytes);
  void set(const std::string& key, nlohmann::json value);

  nlohmann::json to_json(double wall_seconds) const;

 private:
  std::vector<std::string> argv_;
  std::uint64_t seed_;
  nlohmann::json outputs_ = nlohmann::json::array();
  nlohmann::json extra_ = nlohmann::json::object();
};

}  // namespace gpd::cli
