#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>
#include <stdexcept>

#include "gpd/version.hpp"

namespace gpd::cli {

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

RunManifest::RunManifest(std::vector<std::string> argv, std::uint64_t seed)
    : argv_(std::move(argv)), seed_(seed) {}

void RunManifest::add_output(const std::string& name, std::string_view bytes) {
  outputs_.push_back({{"path", name}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
}

void RunManifest::set(const std::string& key, nlohmann::json value) {
  extra_[key] = std::move(value);
}

nlohmann::json RunManifest::to_json(double wall_seconds) const {
  nlohmann::json j;
  j["command_line"] = argv_;
  j["seed"] = seed_;
  j["library_version"] = kVersion;
  j["wall_time_seconds"] = wall_seconds;
  j["outputs"] = outputs_;
  if (!extra_.empty()) j["parameters"] = extra_;
  return j;
}

}  // namespace gpd::cli
