#include "robitmc/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "robitmc/io.hpp"

namespace robitmc {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

std::string dataset_fingerprint(const Dataset& data) {
  std::string bytes = "n=" + std::to_string(data.n()) +
                      ";p=" + std::to_string(data.p()) + ";X=";
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      bytes += format_g17(data.X(i, j));
      bytes += ',';
    }
  }
  bytes += ";y=";
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    bytes += std::to_string(data.y[i]);
    bytes += ',';
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

nlohmann::json make_manifest(const nlohmann::json& resolved_config,
                             const Dataset& data) {
  nlohmann::json manifest;
  manifest["version"] = kVersion;
  manifest["config"] = resolved_config;
  manifest["dataset"] = {{"n", data.n()},
                         {"p", data.p()},
                         {"fingerprint", dataset_fingerprint(data)}};
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  manifest["created"] = stamp;
  return manifest;
}

std::string manifest_hash(const nlohmann::json& manifest) {
  nlohmann::json hashed = manifest;
  hashed.erase("created");  // timestamps never affect the hash
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(hashed.dump())));
  return buf;
}

}  // namespace robitmc
