#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "robitmc/linalg.hpp"

namespace robitmc {

inline constexpr const char* kVersion = "0.1.0";

// FNV-1a 64-bit over a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

// Order-sensitive hash of the dataset contents (dimensions plus every entry
// of X and y at full precision).
std::string dataset_fingerprint(const Dataset& data);

// Manifest: resolved configuration, dataset fingerprint, version, and a
// creation timestamp. The hash covers everything except the timestamp, so
// identical runs produce identical hashes (and identical sample files).
nlohmann::json make_manifest(const nlohmann::json& resolved_config,
                             const Dataset& data);

std::string manifest_hash(const nlohmann::json& manifest);

}  // namespace robitmc
