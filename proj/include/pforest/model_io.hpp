#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "pforest/forest.hpp"

namespace pforest {

inline constexpr std::uint32_t kModelFormatVersion = 1;

// Binary model container:
//
//   magic "PFOREST\0" | u32 version | u64 payload size | payload | u64 FNV-1a(payload)
//
// All integers are little-endian, doubles are stored as their IEEE-754 bit
// pattern. The payload holds the configuration (without worker count), the
// series length, the label table, the exemplar series inline and every tree's
// nodes. Wall-clock training time is not stored, so equal models serialize to
// equal bytes.
std::string serialize_model(const ProximityForest& forest);

// Throws ModelVersionError or ModelCorruptError.
ProximityForest deserialize_model(std::string_view bytes);

// Writes through a temporary file renamed into place. Throws ModelIoError.
void save_model(const ProximityForest& forest, const std::filesystem::path& path);

// Throws ModelIoError, ModelVersionError or ModelCorruptError.
ProximityForest load_model(const std::filesystem::path& path);

}  // namespace pforest
