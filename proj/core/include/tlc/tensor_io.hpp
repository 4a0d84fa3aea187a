#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tlc/feature_map.hpp"

namespace tlc {

// TLCT layout, little-endian: "TLCT" | u32 version | u32 C | u32 H | u32 W |
// C*H*W float32 values in channel-major, row-major order.
inline constexpr std::uint32_t kTensorFormatVersion = 1;
inline constexpr std::size_t kTensorHeaderBytes = 20;

/// Throws MalformedHeader, TruncatedPayload, NonFiniteValue or IoFailure.
FeatureMap read_tensor(const std::filesystem::path& path);

/// Values are narrowed to float32; maps whose values are float32-representable
/// (anything produced by read_tensor) round-trip bit-exactly.
void write_tensor(const FeatureMap& map, const std::filesystem::path& path);

std::vector<std::uint8_t> encode_tensor(const FeatureMap& map);
FeatureMap decode_tensor(std::span<const std::uint8_t> bytes);

/// Rounds every value to the nearest float32, i.e. what a write/read cycle yields.
FeatureMap quantize_to_storage(FeatureMap map);

}  // namespace tlc
