#include "tlc/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "tlc/errors.hpp"

namespace tlc {
namespace {

constexpr char kMagic[4] = {'T', 'L', 'C', 'T'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[offset + i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const FeatureMap& map) {
  std::vector<std::uint8_t> out;
  out.reserve(kTensorHeaderBytes + 4 * map.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, kTensorFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(map.channels()));
  put_u32(out, static_cast<std::uint32_t>(map.height()));
  put_u32(out, static_cast<std::uint32_t>(map.width()));
  for (double v : map.values()) {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

FeatureMap decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kTensorHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kMalformedHeader, "missing TLCT magic");
  }
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kTensorFormatVersion) {
    throw Error(ErrorCode::kMalformedHeader, "unsupported version " + std::to_string(version));
  }
  const std::uint64_t c = get_u32(bytes, 8);
  const std::uint64_t h = get_u32(bytes, 12);
  const std::uint64_t w = get_u32(bytes, 16);
  if (c == 0 || h == 0 || w == 0) {
    throw Error(ErrorCode::kMalformedHeader, "zero dimension in header");
  }
  const std::uint64_t count = c * h * w;
  if ((bytes.size() - kTensorHeaderBytes) / 4 < count) {
    throw Error(ErrorCode::kTruncatedPayload,
                "expected " + std::to_string(count) + " values, payload holds " +
                    std::to_string((bytes.size() - kTensorHeaderBytes) / 4));
  }
  std::vector<double> values(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    values[i] = std::bit_cast<float>(get_u32(bytes, kTensorHeaderBytes + 4 * i));
  }
  return FeatureMap(c, h, w, std::move(values));
}

FeatureMap read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_tensor(bytes);
}

void write_tensor(const FeatureMap& map, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = encode_tensor(map);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoFailure, "short write to " + path.string());
}

FeatureMap quantize_to_storage(FeatureMap map) {
  for (double& v : map.values()) v = static_cast<float>(v);
  return map;
}

}  // namespace tlc
