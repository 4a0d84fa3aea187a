#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "tlc/modules.hpp"

namespace tlc {

/// Flat `key=value` text: one pair per line, `#` starts a comment, blank
/// lines ignored, surrounding whitespace trimmed. Later keys override earlier.
std::map<std::string, std::string> parse_key_value(const std::string& text);
std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path);

/// Parameters named by a module manifest.
///
/// Tensor-valued keys point at TLCT files, resolved relative to the manifest:
///   se.reduce   1 × C × hidden      se.expand   1 × hidden × C
///   norm.gamma  1 × 1 × C           norm.beta   1 × 1 × C
/// Scalar keys hold literal numbers: norm.eps, norm.groups, attn.temperature.
struct ParamsManifest {
  std::optional<SeParams> se;
  std::optional<NormParams> norm;
  std::optional<double> temperature;
};

ParamsManifest load_manifest(const std::filesystem::path& path);

/// Writes the tensors next to `path` and the manifest itself.
void save_manifest(const ParamsManifest& params, const std::filesystem::path& path);

}  // namespace tlc
