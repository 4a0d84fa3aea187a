#include "tlc/params_io.hpp"

#include <fstream>
#include <sstream>

#include "tlc/errors.hpp"
#include "tlc/tensor_io.hpp"

namespace tlc {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kInvalidArgument, "manifest key " + key + " is not a number: " + text);
}

std::vector<double> matrix_values(const FeatureMap& t, std::size_t rows, std::size_t cols,
                                  const std::string& key) {
  if (t.channels() != 1 || t.height() != rows || t.width() != cols) {
    throw Error(ErrorCode::kShapeMismatch, key + " must be 1x" + std::to_string(rows) + "x" +
                                               std::to_string(cols));
  }
  return {t.values().begin(), t.values().end()};
}

}  // namespace

std::map<std::string, std::string> parse_key_value(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "line " + std::to_string(line_no) + ": expected key=value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_key_value(buffer.str());
}

ParamsManifest load_manifest(const std::filesystem::path& path) {
  const auto entries = read_key_value_file(path);
  const auto base = path.parent_path();
  auto tensor = [&](const std::string& key) { return read_tensor(base / entries.at(key)); };

  ParamsManifest params;
  const bool has_reduce = entries.contains("se.reduce");
  if (has_reduce != entries.contains("se.expand")) {
    throw Error(ErrorCode::kInvalidArgument, "se.reduce and se.expand must be given together");
  }
  if (has_reduce) {
    const FeatureMap reduce = tensor("se.reduce");
    const FeatureMap expand = tensor("se.expand");
    const std::size_t channels = reduce.height();
    const std::size_t hidden = reduce.width();
    if (channels % hidden != 0) {
      throw Error(ErrorCode::kShapeMismatch, "se.reduce hidden width must divide C");
    }
    params.se.emplace(channels, channels / hidden,
                      matrix_values(reduce, channels, hidden, "se.reduce"),
                      matrix_values(expand, hidden, channels, "se.expand"));
  }

  if (entries.contains("norm.gamma") || entries.contains("norm.beta") ||
      entries.contains("norm.groups")) {
    if (!entries.contains("norm.gamma") || !entries.contains("norm.beta")) {
      throw Error(ErrorCode::kInvalidArgument, "norm.gamma and norm.beta are required");
    }
    NormParams norm;
    const FeatureMap gamma = tensor("norm.gamma");
    const FeatureMap beta = tensor("norm.beta");
    norm.gamma = matrix_values(gamma, 1, gamma.width(), "norm.gamma");
    norm.beta = matrix_values(beta, 1, gamma.width(), "norm.beta");
    if (entries.contains("norm.eps")) norm.eps = parse_number("norm.eps", entries.at("norm.eps"));
    norm.groups = norm.gamma.size();
    if (entries.contains("norm.groups")) {
      const double g = parse_number("norm.groups", entries.at("norm.groups"));
      if (g < 1 || g != static_cast<double>(static_cast<std::size_t>(g))) {
        throw Error(ErrorCode::kInvalidGroupCount, "norm.groups must be a positive integer");
      }
      norm.groups = static_cast<std::size_t>(g);
    }
    norm.validate(norm.gamma.size());
    params.norm = std::move(norm);
  }

  if (entries.contains("attn.temperature")) {
    params.temperature = parse_number("attn.temperature", entries.at("attn.temperature"));
    if (!(*params.temperature > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "attn.temperature must be positive");
    }
  }
  return params;
}

void save_manifest(const ParamsManifest& params, const std::filesystem::path& path) {
  const auto base = path.parent_path();
  const std::string stem = path.stem().string();
  std::ostringstream manifest;
  manifest.precision(17);
  auto put_tensor = [&](const std::string& key, const FeatureMap& t) {
    const std::string file = stem + "." + key + ".tlct";
    write_tensor(t, base / file);
    manifest << key << "=" << file << "\n";
  };
  if (params.se) {
    const SeParams& se = *params.se;
    const auto& r = se.reduce();
    const auto& e = se.expand();
    put_tensor("se.reduce", FeatureMap(1, se.channels(), se.hidden(), {r.begin(), r.end()}));
    put_tensor("se.expand", FeatureMap(1, se.hidden(), se.channels(), {e.begin(), e.end()}));
  }
  if (params.norm) {
    const NormParams& n = *params.norm;
    put_tensor("norm.gamma", FeatureMap(1, 1, n.gamma.size(), n.gamma));
    put_tensor("norm.beta", FeatureMap(1, 1, n.beta.size(), n.beta));
    manifest << "norm.eps=" << n.eps << "\n";
    manifest << "norm.groups=" << n.groups << "\n";
  }
  if (params.temperature) manifest << "attn.temperature=" << *params.temperature << "\n";

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << manifest.str();
  if (!out) throw Error(ErrorCode::kIoFailure, "short write to " + path.string());
}

}  // namespace tlc
