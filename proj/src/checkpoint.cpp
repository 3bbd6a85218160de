#include "sdtl/checkpoint.hpp"

#include <fstream>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sdtl/error.hpp"

namespace sdtl {

namespace {

constexpr int kCheckpointVersion = 1;

std::vector<double> flatten(const Tensor& t) {
  return std::vector<double>(t.data().begin(), t.data().end());
}

// Pulls arrays[name] as a vector of exactly `expected` finite-typed numbers.
std::vector<double> take_array(const nlohmann::json& arrays, const std::string& name,
                               std::size_t expected) {
  if (!arrays.contains(name)) {
    throw FormatError("checkpoint: missing array \"" + name + "\"");
  }
  const nlohmann::json& arr = arrays.at(name);
  if (!arr.is_array()) {
    throw FormatError("checkpoint: \"" + name + "\" is not an array");
  }
  if (arr.size() != expected) {
    throw FormatError("checkpoint: \"" + name + "\" has " + std::to_string(arr.size()) +
                      " values, expected " + std::to_string(expected));
  }
  std::vector<double> values;
  values.reserve(expected);
  for (const nlohmann::json& v : arr) {
    if (!v.is_number()) {
      throw FormatError("checkpoint: \"" + name + "\" contains a non-numeric value");
    }
    values.push_back(v.get<double>());
  }
  return values;
}

LinearLayer layer_from_arrays(const nlohmann::json& arrays, const std::string& prefix,
                              std::size_t out_dim, std::size_t in_dim) {
  Tensor weight =
      Tensor::from_data({out_dim, in_dim}, take_array(arrays, prefix + ".weight", out_dim * in_dim));
  Tensor bias = Tensor::from_data({out_dim}, take_array(arrays, prefix + ".bias", out_dim));
  return LinearLayer{std::move(weight), std::move(bias)};
}

}  // namespace

void save_checkpoint(const std::string& path, const EncoderParams& encoder,
                     const HeadParams* head) {
  nlohmann::json arrays;
  for (std::size_t l = 0; l < encoder.layers.size(); ++l) {
    const std::string prefix = "encoder." + std::to_string(l);
    arrays[prefix + ".weight"] = flatten(encoder.layers[l].weight);
    arrays[prefix + ".bias"] = flatten(encoder.layers[l].bias);
  }
  nlohmann::json doc;
  doc["version"] = kCheckpointVersion;
  doc["architecture"] = encoder.dims();
  doc["feature_dim"] = encoder.feature_dim();
  if (head != nullptr) {
    doc["num_classes"] = head->num_classes();
    arrays["head.weight"] = flatten(head->layer.weight);
    arrays["head.bias"] = flatten(head->layer.bias);
  }
  doc["arrays"] = std::move(arrays);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);
  out << doc.dump() << '\n';
  if (!out) throw IoError("failed while writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint for reading: " + path);

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("checkpoint: not valid JSON (" + std::string(e.what()) + ")");
  }
  if (!doc.is_object()) throw FormatError("checkpoint: top level is not an object");

  if (!doc.contains("version") || !doc.at("version").is_number_integer()) {
    throw FormatError("checkpoint: missing integer \"version\"");
  }
  const int version = doc.at("version").get<int>();
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version) +
                      " (expected " + std::to_string(kCheckpointVersion) + ")");
  }

  if (!doc.contains("architecture") || !doc.at("architecture").is_array()) {
    throw FormatError("checkpoint: missing \"architecture\" array");
  }
  std::vector<std::size_t> dims;
  for (const nlohmann::json& d : doc.at("architecture")) {
    if (!d.is_number_unsigned() || d.get<std::size_t>() == 0) {
      throw FormatError("checkpoint: \"architecture\" entries must be positive integers");
    }
    dims.push_back(d.get<std::size_t>());
  }
  if (dims.size() < 2) {
    throw FormatError("checkpoint: \"architecture\" needs at least input and feature dims");
  }

  if (!doc.contains("feature_dim") || !doc.at("feature_dim").is_number_unsigned()) {
    throw FormatError("checkpoint: missing integer \"feature_dim\"");
  }
  if (doc.at("feature_dim").get<std::size_t>() != dims.back()) {
    throw FormatError("checkpoint: \"feature_dim\" disagrees with \"architecture\"");
  }

  if (!doc.contains("arrays") || !doc.at("arrays").is_object()) {
    throw FormatError("checkpoint: missing \"arrays\" object");
  }
  const nlohmann::json& arrays = doc.at("arrays");

  Checkpoint ckpt;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    ckpt.encoder.layers.push_back(
        layer_from_arrays(arrays, "encoder." + std::to_string(l), dims[l + 1], dims[l]));
  }

  const bool has_classes = doc.contains("num_classes");
  const bool has_head = arrays.contains("head.weight") || arrays.contains("head.bias");
  if (has_classes != has_head) {
    throw FormatError("checkpoint: head arrays and \"num_classes\" must appear together");
  }
  if (has_classes) {
    if (!doc.at("num_classes").is_number_unsigned() ||
        doc.at("num_classes").get<std::size_t>() < 2) {
      throw FormatError("checkpoint: \"num_classes\" must be an integer >= 2");
    }
    const std::size_t num_classes = doc.at("num_classes").get<std::size_t>();
    ckpt.head = HeadParams{layer_from_arrays(arrays, "head", num_classes, dims.back())};
  }
  return ckpt;
}

}  // namespace sdtl
