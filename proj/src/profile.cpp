#include "splitsim/profile.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "splitsim/errors.hpp"
#include "splitsim/rng.hpp"

namespace splitsim {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ProfileError(msg); }

void check_split(const ModelProfile& p, int split) {
  if (split < 1 || split > p.split_count()) {
    fail("split point " + std::to_string(split) + " out of range [1, " +
         std::to_string(p.split_count()) + "]");
  }
}

}  // namespace

ModelProfile ModelProfile::from_layers(std::vector<LayerEntry> layers,
                                       std::string model_name,
                                       double bytes_per_param,
                                       std::optional<double> total_flops_hint) {
  if (layers.empty()) fail("profile has no layers");
  if (bytes_per_param <= 0.0) fail("bytes_per_param must be positive");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerEntry& l = layers[i];
    const std::string at = "layer " + std::to_string(l.index);
    if (l.index != static_cast<int>(i) + 1) {
      fail("non-contiguous layer indices: expected " + std::to_string(i + 1) +
           ", got " + std::to_string(l.index));
    }
    if (!(l.flops >= 0.0) || !std::isfinite(l.flops)) fail(at + ": negative or non-finite flops");
    if (l.params < 0) fail(at + ": negative params");
    if (l.activation_size < 0) fail(at + ": negative activation_size");
    if (l.gradient_size < 0) fail(at + ": negative gradient_size");
  }

  ModelProfile p;
  p.layers_ = std::move(layers);
  p.name_ = std::move(model_name);
  p.bytes_per_param_ = bytes_per_param;
  p.flops_prefix_.reserve(p.layers_.size());
  p.params_prefix_.reserve(p.layers_.size());
  double fsum = 0.0;
  std::int64_t psum = 0;
  for (const LayerEntry& l : p.layers_) {
    fsum += l.flops;
    psum += l.params;
    p.flops_prefix_.push_back(fsum);
    p.params_prefix_.push_back(psum);
  }
  p.total_flops_ = fsum;

  if (total_flops_hint) {
    const double hint = *total_flops_hint;
    const double scale = std::max(std::abs(hint), std::abs(fsum));
    if (scale > 0.0 && std::abs(hint - fsum) > 1e-9 * scale) {
      std::ostringstream os;
      os << "declared total_flops " << hint << " does not match layer sum " << fsum;
      fail(os.str());
    }
  }
  return p;
}

double ModelProfile::device_flops(int split) const {
  check_split(*this, split);
  return flops_prefix_[static_cast<std::size_t>(split) - 1];
}

std::int64_t ModelProfile::device_params(int split) const {
  check_split(*this, split);
  return params_prefix_[static_cast<std::size_t>(split) - 1];
}

std::int64_t ModelProfile::smashed_size(int split) const {
  check_split(*this, split);
  return layers_[static_cast<std::size_t>(split) - 1].activation_size;
}

std::int64_t ModelProfile::gradient_size(int split) const {
  check_split(*this, split);
  return layers_[static_cast<std::size_t>(split) - 1].gradient_size;
}

ModelProfile ModelProfile::with_flops_scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) fail("flops scale factor must be positive");
  std::vector<LayerEntry> scaled = layers_;
  for (LayerEntry& l : scaled) l.flops *= factor;
  ModelProfile p = from_layers(std::move(scaled), name_, bytes_per_param_);
  p.checksum_ = checksum_;
  return p;
}

ModelProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open profile file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    fail("profile parse failure in " + path.string() + ": " + e.what());
  }

  try {
    if (!j.contains("profile_version")) fail("missing profile_version");
    if (j.at("profile_version").get<int>() != 1) fail("unsupported profile_version");
    if (!j.contains("layers") || !j.at("layers").is_array() || j.at("layers").empty()) {
      fail("profile must list at least one layer");
    }
    std::vector<LayerEntry> layers;
    layers.reserve(j.at("layers").size());
    for (const auto& jl : j.at("layers")) {
      LayerEntry l;
      l.index = jl.at("index").get<int>();
      l.name = jl.value("name", std::string{});
      l.flops = jl.at("flops").get<double>();
      l.params = jl.at("params").get<std::int64_t>();
      l.activation_size = jl.at("activation_size").get<std::int64_t>();
      l.gradient_size = jl.value("gradient_size", l.activation_size);
      layers.push_back(std::move(l));
    }
    std::optional<double> hint;
    if (j.contains("total_flops")) hint = j.at("total_flops").get<double>();
    ModelProfile p = ModelProfile::from_layers(
        std::move(layers), j.value("model", std::string{"unnamed"}),
        j.value("bytes_per_param", 4.0), hint);
    p.checksum_ = fnv1a64(bytes);
    return p;
  } catch (const nlohmann::json::exception& e) {
    fail("profile schema violation in " + path.string() + ": " + e.what());
  }
}

}  // namespace splitsim
