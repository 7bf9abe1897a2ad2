#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace splitsim {

// One layer of a chain-structured model.
//
// flops            training FLOPs this layer contributes to one round
// params           weight/bias count of the layer
// activation_size  parameter count of one mini-batch's output activations
// gradient_size    parameter count of the activation gradient (defaults to
//                  activation_size when the profile file omits it)
struct LayerEntry {
  int index = 0;  // 1-based, contiguous
  std::string name;
  double flops = 0.0;
  std::int64_t params = 0;
  std::int64_t activation_size = 0;
  std::int64_t gradient_size = 0;
};

// Layered workload profile. Split point s in [1, S] means layers 1..s run on
// the device and the rest on the server. Immutable after construction; safe
// to share across threads.
class ModelProfile {
 public:
  // Validates layers (contiguous 1..S indices, non-negative values) and
  // precomputes prefix sums. If total_flops_hint is given it must match the
  // layer sum within 1e-9 relative.
  static ModelProfile from_layers(std::vector<LayerEntry> layers,
                                  std::string model_name,
                                  double bytes_per_param = 4.0,
                                  std::optional<double> total_flops_hint = {});

  int split_count() const { return static_cast<int>(layers_.size()); }
  double total_flops() const { return total_flops_; }
  const std::string& name() const { return name_; }
  double bytes_per_param() const { return bytes_per_param_; }
  const std::vector<LayerEntry>& layers() const { return layers_; }

  // Cumulative training FLOPs of layers 1..s.
  double device_flops(int split) const;
  // Cumulative parameter count of layers 1..s (device-side model size).
  std::int64_t device_params(int split) const;
  // Activation size at the output of layer s (uploaded during training).
  std::int64_t smashed_size(int split) const;
  // Activation-gradient size at the output of layer s (downloaded back).
  std::int64_t gradient_size(int split) const;

  // FNV-1a of the profile file bytes; 0 for profiles built in memory.
  std::uint64_t checksum() const { return checksum_; }

  // Copy with every layer's flops multiplied by `factor` (> 0). Used for the
  // optional local-updates multiplier.
  ModelProfile with_flops_scaled(double factor) const;

 private:
  ModelProfile() = default;

  std::vector<LayerEntry> layers_;
  std::vector<double> flops_prefix_;
  std::vector<std::int64_t> params_prefix_;
  double total_flops_ = 0.0;
  double bytes_per_param_ = 4.0;
  std::string name_;
  std::uint64_t checksum_ = 0;

  friend ModelProfile load_profile(const std::filesystem::path& path);
};

// Loads and validates a profile file (JSON, see README for the schema).
// Throws ProfileError with the offending layer index on any violation.
ModelProfile load_profile(const std::filesystem::path& path);

}  // namespace splitsim
