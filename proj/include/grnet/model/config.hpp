#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace grnet::model {

struct ModelConfig {
  std::size_t embedding_dim = 119;
  std::size_t hidden_size = 354;
  double dropout = 0.0;
  double recurrent_dropout = 0.0;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  std::size_t epochs = 30;
  double validation_fraction = 0.2;
  std::uint64_t rng_seed = 7;

  // Throws kInvalidConfig.
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

// Flat "key = value" text. Blank lines and lines starting with '#' are
// ignored; unknown keys and malformed values throw kInvalidConfig.
ModelConfig parse_config(std::istream& in, ModelConfig base = {});
ModelConfig load_config(const std::filesystem::path& path, ModelConfig base = {});
std::string to_text(const ModelConfig& config);

}  // namespace grnet::model
