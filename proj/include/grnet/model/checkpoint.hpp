#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "grnet/model/model.hpp"

namespace grnet::model {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Binary layout, all integers little-endian:
//   magic "GRNETCKP" (8 bytes), u32 version
//   u32 length + config text (key = value lines)
//   u32 length + domain id, u64 vocabulary checksum
//   u32 tensor count, then per tensor:
//     u32 length + name, u8 dtype (1 = float32), u32 rank, u64 dims[rank],
//     values as little-endian IEEE-754 float32, row-major
//   u32 epoch count, then per epoch: f64 train loss, f64 validation loss
//   u64 FNV-1a 64 of every preceding byte
struct Checkpoint {
  ModelConfig config;
  std::string domain_id;
  std::uint64_t vocab_checksum = 0;
  Params params;
  std::vector<EpochStats> history;
};

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);
// Throws kParse on malformed or truncated bytes and kIncompatible on a
// version mismatch.
Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);
// Also checks the vocabulary checksum and tensor shapes (kIncompatible).
Checkpoint load_checkpoint(const std::filesystem::path& path, const planning::DomainVocabulary& vocab);

}  // namespace grnet::model
