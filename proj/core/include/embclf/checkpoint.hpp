#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "embclf/heads.hpp"
#include "embclf/optim.hpp"

namespace embclf {

// `.rhed` checkpoint, little-endian:
//   "RHED" | u32 version=1 | u32 input | u32 hidden | u32 output
//   W1 (hidden x input, row-major) | b1 | W2 (output x hidden, row-major) | b2 | w | b   as f32
//   u64 step | f64 lr, weight_decay, beta1, beta2, epsilon
//   first moments, then second moments, same tensor order, as f32
inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

struct Checkpoint {
  HeadParams heads;
  OptimState optim;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace embclf
