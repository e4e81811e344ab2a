#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "staf/frame.hpp"

namespace staf {

// On-disk tensor container: "STAF" magic, u16 version, u8 dtype
// (0 = float32), u8 ndim, ndim little-endian u32 dims, then the row-major
// float32 payload, little-endian. Round-trips bit-exactly.
struct TensorData {
  std::vector<std::uint32_t> dims;
  std::vector<float> values;
};

inline constexpr std::uint16_t kTensorVersion = 1;
inline constexpr const char* kTensorExtension = ".staf";

void write_tensor(const std::filesystem::path& path,
                  std::span<const std::uint32_t> dims,
                  std::span<const float> values);
TensorData read_tensor(const std::filesystem::path& path);

// Frames persist as (height, width, channels) tensors.
void write_frame_tensor(const std::filesystem::path& path, const Frame& f);
Frame read_frame_tensor(const std::filesystem::path& path);

// Preprocessed samples persist as (frames, height, width, channels)
// tensors; most methods store a single frame per sample, late fusion
// stores several.
void write_sample_tensor(const std::filesystem::path& path,
                         const std::vector<Frame>& frames);
std::vector<Frame> read_sample_tensor(const std::filesystem::path& path);

}  // namespace staf
