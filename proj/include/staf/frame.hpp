#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace staf {

// Row-major (row, col, channel) raster of intensities in [0, 1]. The
// universal carrier for video frames, motion representations, fused
// samples, and filter outputs.
class Frame {
 public:
  Frame() = default;

  // Zero-filled frame.
  Frame(int height, int width, int channels);

  // Takes ownership of `data`. Throws std::invalid_argument when the size
  // does not match height*width*channels or any value lies outside [0, 1]
  // (NaN included).
  Frame(int height, int width, int channels, std::vector<float> data);

  static Frame filled(int height, int width, int channels, float value);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float at(int y, int x, int c = 0) const { return data_[index(y, x, c)]; }
  float& at(int y, int x, int c = 0) { return data_[index(y, x, c)]; }

  std::span<const float> values() const { return data_; }
  std::span<float> values() { return data_; }

  bool same_shape(const Frame& other) const {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }

  bool operator==(const Frame& other) const = default;

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

float clamp01(float v);

// Bilinear resize with half-pixel sample centers and edge clamping.
// Identity when the target dims equal the source dims.
Frame resize_bilinear(const Frame& f, int new_height, int new_width);

// Left-right mirror; involutive.
Frame flip_horizontal(const Frame& f);

}  // namespace staf
