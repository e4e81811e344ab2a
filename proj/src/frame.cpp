#include "staf/frame.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "staf/raster.hpp"

namespace staf {

Frame::Frame(int height, int width, int channels)
    : height_(height), width_(width), channels_(channels) {
  if (height < 0 || width < 0 || channels < 0) {
    throw std::invalid_argument("Frame: negative dimension");
  }
  data_.assign(static_cast<std::size_t>(height) * width * channels, 0.0f);
}

Frame::Frame(int height, int width, int channels, std::vector<float> data)
    : height_(height), width_(width), channels_(channels),
      data_(std::move(data)) {
  if (height < 0 || width < 0 || channels < 0) {
    throw std::invalid_argument("Frame: negative dimension");
  }
  const std::size_t expected =
      static_cast<std::size_t>(height) * width * channels;
  if (data_.size() != expected) {
    throw std::invalid_argument("Frame: data size " +
                                std::to_string(data_.size()) +
                                " does not match dims");
  }
  for (float v : data_) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw std::invalid_argument("Frame: value outside [0,1]");
    }
  }
}

Frame Frame::filled(int height, int width, int channels, float value) {
  Frame f(height, width, channels);
  std::fill(f.data_.begin(), f.data_.end(), value);
  return f;
}

float clamp01(float v) {
  if (std::isnan(v)) return 0.0f;
  return std::min(1.0f, std::max(0.0f, v));
}

Frame resize_bilinear(const Frame& f, int new_height, int new_width) {
  if (new_height < 1 || new_width < 1) {
    throw std::invalid_argument("resize_bilinear: target dims must be >= 1");
  }
  if (f.empty()) {
    throw std::invalid_argument("resize_bilinear: empty frame");
  }
  if (new_height == f.height() && new_width == f.width()) return f;

  const int c = f.channels();
  Frame out(new_height, new_width, c);
  // Per-channel planes keep the shared resize kernel single-channel.
  std::vector<float> src_plane(static_cast<std::size_t>(f.height()) *
                               f.width());
  std::vector<float> dst_plane(static_cast<std::size_t>(new_height) *
                               new_width);
  for (int ch = 0; ch < c; ++ch) {
    for (int y = 0; y < f.height(); ++y) {
      for (int x = 0; x < f.width(); ++x) {
        src_plane[static_cast<std::size_t>(y) * f.width() + x] =
            f.at(y, x, ch);
      }
    }
    resize_plane_bilinear(src_plane.data(), f.height(), f.width(),
                          dst_plane.data(), new_height, new_width);
    for (int y = 0; y < new_height; ++y) {
      for (int x = 0; x < new_width; ++x) {
        out.at(y, x, ch) =
            clamp01(dst_plane[static_cast<std::size_t>(y) * new_width + x]);
      }
    }
  }
  return out;
}

Frame flip_horizontal(const Frame& f) {
  Frame out(f.height(), f.width(), f.channels());
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      for (int c = 0; c < f.channels(); ++c) {
        out.at(y, x, c) = f.at(y, f.width() - 1 - x, c);
      }
    }
  }
  return out;
}

}  // namespace staf
