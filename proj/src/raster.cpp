#include "staf/raster.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace staf {

std::vector<double> gaussian_taps(double sigma, int radius) {
  if (radius < 0) throw std::invalid_argument("gaussian_taps: radius < 0");
  std::vector<double> taps(2 * radius + 1, 1.0);
  if (sigma > 0.0) {
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
      taps[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
      sum += taps[i + radius];
    }
    for (double& t : taps) t /= sum;
  } else {
    taps.assign(1, 1.0);
  }
  return taps;
}

std::vector<double> separable_correlate(const std::vector<double>& plane,
                                        int height, int width,
                                        const std::vector<double>& taps) {
  const int radius = static_cast<int>(taps.size()) / 2;
  std::vector<double> tmp(plane.size());
  std::vector<double> out(plane.size());
  // Vertical pass with replicated rows.
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const int yy = std::clamp(y + k, 0, height - 1);
        acc += taps[k + radius] * plane[static_cast<std::size_t>(yy) * width + x];
      }
      tmp[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
  // Horizontal pass with replicated columns.
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const int xx = std::clamp(x + k, 0, width - 1);
        acc += taps[k + radius] * tmp[static_cast<std::size_t>(y) * width + xx];
      }
      out[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
  return out;
}

void resize_plane_bilinear(const float* src, int src_h, int src_w, float* dst,
                           int dst_h, int dst_w) {
  const double sy = static_cast<double>(src_h) / dst_h;
  const double sx = static_cast<double>(src_w) / dst_w;
  for (int y = 0; y < dst_h; ++y) {
    const double fy = (y + 0.5) * sy - 0.5;
    const int fy0 = static_cast<int>(std::floor(fy));
    const int y0 = std::clamp(fy0, 0, src_h - 1);
    const int y1 = std::clamp(fy0 + 1, 0, src_h - 1);
    const double wy = fy - fy0;
    for (int x = 0; x < dst_w; ++x) {
      const double fx = (x + 0.5) * sx - 0.5;
      const int fx0 = static_cast<int>(std::floor(fx));
      const int x0 = std::clamp(fx0, 0, src_w - 1);
      const int x1 = std::clamp(fx0 + 1, 0, src_w - 1);
      const double wx = fx - fx0;
      const double top = src[static_cast<std::size_t>(y0) * src_w + x0] * (1.0 - wx) +
                         src[static_cast<std::size_t>(y0) * src_w + x1] * wx;
      const double bot = src[static_cast<std::size_t>(y1) * src_w + x0] * (1.0 - wx) +
                         src[static_cast<std::size_t>(y1) * src_w + x1] * wx;
      dst[static_cast<std::size_t>(y) * dst_w + x] =
          static_cast<float>(top * (1.0 - wy) + bot * wy);
    }
  }
}

}  // namespace staf
