#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "staf/frame.hpp"

namespace staf {

// Dense per-pixel displacement between two frames, in pixels/frame.
// dx is positive rightward, dy positive downward.
struct FlowField {
  int height = 0;
  int width = 0;
  std::vector<float> dx;
  std::vector<float> dy;

  FlowField() = default;
  FlowField(int h, int w)
      : height(h), width(w),
        dx(static_cast<std::size_t>(h) * w, 0.0f),
        dy(static_cast<std::size_t>(h) * w, 0.0f) {}

  std::size_t index(int y, int x) const {
    return static_cast<std::size_t>(y) * width + x;
  }
};

struct FlowParams {
  int pyramid_levels = 3;
  double pyramid_scale = 0.5;
  int window_size = 15;   // odd
  int iterations = 3;
  int poly_n = 5;         // odd neighborhood size
  double poly_sigma = 1.1;

  void validate() const;
};

// Per-pixel quadratic fit f(x) ~ x'Ax + b'x + c with Gaussian applicability,
// stored as (axx, ayy, axy, bx, by, c) where A = [[axx, axy], [axy, ayy]].
struct PolyExpansion {
  int height = 0;
  int width = 0;
  std::vector<double> coeffs;  // height*width*6

  static constexpr int kAxx = 0, kAyy = 1, kAxy = 2, kBx = 3, kBy = 4, kC = 5;

  const double* at(int y, int x) const {
    return coeffs.data() + (static_cast<std::size_t>(y) * width + x) * 6;
  }
};

// Weighted least-squares local polynomial fit over a poly_n window.
// Throws std::invalid_argument for multi-channel input or frames smaller
// than poly_n.
PolyExpansion polynomial_expansion(const Frame& f, int poly_n,
                                   double poly_sigma);

struct SingleScaleResult {
  FlowField flow;
  // Pixels whose windowed normal matrix was singular; the prior estimate
  // was kept there.
  std::size_t singular_fallbacks = 0;
};

// One displacement update at a single scale, warm-started at `prior`.
SingleScaleResult flow_single_scale(const PolyExpansion& prev,
                                    const PolyExpansion& next,
                                    int window_size, const FlowField& prior);

// Coarse-to-fine pyramid estimation. Output is finite everywhere and
// exactly zero when prev == next.
FlowField farneback_flow(const Frame& prev, const Frame& next,
                         const FlowParams& params);

// Two-channel tensor persistence (channel 0 = dx, channel 1 = dy).
void write_flow_tensor(const std::filesystem::path& path, const FlowField& f);
FlowField read_flow_tensor(const std::filesystem::path& path);

}  // namespace staf
