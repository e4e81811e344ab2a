#pragma once

#include <vector>

namespace staf {

// Symmetric 1-D Gaussian taps over [-radius, radius], normalized to sum 1.
std::vector<double> gaussian_taps(double sigma, int radius);

// Correlates rows then columns of a single-channel plane with the same
// odd-length tap vector, replicating edge samples.
std::vector<double> separable_correlate(const std::vector<double>& plane,
                                        int height, int width,
                                        const std::vector<double>& taps);

// Bilinear plane resize with half-pixel sample centers and edge clamping.
void resize_plane_bilinear(const float* src, int src_h, int src_w, float* dst,
                           int dst_h, int dst_w);

}  // namespace staf
