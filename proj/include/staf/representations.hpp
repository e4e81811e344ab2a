#pragma once

#include <array>
#include <span>
#include <string>

#include "staf/frame.hpp"
#include "staf/optical_flow.hpp"

namespace staf {

enum class ReprMethod { kRaw, kDxdy, kOa, kCc, kEg, kMg };

ReprMethod parse_repr_method(const std::string& name);
std::string repr_method_name(ReprMethod m);

// Displacement magnitude mapped to the ends of [0, 1].
struct NormalizationSpec {
  double flow_clip = 8.0;  // pixels/frame
};

struct CannyParams {
  double sigma = 1.4;
  double low = 0.1;
  double high = 0.3;
};

struct ReprParams {
  NormalizationSpec norm;
  double cc_theta = 30.0;  // |dx|+|dy| motion gate, raw displacement units
  CannyParams canny;
};

inline constexpr int kEgFrameCount = 36;
inline constexpr int kEgGridRows = 6;
inline constexpr int kEgGridCols = 6;
inline constexpr int kMgFrameCount = 48;
inline constexpr int kMgGridRows = 16;  // 4 direction channels x 4 flow rows
inline constexpr int kMgGridCols = 12;

// Two channels: dx and dy clamped to +-flow_clip and shifted so zero motion
// maps to 0.5.
Frame repr_dxdy(const FlowField& flow, const NormalizationSpec& n);

// Flow orientation as hue, clamped magnitude as value, full saturation,
// converted to three RGB channels.
Frame repr_oa(const FlowField& flow, const NormalizationSpec& n);

// Standard hexcone conversion; h in degrees [0, 360), s and v in [0, 1].
void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b);

// dxdy channels plus the grayscale appearance of pixels moving more than
// theta (strict |dx|+|dy| > theta).
Frame repr_cc(const FlowField& flow, const Frame& gray, double theta,
              const NormalizationSpec& n);

// |flow| / flow_clip clamped to [0, 1], single channel.
Frame flow_magnitude(const FlowField& flow, const NormalizationSpec& n);

// Gaussian smoothing, Sobel gradients, non-maximum suppression and
// double-threshold hysteresis on a single-channel magnitude frame.
// Output values are exactly 0 or 1.
Frame canny_edges(const Frame& mag, double low, double high,
                  double sigma = 1.4);

// 36 motion-edge maps tiled row-major into a 6x6 grid.
Frame repr_eg(std::span<const FlowField> flows, const ReprParams& p);

// Signed direction split: left |-dx|, right +dx, up |-dy|, down +dy, each
// normalized by flow_clip. Exactly one of each pair is nonzero per pixel.
std::array<Frame, 4> flow_to_4ch(const FlowField& flow,
                                 const NormalizationSpec& n);

// 48 flows split into 4 direction channels and tiled as 16x12 grid:
// the four channel tiles of one flow stacked vertically, flows advancing
// left to right, 12 per block row.
Frame repr_mg(std::span<const FlowField> flows, const NormalizationSpec& n);

}  // namespace staf
