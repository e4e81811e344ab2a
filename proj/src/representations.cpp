#include "staf/representations.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>

#include "staf/raster.hpp"

namespace staf {
namespace {

float encode_displacement(double v, double clip) {
  const double clamped = std::clamp(v, -clip, clip);
  return static_cast<float>(clamped / (2.0 * clip) + 0.5);
}

void paste_tile(Frame& grid, const Frame& tile, int tile_row, int tile_col) {
  const int th = tile.height();
  const int tw = tile.width();
  for (int y = 0; y < th; ++y) {
    for (int x = 0; x < tw; ++x) {
      grid.at(tile_row * th + y, tile_col * tw + x) = tile.at(y, x);
    }
  }
}

void check_flow_stack(std::span<const FlowField> flows, int expected,
                      const char* what) {
  if (static_cast<int>(flows.size()) != expected) {
    throw std::invalid_argument(std::string(what) + ": expected " +
                                std::to_string(expected) + " flows, got " +
                                std::to_string(flows.size()));
  }
  for (const FlowField& f : flows) {
    if (f.height != flows[0].height || f.width != flows[0].width) {
      throw std::invalid_argument(std::string(what) + ": flow dims differ");
    }
  }
}

}  // namespace

ReprMethod parse_repr_method(const std::string& name) {
  if (name == "raw") return ReprMethod::kRaw;
  if (name == "dxdy") return ReprMethod::kDxdy;
  if (name == "oa") return ReprMethod::kOa;
  if (name == "cc") return ReprMethod::kCc;
  if (name == "eg") return ReprMethod::kEg;
  if (name == "mg") return ReprMethod::kMg;
  throw std::invalid_argument("unknown representation method: " + name);
}

std::string repr_method_name(ReprMethod m) {
  switch (m) {
    case ReprMethod::kRaw: return "raw";
    case ReprMethod::kDxdy: return "dxdy";
    case ReprMethod::kOa: return "oa";
    case ReprMethod::kCc: return "cc";
    case ReprMethod::kEg: return "eg";
    case ReprMethod::kMg: return "mg";
  }
  return "?";
}

Frame repr_dxdy(const FlowField& flow, const NormalizationSpec& n) {
  Frame out(flow.height, flow.width, 2);
  for (int y = 0; y < flow.height; ++y) {
    for (int x = 0; x < flow.width; ++x) {
      const std::size_t i = flow.index(y, x);
      out.at(y, x, 0) = encode_displacement(flow.dx[i], n.flow_clip);
      out.at(y, x, 1) = encode_displacement(flow.dy[i], n.flow_clip);
    }
  }
  return out;
}

void hsv_to_rgb(double h, double s, double v, double& r, double& g,
                double& b) {
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  const double m = v - c;
  double rp = 0.0, gp = 0.0, bp = 0.0;
  switch (static_cast<int>(hp) % 6) {
    case 0: rp = c; gp = x; break;
    case 1: rp = x; gp = c; break;
    case 2: gp = c; bp = x; break;
    case 3: gp = x; bp = c; break;
    case 4: rp = x; bp = c; break;
    default: rp = c; bp = x; break;
  }
  r = rp + m;
  g = gp + m;
  b = bp + m;
}

Frame repr_oa(const FlowField& flow, const NormalizationSpec& n) {
  Frame out(flow.height, flow.width, 3);
  for (int y = 0; y < flow.height; ++y) {
    for (int x = 0; x < flow.width; ++x) {
      const std::size_t i = flow.index(y, x);
      const double dx = flow.dx[i];
      const double dy = flow.dy[i];
      double h = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
      if (h < 0.0) h += 360.0;
      if (h >= 360.0) h = 0.0;
      const double mag = std::sqrt(dx * dx + dy * dy);
      const double v = std::min(mag, n.flow_clip) / n.flow_clip;
      double r = 0.0, g = 0.0, b = 0.0;
      hsv_to_rgb(h, 1.0, v, r, g, b);
      out.at(y, x, 0) = clamp01(static_cast<float>(r));
      out.at(y, x, 1) = clamp01(static_cast<float>(g));
      out.at(y, x, 2) = clamp01(static_cast<float>(b));
    }
  }
  return out;
}

Frame repr_cc(const FlowField& flow, const Frame& gray, double theta,
              const NormalizationSpec& n) {
  if (gray.height() != flow.height || gray.width() != flow.width ||
      gray.channels() != 1) {
    throw std::invalid_argument("repr_cc: gray frame dims differ from flow");
  }
  Frame out(flow.height, flow.width, 3);
  for (int y = 0; y < flow.height; ++y) {
    for (int x = 0; x < flow.width; ++x) {
      const std::size_t i = flow.index(y, x);
      out.at(y, x, 0) = encode_displacement(flow.dx[i], n.flow_clip);
      out.at(y, x, 1) = encode_displacement(flow.dy[i], n.flow_clip);
      const double motion = std::fabs(flow.dx[i]) + std::fabs(flow.dy[i]);
      out.at(y, x, 2) = motion > theta ? gray.at(y, x) : 0.0f;
    }
  }
  return out;
}

Frame flow_magnitude(const FlowField& flow, const NormalizationSpec& n) {
  Frame out(flow.height, flow.width, 1);
  for (std::size_t i = 0; i < flow.dx.size(); ++i) {
    const double mag = std::hypot(flow.dx[i], flow.dy[i]);
    out.values()[i] =
        static_cast<float>(std::min(mag, n.flow_clip) / n.flow_clip);
  }
  return out;
}

Frame canny_edges(const Frame& mag, double low, double high, double sigma) {
  if (mag.channels() != 1) {
    throw std::invalid_argument("canny_edges: single-channel only");
  }
  if (low >= high) {
    throw std::invalid_argument("canny_edges: low must be < high");
  }
  const int h = mag.height();
  const int w = mag.width();

  std::vector<double> plane(mag.size());
  for (std::size_t i = 0; i < mag.size(); ++i) plane[i] = mag.values()[i];
  if (sigma > 0.0) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    plane = separable_correlate(plane, h, w, gaussian_taps(sigma, radius));
  }

  // Sobel gradients scaled to per-pixel units so thresholds stay comparable
  // with the [0,1] input range.
  std::vector<double> gx(plane.size(), 0.0), gy(plane.size(), 0.0),
      gm(plane.size(), 0.0);
  auto p = [&](int y, int x) {
    return plane[static_cast<std::size_t>(std::clamp(y, 0, h - 1)) * w +
                 std::clamp(x, 0, w - 1)];
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double sx = (p(y - 1, x + 1) + 2.0 * p(y, x + 1) + p(y + 1, x + 1) -
                         p(y - 1, x - 1) - 2.0 * p(y, x - 1) - p(y + 1, x - 1)) /
                        4.0;
      const double sy = (p(y + 1, x - 1) + 2.0 * p(y + 1, x) + p(y + 1, x + 1) -
                         p(y - 1, x - 1) - 2.0 * p(y - 1, x) - p(y - 1, x + 1)) /
                        4.0;
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      gx[i] = sx;
      gy[i] = sy;
      gm[i] = std::hypot(sx, sy);
    }
  }

  // Non-maximum suppression. Ties keep the earlier pixel along the gradient.
  constexpr double kTan225 = 0.41421356237309503;
  constexpr double kTan675 = 2.414213562373095;
  std::vector<unsigned char> state(plane.size(), 0);  // 1 = weak, 2 = strong
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double m = gm[i];
      if (m < low) continue;
      const double ax = std::fabs(gx[i]);
      const double ay = std::fabs(gy[i]);
      double before, after;
      if (ay <= ax * kTan225) {
        before = gm[i - 1];
        after = gm[i + 1];
      } else if (ay >= ax * kTan675) {
        before = gm[i - w];
        after = gm[i + w];
      } else if (gx[i] * gy[i] > 0.0) {
        before = gm[i - w - 1];
        after = gm[i + w + 1];
      } else {
        before = gm[i - w + 1];
        after = gm[i + w - 1];
      }
      if (m > before && m >= after) state[i] = m >= high ? 2 : 1;
    }
  }

  // Hysteresis: grow strong edges through weak neighbors.
  Frame out(h, w, 1);
  std::deque<std::size_t> stack;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] == 2) stack.push_back(i);
  }
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    if (out.values()[i] == 1.0f) continue;
    out.values()[i] = 1.0f;
    const int y = static_cast<int>(i) / w;
    const int x = static_cast<int>(i) % w;
    for (int ddy = -1; ddy <= 1; ++ddy) {
      for (int ddx = -1; ddx <= 1; ++ddx) {
        const int ny = y + ddy;
        const int nx = x + ddx;
        if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
        const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
        if (state[j] >= 1 && out.values()[j] == 0.0f) stack.push_back(j);
      }
    }
  }
  return out;
}

Frame repr_eg(std::span<const FlowField> flows, const ReprParams& p) {
  check_flow_stack(flows, kEgFrameCount, "repr_eg");
  const int th = flows[0].height;
  const int tw = flows[0].width;
  Frame grid(kEgGridRows * th, kEgGridCols * tw, 1);
  for (int i = 0; i < kEgFrameCount; ++i) {
    const Frame edges = canny_edges(flow_magnitude(flows[i], p.norm),
                                    p.canny.low, p.canny.high, p.canny.sigma);
    paste_tile(grid, edges, i / kEgGridCols, i % kEgGridCols);
  }
  return grid;
}

std::array<Frame, 4> flow_to_4ch(const FlowField& flow,
                                 const NormalizationSpec& n) {
  std::array<Frame, 4> out{Frame(flow.height, flow.width, 1),
                           Frame(flow.height, flow.width, 1),
                           Frame(flow.height, flow.width, 1),
                           Frame(flow.height, flow.width, 1)};
  const double clip = n.flow_clip;
  for (std::size_t i = 0; i < flow.dx.size(); ++i) {
    const double dx = flow.dx[i];
    const double dy = flow.dy[i];
    out[0].values()[i] =
        static_cast<float>(std::min(std::max(-dx, 0.0), clip) / clip);
    out[1].values()[i] =
        static_cast<float>(std::min(std::max(dx, 0.0), clip) / clip);
    out[2].values()[i] =
        static_cast<float>(std::min(std::max(-dy, 0.0), clip) / clip);
    out[3].values()[i] =
        static_cast<float>(std::min(std::max(dy, 0.0), clip) / clip);
  }
  return out;
}

Frame repr_mg(std::span<const FlowField> flows, const NormalizationSpec& n) {
  check_flow_stack(flows, kMgFrameCount, "repr_mg");
  const int th = flows[0].height;
  const int tw = flows[0].width;
  Frame grid(kMgGridRows * th, kMgGridCols * tw, 1);
  for (int f = 0; f < kMgFrameCount; ++f) {
    const auto channels = flow_to_4ch(flows[f], n);
    const int block = f / kMgGridCols;
    const int col = f % kMgGridCols;
    for (int c = 0; c < 4; ++c) {
      paste_tile(grid, channels[c], block * 4 + c, col);
    }
  }
  return grid;
}

}  // namespace staf
