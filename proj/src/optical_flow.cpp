#include "staf/optical_flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "staf/errors.hpp"
#include "staf/raster.hpp"
#include "staf/tensor_io.hpp"

namespace staf {
namespace {

// Windows with no usable texture count as singular and keep the prior
// estimate. "No usable texture" is judged against the frame itself: a
// windowed normal-matrix energy far below the frame's strongest window is
// noise, and solving there returns displacement of order noise/noise.
// Everything above the floor is solved with a small eigenvalue shift,
// which recovers the normal component of one-dimensional texture while
// damping the unobservable direction.
constexpr double kTextureFraction = 1e-2;
constexpr double kTinyTrace = 1e-20;
constexpr double kRegularization = 1e-3;

struct Moments1d {
  std::vector<double> taps;  // normalized Gaussian
  double s2 = 0.0;           // sum g*i^2
  double s4 = 0.0;           // sum g*i^4
};

Moments1d applicability(int radius, double sigma) {
  Moments1d m;
  m.taps = gaussian_taps(sigma, radius);
  for (int i = -radius; i <= radius; ++i) {
    const double g = m.taps[i + radius];
    m.s2 += g * i * i;
    m.s4 += g * i * i * i * i;
  }
  return m;
}

// Inverse of the symmetric Gram matrix [[1, s2, s2], [s2, s4, q], [s2, q, s4]]
// coupling (c, cxx, cyy); q = s2^2 for a separable applicability.
std::array<double, 9> gram_inverse(double s2, double s4) {
  const double q = s2 * s2;
  const double a[9] = {1.0, s2, s2, s2, s4, q, s2, q, s4};
  const double det = a[0] * (a[4] * a[8] - a[5] * a[7]) -
                     a[1] * (a[3] * a[8] - a[5] * a[6]) +
                     a[2] * (a[3] * a[7] - a[4] * a[6]);
  std::array<double, 9> inv{};
  inv[0] = (a[4] * a[8] - a[5] * a[7]) / det;
  inv[1] = (a[2] * a[7] - a[1] * a[8]) / det;
  inv[2] = (a[1] * a[5] - a[2] * a[4]) / det;
  inv[3] = (a[5] * a[6] - a[3] * a[8]) / det;
  inv[4] = (a[0] * a[8] - a[2] * a[6]) / det;
  inv[5] = (a[2] * a[3] - a[0] * a[5]) / det;
  inv[6] = (a[3] * a[7] - a[4] * a[6]) / det;
  inv[7] = (a[1] * a[6] - a[0] * a[7]) / det;
  inv[8] = (a[0] * a[4] - a[1] * a[3]) / det;
  return inv;
}

// Sliding box sum over interleaved planes, replicated edges, in place.
void box_sum_rows(std::vector<double>& m, int h, int w, int planes,
                  int radius) {
  std::vector<double> row(static_cast<std::size_t>(w) * planes);
  std::vector<double> acc(planes);
  for (int y = 0; y < h; ++y) {
    double* base = m.data() + static_cast<std::size_t>(y) * w * planes;
    std::copy(base, base + static_cast<std::size_t>(w) * planes, row.begin());
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int j = -radius; j <= radius; ++j) {
      const int xx = std::clamp(j, 0, w - 1);
      for (int p = 0; p < planes; ++p) acc[p] += row[xx * planes + p];
    }
    for (int x = 0; x < w; ++x) {
      for (int p = 0; p < planes; ++p) base[x * planes + p] = acc[p];
      const int add = std::clamp(x + 1 + radius, 0, w - 1);
      const int sub = std::clamp(x - radius, 0, w - 1);
      for (int p = 0; p < planes; ++p) {
        acc[p] += row[add * planes + p] - row[sub * planes + p];
      }
    }
  }
}

void box_sum_cols(std::vector<double>& m, int h, int w, int planes,
                  int radius) {
  const std::size_t stride = static_cast<std::size_t>(w) * planes;
  std::vector<double> src(m);
  std::vector<double> acc(stride, 0.0);
  for (int j = -radius; j <= radius; ++j) {
    const int yy = std::clamp(j, 0, h - 1);
    const double* row = src.data() + yy * stride;
    for (std::size_t i = 0; i < stride; ++i) acc[i] += row[i];
  }
  for (int y = 0; y < h; ++y) {
    std::copy(acc.begin(), acc.end(), m.begin() + y * stride);
    const int add = std::clamp(y + 1 + radius, 0, h - 1);
    const int sub = std::clamp(y - radius, 0, h - 1);
    const double* radd = src.data() + add * stride;
    const double* rsub = src.data() + sub * stride;
    for (std::size_t i = 0; i < stride; ++i) acc[i] += radd[i] - rsub[i];
  }
}

Frame blur_frame_1ch(const Frame& f, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::lround(2.0 * sigma)));
  const auto taps = gaussian_taps(sigma, radius);
  std::vector<double> plane(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) plane[i] = f.values()[i];
  const auto smoothed = separable_correlate(plane, f.height(), f.width(), taps);
  std::vector<float> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    out[i] = clamp01(static_cast<float>(smoothed[i]));
  }
  return Frame(f.height(), f.width(), 1, std::move(out));
}

FlowField resize_flow(const FlowField& f, int new_h, int new_w) {
  FlowField out(new_h, new_w);
  resize_plane_bilinear(f.dx.data(), f.height, f.width, out.dx.data(), new_h,
                        new_w);
  resize_plane_bilinear(f.dy.data(), f.height, f.width, out.dy.data(), new_h,
                        new_w);
  const float rx = static_cast<float>(new_w) / f.width;
  const float ry = static_cast<float>(new_h) / f.height;
  for (float& v : out.dx) v *= rx;
  for (float& v : out.dy) v *= ry;
  return out;
}

}  // namespace

void FlowParams::validate() const {
  if (pyramid_levels < 1) {
    throw std::invalid_argument("FlowParams: pyramid_levels must be >= 1");
  }
  if (!(pyramid_scale > 0.0 && pyramid_scale < 1.0)) {
    throw std::invalid_argument("FlowParams: pyramid_scale must be in (0,1)");
  }
  if (window_size < 3 || window_size % 2 == 0) {
    throw std::invalid_argument("FlowParams: window_size must be odd >= 3");
  }
  if (poly_n < 3 || poly_n % 2 == 0) {
    throw std::invalid_argument("FlowParams: poly_n must be odd >= 3");
  }
  if (iterations < 1) {
    throw std::invalid_argument("FlowParams: iterations must be >= 1");
  }
  if (poly_sigma <= 0.0) {
    throw std::invalid_argument("FlowParams: poly_sigma must be positive");
  }
}

PolyExpansion polynomial_expansion(const Frame& f, int poly_n,
                                   double poly_sigma) {
  if (f.channels() != 1) {
    throw std::invalid_argument("polynomial_expansion: single-channel only");
  }
  if (poly_n < 3 || poly_n % 2 == 0) {
    throw std::invalid_argument("polynomial_expansion: poly_n must be odd >= 3");
  }
  if (f.height() < poly_n || f.width() < poly_n) {
    throw std::invalid_argument("polynomial_expansion: frame smaller than poly_n");
  }

  const int h = f.height();
  const int w = f.width();
  const int r = poly_n / 2;
  const Moments1d m = applicability(r, poly_sigma);
  const auto inv = gram_inverse(m.s2, m.s4);

  // Vertical pass: plain, y-weighted and y^2-weighted sums per column.
  std::vector<double> tmp(static_cast<std::size_t>(h) * w * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double v0 = 0.0, v1 = 0.0, v2 = 0.0;
      for (int k = -r; k <= r; ++k) {
        const int yy = std::clamp(y + k, 0, h - 1);
        const double g = m.taps[k + r];
        const double val = f.at(yy, x);
        v0 += g * val;
        v1 += g * k * val;
        v2 += g * k * k * val;
      }
      double* t = tmp.data() + (static_cast<std::size_t>(y) * w + x) * 3;
      t[0] = v0;
      t[1] = v1;
      t[2] = v2;
    }
  }

  PolyExpansion out;
  out.height = h;
  out.width = w;
  out.coeffs.resize(static_cast<std::size_t>(h) * w * 6);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double m1 = 0.0, mx = 0.0, mxx = 0.0, my = 0.0, mxy = 0.0, myy = 0.0;
      for (int j = -r; j <= r; ++j) {
        const int xx = std::clamp(x + j, 0, w - 1);
        const double g = m.taps[j + r];
        const double* t = tmp.data() + (static_cast<std::size_t>(y) * w + xx) * 3;
        m1 += g * t[0];
        mx += g * j * t[0];
        mxx += g * j * j * t[0];
        my += g * t[1];
        mxy += g * j * t[1];
        myy += g * t[2];
      }
      double* c = out.coeffs.data() + (static_cast<std::size_t>(y) * w + x) * 6;
      const double cxx = inv[3] * m1 + inv[4] * mxx + inv[5] * myy;
      const double cyy = inv[6] * m1 + inv[7] * mxx + inv[8] * myy;
      c[PolyExpansion::kAxx] = cxx;
      c[PolyExpansion::kAyy] = cyy;
      c[PolyExpansion::kAxy] = 0.5 * mxy / (m.s2 * m.s2);
      c[PolyExpansion::kBx] = mx / m.s2;
      c[PolyExpansion::kBy] = my / m.s2;
      c[PolyExpansion::kC] = inv[0] * m1 + inv[1] * mxx + inv[2] * myy;
    }
  }
  return out;
}

SingleScaleResult flow_single_scale(const PolyExpansion& prev,
                                    const PolyExpansion& next,
                                    int window_size, const FlowField& prior) {
  if (prev.height != next.height || prev.width != next.width) {
    throw std::invalid_argument("flow_single_scale: expansion dims differ");
  }
  if (prior.height != prev.height || prior.width != prev.width) {
    throw std::invalid_argument("flow_single_scale: prior dims differ");
  }
  if (window_size < 1) {
    throw std::invalid_argument("flow_single_scale: window_size must be >= 1");
  }

  const int h = prev.height;
  const int w = prev.width;
  // Per pixel: the components of G = A^2 and h = A*db.
  std::vector<double> m(static_cast<std::size_t>(h) * w * 5);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = prior.index(y, x);
      const double dx0 = prior.dx[i];
      const double dy0 = prior.dy[i];
      const int xr = std::clamp(
          static_cast<int>(std::lround(x + dx0)), 0, w - 1);
      const int yr = std::clamp(
          static_cast<int>(std::lround(y + dy0)), 0, h - 1);

      const double* p0 = prev.at(y, x);
      const double* p1 = next.at(yr, xr);
      const double axx = 0.5 * (p0[PolyExpansion::kAxx] + p1[PolyExpansion::kAxx]);
      const double ayy = 0.5 * (p0[PolyExpansion::kAyy] + p1[PolyExpansion::kAyy]);
      const double axy = 0.5 * (p0[PolyExpansion::kAxy] + p1[PolyExpansion::kAxy]);
      const double dbx = 0.5 * (p0[PolyExpansion::kBx] - p1[PolyExpansion::kBx]) +
                         axx * dx0 + axy * dy0;
      const double dby = 0.5 * (p0[PolyExpansion::kBy] - p1[PolyExpansion::kBy]) +
                         axy * dx0 + ayy * dy0;

      double* mm = m.data() + (static_cast<std::size_t>(y) * w + x) * 5;
      mm[0] = axx * axx + axy * axy;          // G11
      mm[1] = (axx + ayy) * axy;              // G12
      mm[2] = ayy * ayy + axy * axy;          // G22
      mm[3] = axx * dbx + axy * dby;          // h1
      mm[4] = axy * dbx + ayy * dby;          // h2
    }
  }

  const int radius = window_size / 2;
  box_sum_rows(m, h, w, 5, radius);
  box_sum_cols(m, h, w, 5, radius);
  const double inv_area = 1.0 / (static_cast<double>(window_size) * window_size);

  double max_trace = 0.0;
  for (std::size_t px = 0; px < static_cast<std::size_t>(h) * w; ++px) {
    max_trace = std::max(max_trace, (m[px * 5] + m[px * 5 + 2]) * inv_area);
  }
  const double trace_floor =
      std::max(kTextureFraction * max_trace, kTinyTrace);

  SingleScaleResult res;
  res.flow = FlowField(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double* mm = m.data() + (static_cast<std::size_t>(y) * w + x) * 5;
      const double g11 = mm[0] * inv_area;
      const double g12 = mm[1] * inv_area;
      const double g22 = mm[2] * inv_area;
      const double h1 = mm[3] * inv_area;
      const double h2 = mm[4] * inv_area;
      const double trace = g11 + g22;
      const std::size_t i = res.flow.index(y, x);
      if (!(trace > trace_floor)) {
        res.flow.dx[i] = prior.dx[i];
        res.flow.dy[i] = prior.dy[i];
        ++res.singular_fallbacks;
        continue;
      }
      const double reg = kRegularization * trace;
      const double r11 = g11 + reg;
      const double r22 = g22 + reg;
      const double det = r11 * r22 - g12 * g12;
      const double dx = (r22 * h1 - g12 * h2) / det;
      const double dy = (r11 * h2 - g12 * h1) / det;
      if (!std::isfinite(dx) || !std::isfinite(dy)) {
        res.flow.dx[i] = prior.dx[i];
        res.flow.dy[i] = prior.dy[i];
        ++res.singular_fallbacks;
        continue;
      }
      res.flow.dx[i] = static_cast<float>(dx);
      res.flow.dy[i] = static_cast<float>(dy);
    }
  }
  return res;
}

FlowField farneback_flow(const Frame& prev, const Frame& next,
                         const FlowParams& params) {
  params.validate();
  if (!prev.same_shape(next)) {
    throw std::invalid_argument("farneback_flow: frame dims differ");
  }
  if (prev.channels() != 1) {
    throw std::invalid_argument("farneback_flow: single-channel only");
  }

  // Drop levels that would shrink the frame below the expansion window.
  int levels = params.pyramid_levels;
  while (levels > 1) {
    const double s = std::pow(params.pyramid_scale, levels - 1);
    if (std::lround(prev.height() * s) >= params.poly_n &&
        std::lround(prev.width() * s) >= params.poly_n) {
      break;
    }
    --levels;
  }

  FlowField flow;
  for (int level = levels - 1; level >= 0; --level) {
    const double scale = std::pow(params.pyramid_scale, level);
    const int lh = level == 0
                       ? prev.height()
                       : static_cast<int>(std::lround(prev.height() * scale));
    const int lw = level == 0
                       ? prev.width()
                       : static_cast<int>(std::lround(prev.width() * scale));

    Frame a = prev;
    Frame b = next;
    if (level > 0) {
      const double sigma = (1.0 / scale - 1.0) * 0.5;
      a = resize_bilinear(blur_frame_1ch(a, sigma), lh, lw);
      b = resize_bilinear(blur_frame_1ch(b, sigma), lh, lw);
    }

    const PolyExpansion ea =
        polynomial_expansion(a, params.poly_n, params.poly_sigma);
    const PolyExpansion eb =
        polynomial_expansion(b, params.poly_n, params.poly_sigma);

    FlowField prior = flow.dx.empty() ? FlowField(lh, lw)
                                      : resize_flow(flow, lh, lw);
    for (int it = 0; it < params.iterations; ++it) {
      prior = flow_single_scale(ea, eb, params.window_size, prior).flow;
    }
    flow = std::move(prior);
  }
  return flow;
}

void write_flow_tensor(const std::filesystem::path& path, const FlowField& f) {
  const std::uint32_t dims[3] = {static_cast<std::uint32_t>(f.height),
                                 static_cast<std::uint32_t>(f.width), 2};
  std::vector<float> interleaved(f.dx.size() * 2);
  for (std::size_t i = 0; i < f.dx.size(); ++i) {
    interleaved[2 * i] = f.dx[i];
    interleaved[2 * i + 1] = f.dy[i];
  }
  write_tensor(path, dims, interleaved);
}

FlowField read_flow_tensor(const std::filesystem::path& path) {
  TensorData t = read_tensor(path);
  if (t.dims.size() != 3 || t.dims[2] != 2) {
    throw FormatError("read_flow_tensor: expected (h, w, 2) dims");
  }
  FlowField f(static_cast<int>(t.dims[0]), static_cast<int>(t.dims[1]));
  for (std::size_t i = 0; i < f.dx.size(); ++i) {
    f.dx[i] = t.values[2 * i];
    f.dy[i] = t.values[2 * i + 1];
  }
  return f;
}

}  // namespace staf
