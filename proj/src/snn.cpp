#include "staf/snn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "staf/errors.hpp"
#include "staf/raster.hpp"
#include "staf/tensor_io.hpp"

namespace staf {
namespace {

int ceil_div(int a, int b) { return a >= 0 ? (a + b - 1) / b : -(-a / b); }

// Weights transposed to [ky][kx][channel][kernel] so the per-event inner
// loop walks contiguous memory.
std::vector<double> transpose_weights(const LayerState& layer) {
  const LayerGeometry& g = layer.geometry;
  std::vector<double> wt(layer.weights.size());
  for (int k = 0; k < g.n_kernels; ++k) {
    for (int ky = 0; ky < g.kernel_h; ++ky) {
      for (int kx = 0; kx < g.kernel_w; ++kx) {
        for (int c = 0; c < g.in_channels; ++c) {
          const std::size_t src = layer.weight_index(k, ky, kx, c);
          const std::size_t dst =
              ((static_cast<std::size_t>(ky) * g.kernel_w + kx) *
                   g.in_channels +
               c) *
                  g.n_kernels +
              k;
          wt[dst] = layer.weights[src];
        }
      }
    }
  }
  return wt;
}

}  // namespace

void LayerGeometry::validate() const {
  if (n_kernels < 1 || kernel_h < 1 || kernel_w < 1 || in_channels < 1) {
    throw std::invalid_argument("LayerGeometry: counts must be >= 1");
  }
  if (stride < 1) throw std::invalid_argument("LayerGeometry: stride must be >= 1");
  if (padding < 0) throw std::invalid_argument("LayerGeometry: padding must be >= 0");
}

int LayerGeometry::out_height(int in_height) const {
  return (in_height + 2 * padding - kernel_h) / stride + 1;
}

int LayerGeometry::out_width(int in_width) const {
  return (in_width + 2 * padding - kernel_w) / stride + 1;
}

Frame dog_filter(const Frame& f, const DoGParams& p) {
  if (p.kernel_size < 1 || p.kernel_size % 2 == 0) {
    throw std::invalid_argument("dog_filter: kernel_size must be odd >= 1");
  }
  if (!(p.center_sigma < p.surround_sigma)) {
    throw std::invalid_argument("dog_filter: center_sigma must be < surround_sigma");
  }
  const int radius = p.kernel_size / 2;
  const auto center = gaussian_taps(p.center_sigma, radius);
  const auto surround = gaussian_taps(p.surround_sigma, radius);

  const int h = f.height();
  const int w = f.width();
  const int c_in = f.channels();
  std::vector<std::vector<double>> responses(c_in);
  double max_abs = 0.0;
  std::vector<double> plane(static_cast<std::size_t>(h) * w);
  for (int c = 0; c < c_in; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        plane[static_cast<std::size_t>(y) * w + x] = f.at(y, x, c);
      }
    }
    const auto on = separable_correlate(plane, h, w, center);
    const auto off = separable_correlate(plane, h, w, surround);
    responses[c].resize(plane.size());
    for (std::size_t i = 0; i < plane.size(); ++i) {
      responses[c][i] = on[i] - off[i];
      max_abs = std::max(max_abs, std::fabs(responses[c][i]));
    }
  }

  // Responses at numerical noise level count as zero, so flat frames do
  // not get their rounding dust rescaled to full range.
  const double scale = max_abs > 1e-12 ? 1.0 / max_abs : 0.0;
  Frame out(h, w, 2 * c_in);
  for (int c = 0; c < c_in; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double r = responses[c][static_cast<std::size_t>(y) * w + x] * scale;
        out.at(y, x, 2 * c) = clamp01(static_cast<float>(std::max(r, 0.0)));
        out.at(y, x, 2 * c + 1) = clamp01(static_cast<float>(std::max(-r, 0.0)));
      }
    }
  }
  return out;
}

SpikeList latency_encode(const Frame& f, double t_exposition,
                         double min_intensity) {
  if (t_exposition <= 0.0) {
    throw std::invalid_argument("latency_encode: t_exposition must be > 0");
  }
  SpikeList out;
  out.height = f.height();
  out.width = f.width();
  out.channels = f.channels();
  out.t_exposition = t_exposition;
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      for (int c = 0; c < f.channels(); ++c) {
        const float v = f.at(y, x, c);
        if (v > min_intensity && v > 0.0f) {
          out.events.push_back({x, y, c, t_exposition * (1.0 - v)});
        }
      }
    }
  }
  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const SpikeEvent& a, const SpikeEvent& b) {
                     return a.t < b.t;
                   });
  return out;
}

ForwardResult if_conv_forward(const SpikeList& input, const LayerState& layer) {
  const LayerGeometry& g = layer.geometry;
  g.validate();
  const int out_h = g.out_height(input.height);
  const int out_w = g.out_width(input.width);
  if (out_h < 1 || out_w < 1) {
    throw std::invalid_argument("if_conv_forward: input smaller than kernel");
  }
  if (input.channels != g.in_channels) {
    throw std::invalid_argument("if_conv_forward: channel count mismatch");
  }

  const std::vector<double> wt = transpose_weights(layer);
  const int nk = g.n_kernels;
  std::vector<double> pot(static_cast<std::size_t>(out_h) * out_w * nk, 0.0);
  std::vector<int> winner(static_cast<std::size_t>(out_h) * out_w, -1);

  ForwardResult res;
  res.out_height = out_h;
  res.out_width = out_w;

  for (const SpikeEvent& e : input.events) {
    const int oy_min = std::max(0, ceil_div(e.y + g.padding - g.kernel_h + 1, g.stride));
    const int oy_max = std::min(out_h - 1, (e.y + g.padding) / g.stride);
    const int ox_min = std::max(0, ceil_div(e.x + g.padding - g.kernel_w + 1, g.stride));
    const int ox_max = std::min(out_w - 1, (e.x + g.padding) / g.stride);
    for (int oy = oy_min; oy <= oy_max; ++oy) {
      const int ky = e.y + g.padding - oy * g.stride;
      for (int ox = ox_min; ox <= ox_max; ++ox) {
        const std::size_t pos = static_cast<std::size_t>(oy) * out_w + ox;
        if (winner[pos] >= 0) continue;
        const int kx = e.x + g.padding - ox * g.stride;
        const double* wrow =
            wt.data() +
            ((static_cast<std::size_t>(ky) * g.kernel_w + kx) * g.in_channels +
             e.channel) *
                nk;
        double* prow = pot.data() + pos * nk;
        for (int k = 0; k < nk; ++k) {
          prow[k] += wrow[k];
          if (prow[k] >= layer.thresholds[k]) {
            winner[pos] = k;
            res.spikes.push_back({ox, oy, k, e.t});
            break;
          }
        }
      }
    }
  }
  return res;
}

SpikeTimeGrid SpikeTimeGrid::from(const SpikeList& input) {
  SpikeTimeGrid grid;
  grid.height = input.height;
  grid.width = input.width;
  grid.channels = input.channels;
  grid.t_exposition = input.t_exposition;
  grid.times.assign(static_cast<std::size_t>(input.height) * input.width *
                        input.channels,
                    kNoSpike);
  for (const SpikeEvent& e : input.events) {
    grid.times[(static_cast<std::size_t>(e.y) * input.width + e.x) *
                   input.channels +
               e.channel] = e.t;
  }
  return grid;
}

void stdp_update(LayerState& layer, const OutputSpike& winner,
                 const SpikeTimeGrid& input, const StdpParams& p,
                 double learning_rate) {
  const LayerGeometry& g = layer.geometry;
  const double range = p.w_max - p.w_min;
  const double window = p.tau * input.t_exposition;
  for (int ky = 0; ky < g.kernel_h; ++ky) {
    const int iy = winner.y * g.stride - g.padding + ky;
    for (int kx = 0; kx < g.kernel_w; ++kx) {
      const int ix = winner.x * g.stride - g.padding + kx;
      const bool inside =
          iy >= 0 && iy < input.height && ix >= 0 && ix < input.width;
      for (int c = 0; c < g.in_channels; ++c) {
        const double t_pre = inside ? input.at(iy, ix, c) : kNoSpike;
        const double dt = winner.t - t_pre;
        double& w = layer.weights[layer.weight_index(winner.kernel, ky, kx, c)];
        if (dt >= 0.0 && dt <= window) {
          w += learning_rate * std::exp(-p.beta * (w - p.w_min) / range);
        } else {
          w -= learning_rate * std::exp(-p.beta * (p.w_max - w) / range);
        }
        w = std::clamp(w, p.w_min, p.w_max);
      }
    }
  }
}

void stdp_update(LayerState& layer, const OutputSpike& winner,
                 const SpikeList& input, const StdpParams& p,
                 double learning_rate) {
  stdp_update(layer, winner, SpikeTimeGrid::from(input), p, learning_rate);
}

void threshold_adapt(LayerState& layer, int kernel, double fire_time,
                     const ThresholdParams& p, double learning_rate) {
  double& th = layer.thresholds[kernel];
  th = std::max(p.min_threshold,
                th + learning_rate * (p.target_fire_time - fire_time));
}

void threshold_leak(LayerState& layer, const std::vector<bool>& won,
                    const ThresholdParams& p, double learning_rate) {
  for (std::size_t k = 0; k < layer.thresholds.size(); ++k) {
    if (won[k]) continue;
    layer.thresholds[k] =
        std::max(p.min_threshold,
                 layer.thresholds[k] - p.leak_scale * learning_rate);
  }
}

LayerState init_layer(const LayerGeometry& geometry, const StdpParams& sp,
                      const ThresholdParams& tp, Rng& rng) {
  geometry.validate();
  LayerState layer;
  layer.geometry = geometry;
  const std::size_t n = static_cast<std::size_t>(geometry.n_kernels) *
                        geometry.kernel_h * geometry.kernel_w *
                        geometry.in_channels;
  layer.weights.resize(n);
  for (double& w : layer.weights) w = rng.uniform(sp.w_min, sp.w_max);
  layer.thresholds.resize(geometry.n_kernels);
  for (double& th : layer.thresholds) {
    th = std::max(tp.min_threshold, rng.normal(tp.init_mean, tp.init_std));
  }
  return layer;
}

LayerState train_layer_spikes(const std::vector<SpikeList>& samples,
                              const LayerGeometry& geometry,
                              const StdpParams& sp, const ThresholdParams& tp,
                              std::uint64_t seed, TrainStats* stats) {
  if (samples.empty()) {
    throw std::invalid_argument("train_layer: empty sample list");
  }
  for (const SpikeList& s : samples) {
    if (s.channels != geometry.in_channels) {
      throw std::invalid_argument("train_layer: sample channels mismatch");
    }
  }

  Rng rng(seed);
  LayerState layer = init_layer(geometry, sp, tp, rng);
  double eta_w = sp.learning_rate;
  double eta_th = tp.learning_rate;
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<bool> won(geometry.n_kernels);

  for (int epoch = 0; epoch < sp.epochs; ++epoch) {
    rng.shuffle(order);
    int winner_count = 0;
    double winner_time_sum = 0.0;
    for (std::size_t idx : order) {
      const SpikeList& sample = samples[idx];
      const ForwardResult fw = if_conv_forward(sample, layer);
      won.assign(geometry.n_kernels, false);
      if (const OutputSpike* winner = fw.winner()) {
        const SpikeTimeGrid grid = SpikeTimeGrid::from(sample);
        stdp_update(layer, *winner, grid, sp, eta_w);
        threshold_adapt(layer, winner->kernel, winner->t, tp, eta_th);
        won[winner->kernel] = true;
        ++winner_count;
        winner_time_sum += winner->t;
      }
      threshold_leak(layer, won, tp, eta_th);
    }
    eta_w *= sp.anneal;
    eta_th *= sp.anneal;
    if (stats != nullptr) {
      stats->winners_per_epoch.push_back(winner_count);
      stats->mean_winner_time.push_back(
          winner_count > 0 ? winner_time_sum / winner_count : -1.0);
    }
  }
  return layer;
}

LayerState train_layer(const std::vector<Frame>& samples,
                       const LayerGeometry& geometry, const StdpParams& sp,
                       const ThresholdParams& tp, std::uint64_t seed,
                       double t_exposition, double min_intensity,
                       TrainStats* stats) {
  std::vector<SpikeList> spikes;
  spikes.reserve(samples.size());
  for (const Frame& f : samples) {
    spikes.push_back(latency_encode(f, t_exposition, min_intensity));
  }
  return train_layer_spikes(spikes, geometry, sp, tp, seed, stats);
}

std::vector<float> pool_and_flatten(const ForwardResult& fw, int n_kernels,
                                    int window, double t_exposition) {
  if (window < 1) {
    throw std::invalid_argument("pool_and_flatten: window must be >= 1");
  }
  const int h = fw.out_height;
  const int w = fw.out_width;
  std::vector<float> map(static_cast<std::size_t>(n_kernels) * h * w, 0.0f);
  for (const OutputSpike& s : fw.spikes) {
    map[(static_cast<std::size_t>(s.kernel) * h + s.y) * w + s.x] =
        static_cast<float>(1.0 - s.t / t_exposition);
  }

  const int ph = (h + window - 1) / window;
  const int pw = (w + window - 1) / window;
  std::vector<float> out(static_cast<std::size_t>(n_kernels) * ph * pw, 0.0f);
  for (int k = 0; k < n_kernels; ++k) {
    for (int py = 0; py < ph; ++py) {
      for (int px = 0; px < pw; ++px) {
        float best = 0.0f;
        const int y_end = std::min(h, (py + 1) * window);
        const int x_end = std::min(w, (px + 1) * window);
        for (int y = py * window; y < y_end; ++y) {
          for (int x = px * window; x < x_end; ++x) {
            best = std::max(best,
                            map[(static_cast<std::size_t>(k) * h + y) * w + x]);
          }
        }
        out[(static_cast<std::size_t>(k) * ph + py) * pw + px] = best;
      }
    }
  }
  return out;
}

std::vector<float> extract_features(const LayerState& layer, const Frame& f,
                                    int pool_window, double t_exposition,
                                    double min_intensity) {
  const SpikeList spikes = latency_encode(f, t_exposition, min_intensity);
  const ForwardResult fw = if_conv_forward(spikes, layer);
  return pool_and_flatten(fw, layer.geometry.n_kernels, pool_window,
                          t_exposition);
}

void save_layer(const std::filesystem::path& base, const LayerState& layer,
                const std::vector<std::pair<std::string, std::string>>& meta) {
  const LayerGeometry& g = layer.geometry;
  const std::uint32_t wdims[4] = {static_cast<std::uint32_t>(g.n_kernels),
                                  static_cast<std::uint32_t>(g.kernel_h),
                                  static_cast<std::uint32_t>(g.kernel_w),
                                  static_cast<std::uint32_t>(g.in_channels)};
  std::vector<float> w32(layer.weights.begin(), layer.weights.end());
  write_tensor(base, wdims, w32);

  const std::uint32_t tdims[1] = {static_cast<std::uint32_t>(g.n_kernels)};
  std::vector<float> t32(layer.thresholds.begin(), layer.thresholds.end());
  std::filesystem::path tpath = base;
  tpath.replace_extension(".thresholds.staf");
  write_tensor(tpath, tdims, t32);

  std::filesystem::path mpath = base;
  mpath.replace_extension(".meta");
  std::ofstream out(mpath, std::ios::trunc);
  if (!out) throw FormatError("save_layer: cannot open " + mpath.string());
  out << "stride=" << g.stride << "\n";
  out << "padding=" << g.padding << "\n";
  for (const auto& [key, value] : meta) out << key << "=" << value << "\n";
}

LayerState load_layer(const std::filesystem::path& base) {
  TensorData w = read_tensor(base);
  if (w.dims.size() != 4) {
    throw FormatError("load_layer: weights must have 4 dims");
  }
  std::filesystem::path tpath = base;
  tpath.replace_extension(".thresholds.staf");
  TensorData t = read_tensor(tpath);
  if (t.dims.size() != 1 || t.dims[0] != w.dims[0]) {
    throw FormatError("load_layer: threshold dims mismatch");
  }

  LayerState layer;
  layer.geometry.n_kernels = static_cast<int>(w.dims[0]);
  layer.geometry.kernel_h = static_cast<int>(w.dims[1]);
  layer.geometry.kernel_w = static_cast<int>(w.dims[2]);
  layer.geometry.in_channels = static_cast<int>(w.dims[3]);
  layer.weights.assign(w.values.begin(), w.values.end());
  layer.thresholds.assign(t.values.begin(), t.values.end());

  std::filesystem::path mpath = base;
  mpath.replace_extension(".meta");
  std::ifstream in(mpath);
  if (!in) throw FormatError("load_layer: cannot open " + mpath.string());
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "stride") layer.geometry.stride = std::stoi(value);
    if (key == "padding") layer.geometry.padding = std::stoi(value);
  }
  layer.geometry.validate();
  return layer;
}

}  // namespace staf
