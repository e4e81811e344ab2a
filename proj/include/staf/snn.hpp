#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "staf/frame.hpp"
#include "staf/rng.hpp"

namespace staf {

inline constexpr double kNoSpike = std::numeric_limits<double>::infinity();

struct SpikeEvent {
  int x = 0;
  int y = 0;
  int channel = 0;
  double t = 0.0;
};

// Sparse latency-coded input: at most one event per (x, y, channel),
// sorted by (t, y, x, channel).
struct SpikeList {
  int height = 0;
  int width = 0;
  int channels = 0;
  double t_exposition = 1.0;
  std::vector<SpikeEvent> events;
};

struct DoGParams {
  double center_sigma = 1.0;
  double surround_sigma = 4.0;
  int kernel_size = 7;  // odd
};

struct LayerGeometry {
  int n_kernels = 128;
  int kernel_h = 5;
  int kernel_w = 5;
  int in_channels = 2;
  int stride = 1;
  int padding = 2;

  void validate() const;
  int out_height(int in_height) const;
  int out_width(int in_width) const;
};

// Convolutional synapse weights in [w_min, w_max] plus per-kernel firing
// thresholds. Weights are laid out [kernel][ky][kx][channel].
struct LayerState {
  LayerGeometry geometry;
  std::vector<double> weights;
  std::vector<double> thresholds;

  std::size_t weight_index(int k, int ky, int kx, int c) const {
    return ((static_cast<std::size_t>(k) * geometry.kernel_h + ky) *
                geometry.kernel_w +
            kx) *
               geometry.in_channels +
           c;
  }
};

struct StdpParams {
  double learning_rate = 0.1;  // initial, annealed per epoch
  double beta = 1.0;           // soft-bound saturation shape
  double tau = 0.1;            // causal window, fraction of t_exposition
  double anneal = 0.95;        // per-epoch learning-rate factor
  int epochs = 100;
  double w_min = 0.0;
  double w_max = 1.0;
};

struct ThresholdParams {
  double target_fire_time = 0.95;
  double learning_rate = 1.0;  // initial, annealed per epoch
  double min_threshold = 1.0;
  double init_mean = 5.0;
  double init_std = 1.0;
  double inhibition = 1.0;     // 1.0 = total per-position inhibition
  double leak_scale = 0.001;   // per-sample decrement factor for idle kernels
};

// On-center/off-center decomposition: center minus surround Gaussian,
// both normalized, truncated to kernel_size; channel 2c is the positive
// response, channel 2c+1 the negative one. The frame is rescaled so its
// largest absolute response maps to 1 (an all-zero response stays zero).
Frame dog_filter(const Frame& f, const DoGParams& p);

// One spike per positive pixel at t = t_exposition * (1 - value); pixels
// at or below min_intensity stay silent.
SpikeList latency_encode(const Frame& f, double t_exposition = 1.0,
                         double min_intensity = 0.0);

struct OutputSpike {
  int x = 0;
  int y = 0;
  int kernel = 0;
  double t = 0.0;
};

struct ForwardResult {
  int out_height = 0;
  int out_width = 0;
  std::vector<OutputSpike> spikes;  // in firing order

  // The sample's winner: the globally earliest output spike. Learning
  // updates apply to this event only.
  const OutputSpike* winner() const {
    return spikes.empty() ? nullptr : &spikes.front();
  }
};

// Event-driven integrate-and-fire convolution with per-position
// winner-take-all: input events are applied one at a time in list order;
// the first kernel whose potential reaches its threshold fires (lowest
// kernel index on simultaneous crossings) and inhibits the position for
// the rest of the sample. At most one output spike per position.
ForwardResult if_conv_forward(const SpikeList& input, const LayerState& layer);

// Dense per-pixel spike-time lookup built from a SpikeList (kNoSpike where
// silent).
struct SpikeTimeGrid {
  int height = 0;
  int width = 0;
  int channels = 0;
  double t_exposition = 1.0;
  std::vector<double> times;

  static SpikeTimeGrid from(const SpikeList& input);
  double at(int y, int x, int c) const {
    return times[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

// Soft-bound STDP on the winning kernel: synapses with a presynaptic spike
// inside the causal window [0, tau * t_exposition] before the winner's
// spike are potentiated, all others (including silent ones) depressed.
// Weights stay clamped to [w_min, w_max].
void stdp_update(LayerState& layer, const OutputSpike& winner,
                 const SpikeTimeGrid& input, const StdpParams& p,
                 double learning_rate);
void stdp_update(LayerState& layer, const OutputSpike& winner,
                 const SpikeList& input, const StdpParams& p,
                 double learning_rate);

// Moves the winning kernel's threshold toward firing at target_fire_time.
void threshold_adapt(LayerState& layer, int kernel, double fire_time,
                     const ThresholdParams& p, double learning_rate);

// Small downward drift for kernels that won nothing this sample.
void threshold_leak(LayerState& layer, const std::vector<bool>& won,
                    const ThresholdParams& p, double learning_rate);

// Weights ~ U(w_min, w_max), thresholds ~ N(init_mean, init_std) clamped to
// min_threshold.
LayerState init_layer(const LayerGeometry& geometry, const StdpParams& sp,
                      const ThresholdParams& tp, Rng& rng);

// Winner statistics per training epoch, for convergence monitoring.
struct TrainStats {
  std::vector<int> winners_per_epoch;
  std::vector<double> mean_winner_time;  // -1 for epochs without winners
};

// Full unsupervised training loop: encode, forward, then one STDP and one
// threshold update on each sample's winner, an idle leak for the kernels
// that won nothing, and annealed rates per epoch. Deterministic for a
// fixed seed.
LayerState train_layer(const std::vector<Frame>& samples,
                       const LayerGeometry& geometry, const StdpParams& sp,
                       const ThresholdParams& tp, std::uint64_t seed,
                       double t_exposition = 1.0, double min_intensity = 0.0,
                       TrainStats* stats = nullptr);
LayerState train_layer_spikes(const std::vector<SpikeList>& samples,
                              const LayerGeometry& geometry,
                              const StdpParams& sp, const ThresholdParams& tp,
                              std::uint64_t seed, TrainStats* stats = nullptr);

// Earliest-spike salience (1 - t/t_exposition, 0 where silent) max-pooled
// over non-overlapping window x window cells (partial cells at the edges),
// flattened kernel-major then row-major.
std::vector<float> pool_and_flatten(const ForwardResult& fw, int n_kernels,
                                    int window, double t_exposition = 1.0);

// encode -> forward -> pool.
std::vector<float> extract_features(const LayerState& layer, const Frame& f,
                                    int pool_window, double t_exposition = 1.0,
                                    double min_intensity = 0.0);

// Weights and thresholds as tensors next to a text metadata sidecar:
// <base>, <base>.thresholds.staf and <base>.meta.
void save_layer(const std::filesystem::path& base, const LayerState& layer,
                const std::vector<std::pair<std::string, std::string>>& meta);
LayerState load_layer(const std::filesystem::path& base);

}  // namespace staf
