#pragma once

#include <cstdint>
#include <vector>

#include "staf/frame.hpp"
#include "staf/rng.hpp"

namespace staf {

struct PrepConfig {
  double motion_threshold = 0.01;  // on mean background-subtracted intensity
  int skip = 2;                    // frames dropped between kept frames
  int sample_len = 10;             // frames per sample
  int overlap_stride = 10;         // frames between successive sample starts

  void validate() const;
};

// Per-pixel absolute difference |f_t1 - f_t|.
Frame background_subtract(const Frame& f_t, const Frame& f_t1);

// Arithmetic mean over all values.
double motion_score(const Frame& f);

// Keeps frames whose motion score exceeds the threshold, then every
// (skip+1)-th survivor, preserving order.
std::vector<Frame> select_frames(const std::vector<Frame>& seq,
                                 const PrepConfig& cfg);

// Indices into `scores` surviving threshold + skip selection; shared by
// select_frames and pipelines that carry side data per frame.
std::vector<std::size_t> select_indices(const std::vector<double>& scores,
                                        const PrepConfig& cfg);

// Fixed-length windows starting at multiples of overlap_stride; windows
// shorter than sample_len are discarded.
std::vector<std::vector<Frame>> assemble_samples(const std::vector<Frame>& seq,
                                                 const PrepConfig& cfg);

// Per-pixel N(0, sigma) noise, clamped back to [0, 1].
Frame add_gaussian_noise(const Frame& f, double sigma, Rng& rng);
std::vector<Frame> add_gaussian_noise(const std::vector<Frame>& seq,
                                      double sigma, std::uint64_t seed);

std::vector<Frame> flip_sequence(const std::vector<Frame>& seq);

}  // namespace staf
