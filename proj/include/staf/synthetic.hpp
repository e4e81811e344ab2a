#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "staf/dataset.hpp"

namespace staf {

// One moving-bar class: the bar translates by (dx, dy) pixels per frame,
// wrapping around the frame edges.
struct SyntheticClass {
  std::string name;
  double dx = 0.0;
  double dy = 0.0;
};

struct SyntheticConfig {
  int frame_size = 64;
  int frames_per_sequence = 52;
  int train_sequences = 200;  // total, spread round-robin over classes
  int test_sequences = 100;
  double bar_sigma = 3.0;     // Gaussian cross-section of the bar
  double bar_sigma_jitter = 1.0;     // per-sequence, uniform +-
  double bar_amplitude = 0.9;
  double bar_amplitude_jitter = 0.2; // per-sequence, uniform downward
  double noise_sigma = 0.01;
  std::vector<SyntheticClass> classes;  // default_synthetic_classes() if empty
};

// Four directions plus two extra speeds of the rightward bar.
std::vector<SyntheticClass> default_synthetic_classes();

// Renders the dataset under root as <root>/<class>/<seqTag>/frame_NNNNN.pgm
// and writes train.manifest / test.manifest beside it. Train and test
// sequences carry disjoint subject tags. Deterministic for a fixed seed.
void generate_synthetic(const std::filesystem::path& root,
                        const SyntheticConfig& cfg, std::uint64_t seed);

}  // namespace staf
