#include "staf/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "staf/rng.hpp"

namespace staf {
namespace {

namespace fs = std::filesystem;

double circular_distance(double a, double b, double period) {
  double d = std::fabs(a - b);
  d = std::fmod(d, period);
  return std::min(d, period - d);
}

Frame render_bar(int size, const SyntheticClass& cls, double pos, double sigma,
                 double amplitude, double noise_sigma, Rng& rng) {
  const bool horizontal_motion = cls.dx != 0.0;
  Frame f(size, size, 1);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double coord = horizontal_motion ? x : y;
      const double d = circular_distance(coord, pos, size);
      double v = amplitude * std::exp(-(d * d) / (2.0 * sigma * sigma));
      if (noise_sigma > 0.0) v += rng.normal(0.0, noise_sigma);
      f.at(y, x) = clamp01(static_cast<float>(v));
    }
  }
  return f;
}

std::string zero_pad(int value, int width) {
  std::ostringstream out;
  out << std::setw(width) << std::setfill('0') << value;
  return out.str();
}

}  // namespace

std::vector<SyntheticClass> default_synthetic_classes() {
  return {
      {"bar-left-1", -1.0, 0.0}, {"bar-right-1", 1.0, 0.0},
      {"bar-up-1", 0.0, -1.0},   {"bar-down-1", 0.0, 1.0},
      {"bar-right-2", 2.0, 0.0}, {"bar-right-3", 3.0, 0.0},
  };
}

void generate_synthetic(const std::filesystem::path& root,
                        const SyntheticConfig& cfg, std::uint64_t seed) {
  if (cfg.frame_size < 8 || cfg.frames_per_sequence < 2) {
    throw std::invalid_argument("generate_synthetic: degenerate config");
  }
  const std::vector<SyntheticClass> classes =
      cfg.classes.empty() ? default_synthetic_classes() : cfg.classes;
  if (classes.empty()) {
    throw std::invalid_argument("generate_synthetic: no classes");
  }

  fs::create_directories(root);
  Rng rng(seed);

  std::vector<ManifestEntry> train_entries;
  std::vector<ManifestEntry> test_entries;
  // Round-robin over classes so any prefix of a manifest stays balanced.
  for (int split = 0; split < 2; ++split) {
    const bool is_train = split == 0;
    const int count = is_train ? cfg.train_sequences : cfg.test_sequences;
    auto& entries = is_train ? train_entries : test_entries;
    for (int i = 0; i < count; ++i) {
      const SyntheticClass& cls = classes[i % classes.size()];
      // Disjoint subject number ranges keep the train/test invariant checkable.
      const int subject = (is_train ? 1000 : 2000) + i;
      const std::string tag =
          (is_train ? "train" : "test") + std::to_string(subject) + "_a";
      // Manifest entries stay relative to the dataset root, so the tree
      // remains relocatable; readers resolve them against the manifest.
      const fs::path rel = fs::path(cls.name) / tag;
      const fs::path dir = root / rel;
      fs::create_directories(dir);

      double pos = rng.uniform(0.0, cfg.frame_size);
      const double sigma = std::max(
          0.5, cfg.bar_sigma + rng.uniform(-cfg.bar_sigma_jitter,
                                           cfg.bar_sigma_jitter));
      const double amplitude =
          cfg.bar_amplitude - rng.uniform(0.0, cfg.bar_amplitude_jitter);
      const double speed_mag = std::max(std::fabs(cls.dx), std::fabs(cls.dy));
      const double step_sign = (cls.dx + cls.dy) < 0.0 ? -1.0 : 1.0;
      for (int t = 0; t < cfg.frames_per_sequence; ++t) {
        write_pgm(dir / ("frame_" + zero_pad(t, 5) + ".pgm"),
                  render_bar(cfg.frame_size, cls, pos, sigma, amplitude,
                             cfg.noise_sigma, rng));
        pos += step_sign * speed_mag;
        pos = std::fmod(pos + cfg.frame_size, cfg.frame_size);
      }
      entries.push_back({rel, cls.name, std::to_string(subject)});
    }
  }

  write_manifest(root / "train.manifest", train_entries);
  write_manifest(root / "test.manifest", test_entries);
}

}  // namespace staf
