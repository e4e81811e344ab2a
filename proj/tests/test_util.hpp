#pragma once

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "staf/frame.hpp"
#include "staf/optical_flow.hpp"
#include "staf/rng.hpp"

namespace staf::test {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("staf_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Smooth texture built from sinusoidal plane waves. Translations are exact
// everywhere because the texture is evaluated analytically at shifted
// coordinates, which makes it a clean ground truth for flow estimation.
class SinusoidTexture {
 public:
  static SinusoidTexture random(Rng& rng, int n_waves, double min_wavelength,
                                double max_wavelength) {
    SinusoidTexture t;
    t.add_band(rng, n_waves, min_wavelength, max_wavelength, 0.42);
    return t;
  }

  // Combined amplitudes must stay below 0.5 to keep samples inside [0, 1].
  void add_band(Rng& rng, int n_waves, double min_wavelength,
                double max_wavelength, double total_amplitude) {
    for (int i = 0; i < n_waves; ++i) {
      const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double wavelength = rng.uniform(min_wavelength, max_wavelength);
      waves_.push_back({std::cos(angle) / wavelength,
                        std::sin(angle) / wavelength,
                        rng.uniform(0.0, 2.0 * std::numbers::pi),
                        total_amplitude / n_waves});
    }
  }

  double sample(double x, double y) const {
    double v = 0.5;
    for (const Wave& w : waves_) {
      v += w.amplitude *
           std::sin(2.0 * std::numbers::pi * (w.fx * x + w.fy * y) + w.phase);
    }
    return v;
  }

  // Renders f(x - shift_x, y - shift_y): content moves by +shift.
  Frame render(int h, int w, double shift_x = 0.0, double shift_y = 0.0) const {
    Frame f(h, w, 1);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        f.at(y, x) = static_cast<float>(sample(x - shift_x, y - shift_y));
      }
    }
    return f;
  }

 private:
  struct Wave {
    double fx, fy, phase, amplitude;
  };
  std::vector<Wave> waves_;
};

inline double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return values.empty() ? 0.0 : values[values.size() / 2];
}

// Endpoint errors of a flow field against a constant true shift, interior
// pixels only.
inline void endpoint_errors(const FlowField& flow, double true_dx,
                            double true_dy, int margin,
                            std::vector<double>& out) {
  for (int y = margin; y < flow.height - margin; ++y) {
    for (int x = margin; x < flow.width - margin; ++x) {
      const std::size_t i = flow.index(y, x);
      out.push_back(std::hypot(flow.dx[i] - true_dx, flow.dy[i] - true_dy));
    }
  }
}

}  // namespace staf::test
