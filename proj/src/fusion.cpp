#include "staf/fusion.hpp"

#include <cstring>
#include <stdexcept>

namespace staf {

FusionMode parse_fusion_mode(const std::string& name) {
  if (name == "none") return FusionMode::kNone;
  if (name == "early") return FusionMode::kEarly;
  if (name == "late") return FusionMode::kLate;
  throw std::invalid_argument("unknown fusion mode: " + name);
}

std::string fusion_mode_name(FusionMode m) {
  switch (m) {
    case FusionMode::kNone: return "none";
    case FusionMode::kEarly: return "early";
    case FusionMode::kLate: return "late";
  }
  return "?";
}

Frame early_fuse(std::span<const Frame> frames) {
  if (frames.empty()) {
    throw std::invalid_argument("early_fuse: empty frame list");
  }
  const int n = static_cast<int>(frames.size());
  const Frame& first = frames[0];
  for (const Frame& f : frames) {
    if (!f.same_shape(first)) {
      throw std::invalid_argument("early_fuse: frame dims differ");
    }
  }
  const std::size_t row_values =
      static_cast<std::size_t>(first.width()) * first.channels();
  Frame out(first.height() * n, first.width(), first.channels());
  for (int f = 0; f < n; ++f) {
    for (int i = 0; i < first.height(); ++i) {
      const int k = i * n + f;
      std::memcpy(out.values().data() + k * row_values,
                  frames[f].values().data() + i * row_values,
                  row_values * sizeof(float));
    }
  }
  return out;
}

std::vector<Frame> early_unfuse(const Frame& fused, int n) {
  if (n < 1) throw std::invalid_argument("early_unfuse: n must be >= 1");
  if (fused.height() % n != 0) {
    throw std::invalid_argument("early_unfuse: height not divisible by n");
  }
  const int h = fused.height() / n;
  const std::size_t row_values =
      static_cast<std::size_t>(fused.width()) * fused.channels();
  std::vector<Frame> out(n, Frame(h, fused.width(), fused.channels()));
  for (int f = 0; f < n; ++f) {
    for (int i = 0; i < h; ++i) {
      std::memcpy(out[f].values().data() + i * row_values,
                  fused.values().data() + (i * n + f) * row_values,
                  row_values * sizeof(float));
    }
  }
  return out;
}

std::vector<float> concat_features(std::span<const std::vector<float>> parts) {
  std::vector<float> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<float> late_fuse(std::span<const std::vector<float>> features) {
  if (features.empty()) {
    throw std::invalid_argument("late_fuse: empty feature list");
  }
  for (const auto& f : features) {
    if (f.size() != features[0].size()) {
      throw std::invalid_argument("late_fuse: feature lengths differ");
    }
  }
  return concat_features(features);
}

}  // namespace staf
