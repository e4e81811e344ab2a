#include "staf/sequence_prep.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace staf {

void PrepConfig::validate() const {
  if (sample_len < 1) {
    throw std::invalid_argument("PrepConfig: sample_len must be >= 1");
  }
  if (skip < 0) throw std::invalid_argument("PrepConfig: skip must be >= 0");
  if (overlap_stride < 1) {
    throw std::invalid_argument("PrepConfig: overlap_stride must be >= 1");
  }
}

Frame background_subtract(const Frame& f_t, const Frame& f_t1) {
  if (!f_t.same_shape(f_t1)) {
    throw std::invalid_argument("background_subtract: frame dims differ");
  }
  Frame out(f_t.height(), f_t.width(), f_t.channels());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] = std::fabs(f_t1.values()[i] - f_t.values()[i]);
  }
  return out;
}

double motion_score(const Frame& f) {
  if (f.empty()) return 0.0;
  const double sum =
      std::accumulate(f.values().begin(), f.values().end(), 0.0);
  return sum / static_cast<double>(f.size());
}

std::vector<std::size_t> select_indices(const std::vector<double>& scores,
                                        const PrepConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> kept;
  std::size_t survivors = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > cfg.motion_threshold) {
      if (survivors % static_cast<std::size_t>(cfg.skip + 1) == 0) {
        kept.push_back(i);
      }
      ++survivors;
    }
  }
  return kept;
}

std::vector<Frame> select_frames(const std::vector<Frame>& seq,
                                 const PrepConfig& cfg) {
  std::vector<double> scores(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) scores[i] = motion_score(seq[i]);
  std::vector<Frame> out;
  for (std::size_t i : select_indices(scores, cfg)) out.push_back(seq[i]);
  return out;
}

std::vector<std::vector<Frame>> assemble_samples(const std::vector<Frame>& seq,
                                                 const PrepConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<Frame>> samples;
  const std::size_t n = seq.size();
  const std::size_t len = static_cast<std::size_t>(cfg.sample_len);
  for (std::size_t start = 0; start + len <= n;
       start += static_cast<std::size_t>(cfg.overlap_stride)) {
    samples.emplace_back(seq.begin() + start, seq.begin() + start + len);
  }
  return samples;
}

Frame add_gaussian_noise(const Frame& f, double sigma, Rng& rng) {
  if (sigma < 0.0) {
    throw std::invalid_argument("add_gaussian_noise: sigma must be >= 0");
  }
  Frame out = f;
  if (sigma == 0.0) return out;
  for (float& v : out.values()) {
    v = clamp01(static_cast<float>(v + rng.normal(0.0, sigma)));
  }
  return out;
}

std::vector<Frame> add_gaussian_noise(const std::vector<Frame>& seq,
                                      double sigma, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Frame> out;
  out.reserve(seq.size());
  for (const Frame& f : seq) out.push_back(add_gaussian_noise(f, sigma, rng));
  return out;
}

std::vector<Frame> flip_sequence(const std::vector<Frame>& seq) {
  std::vector<Frame> out;
  out.reserve(seq.size());
  for (const Frame& f : seq) out.push_back(flip_horizontal(f));
  return out;
}

}  // namespace staf
