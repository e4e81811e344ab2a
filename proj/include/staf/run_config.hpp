#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "staf/fusion.hpp"
#include "staf/metrics.hpp"
#include "staf/optical_flow.hpp"
#include "staf/representations.hpp"
#include "staf/sequence_prep.hpp"
#include "staf/snn.hpp"

namespace staf {

// Flat key=value run description. Unknown keys are rejected; every run
// writes its resolved configuration next to its outputs.
struct RunConfig {
  ReprMethod method = ReprMethod::kRaw;
  FusionMode fusion = FusionMode::kNone;

  PrepConfig prep;
  bool augment_flip = false;
  bool augment_noise = false;
  double noise_sigma = 0.05;

  FlowParams flow;
  ReprParams repr;
  DoGParams dog;

  LayerGeometry snn;        // in_channels derived from the method
  StdpParams stdp;
  ThresholdParams threshold;
  double t_exposition = 1.0;
  double encode_min = 0.0;  // latency-coding intensity floor
  int pool_window = 8;

  double svm_c = 1.0;
  int svm_epochs = 50;

  std::uint64_t seed = 1;
  int resize_h = 0;  // 0 = native resolution
  int resize_w = 0;
  std::size_t train_limit = 0;  // 0 = use every training sequence

  Protocol protocol = Protocol::kFixedSplit;
  std::filesystem::path data_root;
  std::filesystem::path train_manifest;
  std::filesystem::path test_manifest;
  std::filesystem::path out_dir = "run-out";

  static RunConfig from_file(const std::filesystem::path& path);
  // "key=value" strings, e.g. from command-line overrides.
  void apply(const std::vector<std::string>& overrides);
  void set(const std::string& key, const std::string& value);
  std::string to_string() const;
  void validate() const;
};

}  // namespace staf
