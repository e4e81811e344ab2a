#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "staf/metrics.hpp"
#include "staf/run_config.hpp"

namespace staf {

struct StageTiming {
  std::string name;
  double seconds = 0.0;
};

struct PipelineReport {
  Evaluation eval;
  std::vector<StageTiming> timings;
  std::filesystem::path out_dir;
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
};

// One classifier sample: one or more network-input frames (more than one
// only under late fusion) and its identity.
struct PreparedSample {
  std::vector<Frame> frames;
  std::string label;
  std::string subject;
};

// prep -> flow -> representation -> sampling/fusion for a sequence set.
// Augmentations apply to training sets only.
std::vector<PreparedSample> prepare_samples(
    const RunConfig& cfg, const std::vector<ManifestEntry>& entries,
    bool training_set);

// Full experiment: preparation, spike encoding, unsupervised network
// training, feature extraction, classifier training and evaluation.
// Writes confusion.csv, config.resolved, timing.log and report.txt under
// cfg.out_dir (atomically). Leave-one-out pools test predictions across
// folds.
PipelineReport run_pipeline(const RunConfig& cfg);

}  // namespace staf
