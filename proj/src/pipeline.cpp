#include "staf/pipeline.hpp"

#include <chrono>
#include <iostream>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "staf/classifier.hpp"
#include "staf/errors.hpp"
#include "staf/fusion.hpp"
#include "staf/snn.hpp"

namespace staf {
namespace {

namespace fs = std::filesystem;

class StageClock {
 public:
  // Runs one pipeline stage, accumulating its wall-clock time. Failures
  // abort the run tagged with the stage name.
  template <typename F>
  auto run(const std::string& name, F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        record(name, start);
      } else {
        auto result = fn();
        record(name, start);
        return result;
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("stage " + name + ": " + e.what());
    }
  }

  std::vector<StageTiming> timings() const {
    std::vector<StageTiming> out;
    for (const auto& name : order_) out.push_back({name, seconds_.at(name)});
    return out;
  }

 private:
  void record(const std::string& name,
              std::chrono::steady_clock::time_point start) {
    const double s = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    if (!seconds_.count(name)) order_.push_back(name);
    seconds_[name] += s;
  }

  std::vector<std::string> order_;
  std::map<std::string, double> seconds_;
};

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
  }
  fs::rename(tmp, path);
}

std::uint64_t variant_seed(std::uint64_t base, std::size_t entry_index,
                           std::size_t variant) {
  return base ^ (0x9e3779b97f4a7c15ull * (entry_index * 8 + variant + 1));
}

// Background subtraction, motion selection and the chosen representation
// for one frame sequence. Returns the network-input frames in order.
std::vector<Frame> build_net_frames(const RunConfig& cfg,
                                    const std::vector<Frame>& video) {
  if (video.size() < 2) return {};

  std::vector<Frame> diffs;
  diffs.reserve(video.size() - 1);
  std::vector<double> scores;
  for (std::size_t i = 0; i + 1 < video.size(); ++i) {
    diffs.push_back(background_subtract(video[i], video[i + 1]));
    scores.push_back(motion_score(diffs.back()));
  }
  const std::vector<std::size_t> kept = select_indices(scores, cfg.prep);

  std::vector<Frame> selected;
  std::vector<Frame> originals;  // reference frame of each kept diff
  selected.reserve(kept.size());
  for (std::size_t i : kept) {
    selected.push_back(diffs[i]);
    originals.push_back(video[i]);
  }

  if (cfg.method == ReprMethod::kRaw) return selected;
  if (selected.size() < 2) return {};

  std::vector<FlowField> flows;
  flows.reserve(selected.size() - 1);
  for (std::size_t i = 0; i + 1 < selected.size(); ++i) {
    flows.push_back(farneback_flow(selected[i], selected[i + 1], cfg.flow));
  }

  std::vector<Frame> frames;
  switch (cfg.method) {
    case ReprMethod::kDxdy:
      for (const FlowField& f : flows) frames.push_back(repr_dxdy(f, cfg.repr.norm));
      break;
    case ReprMethod::kOa:
      for (const FlowField& f : flows) frames.push_back(repr_oa(f, cfg.repr.norm));
      break;
    case ReprMethod::kCc:
      for (std::size_t i = 0; i < flows.size(); ++i) {
        frames.push_back(repr_cc(flows[i], originals[i], cfg.repr.cc_theta,
                                 cfg.repr.norm));
      }
      break;
    case ReprMethod::kEg:
      for (std::size_t start = 0;
           start + kEgFrameCount <= flows.size();
           start += static_cast<std::size_t>(cfg.prep.overlap_stride)) {
        frames.push_back(repr_eg(
            std::span<const FlowField>(flows.data() + start, kEgFrameCount),
            cfg.repr));
      }
      break;
    case ReprMethod::kMg:
      for (std::size_t start = 0;
           start + kMgFrameCount <= flows.size();
           start += static_cast<std::size_t>(cfg.prep.overlap_stride)) {
        frames.push_back(repr_mg(
            std::span<const FlowField>(flows.data() + start, kMgFrameCount),
            cfg.repr.norm));
      }
      break;
    default:
      break;
  }
  return frames;
}

void append_samples(const RunConfig& cfg, std::vector<Frame> net_frames,
                    const ManifestEntry& entry,
                    std::vector<PreparedSample>& out) {
  if (net_frames.empty()) return;

  const bool grid_method =
      cfg.method == ReprMethod::kEg || cfg.method == ReprMethod::kMg;
  // Grid representations fuse temporally on their own; the frame-level
  // fusion modes only apply to the per-flow representations.
  const FusionMode fusion = grid_method ? FusionMode::kNone : cfg.fusion;

  if (fusion == FusionMode::kNone) {
    for (Frame& f : net_frames) {
      out.push_back({{std::move(f)}, entry.label, entry.subject});
    }
    return;
  }

  const auto windows = assemble_samples(net_frames, cfg.prep);
  for (const auto& window : windows) {
    if (fusion == FusionMode::kEarly) {
      out.push_back({{early_fuse(window)}, entry.label, entry.subject});
    } else {
      out.push_back({window, entry.label, entry.subject});
    }
  }
}

struct FoldData {
  std::vector<std::vector<float>> train_features;
  std::vector<std::string> train_labels;
  std::vector<std::string> predictions;
  std::vector<std::string> truth;
};

void run_fold(const RunConfig& cfg, const std::vector<ManifestEntry>& train_e,
              const std::vector<ManifestEntry>& test_e, StageClock& clock,
              std::vector<std::string>& all_predictions,
              std::vector<std::string>& all_truth, std::size_t& train_count,
              std::size_t& test_count) {
  auto train_samples = clock.run("prepare-train", [&] {
    return prepare_samples(cfg, train_e, true);
  });
  auto test_samples = clock.run("prepare-test", [&] {
    return prepare_samples(cfg, test_e, false);
  });
  if (train_samples.empty()) {
    throw std::runtime_error("pipeline: preparation produced no training samples");
  }
  if (test_samples.empty()) {
    throw std::runtime_error("pipeline: preparation produced no test samples");
  }
  train_count += train_samples.size();
  test_count += test_samples.size();

  LayerGeometry geometry = cfg.snn;
  geometry.in_channels = 2 * train_samples.front().frames.front().channels();

  // Spike lists for every training frame, kept for reuse at extraction.
  std::vector<SpikeList> train_spikes;
  std::vector<std::size_t> sample_offsets;  // first spike list of each sample
  clock.run("encode", [&] {
    for (PreparedSample& s : train_samples) {
      sample_offsets.push_back(train_spikes.size());
      for (Frame& f : s.frames) {
        train_spikes.push_back(
            latency_encode(dog_filter(f, cfg.dog), cfg.t_exposition,
                           cfg.encode_min));
        f = Frame();  // drop pixel data once encoded
      }
    }
  });

  const LayerState layer = clock.run("train-snn", [&] {
    return train_layer_spikes(train_spikes, geometry, cfg.stdp, cfg.threshold,
                              cfg.seed);
  });

  FoldData fold;
  clock.run("extract", [&] {
    auto pooled = [&](const SpikeList& spikes) {
      const ForwardResult fw = if_conv_forward(spikes, layer);
      return pool_and_flatten(fw, geometry.n_kernels, cfg.pool_window,
                              cfg.t_exposition);
    };
    for (std::size_t i = 0; i < train_samples.size(); ++i) {
      const std::size_t begin = sample_offsets[i];
      const std::size_t end = i + 1 < train_samples.size()
                                  ? sample_offsets[i + 1]
                                  : train_spikes.size();
      std::vector<std::vector<float>> parts;
      for (std::size_t j = begin; j < end; ++j) {
        parts.push_back(pooled(train_spikes[j]));
      }
      fold.train_features.push_back(
          parts.size() == 1 ? std::move(parts[0]) : late_fuse(parts));
      fold.train_labels.push_back(train_samples[i].label);
    }
    train_spikes.clear();
  });

  const SvmModel svm = clock.run("train-svm", [&] {
    return svm_train(fold.train_features,
                     fold.train_labels, {cfg.svm_c, cfg.svm_epochs}, cfg.seed);
  });

  clock.run("classify", [&] {
    for (const PreparedSample& s : test_samples) {
      std::vector<std::vector<float>> parts;
      for (const Frame& f : s.frames) {
        parts.push_back(extract_features(layer, dog_filter(f, cfg.dog),
                                         cfg.pool_window, cfg.t_exposition,
                                         cfg.encode_min));
      }
      const std::vector<float> features =
          parts.size() == 1 ? std::move(parts[0]) : late_fuse(parts);
      all_predictions.push_back(svm_predict(svm, features));
      all_truth.push_back(s.label);
    }
  });
}

}  // namespace

std::vector<PreparedSample> prepare_samples(
    const RunConfig& cfg, const std::vector<ManifestEntry>& entries,
    bool training_set) {
  std::vector<PreparedSample> out;
  for (std::size_t idx = 0; idx < entries.size(); ++idx) {
    const ManifestEntry& entry = entries[idx];
    LabeledSequence seq = load_sequence(entry.path);
    if (cfg.resize_h > 0) {
      for (Frame& f : seq.frames) {
        f = resize_bilinear(f, cfg.resize_h, cfg.resize_w);
      }
    }

    std::vector<std::vector<Frame>> variants;
    variants.push_back(std::move(seq.frames));
    if (training_set && cfg.augment_flip) {
      variants.push_back(flip_sequence(variants[0]));
    }
    if (training_set && cfg.augment_noise) {
      const std::size_t base_count = variants.size();
      for (std::size_t v = 0; v < base_count; ++v) {
        variants.push_back(add_gaussian_noise(variants[v], cfg.noise_sigma,
                                              variant_seed(cfg.seed, idx, v)));
      }
    }

    for (const auto& video : variants) {
      append_samples(cfg, build_net_frames(cfg, video), entry, out);
    }
  }
  return out;
}

PipelineReport run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  StageClock clock;

  std::vector<std::vector<ManifestEntry>> fold_train;
  std::vector<std::vector<ManifestEntry>> fold_test;
  clock.run("split", [&] {
    if (cfg.protocol == Protocol::kFixedSplit) {
      fold_train.push_back(read_manifest(cfg.train_manifest));
      fold_test.push_back(read_manifest(cfg.test_manifest));
    } else {
      const auto entries = scan_dataset(cfg.data_root);
      if (cfg.protocol == Protocol::kKthSplit) {
        SplitResult split = split_kth(entries);
        for (const std::string& warning : split.warnings) {
          std::cerr << "split: " << warning << "\n";
        }
        fold_train.push_back(std::move(split.train));
        fold_test.push_back(std::move(split.test));
      } else {
        for (SplitResult& split : split_leave_one_out(entries)) {
          fold_train.push_back(std::move(split.train));
          fold_test.push_back(std::move(split.test));
        }
      }
    }
    if (cfg.train_limit > 0) {
      for (auto& fold : fold_train) {
        if (fold.size() > cfg.train_limit) fold.resize(cfg.train_limit);
      }
    }
  });

  PipelineReport report;
  report.out_dir = cfg.out_dir;
  std::vector<std::string> predictions;
  std::vector<std::string> truth;
  for (std::size_t fold = 0; fold < fold_train.size(); ++fold) {
    run_fold(cfg, fold_train[fold], fold_test[fold], clock, predictions,
             truth, report.train_samples, report.test_samples);
  }
  report.eval = evaluate(predictions, truth);
  report.timings = clock.timings();

  fs::create_directories(cfg.out_dir);
  atomic_write(cfg.out_dir / "confusion.csv", report.eval.confusion.to_csv());
  atomic_write(cfg.out_dir / "config.resolved", cfg.to_string());
  {
    std::ostringstream timing;
    for (const StageTiming& t : report.timings) {
      timing << t.name << " " << t.seconds << "\n";
    }
    atomic_write(cfg.out_dir / "timing.log", timing.str());
  }
  {
    std::ostringstream summary;
    summary << "accuracy " << report.eval.accuracy << "\n";
    summary << "train_samples " << report.train_samples << "\n";
    summary << "test_samples " << report.test_samples << "\n";
    atomic_write(cfg.out_dir / "report.txt", summary.str());
  }
  return report;
}

}  // namespace staf
