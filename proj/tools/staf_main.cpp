#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "staf/classifier.hpp"
#include "staf/dataset.hpp"
#include "staf/pipeline.hpp"
#include "staf/snn.hpp"
#include "staf/synthetic.hpp"
#include "staf/tensor_io.hpp"

namespace {

namespace fs = std::filesystem;
using staf::RunConfig;

std::string zero_pad(std::size_t value, int width) {
  std::ostringstream out;
  out << std::setw(width) << std::setfill('0') << value;
  return out.str();
}

RunConfig load_config(const std::string& config_path,
                      const std::vector<std::string>& overrides) {
  RunConfig cfg;
  if (!config_path.empty()) cfg = RunConfig::from_file(config_path);
  if (cfg.data_root.empty()) {
    if (const char* env = std::getenv("STAF_DATA_ROOT")) cfg.data_root = env;
  }
  cfg.apply(overrides);
  return cfg;
}

std::vector<staf::ManifestEntry> entries_from_input(const fs::path& in) {
  // A dataset root directory or an existing manifest file.
  if (fs::is_directory(in)) return staf::scan_dataset(in);
  return staf::read_manifest(in);
}

int cmd_synth(const std::string& out, std::uint64_t seed, int train, int test,
              int size, int frames, double noise) {
  staf::SyntheticConfig cfg;
  cfg.train_sequences = train;
  cfg.test_sequences = test;
  cfg.frame_size = size;
  cfg.frames_per_sequence = frames;
  cfg.noise_sigma = noise;
  staf::generate_synthetic(out, cfg, seed);
  std::cout << "synthetic dataset written to " << out << "\n";
  return 0;
}

int cmd_preprocess(const RunConfig& cfg, const std::string& in,
                   const std::string& out) {
  const auto entries = entries_from_input(in);
  const auto samples = staf::prepare_samples(cfg, entries, true);
  if (samples.empty()) throw std::runtime_error("no samples produced");

  fs::create_directories(out);
  std::vector<staf::ManifestEntry> manifest;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    // Manifest paths stay relative to the manifest itself.
    const fs::path name =
        "sample_" + zero_pad(i, 6) + staf::kTensorExtension;
    staf::write_sample_tensor(fs::path(out) / name, samples[i].frames);
    manifest.push_back({name, samples[i].label, samples[i].subject});
  }
  staf::write_manifest(fs::path(out) / "samples.manifest", manifest);
  std::cout << "wrote " << samples.size() << " samples to " << out << "\n";
  return 0;
}

int cmd_train_snn(const RunConfig& cfg, const std::string& in,
                  const std::string& out) {
  const auto entries = staf::read_manifest(in);
  if (entries.empty()) throw std::runtime_error("empty sample manifest");

  std::vector<staf::SpikeList> spikes;
  int channels = 0;
  for (const auto& e : entries) {
    for (const staf::Frame& f : staf::read_sample_tensor(e.path)) {
      const staf::Frame filtered = staf::dog_filter(f, cfg.dog);
      channels = filtered.channels();
      spikes.push_back(staf::latency_encode(filtered, cfg.t_exposition,
                                            cfg.encode_min));
    }
  }
  staf::LayerGeometry geometry = cfg.snn;
  geometry.in_channels = channels;
  const staf::LayerState layer = staf::train_layer_spikes(
      spikes, geometry, cfg.stdp, cfg.threshold, cfg.seed);

  staf::save_layer(out, layer,
                   {{"seed", std::to_string(cfg.seed)},
                    {"epochs", std::to_string(cfg.stdp.epochs)},
                    {"t_exposition", std::to_string(cfg.t_exposition)}});
  std::cout << "model written to " << out << "\n";
  return 0;
}

int cmd_extract(const RunConfig& cfg, const std::string& model,
                const std::string& in, const std::string& out) {
  const staf::LayerState layer = staf::load_layer(model);
  const auto entries = staf::read_manifest(in);
  fs::create_directories(out);

  std::vector<staf::ManifestEntry> manifest;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    std::vector<std::vector<float>> parts;
    for (const staf::Frame& f : staf::read_sample_tensor(entries[i].path)) {
      parts.push_back(staf::extract_features(
          layer, staf::dog_filter(f, cfg.dog), cfg.pool_window,
          cfg.t_exposition, cfg.encode_min));
    }
    const std::vector<float> features =
        parts.size() == 1 ? parts[0] : staf::late_fuse(parts);
    const fs::path name =
        "features_" + zero_pad(i, 6) + staf::kTensorExtension;
    const std::uint32_t dims[1] = {static_cast<std::uint32_t>(features.size())};
    staf::write_tensor(fs::path(out) / name, dims, features);
    manifest.push_back({name, entries[i].label, entries[i].subject});
  }
  staf::write_manifest(fs::path(out) / "features.manifest", manifest);
  std::cout << "wrote " << entries.size() << " feature vectors to " << out << "\n";
  return 0;
}

std::pair<std::vector<std::vector<float>>, std::vector<std::string>>
load_features(const std::string& manifest) {
  std::vector<std::vector<float>> features;
  std::vector<std::string> labels;
  for (const auto& e : staf::read_manifest(manifest)) {
    features.push_back(staf::read_tensor(e.path).values);
    labels.push_back(e.label);
  }
  return {std::move(features), std::move(labels)};
}

int cmd_train_svm(const RunConfig& cfg, const std::string& in,
                  const std::string& out) {
  auto [features, labels] = load_features(in);
  const staf::SvmModel model =
      staf::svm_train(features, labels, {cfg.svm_c, cfg.svm_epochs}, cfg.seed);
  staf::save_svm(out, model);
  std::cout << "svm written to " << out << "\n";
  return 0;
}

int cmd_evaluate(const std::string& model, const std::string& in,
                 const std::string& out) {
  const staf::SvmModel svm = staf::load_svm(model);
  auto [features, labels] = load_features(in);
  std::vector<std::string> predictions;
  for (const auto& f : features) {
    predictions.push_back(staf::svm_predict(svm, f));
  }
  const staf::Evaluation eval = staf::evaluate(predictions, labels);
  std::cout << "accuracy " << eval.accuracy << "\n";
  if (!out.empty()) {
    fs::create_directories(out);
    std::ofstream csv(fs::path(out) / "confusion.csv", std::ios::trunc);
    csv << eval.confusion.to_csv();
    std::cout << "confusion matrix written to " << out << "\n";
  }
  return 0;
}

int cmd_pipeline(const RunConfig& cfg) {
  const staf::PipelineReport report = staf::run_pipeline(cfg);
  std::cout << "accuracy " << report.eval.accuracy << " ("
            << report.train_samples << " train / " << report.test_samples
            << " test samples)\n";
  for (const auto& t : report.timings) {
    std::cout << "  " << t.name << ": " << t.seconds << " s\n";
  }
  std::cout << "report written to " << report.out_dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatio-temporal action feature toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string in, out, model;

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration file");
    cmd->add_option("--set", overrides, "key=value override (repeatable)");
  };

  // synth
  std::uint64_t synth_seed = 1;
  int synth_train = 200, synth_test = 100, synth_size = 64, synth_frames = 52;
  double synth_noise = 0.01;
  CLI::App* synth = app.add_subcommand("synth", "generate a moving-bar benchmark");
  synth->add_option("--out", out, "output dataset root")->required();
  synth->add_option("--seed", synth_seed, "rng seed");
  synth->add_option("--train", synth_train, "training sequences");
  synth->add_option("--test", synth_test, "test sequences");
  synth->add_option("--size", synth_size, "frame size in pixels");
  synth->add_option("--frames", synth_frames, "frames per sequence");
  synth->add_option("--noise-sigma", synth_noise, "per-pixel noise");

  // preprocess
  CLI::App* preprocess = app.add_subcommand(
      "preprocess", "sequence preparation and representation building");
  preprocess->add_option("--in", in, "dataset root or manifest")->required();
  preprocess->add_option("--out", out, "output directory")->required();
  add_config(preprocess);
  std::string method, fusion_name, augment;
  double threshold = -1.0;
  int skip = -1, sample_len = -1, stride = -1;
  std::int64_t seed_flag = -1;
  preprocess->add_option("--method", method, "raw|dxdy|oa|cc|eg|mg");
  preprocess->add_option("--fusion", fusion_name, "none|early|late");
  preprocess->add_option("--threshold", threshold, "motion threshold");
  preprocess->add_option("--skip", skip, "frames dropped between kept frames");
  preprocess->add_option("--sample-len,--fusion-n", sample_len,
                         "frames per sample");
  preprocess->add_option("--stride", stride, "sample window stride");
  preprocess->add_option("--augment", augment, "comma list: flip,noise");
  preprocess->add_option("--seed", seed_flag, "rng seed");

  // train-snn
  CLI::App* train_snn = app.add_subcommand("train-snn", "unsupervised network training");
  train_snn->add_option("--in", in, "preprocessed sample manifest")->required();
  train_snn->add_option("--out", out, "output model path")->required();
  add_config(train_snn);
  train_snn->add_option("--seed", seed_flag, "rng seed");

  // extract
  CLI::App* extract = app.add_subcommand("extract", "feature extraction");
  extract->add_option("--model", model, "trained model path")->required();
  extract->add_option("--in", in, "preprocessed sample manifest")->required();
  extract->add_option("--out", out, "output directory")->required();
  add_config(extract);

  // train-svm
  CLI::App* train_svm = app.add_subcommand("train-svm", "classifier training");
  train_svm->add_option("--features", in, "feature manifest")->required();
  train_svm->add_option("--out", out, "output model path")->required();
  add_config(train_svm);
  train_svm->add_option("--seed", seed_flag, "rng seed");

  // evaluate
  CLI::App* evaluate = app.add_subcommand("evaluate", "accuracy and confusion matrix");
  evaluate->add_option("--model", model, "svm model path")->required();
  evaluate->add_option("--features", in, "feature manifest")->required();
  evaluate->add_option("--out", out, "optional report directory");

  // pipeline
  CLI::App* pipeline = app.add_subcommand("pipeline", "full experiment");
  add_config(pipeline);
  pipeline->add_option("--method", method, "raw|dxdy|oa|cc|eg|mg");
  pipeline->add_option("--fusion", fusion_name, "none|early|late");
  pipeline->add_option("--fusion-n", sample_len, "frames per sample");
  pipeline->add_option("--seed", seed_flag, "rng seed");

  CLI11_PARSE(app, argc, argv);

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (synth->parsed()) {
      return cmd_synth(out, synth_seed, synth_train, synth_test, synth_size,
                       synth_frames, synth_noise);
    }

    RunConfig cfg = load_config(config_path, overrides);
    if (!method.empty()) cfg.set("method", method);
    if (!fusion_name.empty()) cfg.set("fusion", fusion_name);
    if (threshold >= 0.0) cfg.prep.motion_threshold = threshold;
    if (skip >= 0) cfg.prep.skip = skip;
    if (sample_len >= 0) cfg.prep.sample_len = sample_len;
    if (stride >= 0) cfg.prep.overlap_stride = stride;
    if (seed_flag >= 0) cfg.seed = static_cast<std::uint64_t>(seed_flag);
    if (!augment.empty()) {
      cfg.augment_flip = augment.find("flip") != std::string::npos;
      cfg.augment_noise = augment.find("noise") != std::string::npos;
    }

    if (preprocess->parsed()) return cmd_preprocess(cfg, in, out);
    if (train_snn->parsed()) return cmd_train_snn(cfg, in, out);
    if (extract->parsed()) return cmd_extract(cfg, model, in, out);
    if (train_svm->parsed()) return cmd_train_svm(cfg, in, out);
    if (evaluate->parsed()) return cmd_evaluate(model, in, out);
    if (pipeline->parsed()) return cmd_pipeline(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error (" << stage << "): " << e.what() << "\n";
    return 1;
  }
  return 0;
}
