#include "staf/run_config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "staf/errors.hpp"

namespace staf {
namespace {

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw FormatError("RunConfig: bad boolean value: " + v);
}

}  // namespace

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("RunConfig: cannot open " + path.string());
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("RunConfig: line " + std::to_string(lineno) +
                        " is not key=value: " + line);
    }
    cfg.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

void RunConfig::apply(const std::vector<std::string>& overrides) {
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw FormatError("RunConfig: override is not key=value: " + kv);
    }
    set(kv.substr(0, eq), kv.substr(eq + 1));
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  try {
    if (key == "method") method = parse_repr_method(value);
    else if (key == "fusion") fusion = parse_fusion_mode(value);
    else if (key == "fusion_n" || key == "sample_len") prep.sample_len = std::stoi(value);
    else if (key == "motion_threshold") prep.motion_threshold = std::stod(value);
    else if (key == "skip") prep.skip = std::stoi(value);
    else if (key == "stride") prep.overlap_stride = std::stoi(value);
    else if (key == "augment_flip") augment_flip = parse_bool(value);
    else if (key == "augment_noise") augment_noise = parse_bool(value);
    else if (key == "noise_sigma") noise_sigma = std::stod(value);
    else if (key == "flow_levels") flow.pyramid_levels = std::stoi(value);
    else if (key == "flow_scale") flow.pyramid_scale = std::stod(value);
    else if (key == "flow_window") flow.window_size = std::stoi(value);
    else if (key == "flow_iterations") flow.iterations = std::stoi(value);
    else if (key == "flow_poly_n") flow.poly_n = std::stoi(value);
    else if (key == "flow_poly_sigma") flow.poly_sigma = std::stod(value);
    else if (key == "flow_clip") repr.norm.flow_clip = std::stod(value);
    else if (key == "cc_theta") repr.cc_theta = std::stod(value);
    else if (key == "canny_sigma") repr.canny.sigma = std::stod(value);
    else if (key == "canny_low") repr.canny.low = std::stod(value);
    else if (key == "canny_high") repr.canny.high = std::stod(value);
    else if (key == "dog_center") dog.center_sigma = std::stod(value);
    else if (key == "dog_surround") dog.surround_sigma = std::stod(value);
    else if (key == "dog_size") dog.kernel_size = std::stoi(value);
    else if (key == "snn_kernels") snn.n_kernels = std::stoi(value);
    else if (key == "snn_kernel_size") { snn.kernel_h = std::stoi(value); snn.kernel_w = snn.kernel_h; }
    else if (key == "snn_stride") snn.stride = std::stoi(value);
    else if (key == "snn_padding") snn.padding = std::stoi(value);
    else if (key == "stdp_eta") stdp.learning_rate = std::stod(value);
    else if (key == "stdp_beta") stdp.beta = std::stod(value);
    else if (key == "stdp_tau") stdp.tau = std::stod(value);
    else if (key == "stdp_anneal") stdp.anneal = std::stod(value);
    else if (key == "snn_epochs") stdp.epochs = std::stoi(value);
    else if (key == "th_target") threshold.target_fire_time = std::stod(value);
    else if (key == "th_eta") threshold.learning_rate = std::stod(value);
    else if (key == "th_min") threshold.min_threshold = std::stod(value);
    else if (key == "th_init_mean") threshold.init_mean = std::stod(value);
    else if (key == "th_init_std") threshold.init_std = std::stod(value);
    else if (key == "th_leak") threshold.leak_scale = std::stod(value);
    else if (key == "t_exposition") t_exposition = std::stod(value);
    else if (key == "encode_min") encode_min = std::stod(value);
    else if (key == "pool_window") pool_window = std::stoi(value);
    else if (key == "svm_c") svm_c = std::stod(value);
    else if (key == "svm_epochs") svm_epochs = std::stoi(value);
    else if (key == "seed") seed = std::stoull(value);
    else if (key == "resize_h") resize_h = std::stoi(value);
    else if (key == "resize_w") resize_w = std::stoi(value);
    else if (key == "train_limit") train_limit = std::stoull(value);
    else if (key == "protocol") protocol = parse_protocol(value);
    else if (key == "data_root") data_root = value;
    else if (key == "train_manifest") train_manifest = value;
    else if (key == "test_manifest") test_manifest = value;
    else if (key == "out_dir") out_dir = value;
    else throw FormatError("RunConfig: unknown key: " + key);
  } catch (const std::invalid_argument& e) {
    throw FormatError("RunConfig: bad value for " + key + ": " + value);
  }
}

std::string RunConfig::to_string() const {
  std::ostringstream out;
  out << "method=" << repr_method_name(method) << "\n";
  out << "fusion=" << fusion_mode_name(fusion) << "\n";
  out << "sample_len=" << prep.sample_len << "\n";
  out << "motion_threshold=" << prep.motion_threshold << "\n";
  out << "skip=" << prep.skip << "\n";
  out << "stride=" << prep.overlap_stride << "\n";
  out << "augment_flip=" << (augment_flip ? "1" : "0") << "\n";
  out << "augment_noise=" << (augment_noise ? "1" : "0") << "\n";
  out << "noise_sigma=" << noise_sigma << "\n";
  out << "flow_levels=" << flow.pyramid_levels << "\n";
  out << "flow_scale=" << flow.pyramid_scale << "\n";
  out << "flow_window=" << flow.window_size << "\n";
  out << "flow_iterations=" << flow.iterations << "\n";
  out << "flow_poly_n=" << flow.poly_n << "\n";
  out << "flow_poly_sigma=" << flow.poly_sigma << "\n";
  out << "flow_clip=" << repr.norm.flow_clip << "\n";
  out << "cc_theta=" << repr.cc_theta << "\n";
  out << "canny_sigma=" << repr.canny.sigma << "\n";
  out << "canny_low=" << repr.canny.low << "\n";
  out << "canny_high=" << repr.canny.high << "\n";
  out << "dog_center=" << dog.center_sigma << "\n";
  out << "dog_surround=" << dog.surround_sigma << "\n";
  out << "dog_size=" << dog.kernel_size << "\n";
  out << "snn_kernels=" << snn.n_kernels << "\n";
  out << "snn_kernel_size=" << snn.kernel_h << "\n";
  out << "snn_stride=" << snn.stride << "\n";
  out << "snn_padding=" << snn.padding << "\n";
  out << "stdp_eta=" << stdp.learning_rate << "\n";
  out << "stdp_beta=" << stdp.beta << "\n";
  out << "stdp_tau=" << stdp.tau << "\n";
  out << "stdp_anneal=" << stdp.anneal << "\n";
  out << "snn_epochs=" << stdp.epochs << "\n";
  out << "th_target=" << threshold.target_fire_time << "\n";
  out << "th_eta=" << threshold.learning_rate << "\n";
  out << "th_min=" << threshold.min_threshold << "\n";
  out << "th_init_mean=" << threshold.init_mean << "\n";
  out << "th_init_std=" << threshold.init_std << "\n";
  out << "th_leak=" << threshold.leak_scale << "\n";
  out << "t_exposition=" << t_exposition << "\n";
  out << "encode_min=" << encode_min << "\n";
  out << "pool_window=" << pool_window << "\n";
  out << "svm_c=" << svm_c << "\n";
  out << "svm_epochs=" << svm_epochs << "\n";
  out << "seed=" << seed << "\n";
  out << "resize_h=" << resize_h << "\n";
  out << "resize_w=" << resize_w << "\n";
  out << "train_limit=" << train_limit << "\n";
  out << "protocol=" << protocol_name(protocol) << "\n";
  out << "data_root=" << data_root.string() << "\n";
  out << "train_manifest=" << train_manifest.string() << "\n";
  out << "test_manifest=" << test_manifest.string() << "\n";
  out << "out_dir=" << out_dir.string() << "\n";
  return out.str();
}

void RunConfig::validate() const {
  prep.validate();
  flow.validate();
  snn.validate();
  if (protocol == Protocol::kFixedSplit) {
    if (train_manifest.empty() || test_manifest.empty()) {
      throw std::invalid_argument(
          "RunConfig: fixed protocol needs train_manifest and test_manifest");
    }
  } else if (data_root.empty()) {
    throw std::invalid_argument("RunConfig: data_root required");
  }
  if ((resize_h == 0) != (resize_w == 0)) {
    throw std::invalid_argument("RunConfig: resize_h and resize_w go together");
  }
}

}  // namespace staf
