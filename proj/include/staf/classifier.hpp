#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace staf {

struct SvmParams {
  double c = 1.0;    // inverse regularization strength
  int epochs = 50;
};

// One-vs-rest linear classifiers over standardized features. Weights and
// biases act in the standardized space; mean/inv_std are the training-set
// statistics stored with the model.
struct SvmModel {
  int feature_dim = 0;
  std::vector<std::string> classes;          // sorted; ties resolve to the
                                             // earliest entry
  std::vector<std::vector<float>> weights;   // one per class
  std::vector<float> biases;
  std::vector<float> mean;
  std::vector<float> inv_std;
};

// Stochastic subgradient descent on the L2-regularized hinge loss with a
// 1/(lambda*t) learning-rate schedule, lambda = 1/(c*n). Samples are put
// in a canonical order before the seed-driven shuffling, so training is
// invariant to the order the caller presents them in.
SvmModel svm_train(const std::vector<std::vector<float>>& features,
                   const std::vector<std::string>& labels, const SvmParams& p,
                   std::uint64_t seed);

// Argmax of per-class scores; ties break toward the lowest class index.
std::string svm_predict(const SvmModel& m, std::span<const float> x);

std::vector<double> svm_scores(const SvmModel& m, std::span<const float> x);

// Tensors plus a text sidecar, same scheme as the layer files.
void save_svm(const std::filesystem::path& base, const SvmModel& m);
SvmModel load_svm(const std::filesystem::path& base);

}  // namespace staf
