#include "staf/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

#include "staf/errors.hpp"
#include "staf/rng.hpp"
#include "staf/tensor_io.hpp"

namespace staf {
namespace {

std::vector<float> standardize(const SvmModel& m, std::span<const float> x) {
  std::vector<float> z(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) {
    z[d] = (x[d] - m.mean[d]) * m.inv_std[d];
  }
  return z;
}

}  // namespace

SvmModel svm_train(const std::vector<std::vector<float>>& features,
                   const std::vector<std::string>& labels, const SvmParams& p,
                   std::uint64_t seed) {
  if (features.empty() || features.size() != labels.size()) {
    throw std::invalid_argument("svm_train: features/labels size mismatch");
  }
  const std::size_t dim = features[0].size();
  for (const auto& f : features) {
    if (f.size() != dim) {
      throw std::invalid_argument("svm_train: inconsistent feature dims");
    }
  }
  std::set<std::string> class_set(labels.begin(), labels.end());
  if (class_set.size() < 2) {
    throw std::invalid_argument("svm_train: need at least two classes");
  }
  if (p.c <= 0.0 || p.epochs < 0) {
    throw std::invalid_argument("svm_train: bad params");
  }

  SvmModel m;
  m.feature_dim = static_cast<int>(dim);
  m.classes.assign(class_set.begin(), class_set.end());

  // Training-set standardization, stored with the model.
  m.mean.assign(dim, 0.0f);
  m.inv_std.assign(dim, 0.0f);
  const double inv_n = 1.0 / static_cast<double>(features.size());
  for (std::size_t d = 0; d < dim; ++d) {
    double sum = 0.0;
    for (const auto& f : features) sum += f[d];
    const double mean = sum * inv_n;
    double var = 0.0;
    for (const auto& f : features) {
      const double diff = f[d] - mean;
      var += diff * diff;
    }
    const double sd = std::sqrt(var * inv_n);
    m.mean[d] = static_cast<float>(mean);
    m.inv_std[d] = static_cast<float>(1.0 / std::max(sd, 1e-8));
  }
  std::vector<std::vector<float>> z(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    z[i] = standardize(m, features[i]);
  }

  // Canonical visiting base order: by label, then features, so results do
  // not depend on how the caller arranged the samples.
  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (labels[a] != labels[b]) return labels[a] < labels[b];
    return z[a] < z[b];
  });

  const std::size_t n = features.size();
  const double lambda = 1.0 / (p.c * static_cast<double>(n));
  const std::size_t n_classes = m.classes.size();
  std::vector<std::vector<double>> w(n_classes, std::vector<double>(dim, 0.0));
  std::vector<double> b(n_classes, 0.0);
  std::vector<int> label_index(n);
  for (std::size_t i = 0; i < n; ++i) {
    label_index[i] =
        static_cast<int>(std::lower_bound(m.classes.begin(), m.classes.end(),
                                          labels[i]) -
                         m.classes.begin());
  }

  Rng rng(seed);
  std::size_t t = 0;
  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double shrink = 1.0 - eta * lambda;
      const std::vector<float>& x = z[i];
      for (std::size_t cls = 0; cls < n_classes; ++cls) {
        const double y = label_index[i] == static_cast<int>(cls) ? 1.0 : -1.0;
        double margin = b[cls];
        for (std::size_t d = 0; d < dim; ++d) margin += w[cls][d] * x[d];
        margin *= y;
        if (margin < 1.0) {
          for (std::size_t d = 0; d < dim; ++d) {
            w[cls][d] = shrink * w[cls][d] + eta * y * x[d];
          }
          b[cls] += eta * y;
        } else {
          for (std::size_t d = 0; d < dim; ++d) w[cls][d] *= shrink;
        }
      }
    }
  }

  m.weights.resize(n_classes);
  m.biases.resize(n_classes);
  for (std::size_t cls = 0; cls < n_classes; ++cls) {
    m.weights[cls].assign(w[cls].begin(), w[cls].end());
    m.biases[cls] = static_cast<float>(b[cls]);
  }
  return m;
}

std::vector<double> svm_scores(const SvmModel& m, std::span<const float> x) {
  if (static_cast<int>(x.size()) != m.feature_dim) {
    throw std::invalid_argument("svm_scores: feature dim mismatch");
  }
  const std::vector<float> z = standardize(m, x);
  std::vector<double> scores(m.classes.size());
  for (std::size_t cls = 0; cls < m.classes.size(); ++cls) {
    double s = m.biases[cls];
    for (std::size_t d = 0; d < z.size(); ++d) s += m.weights[cls][d] * z[d];
    scores[cls] = s;
  }
  return scores;
}

std::string svm_predict(const SvmModel& m, std::span<const float> x) {
  const std::vector<double> scores = svm_scores(m, x);
  std::size_t best = 0;
  for (std::size_t cls = 1; cls < scores.size(); ++cls) {
    if (scores[cls] > scores[best]) best = cls;
  }
  return m.classes[best];
}

void save_svm(const std::filesystem::path& base, const SvmModel& m) {
  const std::uint32_t wdims[2] = {static_cast<std::uint32_t>(m.classes.size()),
                                  static_cast<std::uint32_t>(m.feature_dim)};
  std::vector<float> flat;
  flat.reserve(m.classes.size() * m.feature_dim);
  for (const auto& w : m.weights) flat.insert(flat.end(), w.begin(), w.end());
  write_tensor(base, wdims, flat);

  // biases + standardization stats in one side tensor
  std::vector<float> extras;
  extras.insert(extras.end(), m.biases.begin(), m.biases.end());
  extras.insert(extras.end(), m.mean.begin(), m.mean.end());
  extras.insert(extras.end(), m.inv_std.begin(), m.inv_std.end());
  const std::uint32_t edims[1] = {static_cast<std::uint32_t>(extras.size())};
  std::filesystem::path epath = base;
  epath.replace_extension(".extras.staf");
  write_tensor(epath, edims, extras);

  std::filesystem::path mpath = base;
  mpath.replace_extension(".meta");
  std::ofstream out(mpath, std::ios::trunc);
  if (!out) throw FormatError("save_svm: cannot open " + mpath.string());
  for (const auto& c : m.classes) out << "class=" << c << "\n";
}

SvmModel load_svm(const std::filesystem::path& base) {
  TensorData w = read_tensor(base);
  if (w.dims.size() != 2) throw FormatError("load_svm: weights must be 2-d");

  SvmModel m;
  const std::size_t n_classes = w.dims[0];
  m.feature_dim = static_cast<int>(w.dims[1]);
  m.weights.resize(n_classes);
  for (std::size_t cls = 0; cls < n_classes; ++cls) {
    m.weights[cls].assign(w.values.begin() + cls * m.feature_dim,
                          w.values.begin() + (cls + 1) * m.feature_dim);
  }

  std::filesystem::path epath = base;
  epath.replace_extension(".extras.staf");
  TensorData extras = read_tensor(epath);
  const std::size_t expected = n_classes + 2 * m.feature_dim;
  if (extras.values.size() != expected) {
    throw FormatError("load_svm: extras size mismatch");
  }
  m.biases.assign(extras.values.begin(), extras.values.begin() + n_classes);
  m.mean.assign(extras.values.begin() + n_classes,
                extras.values.begin() + n_classes + m.feature_dim);
  m.inv_std.assign(extras.values.begin() + n_classes + m.feature_dim,
                   extras.values.end());

  std::filesystem::path mpath = base;
  mpath.replace_extension(".meta");
  std::ifstream in(mpath);
  if (!in) throw FormatError("load_svm: cannot open " + mpath.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("class=", 0) == 0) m.classes.push_back(line.substr(6));
  }
  if (m.classes.size() != n_classes) {
    throw FormatError("load_svm: class list size mismatch");
  }
  return m;
}

}  // namespace staf
