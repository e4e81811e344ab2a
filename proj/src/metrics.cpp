#include "staf/metrics.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace staf {
namespace {

const std::set<std::string> kKthTrainSubjects = {"11", "12", "13", "14",
                                                 "15", "16", "17", "18"};
const std::set<std::string> kKthTestSubjects = {"02", "03", "05", "06", "07",
                                                "08", "09", "10", "22"};

}  // namespace

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t t = 0;
  for (std::size_t i = 0; i < classes.size(); ++i) t += at(i, i);
  return t;
}

std::string ConfusionMatrix::to_csv() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    out << classes[i] << (i + 1 < classes.size() ? "," : "\n");
  }
  for (std::size_t r = 0; r < classes.size(); ++r) {
    for (std::size_t c = 0; c < classes.size(); ++c) {
      out << at(r, c) << (c + 1 < classes.size() ? "," : "\n");
    }
  }
  return out.str();
}

Evaluation evaluate(std::span<const std::string> predictions,
                    std::span<const std::string> truth) {
  if (predictions.size() != truth.size() || truth.empty()) {
    throw std::invalid_argument("evaluate: label lists must match and be non-empty");
  }
  std::set<std::string> class_set(truth.begin(), truth.end());
  class_set.insert(predictions.begin(), predictions.end());

  Evaluation e;
  e.confusion.classes.assign(class_set.begin(), class_set.end());
  const std::size_t k = e.confusion.classes.size();
  e.confusion.counts.assign(k * k, 0);
  auto index = [&](const std::string& label) {
    return static_cast<std::size_t>(
        std::lower_bound(e.confusion.classes.begin(),
                         e.confusion.classes.end(), label) -
        e.confusion.classes.begin());
  };
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    e.confusion.counts[index(truth[i]) * k + index(predictions[i])]++;
    if (truth[i] == predictions[i]) ++correct;
  }
  e.accuracy = 100.0 * static_cast<double>(correct) /
               static_cast<double>(truth.size());
  return e;
}

Protocol parse_protocol(const std::string& name) {
  if (name == "kth") return Protocol::kKthSplit;
  if (name == "leave-one-out") return Protocol::kLeaveOneOut;
  if (name == "fixed") return Protocol::kFixedSplit;
  throw std::invalid_argument("unknown protocol: " + name);
}

std::string protocol_name(Protocol p) {
  switch (p) {
    case Protocol::kKthSplit: return "kth";
    case Protocol::kLeaveOneOut: return "leave-one-out";
    case Protocol::kFixedSplit: return "fixed";
  }
  return "?";
}

SplitResult split_kth(const std::vector<ManifestEntry>& entries) {
  SplitResult r;
  std::set<std::string> skipped;
  for (const ManifestEntry& e : entries) {
    if (kKthTrainSubjects.count(e.subject)) {
      r.train.push_back(e);
    } else if (kKthTestSubjects.count(e.subject)) {
      r.test.push_back(e);
    } else {
      skipped.insert(e.subject);
    }
  }
  for (const std::string& s : skipped) {
    r.warnings.push_back("subject " + s + " not in the KTH protocol lists; excluded");
  }
  return r;
}

std::vector<SplitResult> split_leave_one_out(
    const std::vector<ManifestEntry>& entries) {
  std::set<std::string> subjects;
  for (const ManifestEntry& e : entries) subjects.insert(e.subject);

  std::vector<SplitResult> folds;
  for (const std::string& held_out : subjects) {
    SplitResult r;
    for (const ManifestEntry& e : entries) {
      (e.subject == held_out ? r.test : r.train).push_back(e);
    }
    folds.push_back(std::move(r));
  }
  return folds;
}

}  // namespace staf
