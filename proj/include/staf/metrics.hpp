#pragma once

#include <span>
#include <string>
#include <vector>

#include "staf/dataset.hpp"

namespace staf {

// k x k counts, rows = truth, columns = prediction.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::size_t> counts;

  std::size_t at(std::size_t truth, std::size_t pred) const {
    return counts[truth * classes.size() + pred];
  }
  std::size_t total() const;
  std::size_t trace() const;
  // Header row of class names, then one count row per class.
  std::string to_csv() const;
};

struct Evaluation {
  double accuracy = 0.0;  // percent
  ConfusionMatrix confusion;
};

Evaluation evaluate(std::span<const std::string> predictions,
                    std::span<const std::string> truth);

enum class Protocol { kKthSplit, kLeaveOneOut, kFixedSplit };

Protocol parse_protocol(const std::string& name);
std::string protocol_name(Protocol p);

struct SplitResult {
  std::vector<ManifestEntry> train;
  std::vector<ManifestEntry> test;
  std::vector<std::string> warnings;  // e.g. subjects outside the protocol
};

// The fixed training/testing subject lists of the KTH protocol; entries
// with unknown subjects are excluded with a warning.
SplitResult split_kth(const std::vector<ManifestEntry>& entries);

// One fold per subject, that subject held out for testing.
std::vector<SplitResult> split_leave_one_out(
    const std::vector<ManifestEntry>& entries);

}  // namespace staf
