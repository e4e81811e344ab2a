#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "staf/frame.hpp"

namespace staf {

// One video: its frames plus the identity parsed from the directory layout
// <root>/<label>/<subjectTag>/, e.g. walking/person11_d1.
struct LabeledSequence {
  std::vector<Frame> frames;
  std::string label;
  std::string subject;
  std::string scenario;
};

// Loads the frames of one sequence directory: either lexicographically
// ordered binary PGM files or a single .staf tensor of shape (n, h, w) or
// (n, h, w, c). Intensities are normalized to [0, 1].
LabeledSequence load_sequence(const std::filesystem::path& dir);

// Binary (P5) portable graymap, 8 or 16 bits per sample.
Frame read_pgm(const std::filesystem::path& path);
// 8-bit single-channel P5 output.
void write_pgm(const std::filesystem::path& path, const Frame& f);

// "person11" -> ("11", ""); "person11_d1" -> ("11", "d1").
std::pair<std::string, std::string> parse_subject_tag(const std::string& tag);

struct ManifestEntry {
  std::filesystem::path path;
  std::string label;
  std::string subject;
};

// Tab-separated lines: path, label, subject. Relative paths resolve
// against the manifest's directory on read.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries);

// All <label>/<subjectTag> sequence directories under a dataset root,
// sorted by path.
std::vector<ManifestEntry> scan_dataset(const std::filesystem::path& root);

}  // namespace staf
