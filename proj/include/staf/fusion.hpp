#pragma once

#include <span>
#include <string>
#include <vector>

#include "staf/frame.hpp"

namespace staf {

enum class FusionMode { kNone, kEarly, kLate };

FusionMode parse_fusion_mode(const std::string& name);
std::string fusion_mode_name(FusionMode m);

// Row interleaving of n equally sized frames into one (n*h) x w frame:
// output row k takes row i of frame f where k = i*n + f.
Frame early_fuse(std::span<const Frame> frames);

// Inverse of early_fuse; recovers the n input frames exactly.
std::vector<Frame> early_unfuse(const Frame& fused, int n);

// Plain concatenation, no length checks.
std::vector<float> concat_features(std::span<const std::vector<float>> parts);

// Concatenation of per-frame feature vectors in input order; rejects
// inconsistent per-frame lengths.
std::vector<float> late_fuse(std::span<const std::vector<float>> features);

}  // namespace staf
