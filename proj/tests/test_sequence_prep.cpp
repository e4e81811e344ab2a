#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "staf/sequence_prep.hpp"
#include "test_util.hpp"

using namespace staf;

namespace {

Frame constant(float v) { return Frame::filled(4, 4, 1, v); }

std::vector<Frame> frames_with_scores(const std::vector<float>& scores) {
  std::vector<Frame> out;
  for (float s : scores) out.push_back(constant(s));
  return out;
}

}  // namespace

TEST_CASE("background_subtract is the absolute difference") {
  CHECK(background_subtract(constant(0.5f), constant(0.5f)) == constant(0.0f));
  CHECK(background_subtract(constant(0.0f), constant(1.0f)) == constant(1.0f));
  const Frame d = background_subtract(Frame(1, 1, 1, {0.2f}), Frame(1, 1, 1, {0.7f}));
  CHECK(d.at(0, 0) == doctest::Approx(0.5f));
  CHECK_THROWS_AS(background_subtract(Frame(2, 2, 1), Frame(2, 3, 1)),
                  std::invalid_argument);
}

TEST_CASE("motion_score averages all pixels") {
  CHECK(motion_score(constant(0.0f)) == 0.0);
  CHECK(motion_score(constant(1.0f)) == 1.0);
  CHECK(motion_score(Frame(2, 2, 1, {0.0f, 0.0f, 1.0f, 1.0f})) ==
        doctest::Approx(0.5));
}

TEST_CASE("select_frames applies threshold then skip") {
  PrepConfig cfg;
  cfg.motion_threshold = 0.5;
  cfg.skip = 2;
  const auto seq = frames_with_scores({0.9f, 0.9f, 0.9f, 0.9f, 0.9f, 0.9f, 0.9f});
  const auto kept = select_frames(seq, cfg);
  REQUIRE(kept.size() == 3);  // survivors at indices 0, 3, 6
  CHECK(kept[0] == seq[0]);
  CHECK(kept[1] == seq[3]);
  CHECK(kept[2] == seq[6]);

  cfg.skip = 0;
  const auto mixed = frames_with_scores({0.9f, 0.1f, 0.9f, 0.9f});
  const auto kept2 = select_frames(mixed, cfg);
  REQUIRE(kept2.size() == 3);
  CHECK(kept2[0] == mixed[0]);
  CHECK(kept2[1] == mixed[2]);
  CHECK(kept2[2] == mixed[3]);

  const auto none = select_frames(frames_with_scores({0.1f, 0.2f}), cfg);
  CHECK(none.empty());
}

TEST_CASE("select_frames output is a subsequence of its input") {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> scores(10 + rng.next_below(20));
    for (auto& s : scores) s = rng.uniform();
    PrepConfig cfg;
    cfg.motion_threshold = rng.uniform();
    cfg.skip = static_cast<int>(rng.next_below(4));
    const auto kept = select_indices(scores, cfg);
    for (std::size_t i = 1; i < kept.size(); ++i) CHECK(kept[i] > kept[i - 1]);
    for (std::size_t i : kept) CHECK(scores[i] > cfg.motion_threshold);
  }
}

TEST_CASE("assemble_samples window arithmetic") {
  PrepConfig cfg;
  cfg.sample_len = 10;
  cfg.overlap_stride = 1;
  CHECK(assemble_samples(frames_with_scores(std::vector<float>(12, 0.5f)), cfg)
            .size() == 3);
  CHECK(assemble_samples(frames_with_scores(std::vector<float>(9, 0.5f)), cfg)
            .empty());

  cfg.sample_len = 48;
  cfg.overlap_stride = 12;
  CHECK(assemble_samples(frames_with_scores(std::vector<float>(48, 0.5f)), cfg)
            .size() == 1);
}

TEST_CASE("assemble_samples count matches the closed form") {
  Rng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.next_below(60);
    PrepConfig cfg;
    cfg.sample_len = 1 + static_cast<int>(rng.next_below(12));
    cfg.overlap_stride = 1 + static_cast<int>(rng.next_below(8));
    const auto samples =
        assemble_samples(frames_with_scores(std::vector<float>(n, 0.5f)), cfg);
    for (const auto& s : samples) {
      CHECK(s.size() == static_cast<std::size_t>(cfg.sample_len));
    }
    const std::size_t expected =
        n >= static_cast<std::size_t>(cfg.sample_len)
            ? (n - cfg.sample_len) / cfg.overlap_stride + 1
            : 0;
    CHECK(samples.size() == expected);
  }
}

TEST_CASE("gaussian noise respects the frame invariant") {
  const auto seq = frames_with_scores({0.0f, 0.5f, 1.0f});

  const auto same = add_gaussian_noise(seq, 0.0, 7);
  CHECK(same == seq);

  const auto noisy = add_gaussian_noise(seq, 0.3, 7);
  REQUIRE(noisy.size() == seq.size());
  bool changed = false;
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    for (float v : noisy[i].values()) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
    changed = changed || !(noisy[i] == seq[i]);
  }
  CHECK(changed);

  // Deterministic given the seed.
  CHECK(add_gaussian_noise(seq, 0.3, 7) == noisy);
  Rng rng(1);
  CHECK_THROWS_AS(add_gaussian_noise(seq[0], -0.1, rng), std::invalid_argument);
}

TEST_CASE("flip doubles a dataset exactly and is involutive") {
  Frame f(2, 3, 1, {0.0f, 0.25f, 0.5f, 0.6f, 0.8f, 1.0f});
  const auto seq = std::vector<Frame>{f, flip_horizontal(f)};
  const auto flipped = flip_sequence(seq);
  CHECK(flipped.size() == seq.size());
  CHECK(flip_sequence(flipped) == seq);
  // Flipping preserves motion scores, so frame selection is unchanged.
  CHECK(motion_score(flipped[0]) == doctest::Approx(motion_score(seq[0])));
}
