#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "staf/dataset.hpp"
#include "staf/errors.hpp"
#include "staf/frame.hpp"
#include "staf/rng.hpp"
#include "staf/tensor_io.hpp"
#include "test_util.hpp"

using namespace staf;
using test::TempDir;

TEST_CASE("frame construction enforces the [0,1] invariant") {
  CHECK_NOTHROW(Frame(2, 2, 1, {0.0f, 0.5f, 1.0f, 0.25f}));
  CHECK_THROWS_AS(Frame(1, 2, 1, {0.0f, 1.5f}), std::invalid_argument);
  CHECK_THROWS_AS(Frame(1, 2, 1, {-0.1f, 0.5f}), std::invalid_argument);
  CHECK_THROWS_AS(Frame(1, 2, 1, {std::nanf(""), 0.5f}), std::invalid_argument);
  CHECK_THROWS_AS(Frame(2, 2, 1, {0.0f, 0.5f}), std::invalid_argument);

  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<float> data(9, 0.5f);
    data[rng.next_below(9)] =
        rng.uniform() < 0.5 ? static_cast<float>(rng.uniform(1.0001, 10.0))
                            : static_cast<float>(rng.uniform(-10.0, -0.0001));
    CHECK_THROWS_AS(Frame(3, 3, 1, std::move(data)), std::invalid_argument);
  }
}

TEST_CASE("tensor file round-trip is bit-exact on randomized shapes") {
  TempDir dir("tensor");
  Rng rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const int ndim = 1 + static_cast<int>(rng.next_below(4));
    std::vector<std::uint32_t> dims(ndim);
    std::size_t count = 1;
    for (auto& d : dims) {
      d = static_cast<std::uint32_t>(rng.next_below(6));  // zero dims allowed
      count *= d;
    }
    std::vector<float> values(count);
    for (auto& v : values) v = static_cast<float>(rng.uniform(-1e6, 1e6));

    const auto path = dir.path() / ("t" + std::to_string(trial) + ".staf");
    write_tensor(path, dims, values);
    const TensorData back = read_tensor(path);
    CHECK(back.dims == dims);
    REQUIRE(back.values.size() == values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      CHECK(std::memcmp(&back.values[i], &values[i], sizeof(float)) == 0);
    }
  }
}

TEST_CASE("tensor file layout matches the documented header size") {
  TempDir dir("header");
  const Frame f(2, 2, 1, {0.0f, 0.5f, 0.25f, 1.0f});
  const auto path = dir.path() / "f.staf";
  const std::uint32_t dims[2] = {2, 2};
  write_tensor(path, dims, f.values());
  // magic + version + dtype + ndim + 2 dims + 4 floats
  CHECK(std::filesystem::file_size(path) == 4 + 2 + 1 + 1 + 8 + 16);

  std::ifstream in(path, std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  CHECK(std::string(magic, 4) == "STAF");
}

TEST_CASE("frame tensors round-trip through the 3-d layout") {
  TempDir dir("frame_tensor");
  Rng rng(9);
  Frame f(4, 5, 2);
  for (float& v : f.values()) v = static_cast<float>(rng.uniform());
  const auto path = dir.path() / "frame.staf";
  write_frame_tensor(path, f);
  CHECK(read_frame_tensor(path) == f);

  // Values outside [0,1] are rejected at load as a format error.
  const std::uint32_t dims[3] = {1, 1, 1};
  write_tensor(path, dims, std::vector<float>{1.5f});
  CHECK_THROWS_AS(read_frame_tensor(path), FormatError);
}

TEST_CASE("tensor with a zero dim yields an empty but valid file") {
  TempDir dir("zero");
  const auto path = dir.path() / "empty.staf";
  const std::uint32_t dims[1] = {0};
  write_tensor(path, dims, {});
  const TensorData back = read_tensor(path);
  CHECK(back.dims == std::vector<std::uint32_t>{0});
  CHECK(back.values.empty());
}

TEST_CASE("corrupt magic and truncation raise format errors") {
  TempDir dir("corrupt");
  const auto path = dir.path() / "bad.staf";
  const std::uint32_t dims[1] = {2};
  write_tensor(path, dims, std::vector<float>{1.0f, 2.0f});

  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.put('X');  // "XTAF"
  }
  CHECK_THROWS_AS(read_tensor(path), FormatError);

  const auto short_path = dir.path() / "short.staf";
  write_tensor(short_path, dims, std::vector<float>{1.0f, 2.0f});
  std::filesystem::resize_file(short_path, 12);
  CHECK_THROWS_AS(read_tensor(short_path), FormatError);
}

TEST_CASE("resize_bilinear identity and constants") {
  const Frame f(2, 2, 1, {0.1f, 0.2f, 0.3f, 0.4f});
  CHECK(resize_bilinear(f, 2, 2) == f);

  const Frame c = Frame::filled(2, 2, 1, 0.5f);
  const Frame up = resize_bilinear(c, 5, 7);
  for (float v : up.values()) CHECK(v == doctest::Approx(0.5f));

  CHECK_THROWS_AS(resize_bilinear(f, 0, 2), std::invalid_argument);
}

TEST_CASE("resize_bilinear interpolates a 1x2 ramp as derived by hand") {
  // Sample centers at -0.25, 0.25, 0.75, 1.25 against sources {0, 1}.
  const Frame f(1, 2, 1, {0.0f, 1.0f});
  const Frame up = resize_bilinear(f, 1, 4);
  CHECK(up.at(0, 0) == doctest::Approx(0.0));
  CHECK(up.at(0, 1) == doctest::Approx(0.25));
  CHECK(up.at(0, 2) == doctest::Approx(0.75));
  CHECK(up.at(0, 3) == doctest::Approx(1.0));
  for (int x = 1; x < 4; ++x) CHECK(up.at(0, x) >= up.at(0, x - 1));
}

TEST_CASE("flip_horizontal mirrors and is involutive") {
  const Frame f(1, 2, 1, {0.0f, 1.0f});
  const Frame flipped = flip_horizontal(f);
  CHECK(flipped.at(0, 0) == 1.0f);
  CHECK(flipped.at(0, 1) == 0.0f);
  CHECK(flip_horizontal(flipped) == f);
}

TEST_CASE("pgm round-trip through 8-bit quantization") {
  TempDir dir("pgm");
  Frame f(3, 4, 1);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.values()[i] = static_cast<float>(i) / 255.0f;
  }
  const auto path = dir.path() / "f.pgm";
  write_pgm(path, f);
  const Frame back = read_pgm(path);
  REQUIRE(back.same_shape(f));
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(back.values()[i] == doctest::Approx(f.values()[i]).epsilon(1e-6));
  }
}

TEST_CASE("load_sequence reads ordered pgm frames and parses identity") {
  TempDir dir("seq");
  const auto seq_dir = dir.path() / "walking" / "person11_d1";
  std::filesystem::create_directories(seq_dir);
  for (int i = 0; i < 3; ++i) {
    write_pgm(seq_dir / ("frame_0000" + std::to_string(i) + ".pgm"),
              Frame::filled(4, 4, 1, 1.0f));
  }

  const LabeledSequence seq = load_sequence(seq_dir);
  CHECK(seq.label == "walking");
  CHECK(seq.subject == "11");
  CHECK(seq.scenario == "d1");
  REQUIRE(seq.frames.size() == 3);
  for (const Frame& f : seq.frames) {
    for (float v : f.values()) CHECK(v == 1.0f);
  }

  // Deterministic given a directory snapshot.
  const LabeledSequence again = load_sequence(seq_dir);
  CHECK(again.frames == seq.frames);
}

TEST_CASE("load_sequence error paths") {
  TempDir dir("seqerr");
  CHECK_THROWS_AS(load_sequence(dir.path() / "missing"), IngestionError);

  const auto empty_dir = dir.path() / "run" / "person01_d1";
  std::filesystem::create_directories(empty_dir);
  CHECK_THROWS_AS(load_sequence(empty_dir), IngestionError);

  const auto mixed_dir = dir.path() / "run" / "person02_d1";
  std::filesystem::create_directories(mixed_dir);
  write_pgm(mixed_dir / "a.pgm", Frame::filled(4, 4, 1, 0.5f));
  write_pgm(mixed_dir / "b.pgm", Frame::filled(3, 4, 1, 0.5f));
  CHECK_THROWS_AS(load_sequence(mixed_dir), FormatError);
}

TEST_CASE("load_sequence accepts a single tensor per sequence") {
  TempDir dir("seqstaf");
  const auto seq_dir = dir.path() / "jog" / "person03_d2";
  std::filesystem::create_directories(seq_dir);
  const std::uint32_t dims[3] = {2, 2, 3};
  const std::vector<float> values = {0.0f, 0.1f, 0.2f, 0.3f, 0.4f, 0.5f,
                                     0.6f, 0.7f, 0.8f, 0.9f, 1.0f, 0.0f};
  write_tensor(seq_dir / "frames.staf", dims, values);

  const LabeledSequence seq = load_sequence(seq_dir);
  REQUIRE(seq.frames.size() == 2);
  CHECK(seq.frames[0].height() == 2);
  CHECK(seq.frames[0].width() == 3);
  CHECK(seq.frames[1].at(1, 2) == 0.0f);
}

TEST_CASE("manifest round-trip and dataset scan") {
  TempDir dir("manifest");
  for (const char* label : {"boxing", "walking"}) {
    for (const char* tag : {"person11_d1", "person02_d3"}) {
      const auto d = dir.path() / label / tag;
      std::filesystem::create_directories(d);
      write_pgm(d / "frame_00000.pgm", Frame::filled(2, 2, 1, 0.5f));
    }
  }
  const auto entries = scan_dataset(dir.path());
  REQUIRE(entries.size() == 4);
  CHECK(entries[0].label == "boxing");
  CHECK(entries[0].subject == "02");

  const auto manifest = dir.path() / "all.manifest";
  write_manifest(manifest, entries);
  const auto back = read_manifest(manifest);
  REQUIRE(back.size() == entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    CHECK(back[i].path == entries[i].path);
    CHECK(back[i].label == entries[i].label);
    CHECK(back[i].subject == entries[i].subject);
  }
}
