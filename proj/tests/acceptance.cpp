// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "staf/classifier.hpp"
#include "staf/fusion.hpp"
#include "staf/pipeline.hpp"
#include "staf/representations.hpp"
#include "staf/snn.hpp"
#include "staf/synthetic.hpp"
#include "test_util.hpp"

using namespace staf;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& what, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL",
              criterion, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------------------
// 1. Flow oracle: 20 textured frames, every integer shift in {-3..3}^2.

void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(2024);
  std::vector<double> errors;
  double max_error = 0.0;
  const FlowParams params;
  for (int frame = 0; frame < 20; ++frame) {
    const test::SinusoidTexture tex =
        test::SinusoidTexture::random(rng, 8, 12.0, 28.0);
    const Frame a = tex.render(64, 64);
    for (int sx = -3; sx <= 3; ++sx) {
      for (int sy = -3; sy <= 3; ++sy) {
        const Frame b = tex.render(64, 64, sx, sy);
        const FlowField flow = farneback_flow(a, b, params);
        const std::size_t before = errors.size();
        test::endpoint_errors(flow, sx, sy, 12, errors);
        for (std::size_t i = before; i < errors.size(); ++i) {
          max_error = std::max(max_error, errors[i]);
        }
      }
    }
  }
  const double med = test::median(errors);
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "median " << med << " px, max " << max_error << " px, "
         << elapsed << " s";
  report(1, "flow recovers integer translations",
         med <= 0.3 && max_error <= 1.0 && elapsed < 30.0, detail.str());
}

// ---------------------------------------------------------------------------
// 2. Fusion equivalence against the index-formula oracle.

void criterion_2() {
  Rng rng(7);
  bool exact = true;
  bool round_trip = true;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(10));
    const int h = 1 + static_cast<int>(rng.next_below(12));
    const int w = 1 + static_cast<int>(rng.next_below(12));
    const int c = 1 + static_cast<int>(rng.next_below(3));
    std::vector<Frame> frames;
    for (int f = 0; f < n; ++f) {
      Frame fr(h, w, c);
      for (float& v : fr.values()) v = static_cast<float>(rng.uniform());
      frames.push_back(std::move(fr));
    }
    const Frame fused = early_fuse(frames);

    // Oracle: direct evaluation of output row k = i*n + f.
    for (int f = 0; f < n; ++f) {
      for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
          for (int ch = 0; ch < c; ++ch) {
            if (fused.at(i * n + f, j, ch) != frames[f].at(i, j, ch)) {
              exact = false;
            }
          }
        }
      }
    }
    const std::vector<Frame> back = early_unfuse(fused, n);
    for (int f = 0; f < n; ++f) {
      if (!(back[f] == frames[f])) round_trip = false;
    }
  }
  report(2, "early fusion matches k=i*n+f exactly and round-trips",
         exact && round_trip,
         exact ? "100 random stacks exact" : "mismatch found");
}

// ---------------------------------------------------------------------------
// 3. STDP invariants.

void criterion_3() {
  StdpParams p;
  LayerState layer;
  layer.geometry = {2, 3, 3, 1, 1, 0};
  layer.thresholds.assign(2, 1.0);
  layer.weights.resize(2 * 9);
  Rng rng(11);
  for (double& w : layer.weights) w = rng.uniform();

  SpikeList input;
  input.height = 3;
  input.width = 3;
  input.channels = 1;
  bool bounded = true;
  for (int trial = 0; trial < 100000; ++trial) {
    input.events.clear();
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x < 3; ++x) {
        if (rng.uniform() < 0.6) input.events.push_back({x, y, 0, rng.uniform()});
      }
    }
    const OutputSpike winner{0, 0, static_cast<int>(rng.next_below(2)),
                             rng.uniform()};
    stdp_update(layer, winner, input, p, 0.1);
    if (trial % 1000 == 0) {
      for (double w : layer.weights) {
        if (!(w >= 0.0 && w <= 1.0)) bounded = false;
      }
    }
  }
  for (double w : layer.weights) {
    if (!(w >= 0.0 && w <= 1.0)) bounded = false;
  }

  // Exact causal update at w = 0.5.
  LayerState single;
  single.geometry = {1, 1, 1, 1, 1, 0};
  single.weights = {0.5};
  single.thresholds = {1.0};
  SpikeList one;
  one.height = 1;
  one.width = 1;
  one.channels = 1;
  one.events.push_back({0, 0, 0, 0.35});
  stdp_update(single, {0, 0, 0, 0.4}, one, p, 0.1);
  const double delta = single.weights[0] - 0.5;
  const double expected = 0.1 * std::exp(-0.5);
  const bool formula = std::fabs(delta - expected) <= 1e-9;

  std::ostringstream detail;
  detail << "10^5 updates bounded, causal delta " << delta << " vs "
         << expected;
  report(3, "stdp keeps weights in [0,1] and matches the soft-bound formula",
         bounded && formula, detail.str());
}

// ---------------------------------------------------------------------------
// 4. Threshold convergence on a stationary 8x8 pattern set.

void criterion_4() {
  Rng prng(101);
  std::vector<Frame> patterns;
  for (int i = 0; i < 10; ++i) {
    Frame f(8, 8, 1);
    // Dense low intensities: spike times cluster around the target.
    for (float& v : f.values()) v = static_cast<float>(prng.uniform(0.02, 0.08));
    patterns.push_back(std::move(f));
  }
  const LayerGeometry geometry{4, 5, 5, 1, 1, 2};
  const StdpParams sp;        // Table-style defaults, 100 epochs
  const ThresholdParams tp;   // target 0.95, eta 1.0, leak 0.001

  TrainStats stats;
  train_layer(patterns, geometry, sp, tp, 1, 1.0, 0.0, &stats);
  const double mean_t = stats.mean_winner_time.back();
  const int winners = stats.winners_per_epoch.back();
  std::ostringstream detail;
  detail << "last-epoch mean winner time " << mean_t << " over " << winners
         << " winners";
  report(4, "mean winner fire time converges to 0.95 +- 0.05",
         winners > 0 && std::fabs(mean_t - 0.95) <= 0.05, detail.str());
}

// ---------------------------------------------------------------------------
// 5. DoG equivalence against dense convolution.

Frame dog_dense_reference(const Frame& f, const DoGParams& p) {
  const int radius = p.kernel_size / 2;
  const int taps = p.kernel_size;
  std::vector<double> kernel(static_cast<std::size_t>(taps) * taps);
  double sum_c = 0.0, sum_s = 0.0;
  std::vector<double> kc(kernel.size()), ks(kernel.size());
  for (int i = -radius; i <= radius; ++i) {
    for (int j = -radius; j <= radius; ++j) {
      const std::size_t idx = (i + radius) * taps + (j + radius);
      kc[idx] = std::exp(-(i * i + j * j) / (2.0 * p.center_sigma * p.center_sigma));
      ks[idx] = std::exp(-(i * i + j * j) / (2.0 * p.surround_sigma * p.surround_sigma));
      sum_c += kc[idx];
      sum_s += ks[idx];
    }
  }
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    kernel[i] = kc[i] / sum_c - ks[i] / sum_s;
  }
  const int h = f.height();
  const int w = f.width();
  std::vector<std::vector<double>> responses(f.channels());
  double max_abs = 0.0;
  for (int c = 0; c < f.channels(); ++c) {
    responses[c].resize(static_cast<std::size_t>(h) * w);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          for (int j = -radius; j <= radius; ++j) {
            acc += kernel[(i + radius) * taps + (j + radius)] *
                   f.at(std::clamp(y + i, 0, h - 1), std::clamp(x + j, 0, w - 1), c);
          }
        }
        responses[c][static_cast<std::size_t>(y) * w + x] = acc;
        max_abs = std::max(max_abs, std::fabs(acc));
      }
    }
  }
  const double scale = max_abs > 1e-12 ? 1.0 / max_abs : 0.0;
  Frame out(h, w, 2 * f.channels());
  for (int c = 0; c < f.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double r = responses[c][static_cast<std::size_t>(y) * w + x] * scale;
        out.at(y, x, 2 * c) = static_cast<float>(std::max(r, 0.0));
        out.at(y, x, 2 * c + 1) = static_cast<float>(std::max(-r, 0.0));
      }
    }
  }
  return out;
}

void criterion_5() {
  Rng rng(5);
  const DoGParams p;  // center 1.0, surround 4.0, size 7
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int h = 9 + static_cast<int>(rng.next_below(30));
    const int w = 9 + static_cast<int>(rng.next_below(30));
    const int c = 1 + static_cast<int>(rng.next_below(3));
    Frame f(h, w, c);
    for (float& v : f.values()) v = static_cast<float>(rng.uniform());
    const Frame fast = dog_filter(f, p);
    const Frame slow = dog_dense_reference(f, p);
    for (std::size_t i = 0; i < fast.size(); ++i) {
      worst = std::max(worst,
                       std::fabs(static_cast<double>(fast.values()[i]) -
                                 slow.values()[i]));
    }
  }
  std::ostringstream detail;
  detail << "max abs diff " << worst << " over 50 frames";
  report(5, "separable DoG matches dense convolution", worst <= 1e-5,
         detail.str());
}

// ---------------------------------------------------------------------------
// 6. CC masking, exhaustive on a 100x100 sample.

void criterion_6() {
  Rng rng(13);
  const int size = 100;
  FlowField flow(size, size);
  for (std::size_t i = 0; i < flow.dx.size(); ++i) {
    flow.dx[i] = static_cast<float>(rng.uniform(-60.0, 60.0));
    flow.dy[i] = static_cast<float>(rng.uniform(-60.0, 60.0));
  }
  Frame gray(size, size, 1);
  for (float& v : gray.values()) v = static_cast<float>(rng.uniform());

  const Frame cc = repr_cc(flow, gray, 30.0, NormalizationSpec{8.0});
  bool ok = true;
  for (int y = 0; y < size && ok; ++y) {
    for (int x = 0; x < size && ok; ++x) {
      const std::size_t i = flow.index(y, x);
      const double motion = std::fabs(flow.dx[i]) + std::fabs(flow.dy[i]);
      const float expected = motion > 30.0 ? gray.at(y, x) : 0.0f;
      if (cc.at(y, x, 2) != expected) ok = false;
    }
  }
  report(6, "cc channel 3 equals gray iff |dx|+|dy| > 30", ok,
         ok ? "10000 pixels exact" : "mismatch found");
}

// ---------------------------------------------------------------------------
// 7. Grid bijection for EG (36 tiles) and MG (192 tiles).

void criterion_7() {
  const ReprParams params;
  const int th = 12, tw = 12;
  bool eg_ok = true;
  std::set<int> eg_covered;
  for (int hot = 0; hot < kEgFrameCount; ++hot) {
    std::vector<FlowField> flows(kEgFrameCount, FlowField(th, tw));
    for (int y = 3; y < 9; ++y) {
      for (int x = 3; x < 9; ++x) {
        flows[hot].dx[flows[hot].index(y, x)] = 8.0f;
      }
    }
    const Frame grid = repr_eg(flows, params);
    bool any = false;
    for (int y = 0; y < grid.height(); ++y) {
      for (int x = 0; x < grid.width(); ++x) {
        if (grid.at(y, x) == 0.0f) continue;
        const int tile = (y / th) * kEgGridCols + (x / tw);
        if (tile != hot) eg_ok = false;
        any = true;
      }
    }
    if (any) eg_covered.insert(hot);
  }
  eg_ok = eg_ok && eg_covered.size() == kEgFrameCount;

  bool mg_ok = true;
  std::set<int> mg_covered;
  const NormalizationSpec norm{8.0};
  for (int hot = 0; hot < kMgFrameCount; ++hot) {
    for (int channel = 0; channel < 4; ++channel) {
      std::vector<FlowField> flows(kMgFrameCount, FlowField(th, tw));
      const float value = 5.0f;
      for (std::size_t i = 0; i < flows[hot].dx.size(); ++i) {
        switch (channel) {
          case 0: flows[hot].dx[i] = -value; break;
          case 1: flows[hot].dx[i] = value; break;
          case 2: flows[hot].dy[i] = -value; break;
          default: flows[hot].dy[i] = value; break;
        }
      }
      const Frame grid = repr_mg(flows, norm);
      const int expected_tile =
          ((hot / kMgGridCols) * 4 + channel) * kMgGridCols + hot % kMgGridCols;
      bool any = false;
      for (int y = 0; y < grid.height(); ++y) {
        for (int x = 0; x < grid.width(); ++x) {
          if (grid.at(y, x) == 0.0f) continue;
          const int tile = (y / th) * kMgGridCols + (x / tw);
          if (tile != expected_tile) mg_ok = false;
          any = true;
        }
      }
      if (any) mg_covered.insert(expected_tile);
    }
  }
  mg_ok = mg_ok && mg_covered.size() == kMgFrameCount * 4;

  std::ostringstream detail;
  detail << "eg tiles covered " << eg_covered.size() << "/36, mg tiles "
         << mg_covered.size() << "/192";
  report(7, "one-hot flows map to exactly one grid tile", eg_ok && mg_ok,
         detail.str());
}

// ---------------------------------------------------------------------------
// 8-10. Synthetic end-to-end ordering, sample sensitivity, determinism.

RunConfig synthetic_mg_config(const std::filesystem::path& root,
                              const std::filesystem::path& out) {
  RunConfig cfg;
  cfg.method = ReprMethod::kMg;
  cfg.protocol = Protocol::kFixedSplit;
  cfg.train_manifest = root / "train.manifest";
  cfg.test_manifest = root / "test.manifest";
  cfg.resize_h = 32;
  cfg.resize_w = 32;
  cfg.flow.pyramid_levels = 1;
  cfg.repr.norm.flow_clip = 1.0;
  cfg.prep.motion_threshold = 1e-4;
  cfg.prep.skip = 1;
  cfg.prep.overlap_stride = 12;
  cfg.snn.n_kernels = 32;
  cfg.stdp.epochs = 2;
  cfg.threshold.leak_scale = 0.05;
  cfg.encode_min = 0.02;
  cfg.pool_window = 16;
  cfg.svm_epochs = 50;
  cfg.seed = 1;
  cfg.out_dir = out;
  return cfg;
}

void criteria_8_9_10() {
  const auto start = std::chrono::steady_clock::now();
  const std::filesystem::path base =
      std::filesystem::temp_directory_path() / "staf_acceptance";
  const std::filesystem::path root = base / "dataset";
  std::filesystem::remove_all(base);

  SyntheticConfig syn;
  syn.frames_per_sequence = 104;
  syn.noise_sigma = 0.01;
  generate_synthetic(root, syn, 1);

  const RunConfig mg = synthetic_mg_config(root, base / "run_mg");
  const PipelineReport mg_rep = run_pipeline(mg);

  RunConfig raw = mg;
  raw.method = ReprMethod::kRaw;
  raw.pool_window = 8;
  raw.out_dir = base / "run_raw";
  const PipelineReport raw_rep = run_pipeline(raw);

  const double elapsed = seconds_since(start);
  {
    std::ostringstream detail;
    detail << "mg " << mg_rep.eval.accuracy << "%, raw "
           << raw_rep.eval.accuracy << "%, " << elapsed << " s";
    report(8, "mg reaches 90% and beats raw frames end to end",
           mg_rep.eval.accuracy >= 90.0 &&
               mg_rep.eval.accuracy > raw_rep.eval.accuracy &&
               elapsed < 900.0,
           detail.str());
  }

  RunConfig half = mg;
  half.train_limit = 100;
  half.out_dir = base / "run_mg_half";
  const PipelineReport half_rep = run_pipeline(half);
  {
    std::ostringstream detail;
    detail << "full " << mg_rep.eval.accuracy << "%, half "
           << half_rep.eval.accuracy << "%";
    report(9, "halving the training set strictly reduces mg accuracy",
           half_rep.eval.accuracy < mg_rep.eval.accuracy, detail.str());
  }

  RunConfig rerun = mg;
  rerun.out_dir = base / "run_mg_rerun";
  run_pipeline(rerun);
  const std::string csv_a = slurp(mg.out_dir / "confusion.csv");
  const std::string csv_b = slurp(rerun.out_dir / "confusion.csv");
  report(10, "same seed reproduces a byte-identical confusion matrix",
         !csv_a.empty() && csv_a == csv_b,
         csv_a == csv_b ? "identical" : "differs");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criteria_8_9_10();

  if (g_failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criteria FAILED\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
