/**
 * Copyright 2026 The MultiStar Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

#include "multistar/groundtruth.hpp"
#include "multistar/inference.hpp"
#include "multistar/io.hpp"
#include "multistar/losses.hpp"
#include "multistar/metrics.hpp"
#include "multistar/npy.hpp"
#include "multistar/rng.hpp"
#include "multistar/synth.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "scenes.hpp"

using namespace multistar;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

constexpr int kScenes = 20;
constexpr double kRho = 0.3;
constexpr double kNu = 0.1;

std::vector<LabelStack> pipeline_scenes() {
  static const std::vector<LabelStack> cached = [] {
    Rng rng(20260901);
    std::vector<LabelStack> out;
    for (int i = 0; i < kScenes; ++i) out.push_back(scenes::make_scene(rng));
    return out;
  }();
  return cached;
}

struct PipelineStats {
  double mean_ap50 = 0.0;
  double mean_fn_o = 0.0;
  double seconds = 0.0;
};

PipelineStats run_pipeline(const std::vector<LabelStack>& scenes, IouMode mode, double nu) {
  PipelineStats s;
  const auto t0 = std::chrono::steady_clock::now();
  InferenceConfig cfg;
  cfg.rho = kRho;
  cfg.nu = nu;
  cfg.iou_mode = mode;
  const double taus[] = {0.5};
  for (const auto& gt : scenes) {
    const auto maps = PredictionMaps::from_ground_truth(make_ground_truth(gt, cfg.rays));
    const auto result = segment(maps, cfg);
    const auto m = evaluate_image(result.to_labels(), gt, taus);
    s.mean_ap50 += m.ap.at(0.5);
    s.mean_fn_o += m.challenge.fn_o;
  }
  s.mean_ap50 /= double(scenes.size());
  s.mean_fn_o /= double(scenes.size());
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

Outcome criterion_1() {
  const auto scenes = pipeline_scenes();
  const auto s = run_pipeline(scenes, IouMode::kOverlapAware, kNu);
  char buf[160];
  std::snprintf(buf, sizeof buf, "mean AP(0.5) = %.4f (need >= 0.90), %.2f s (need <= 10)", s.mean_ap50, s.seconds);
  return {s.mean_ap50 >= 0.90 && s.seconds <= 10.0, buf};
}

Outcome criterion_2() {
  const auto scenes = pipeline_scenes();
  double min_fraction = 1.0;
  for (const auto& sc : scenes) min_fraction = std::min(min_fraction, overlap_fraction(sc));
  const auto aware = run_pipeline(scenes, IouMode::kOverlapAware, 0.1);
  const auto plain = run_pipeline(scenes, IouMode::kPlain, 0.1);
  const auto plain_loose = run_pipeline(scenes, IouMode::kPlain, 0.5);
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "min overlap fraction %.3f; AP(0.5) aware@0.1 %.4f vs plain@0.1 %.4f; FN_o plain@0.5 %.4f vs aware@0.1 %.4f",
                min_fraction, aware.mean_ap50, plain.mean_ap50, plain_loose.mean_fn_o, aware.mean_fn_o);
  const bool pass = min_fraction >= 0.15 && aware.mean_ap50 > plain.mean_ap50 && plain_loose.mean_fn_o > aware.mean_fn_o;
  return {pass, buf};
}

Outcome criterion_3() {
  std::string detail;
  bool pass = true;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += what + " failed; ";
    }
  };

  // Handcrafted AP cases.
  const Dims d{32, 32};
  const LabelStack two_gt(d, {Mask::from_bitmap(d, oracle::rect(d, 2, 2, 12, 12)),
                              Mask::from_bitmap(d, oracle::rect(d, 16, 16, 26, 26))});
  check(average_precision(two_gt, two_gt, 0.5) == 1.0, "identical stacks AP");
  const LabelStack one_exact(d, {Mask::from_bitmap(d, oracle::rect(d, 2, 2, 12, 12))});
  check(average_precision(one_exact, two_gt, 0.5) == 0.5, "2 gts / 1 exact pred AP");
  const LabelStack one_gt(d, {Mask::from_bitmap(d, oracle::rect(d, 2, 2, 12, 12))});
  const LabelStack two_preds(d, {Mask::from_bitmap(d, oracle::rect(d, 2, 2, 11, 12)),
                                 Mask::from_bitmap(d, oracle::rect(d, 3, 2, 12, 12))});
  check(std::abs(pixel_iou(two_preds[0], one_gt[0]) - 0.9) < 1e-12, "IoU 0.9 construction");
  check(average_precision(two_preds, one_gt, 0.5) == 0.5, "1 gt / 2 preds AP");

  // Monotone sweep on random stacks.
  Rng rng(3);
  const std::vector<double> taus{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    const auto [preds, gts] = fixtures::random_pred_gt(rng, Dims{48, 48});
    const auto sweep = ap_sweep(preds, gts, taus);
    double prev = 2.0;
    for (const auto& [tau, v] : sweep) {
      if (v > prev) ++violations;
      prev = v;
    }
  }
  check(violations == 0, "AP monotonicity (" + std::to_string(violations) + " violations)");

  const auto cm = challenge_metrics(two_gt, two_gt);
  check(cm.dc == 1.0 && cm.tp_p == 1.0 && cm.fp_p == 0.0 && cm.fn_o == 0.0, "identical-stack challenge metrics");
  return {pass, pass ? "handcrafted AP exact, 100 sweeps monotone, identical stacks perfect" : detail};
}

Outcome criterion_4() {
  Rng rng(4);
  const Dims d{64, 64};
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto bits = fixtures::random_blob_bitmap(rng, d);
    const auto got = euclidean_distance_transform(Mask::from_bitmap(d, bits));
    const auto want = oracle::edt(d, bits);
    for (std::size_t k = 0; k < want.size(); ++k) worst = std::max(worst, std::abs(got.values()[k] - want[k]));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max |EDT - brute force| = %.3g over 50 masks (need <= 1e-9)", worst);
  return {worst <= 1e-9, buf};
}

Outcome criterion_5() {
  Rng rng(5);
  const RayConfig rays(32);
  const Dims d{128, 128};
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    StarPolygon poly;
    poly.radii = oracle::smooth_radii(rng, 32, 3.0, 20.0);
    poly.center = {int(rng.between(22, 105)), int(rng.between(22, 105))};
    poly.score = 1.0;
    const Mask original = rasterize(poly, rays, d);
    StarPolygon back = poly;
    back.radii = star_distances_at(original, poly.center, rays);
    const Mask again = rasterize(back, rays, d);
    const double sym = double(original.area() + again.area() - 2 * intersection_area(original, again));
    worst = std::max(worst, sym / double(original.area()));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "worst symmetric difference %.4f of area (need <= 0.05)", worst);
  return {worst <= 0.05, buf};
}

// Golden-section search for the minimizer of f on [lo, hi].
double golden_min(const std::function<double(double)>& f, double lo, double hi) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), e = a + g * (b - a);
  double fc = f(c), fe = f(e);
  while (b - a > 1e-12 * (1.0 + std::abs(a) + std::abs(b))) {
    if (fc < fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + g * (b - a);
      fe = f(e);
    }
  }
  return 0.5 * (a + b);
}

Outcome criterion_6() {
  Rng rng(6);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double l[3] = {rng.uniform(0.1, 10.0), rng.uniform(0.1, 10.0), rng.uniform(0.1, 10.0)};
    TaskUncertainties sig{1.0, 1.0, 1.0};
    for (int sweep = 0; sweep < 3; ++sweep) {
      sig.sigma_over = golden_min([&](double s) { return multitask_loss(l[0], l[1], l[2], {s, sig.sigma_obj, sig.sigma_dist}); }, 1e-3, 100.0);
      sig.sigma_obj = golden_min([&](double s) { return multitask_loss(l[0], l[1], l[2], {sig.sigma_over, s, sig.sigma_dist}); }, 1e-3, 100.0);
      sig.sigma_dist = golden_min([&](double s) { return multitask_loss(l[0], l[1], l[2], {sig.sigma_over, sig.sigma_obj, s}); }, 1e-3, 100.0);
    }
    const double found[3] = {sig.sigma_over, sig.sigma_obj, sig.sigma_dist};
    for (int k = 0; k < 3; ++k) {
      const double expect = std::sqrt(2.0 * l[k]);
      worst = std::max(worst, std::abs(found[k] - expect) / expect);
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "worst relative error vs sqrt(2 L) = %.3g (need <= 1e-4)", worst);
  return {worst <= 1e-4, buf};
}

Outcome criterion_7() {
  bool pass = true;
  for (int i = 0; i <= 100; ++i) {
    const double p = i / 100.0;
    pass = pass && proposal_weight(p, 1.0) == 0.0 && proposal_weight(p, 0.0) == p;
  }
  const bool weights_ok = pass;
  Rng rng(7);
  const Dims d{40, 40};
  int pairs = 0;
  for (int i = 0; i < 200; ++i) {
    const Mask a = Mask::from_bitmap(d, fixtures::random_blob_bitmap(rng, d));
    const Mask b = Mask::from_bitmap(d, fixtures::random_blob_bitmap(rng, d));
    const ScalarMap zero(d, 0.0);
    ScalarMap one_on_inter(d, 0.0);
    for (int r = 0; r < d.height; ++r) {
      for (int c = 0; c < d.width; ++c) {
        if (a.contains(r, c) && b.contains(r, c)) one_on_inter.at(r, c) = 1.0;
      }
    }
    pass = pass && overlap_aware_iou(a, b, zero) == pixel_iou(a, b) && overlap_aware_iou(a, b, one_on_inter) == 0.0;
    pairs += intersection_area(a, b) > 0 ? 1 : 0;
  }
  return {pass, std::string("weight identities ") + (weights_ok ? "hold" : "FAIL") + " on 101-point sweep; IoU identities over 200 pairs (" +
                    std::to_string(pairs) + " intersecting)"};
}

std::vector<std::uint8_t> file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion_8() {
  const auto [image, labels] = fixtures::synth_fixture();
  int met = 0, failed = 0, broken = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    try {
      const auto res = synthesize(image, labels, cfg);
      if (overlap_fraction(res.labels) >= 0.15) {
        ++met;
      } else {
        ++broken;
      }
    } catch (const ConstraintError&) {
      ++failed;
    }
  }
  SynthConfig cfg;
  cfg.seed = 99;
  const auto a = synthesize(image, labels, cfg);
  const auto b = synthesize(image, labels, cfg);
  const bool deterministic = a.image.values == b.image.values && a.labels.instances() == b.labels.instances();

  const auto dir = std::filesystem::temp_directory_path() / "multistar_acceptance_npy";
  std::filesystem::create_directories(dir);
  io::save_image(dir / "a.npy", a.image, npy::DType::kUInt8);
  io::save_labels(dir / "l.npy", a.labels);
  bool bytes_ok = true;
  for (const char* name : {"a.npy", "l.npy"}) {
    const auto arr = npy::read_array(dir / name);
    npy::write_array(dir / (std::string(name) + ".again"), arr);
    bytes_ok = bytes_ok && file_bytes(dir / name) == file_bytes(dir / (std::string(name) + ".again"));
  }
  std::filesystem::remove_all(dir);

  char buf[200];
  std::snprintf(buf, sizeof buf, "%d/20 seeds reached 0.15, %d constraint failures, %d violations; same-seed %s; npy bytes %s",
                met, failed, broken, deterministic ? "identical" : "DIFFER", bytes_ok ? "identical" : "DIFFER");
  return {broken == 0 && met + failed == 20 && deterministic && bytes_ok, buf};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 oracle-pipeline recovery", criterion_1},   {"2 overlap-aware NMS superiority", criterion_2},
      {"3 metric substitutes", criterion_3},         {"4 EDT oracle equivalence", criterion_4},
      {"5 star-distance round trip", criterion_5},   {"6 multi-task loss stationarity", criterion_6},
      {"7 weight / IoU identities", criterion_7},    {"8 synthesis contract", criterion_8},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
