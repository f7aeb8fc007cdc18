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

#include "multistar/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <ostream>

#include "CLI11.hpp"
#include "multistar/groundtruth.hpp"
#include "multistar/inference.hpp"
#include "multistar/io.hpp"
#include "multistar/losses.hpp"
#include "multistar/metrics.hpp"
#include "multistar/synth.hpp"

namespace multistar {

namespace fs = std::filesystem;

namespace {

struct GtArgs {
  std::string labels;
  int rays = 32;
  std::string out_dir;
};

struct SegmentArgs {
  std::string obj, over, dist;
  double rho = 0.0;
  double nu = 0.0;
  bool plain_iou = false;
  std::string score = "weight";
  std::string union_mode = "pixel";
  std::size_t max_proposals = 10000;
  std::string out;
  std::string out_masks;
};

struct EvalArgs {
  std::vector<std::string> pred;
  std::vector<std::string> gt;
  std::vector<double> taus{0.4, 0.5, 0.6, 0.7, 0.8};
  std::string out;
};

struct SynthArgs {
  std::string image, labels, out_dir;
  double min_overlap = 0.15;
  std::uint64_t seed = 0;
  int max_attempts = 200;
  std::vector<int> copies{1, 2};
  double shift = 0.25;
  bool no_saturate = false;
};

struct LossArgs {
  std::string pred_dir, gt_dir, out;
  std::vector<double> sigma{1.0, 1.0, 1.0};
};

int run_gt(const GtArgs& a, std::ostream& out) {
  const LabelStack labels = io::load_labels(a.labels);
  const GroundTruthMaps gt = make_ground_truth(labels, RayConfig(a.rays));
  io::save_ground_truth(a.out_dir, gt);
  out << "wrote ground truth for " << labels.size() << " instances (" << labels.dims().height << "x"
      << labels.dims().width << ", " << a.rays << " rays) to " << a.out_dir << "\n";
  return kExitOk;
}

int run_segment(const SegmentArgs& a, std::ostream& out) {
  const PredictionMaps maps = io::load_prediction(a.obj, a.over, a.dist);
  InferenceConfig cfg;
  cfg.rho = a.rho;
  cfg.nu = a.nu;
  cfg.rays = RayConfig(maps.star_dists.n_rays());
  cfg.max_proposals = a.max_proposals;
  cfg.iou_mode = a.plain_iou ? IouMode::kPlain : IouMode::kOverlapAware;
  cfg.score_mode = a.score == "obj" ? ScoreMode::kObject : ScoreMode::kWeight;
  cfg.union_mode = a.union_mode == "discounted" ? UnionMode::kDiscounted : UnionMode::kPixelUnion;
  const SegmentationResult result = segment(maps, cfg);
  io::write_text(a.out, io::to_json(io::make_document(result, cfg)));
  if (!a.out_masks.empty()) io::save_labels(a.out_masks, result.to_labels());
  out << "accepted " << result.instances.size() << " instances, wrote " << a.out << "\n";
  return kExitOk;
}

LabelStack load_any_labels(const std::string& path) {
  if (fs::path(path).extension() == ".json") return io::segmentation_from_json(io::read_text(path)).to_labels();
  return io::load_labels(path);
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  if (a.pred.size() != a.gt.size()) {
    throw InputError("eval needs one --gt per --pred (got " + std::to_string(a.pred.size()) + " and " +
                     std::to_string(a.gt.size()) + ")");
  }
  std::vector<ImageMetrics> images;
  std::vector<io::ImageRef> refs;
  for (std::size_t i = 0; i < a.pred.size(); ++i) {
    const LabelStack preds = load_any_labels(a.pred[i]);
    const LabelStack gts = load_any_labels(a.gt[i]);
    if (preds.dims() != gts.dims()) {
      throw InputError(a.pred[i] + " (" + std::to_string(preds.dims().height) + "x" +
                       std::to_string(preds.dims().width) + ") and " + a.gt[i] + " (" +
                       std::to_string(gts.dims().height) + "x" + std::to_string(gts.dims().width) +
                       ") cover different grids");
    }
    images.push_back(evaluate_image(preds, gts, a.taus));
    refs.push_back({a.pred[i], a.gt[i]});
  }
  const MetricsReport report = aggregate(std::move(images));
  io::write_text(a.out, io::metrics_to_json(report, refs, a.taus));
  out << "DC " << report.dc.mean << "  FN_o " << report.fn_o.mean << "  TP_p " << report.tp_p.mean << "  FP_p "
      << report.fp_p.mean;
  for (const auto& [tau, s] : report.ap) out << "  AP@" << tau << " " << s.mean;
  out << "\n";
  return kExitOk;
}

int run_synth(const SynthArgs& a, std::ostream& out) {
  npy::DType dtype{};
  const Image image = io::load_image(a.image, &dtype);
  const LabelStack labels = io::load_labels(a.labels);
  if (a.copies.size() != 2) throw InputError("--copies takes two values: min,max");
  SynthConfig cfg;
  cfg.min_overlap_fraction = a.min_overlap;
  cfg.seed = a.seed;
  cfg.max_attempts = a.max_attempts;
  cfg.min_copies = a.copies[0];
  cfg.max_copies = a.copies[1];
  cfg.shift_fraction = a.shift;
  cfg.saturate = !a.no_saturate;
  const SynthResult res = synthesize(image, labels, cfg);
  fs::create_directories(a.out_dir);
  io::save_image(fs::path(a.out_dir) / "image.npy", res.image, cfg.saturate ? dtype : npy::DType::kFloat32);
  io::save_labels(fs::path(a.out_dir) / "labels.npy", res.labels);
  out << "added " << res.copies_added << " copies in " << res.attempts_used << " attempts, overlap fraction "
      << res.overlap_fraction << "\n";
  return kExitOk;
}

int run_loss(const LossArgs& a, std::ostream& out) {
  if (a.sigma.size() != 3) throw InputError("--sigma takes three values: over,obj,dist");
  const fs::path pred(a.pred_dir);
  const PredictionMaps maps = io::load_prediction(pred / "p_obj.npy", pred / "p_over.npy", pred / "dist.npy");
  const GroundTruthMaps gt = io::load_ground_truth(a.gt_dir);
  const TaskUncertainties sig{a.sigma[0], a.sigma[1], a.sigma[2]};
  const LossReport rep = loss_report(maps, gt, sig);
  io::write_text(a.out, io::loss_to_json(rep, sig));
  out << "L_over " << rep.l_over << "  L_obj " << rep.l_obj << "  L_dist " << rep.l_dist << "  L " << rep.combined
      << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Overlap-aware star-convex instance segmentation toolkit", "multistar"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  GtArgs gt;
  auto* gt_cmd = app.add_subcommand("gt", "Derive object/overlap probability and star-distance maps from labels");
  gt_cmd->add_option("--labels", gt.labels, "Label image (HxW) or instance stack (KxHxW), .npy")->required()->check(CLI::ExistingFile);
  gt_cmd->add_option("--rays", gt.rays, "Number of radial directions")->capture_default_str()->check(CLI::Range(3, 4096));
  gt_cmd->add_option("--out-dir", gt.out_dir, "Output directory")->required();

  SegmentArgs seg;
  auto* seg_cmd = app.add_subcommand("segment", "Candidate selection and overlap-aware NMS");
  seg_cmd->add_option("--obj", seg.obj, "Object probability map (HxW .npy)")->required()->check(CLI::ExistingFile);
  seg_cmd->add_option("--over", seg.over, "Overlap probability map (HxW .npy)")->required()->check(CLI::ExistingFile);
  seg_cmd->add_option("--dist", seg.dist, "Star distances (HxWxR .npy)")->required()->check(CLI::ExistingFile);
  seg_cmd->add_option("--rho", seg.rho, "Proposal threshold")->required()->check(CLI::Range(0.0, 1.0));
  seg_cmd->add_option("--nu", seg.nu, "NMS IoU threshold")->required()->check(CLI::Range(0.0, 1.0));
  seg_cmd->add_flag("--plain-iou", seg.plain_iou, "Ignore the overlap map during suppression");
  seg_cmd->add_option("--score", seg.score, "Suppression order score")->capture_default_str()->check(CLI::IsMember({"weight", "obj"}));
  seg_cmd->add_option("--union", seg.union_mode, "IoU denominator")->capture_default_str()->check(CLI::IsMember({"pixel", "discounted"}));
  seg_cmd->add_option("--max-proposals", seg.max_proposals, "Candidate cap")->capture_default_str()->check(CLI::PositiveNumber);
  seg_cmd->add_option("--out", seg.out, "Segmentation document (.json)")->required();
  seg_cmd->add_option("--out-masks", seg.out_masks, "Optional KxHxW instance stack (.npy)");

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("eval", "Dice-matched challenge metrics and AP over IoU thresholds");
  ev_cmd->add_option("--pred", ev.pred, "Segmentation .json or instance stack .npy (repeatable)")->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--gt", ev.gt, "Ground-truth labels .npy (one per --pred)")->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--tau", ev.taus, "IoU thresholds for AP")->delimiter(',')->capture_default_str()->check(CLI::Range(0.0, 1.0));
  ev_cmd->add_option("--out", ev.out, "Metrics report (.json)")->required();

  SynthArgs sy;
  auto* sy_cmd = app.add_subcommand("synth", "Generate an overlapping scene from a non-overlapping one");
  sy_cmd->add_option("--image", sy.image, "Intensity image (HxW .npy)")->required()->check(CLI::ExistingFile);
  sy_cmd->add_option("--labels", sy.labels, "Non-overlapping labels (.npy)")->required()->check(CLI::ExistingFile);
  sy_cmd->add_option("--min-overlap", sy.min_overlap, "Required overlap fraction")->capture_default_str()->check(CLI::Range(0.0, 0.999999));
  sy_cmd->add_option("--seed", sy.seed, "Random seed")->capture_default_str();
  sy_cmd->add_option("--max-attempts", sy.max_attempts, "Placement budget")->capture_default_str()->check(CLI::PositiveNumber);
  sy_cmd->add_option("--copies", sy.copies, "Copies per selected object: min,max")->delimiter(',')->capture_default_str();
  sy_cmd->add_option("--shift", sy.shift, "Max shift as a fraction of the image size")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  sy_cmd->add_flag("--no-saturate", sy.no_saturate, "Keep raw intensity sums (written as float32)");
  sy_cmd->add_option("--out-dir", sy.out_dir, "Output directory")->required();

  LossArgs lo;
  auto* lo_cmd = app.add_subcommand("loss", "Evaluate the uncertainty-weighted multi-task loss");
  lo_cmd->add_option("--pred-dir", lo.pred_dir, "Directory with p_obj.npy, p_over.npy, dist.npy")->required()->check(CLI::ExistingDirectory);
  lo_cmd->add_option("--gt-dir", lo.gt_dir, "Directory written by `gt`")->required()->check(CLI::ExistingDirectory);
  lo_cmd->add_option("--sigma", lo.sigma, "Task uncertainties over,obj,dist")->delimiter(',')->capture_default_str();
  lo_cmd->add_option("--out", lo.out, "Loss report (.json)")->required();

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitInputError;
  }

  try {
    if (*gt_cmd) return run_gt(gt, out);
    if (*seg_cmd) return run_segment(seg, out);
    if (*ev_cmd) return run_eval(ev, out);
    if (*sy_cmd) return run_synth(sy, out);
    if (*lo_cmd) return run_loss(lo, out);
  } catch (const ConstraintError& e) {
    err << "constraint failure: " << e.what() << "\n";
    return kExitConstraintFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace multistar
