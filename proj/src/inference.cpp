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

#include "multistar/inference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace multistar {

void PredictionMaps::validate() const {
  const Dims d = p_obj.dims();
  if (p_over.dims() != d || star_dists.dims() != d) {
    throw InputError("prediction maps have mismatched grids: obj " + std::to_string(d.height) + "x" +
                     std::to_string(d.width) + ", over " + std::to_string(p_over.height()) + "x" +
                     std::to_string(p_over.width()) + ", dist " + std::to_string(star_dists.dims().height) + "x" +
                     std::to_string(star_dists.dims().width));
  }
  require_probability_map(p_obj, "object probability");
  require_probability_map(p_over, "overlap probability");
  for (double v : star_dists.values()) {
    if (!std::isfinite(v) || v < 0.0) throw InputError("star distances must be finite and non-negative");
  }
}

PredictionMaps PredictionMaps::from_ground_truth(const GroundTruthMaps& gt) {
  return PredictionMaps{gt.p_obj, gt.p_over, gt.star_dists};
}

void InferenceConfig::validate() const {
  if (!(rho >= 0.0 && rho <= 1.0)) throw InputError("rho must lie in [0, 1]");
  if (!(nu >= 0.0 && nu <= 1.0)) throw InputError("nu must lie in [0, 1]");
  if (max_proposals == 0) throw InputError("max_proposals must be positive");
}

LabelStack SegmentationResult::to_labels() const {
  LabelStack out(dims);
  for (const auto& inst : instances) out.add(inst.mask);
  return out;
}

double proposal_weight(double p_obj, double p_over) {
  if (!(p_obj >= 0.0 && p_obj <= 1.0) || !(p_over >= 0.0 && p_over <= 1.0)) {
    throw InputError("proposal weight inputs must lie in [0, 1]");
  }
  return p_obj * (1.0 - p_over);
}

std::vector<StarPolygon> candidate_proposals(const PredictionMaps& maps, const InferenceConfig& cfg) {
  maps.validate();
  cfg.validate();
  if (maps.star_dists.n_rays() != cfg.rays.n_rays()) {
    throw InputError("distance map has " + std::to_string(maps.star_dists.n_rays()) + " rays, config expects " +
                     std::to_string(cfg.rays.n_rays()));
  }
  std::vector<StarPolygon> out;
  const Dims dims = maps.dims();
  for (int r = 0; r < dims.height; ++r) {
    for (int c = 0; c < dims.width; ++c) {
      const double w = proposal_weight(maps.p_obj.at(r, c), maps.p_over.at(r, c));
      if (!(w > cfg.rho)) continue;
      const auto d = maps.star_dists.rays_at(r, c);
      const double score = cfg.score_mode == ScoreMode::kWeight ? w : maps.p_obj.at(r, c);
      out.push_back(StarPolygon{{r, c}, std::vector<double>(d.begin(), d.end()), score});
    }
  }
  // Row-major generation order already encodes the (row, col) tie-break.
  std::stable_sort(out.begin(), out.end(),
                   [](const StarPolygon& a, const StarPolygon& b) { return a.score > b.score; });
  if (out.size() > cfg.max_proposals) out.resize(cfg.max_proposals);
  return out;
}

SegmentationResult nms(const std::vector<StarPolygon>& candidates, const ScalarMap& p_over, const InferenceConfig& cfg) {
  cfg.validate();
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i].score > candidates[i - 1].score) {
      throw InputError("nms candidates must be sorted by score, descending (violated at index " + std::to_string(i) + ")");
    }
  }
  const Dims dims = p_over.dims();
  SegmentationResult result{dims, {}};
  for (const StarPolygon& cand : candidates) {
    cand.validate(cfg.rays);
    Mask mask = rasterize(cand, cfg.rays, dims);
    bool keep = true;
    for (const Instance& acc : result.instances) {
      if (mask.box().intersect(acc.mask.box()).empty()) continue;
      const double iou = cfg.iou_mode == IouMode::kPlain ? pixel_iou(mask, acc.mask)
                                                         : overlap_aware_iou(mask, acc.mask, p_over, cfg.union_mode);
      if (iou > cfg.nu) {
        keep = false;
        break;
      }
    }
    if (keep) result.instances.push_back(Instance{cand, std::move(mask), cand.score});
  }
  return result;
}

SegmentationResult segment(const PredictionMaps& maps, const InferenceConfig& cfg) {
  return nms(candidate_proposals(maps, cfg), maps.p_over, cfg);
}

}  // namespace multistar
