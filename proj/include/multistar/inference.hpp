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

#ifndef MULTISTAR_INFERENCE_HPP_
#define MULTISTAR_INFERENCE_HPP_

#include <cstddef>
#include <vector>

#include "multistar/geometry.hpp"
#include "multistar/groundtruth.hpp"

namespace multistar {

/// Network outputs (or ground truth standing in for them).
struct PredictionMaps {
  ScalarMap p_obj;
  ScalarMap p_over;
  DistanceMap star_dists;

  Dims dims() const { return p_obj.dims(); }
  /// Throws InputError on mismatched grids, probabilities outside [0, 1] or
  /// negative / non-finite distances.
  void validate() const;

  static PredictionMaps from_ground_truth(const GroundTruthMaps& gt);
};

enum class IouMode {
  kOverlapAware,  ///< intersection discounted by p_over
  kPlain,         ///< ordinary pixel IoU
};

enum class ScoreMode {
  kWeight,  ///< p_obj * (1 - p_over)
  kObject,  ///< raw p_obj (candidates are still selected by the weight)
};

struct InferenceConfig {
  double rho = 0.3;
  double nu = 0.1;
  RayConfig rays{32};
  std::size_t max_proposals = 10000;
  IouMode iou_mode = IouMode::kOverlapAware;
  UnionMode union_mode = UnionMode::kPixelUnion;
  ScoreMode score_mode = ScoreMode::kWeight;

  void validate() const;
};

struct Instance {
  StarPolygon polygon;
  Mask mask;
  double score = 0.0;
};

struct SegmentationResult {
  Dims dims;
  std::vector<Instance> instances;

  LabelStack to_labels() const;
};

double proposal_weight(double p_obj, double p_over);

/// One polygon per pixel whose proposal weight exceeds rho, sorted by score
/// descending with ties broken by (row, col), truncated to max_proposals.
std::vector<StarPolygon> candidate_proposals(const PredictionMaps& maps, const InferenceConfig& cfg);

/// Greedy suppression: a candidate survives iff its IoU (per cfg.iou_mode)
/// with every mask accepted so far is <= nu. Candidates must be sorted by
/// score, non-increasing.
SegmentationResult nms(const std::vector<StarPolygon>& candidates, const ScalarMap& p_over, const InferenceConfig& cfg);

SegmentationResult segment(const PredictionMaps& maps, const InferenceConfig& cfg);

}  // namespace multistar

#endif  // MULTISTAR_INFERENCE_HPP_
