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

#ifndef MULTISTAR_LOSSES_HPP_
#define MULTISTAR_LOSSES_HPP_

#include <cstddef>

#include "multistar/groundtruth.hpp"
#include "multistar/inference.hpp"

namespace multistar {

struct TaskUncertainties {
  double sigma_over = 1.0;
  double sigma_obj = 1.0;
  double sigma_dist = 1.0;
};

struct LossReport {
  double l_over = 0.0;
  double l_obj = 0.0;
  double l_dist = 0.0;
  double combined = 0.0;
  std::size_t n_over = 0;
  std::size_t n_obj = 0;
  std::size_t n_dist = 0;
};

inline constexpr double kBceEpsilon = 1e-7;

/// Mean binary cross-entropy over pixels where include != 0, predictions
/// clamped to [eps, 1 - eps]. Soft targets (the object probability) are
/// accepted; their entropy is subtracted so a perfect prediction scores 0.
double bce(const ScalarMap& pred, const ScalarMap& target, const ValidMask& include);

/// Object-probability weighted mean over included pixels of the per-pixel
/// mean absolute ray error. 0 when the weights sum to 0.
double dist_loss(const DistanceMap& pred, const DistanceMap& truth, const ScalarMap& true_p_obj,
                 const ValidMask& include);

/// Sum of the three losses, each scaled by 1 / sigma^2, plus log of the
/// product of the sigmas.
double multitask_loss(double l_over, double l_obj, double l_dist, const TaskUncertainties& sig);

/// The overlap term is evaluated over all pixels; the object and distance
/// terms skip pixels where ground-truth objects overlap.
LossReport loss_report(const PredictionMaps& maps, const GroundTruthMaps& gt, const TaskUncertainties& sig);

}  // namespace multistar

#endif  // MULTISTAR_LOSSES_HPP_
