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

#ifndef MULTISTAR_METRICS_HPP_
#define MULTISTAR_METRICS_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "multistar/groundtruth.hpp"

namespace multistar {

enum class MatchValue { kDice, kIou };

struct MatchedPair {
  std::size_t pred = 0;
  std::size_t gt = 0;
  double value = 0.0;
};

struct Matching {
  std::vector<MatchedPair> pairs;
  std::vector<std::size_t> unmatched_pred;
  std::vector<std::size_t> unmatched_gt;
};

/// Greedy one-to-one matching: all cross pairs sorted by value descending
/// (ties by (pred, gt) ascending); a pair is taken when its value is strictly
/// above `threshold` and neither side is used yet.
Matching match_by(const LabelStack& preds, const LabelStack& gts, MatchValue value, double threshold);

inline constexpr double kChallengeDiceThreshold = 0.7;

struct ChallengeMetrics {
  double dc = 0.0;
  double tp_p = 0.0;
  double fp_p = 0.0;
  double fn_o = 0.0;
  std::size_t matched = 0;
};

/// DC, TP_p and FP_p average over dice > 0.7 matches and are 0 when nothing
/// matches; FN_o is the unmatched share of ground-truth objects.
ChallengeMetrics challenge_metrics(const LabelStack& preds, const LabelStack& gts);

/// TP / (TP + FP + FN) under IoU matching at tau; 1 when all counts are 0.
double average_precision(const LabelStack& preds, const LabelStack& gts, double tau);

std::map<double, double> ap_sweep(const LabelStack& preds, const LabelStack& gts, std::span<const double> taus);

struct ImageMetrics {
  ChallengeMetrics challenge;
  std::map<double, double> ap;
};

ImageMetrics evaluate_image(const LabelStack& preds, const LabelStack& gts, std::span<const double> taus);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  ///< population standard deviation
};

Summary summarize(std::span<const double> values);

struct MetricsReport {
  std::vector<ImageMetrics> images;
  Summary dc, tp_p, fp_p, fn_o;
  std::map<double, Summary> ap;
};

/// Unweighted mean and spread of the per-image values.
MetricsReport aggregate(std::vector<ImageMetrics> images);

}  // namespace multistar

#endif  // MULTISTAR_METRICS_HPP_
