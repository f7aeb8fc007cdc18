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

#include "multistar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "multistar/geometry.hpp"

namespace multistar {

namespace {

void require_same_grid(const LabelStack& preds, const LabelStack& gts) {
  if (preds.dims() != gts.dims()) {
    throw InputError("prediction grid " + std::to_string(preds.dims().height) + "x" +
                     std::to_string(preds.dims().width) + " does not match ground-truth grid " +
                     std::to_string(gts.dims().height) + "x" + std::to_string(gts.dims().width));
  }
}

}  // namespace

Matching match_by(const LabelStack& preds, const LabelStack& gts, MatchValue value, double threshold) {
  require_same_grid(preds, gts);
  if (!(threshold >= 0.0)) throw InputError("match threshold must be non-negative");
  std::vector<MatchedPair> cands;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (preds[i].box().intersect(gts[j].box()).empty()) continue;
      const double v = value == MatchValue::kDice ? dice(preds[i], gts[j]) : pixel_iou(preds[i], gts[j]);
      if (v > threshold) cands.push_back({i, j, v});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const MatchedPair& a, const MatchedPair& b) {
    return std::tie(b.value, a.pred, a.gt) < std::tie(a.value, b.pred, b.gt);
  });

  Matching out;
  std::vector<bool> pred_used(preds.size(), false);
  std::vector<bool> gt_used(gts.size(), false);
  for (const auto& c : cands) {
    if (pred_used[c.pred] || gt_used[c.gt]) continue;
    pred_used[c.pred] = true;
    gt_used[c.gt] = true;
    out.pairs.push_back(c);
  }
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!pred_used[i]) out.unmatched_pred.push_back(i);
  }
  for (std::size_t j = 0; j < gts.size(); ++j) {
    if (!gt_used[j]) out.unmatched_gt.push_back(j);
  }
  return out;
}

ChallengeMetrics challenge_metrics(const LabelStack& preds, const LabelStack& gts) {
  const Matching m = match_by(preds, gts, MatchValue::kDice, kChallengeDiceThreshold);
  ChallengeMetrics out;
  out.matched = m.pairs.size();
  for (const auto& p : m.pairs) {
    const Mask& pm = preds[p.pred];
    const Mask& gm = gts[p.gt];
    const auto inter = static_cast<double>(intersection_area(pm, gm));
    out.dc += p.value;
    out.tp_p += inter / static_cast<double>(gm.area());
    out.fp_p += (static_cast<double>(pm.area()) - inter) / static_cast<double>(pm.area());
  }
  if (!m.pairs.empty()) {
    const auto n = static_cast<double>(m.pairs.size());
    out.dc /= n;
    out.tp_p /= n;
    out.fp_p /= n;
  }
  out.fn_o = gts.empty() ? 0.0 : static_cast<double>(m.unmatched_gt.size()) / static_cast<double>(gts.size());
  return out;
}

double average_precision(const LabelStack& preds, const LabelStack& gts, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("tau must lie in (0, 1)");
  const Matching m = match_by(preds, gts, MatchValue::kIou, tau);
  const std::size_t tp = m.pairs.size();
  const std::size_t total = tp + m.unmatched_pred.size() + m.unmatched_gt.size();
  return total == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(total);
}

std::map<double, double> ap_sweep(const LabelStack& preds, const LabelStack& gts, std::span<const double> taus) {
  std::map<double, double> out;
  for (double tau : taus) out[tau] = average_precision(preds, gts, tau);
  return out;
}

ImageMetrics evaluate_image(const LabelStack& preds, const LabelStack& gts, std::span<const double> taus) {
  return ImageMetrics{challenge_metrics(preds, gts), ap_sweep(preds, gts, taus)};
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

MetricsReport aggregate(std::vector<ImageMetrics> images) {
  MetricsReport rep;
  std::vector<double> dc, tp, fp, fn;
  std::map<double, std::vector<double>> ap;
  for (const auto& im : images) {
    dc.push_back(im.challenge.dc);
    tp.push_back(im.challenge.tp_p);
    fp.push_back(im.challenge.fp_p);
    fn.push_back(im.challenge.fn_o);
    for (const auto& [tau, v] : im.ap) ap[tau].push_back(v);
  }
  rep.dc = summarize(dc);
  rep.tp_p = summarize(tp);
  rep.fp_p = summarize(fp);
  rep.fn_o = summarize(fn);
  for (const auto& [tau, vs] : ap) rep.ap[tau] = summarize(vs);
  rep.images = std::move(images);
  return rep;
}

}  // namespace multistar
