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

#include "multistar/losses.hpp"

#include <algorithm>
#include <cmath>

namespace multistar {

namespace {

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

// Cross-entropy of a clamped prediction against target t, less the target's
// own entropy. Identical to plain binary cross-entropy for t in {0, 1}; for
// soft targets it vanishes at pred == t.
double cross_entropy(double pred, double t) {
  const double q = std::clamp(pred, kBceEpsilon, 1.0 - kBceEpsilon);
  const double ce = -(xlogy(t, q) + xlogy(1.0 - t, 1.0 - q));
  const double entropy = -(xlogy(t, t) + xlogy(1.0 - t, 1.0 - t));
  return std::max(0.0, ce - entropy);
}

}  // namespace

double bce(const ScalarMap& pred, const ScalarMap& target, const ValidMask& include) {
  if (pred.dims() != target.dims() || include.dims() != pred.dims()) throw InputError("bce: grid mismatch");
  double sum = 0.0;
  std::size_t n = 0;
  const auto p = pred.values();
  const auto t = target.values();
  const auto inc = include.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!inc[i]) continue;
    if (!(p[i] >= 0.0 && p[i] <= 1.0)) throw InputError("bce: prediction outside [0, 1]");
    if (!(t[i] >= 0.0 && t[i] <= 1.0)) throw InputError("bce: target outside [0, 1]");
    sum += cross_entropy(p[i], t[i]);
    ++n;
  }
  if (n == 0) throw InputError("bce: include mask selects no pixels");
  return sum / static_cast<double>(n);
}

double dist_loss(const DistanceMap& pred, const DistanceMap& truth, const ScalarMap& true_p_obj,
                 const ValidMask& include) {
  if (pred.dims() != truth.dims() || pred.n_rays() != truth.n_rays() || true_p_obj.dims() != pred.dims() ||
      include.dims() != pred.dims()) {
    throw InputError("dist_loss: shape mismatch");
  }
  const int n_rays = pred.n_rays();
  double weighted = 0.0;
  double weight_sum = 0.0;
  for (int r = 0; r < pred.dims().height; ++r) {
    for (int c = 0; c < pred.dims().width; ++c) {
      const auto a = pred.rays_at(r, c);
      const auto b = truth.rays_at(r, c);
      for (int k = 0; k < n_rays; ++k) {
        if (a[static_cast<std::size_t>(k)] < 0.0 || b[static_cast<std::size_t>(k)] < 0.0) {
          throw InputError("dist_loss: negative star distance");
        }
      }
      if (!include.at(r, c)) continue;
      const double w = true_p_obj.at(r, c);
      if (w == 0.0) continue;
      double err = 0.0;
      for (int k = 0; k < n_rays; ++k) err += std::abs(a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]);
      weighted += w * err / n_rays;
      weight_sum += w;
    }
  }
  return weight_sum == 0.0 ? 0.0 : weighted / weight_sum;
}

double multitask_loss(double l_over, double l_obj, double l_dist, const TaskUncertainties& sig) {
  if (!(sig.sigma_over > 0.0 && sig.sigma_obj > 0.0 && sig.sigma_dist > 0.0)) {
    throw InputError("task uncertainties must be positive");
  }
  if (l_over < 0.0 || l_obj < 0.0 || l_dist < 0.0) throw InputError("component losses must be non-negative");
  return l_over / (sig.sigma_over * sig.sigma_over) + l_obj / (sig.sigma_obj * sig.sigma_obj) +
         l_dist / (sig.sigma_dist * sig.sigma_dist) + std::log(sig.sigma_over * sig.sigma_obj * sig.sigma_dist);
}

LossReport loss_report(const PredictionMaps& maps, const GroundTruthMaps& gt, const TaskUncertainties& sig) {
  maps.validate();
  if (gt.p_obj.dims() != maps.dims() || gt.p_over.dims() != maps.dims() || gt.valid.dims() != maps.dims() ||
      gt.star_dists.dims() != maps.dims()) {
    throw InputError("loss_report: prediction and ground-truth grids differ");
  }
  const ValidMask everywhere(maps.dims(), 1);
  LossReport rep;
  rep.l_over = bce(maps.p_over, gt.p_over, everywhere);
  rep.n_over = maps.dims().pixels();
  rep.l_obj = bce(maps.p_obj, gt.p_obj, gt.valid);
  rep.n_obj = static_cast<std::size_t>(std::count_if(gt.valid.values().begin(), gt.valid.values().end(),
                                                     [](std::uint8_t v) { return v != 0; }));
  rep.l_dist = dist_loss(maps.star_dists, gt.star_dists, gt.p_obj, gt.valid);
  for (std::size_t i = 0; i < gt.valid.values().size(); ++i) {
    if (gt.valid.values()[i] && gt.p_obj.values()[i] > 0.0) ++rep.n_dist;
  }
  rep.combined = multitask_loss(rep.l_over, rep.l_obj, rep.l_dist, sig);
  return rep;
}

}  // namespace multistar
