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

#ifndef MULTISTAR_GROUNDTRUTH_HPP_
#define MULTISTAR_GROUNDTRUTH_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "multistar/geometry.hpp"

namespace multistar {

/// Possibly overlapping instances on one grid, one binary mask each.
class LabelStack {
 public:
  LabelStack() = default;
  explicit LabelStack(Dims dims) : dims_(dims) {}
  /// Throws InputError if any instance is empty or on a different grid.
  LabelStack(Dims dims, std::vector<Mask> instances);

  Dims dims() const { return dims_; }
  std::size_t size() const { return instances_.size(); }
  bool empty() const { return instances_.empty(); }
  const Mask& operator[](std::size_t i) const { return instances_[i]; }
  const std::vector<Mask>& instances() const { return instances_; }

  void add(Mask m);

  /// Number of instances covering each pixel.
  Grid<int> coverage() const;

 private:
  Dims dims_;
  std::vector<Mask> instances_;
};

/// H x W x R star distances, row-major with the ray index fastest.
class DistanceMap {
 public:
  DistanceMap() = default;
  DistanceMap(Dims dims, int n_rays);
  DistanceMap(Dims dims, int n_rays, std::vector<double> values);

  Dims dims() const { return dims_; }
  int n_rays() const { return n_rays_; }

  double& at(int row, int col, int k) { return values_[offset(row, col) + static_cast<std::size_t>(k)]; }
  double at(int row, int col, int k) const { return values_[offset(row, col) + static_cast<std::size_t>(k)]; }
  std::span<const double> rays_at(int row, int col) const {
    return std::span<const double>(values_).subspan(offset(row, col), static_cast<std::size_t>(n_rays_));
  }
  std::span<double> rays_at(int row, int col) {
    return std::span<double>(values_).subspan(offset(row, col), static_cast<std::size_t>(n_rays_));
  }

  std::span<const double> values() const { return values_; }

  friend bool operator==(const DistanceMap&, const DistanceMap&) = default;

 private:
  std::size_t offset(int row, int col) const {
    return (static_cast<std::size_t>(row) * static_cast<std::size_t>(dims_.width) + static_cast<std::size_t>(col)) *
           static_cast<std::size_t>(n_rays_);
  }

  Dims dims_;
  int n_rays_ = 0;
  std::vector<double> values_;
};

using ValidMask = Grid<std::uint8_t>;

struct GroundTruthMaps {
  ScalarMap p_obj;
  ScalarMap p_over;
  DistanceMap star_dists;
  /// 0 exactly at pixels covered by two or more instances.
  ValidMask valid;
};

/// Exact Euclidean distance from each member pixel center to the nearest
/// non-member pixel center on the grid; 0 on non-members. A mask that fills
/// the whole grid measures to the ring of pixels just outside the grid.
ScalarMap euclidean_distance_transform(const Mask& m);

struct ObjectProbability {
  ScalarMap p_obj;
  ValidMask valid;
};

/// Per-instance EDT normalized by that instance's maximum; overlap pixels are
/// zeroed and flagged invalid.
ObjectProbability object_probability_map(const LabelStack& labels);

ScalarMap overlap_probability_map(const LabelStack& labels);

/// Star distances of `p` inside `m`. Pixels are unit cells; each ray is
/// walked cell by cell from the center of `p` and its distance is where it
/// first enters a cell outside the mask or the grid. A lone pixel therefore
/// has distances between 0.5 (axis rays) and sqrt(2)/2 (diagonals).
std::vector<double> star_distances_at(const Mask& m, Pixel p, const RayConfig& rays);

struct StarDistances {
  DistanceMap dists;
  ValidMask valid;
};

/// Distances at every pixel covered by exactly one instance; zero and invalid
/// on background and overlap.
StarDistances star_distances_map(const LabelStack& labels, const RayConfig& rays);

GroundTruthMaps make_ground_truth(const LabelStack& labels, const RayConfig& rays);

}  // namespace multistar

#endif  // MULTISTAR_GROUNDTRUTH_HPP_
