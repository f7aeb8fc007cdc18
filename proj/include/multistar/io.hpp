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

#ifndef MULTISTAR_IO_HPP_
#define MULTISTAR_IO_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "multistar/groundtruth.hpp"
#include "multistar/inference.hpp"
#include "multistar/losses.hpp"
#include "multistar/metrics.hpp"
#include "multistar/npy.hpp"
#include "multistar/synth.hpp"

namespace multistar {

inline constexpr const char* kVersion = "0.1.0";

namespace io {

/// K x H x W binary stack, or a 2D integer label image (one instance per
/// positive label, ascending). Empty instances are dropped with a warning on
/// stderr.
LabelStack labels_from_array(const npy::ArrayFile& a, const std::string& origin = "<memory>");
npy::ArrayFile labels_to_array(const LabelStack& labels);
LabelStack load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const LabelStack& labels);

ScalarMap load_scalar_map(const std::filesystem::path& path);
void save_scalar_map(const std::filesystem::path& path, const ScalarMap& map);
DistanceMap load_distance_map(const std::filesystem::path& path);
void save_distance_map(const std::filesystem::path& path, const DistanceMap& map);
ValidMask load_valid_mask(const std::filesystem::path& path);
void save_valid_mask(const std::filesystem::path& path, const ValidMask& mask);

/// Value range follows the dtype: 255, 65535, or 1.0 for float data.
Image load_image(const std::filesystem::path& path, npy::DType* dtype = nullptr);
void save_image(const std::filesystem::path& path, const Image& image, npy::DType dtype);

/// File names used for the four ground-truth / prediction arrays in a
/// directory: p_obj.npy, p_over.npy, dist.npy, valid.npy.
void save_ground_truth(const std::filesystem::path& dir, const GroundTruthMaps& gt);
GroundTruthMaps load_ground_truth(const std::filesystem::path& dir);
PredictionMaps load_prediction(const std::filesystem::path& obj, const std::filesystem::path& over,
                               const std::filesystem::path& dist);

/// Row-major (start, length) runs over the flattened grid.
using Rle = std::vector<std::pair<std::size_t, std::size_t>>;
Rle rle_encode(const Mask& m);
Mask rle_decode(Dims dims, const Rle& rle);

struct SegmentationConfigEcho {
  double rho = 0.0;
  double nu = 0.0;
  int n_rays = 32;
  std::optional<std::uint64_t> seed;
  std::string iou = "overlap_aware";
  std::string score = "weight";
};

struct SegmentationDocument {
  std::string version = kVersion;
  Dims dims;
  SegmentationConfigEcho config;
  std::vector<Instance> instances;

  LabelStack to_labels() const;
};

SegmentationDocument make_document(const SegmentationResult& result, const InferenceConfig& cfg);
std::string to_json(const SegmentationDocument& doc);
/// Throws InputError on schema violations, unsorted records, or runs that
/// fall outside the grid.
SegmentationDocument segmentation_from_json(const std::string& text);

struct ImageRef {
  std::string pred;
  std::string gt;
};

std::string metrics_to_json(const MetricsReport& report, const std::vector<ImageRef>& refs,
                            const std::vector<double>& taus);
std::string loss_to_json(const LossReport& report, const TaskUncertainties& sig);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace io
}  // namespace multistar

#endif  // MULTISTAR_IO_HPP_
