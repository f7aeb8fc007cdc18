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

#ifndef MULTISTAR_SYNTH_HPP_
#define MULTISTAR_SYNTH_HPP_

#include <cstdint>

#include "multistar/groundtruth.hpp"

namespace multistar {

/// Intensity image with the upper end of its value range (255 for 8-bit,
/// 65535 for 16-bit, 1.0 for float data).
struct Image {
  ScalarMap values;
  double max_value = 1.0;
};

struct SynthConfig {
  double min_overlap_fraction = 0.15;
  int max_attempts = 200;
  int min_copies = 1;
  int max_copies = 2;
  /// Copy offsets are drawn from +-shift_fraction of the image height/width.
  double shift_fraction = 0.25;
  bool allow_flips = true;
  bool allow_rotations = true;
  /// Clip summed intensities to [0, max_value]; otherwise keep raw sums.
  bool saturate = true;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthResult {
  Image image;
  LabelStack labels;
  double overlap_fraction = 0.0;
  int copies_added = 0;
  int attempts_used = 0;
};

/// Pixels covered by two or more instances over pixels covered by at least
/// one; 0 for an empty stack.
double overlap_fraction(const LabelStack& labels);

/// Adds transformed copies (flip, quarter-turn rotation, shift) of randomly
/// chosen objects until the overlap fraction reaches the configured minimum.
/// Each placement that fails to touch an existing object, or lands fully off
/// the grid, is re-drawn and costs one attempt. Input instances are kept
/// first and unchanged. Throws ConstraintError once attempts run out.
SynthResult synthesize(const Image& image, const LabelStack& labels, const SynthConfig& cfg);

}  // namespace multistar

#endif  // MULTISTAR_SYNTH_HPP_
