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

// Random masks, stacks and the synthesis fixture shared by the tests.
#ifndef MULTISTAR_TESTS_FIXTURES_HPP_
#define MULTISTAR_TESTS_FIXTURES_HPP_

#include <utility>
#include <vector>

#include "multistar/groundtruth.hpp"
#include "multistar/rng.hpp"
#include "multistar/synth.hpp"
#include "oracles.hpp"

namespace fixtures {

/// Union of a few disks and rectangles with sparse pixel noise. Always leaves
/// some background.
inline oracle::Bitmap random_blob_bitmap(multistar::Rng& rng, multistar::Dims d) {
  oracle::Bitmap b(d.pixels(), 0);
  const int shapes = int(rng.between(1, 4));
  for (int s = 0; s < shapes; ++s) {
    oracle::Bitmap part;
    if (rng.coin()) {
      part = oracle::disk(d, int(rng.between(0, d.height - 1)), int(rng.between(0, d.width - 1)),
                          rng.uniform(1.0, d.height / 4.0));
    } else {
      const int r0 = int(rng.between(0, d.height - 2));
      const int c0 = int(rng.between(0, d.width - 2));
      part = oracle::rect(d, r0, c0, int(rng.between(r0 + 1, std::min(d.height, r0 + d.height / 3))),
                          int(rng.between(c0 + 1, std::min(d.width, c0 + d.width / 3))));
    }
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = b[i] | part[i];
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (rng.below(100) < 2) b[i] ^= 1;
  }
  b[rng.below(b.size())] = 0;
  return b;
}

inline std::vector<oracle::Bitmap> bitmaps(const multistar::LabelStack& s) {
  std::vector<oracle::Bitmap> out;
  for (const auto& m : s.instances()) out.push_back(m.to_bitmap());
  return out;
}

/// Ground-truth disks plus predictions that jitter, resize, drop and add
/// objects.
inline std::pair<multistar::LabelStack, multistar::LabelStack> random_pred_gt(multistar::Rng& rng, multistar::Dims d) {
  multistar::LabelStack gts(d), preds(d);
  const int n = int(rng.between(1, 5));
  for (int i = 0; i < n; ++i) {
    const int r = int(rng.between(4, d.height - 5));
    const int c = int(rng.between(4, d.width - 5));
    const double rad = rng.uniform(2.0, 8.0);
    gts.add(multistar::Mask::from_bitmap(d, oracle::disk(d, r, c, rad)));
    if (rng.below(5) == 0) continue;
    const int dr = int(rng.between(-3, 3));
    const int dc = int(rng.between(-3, 3));
    preds.add(multistar::Mask::from_bitmap(
        d, oracle::disk(d, std::clamp(r + dr, 0, d.height - 1), std::clamp(c + dc, 0, d.width - 1),
                        rad * rng.uniform(0.7, 1.3))));
  }
  const int extra = int(rng.between(0, 2));
  for (int i = 0; i < extra; ++i) {
    preds.add(multistar::Mask::from_bitmap(
        d, oracle::disk(d, int(rng.between(0, d.height - 1)), int(rng.between(0, d.width - 1)), rng.uniform(1.0, 6.0))));
  }
  return {std::move(preds), std::move(gts)};
}

/// 96x96 8-bit scene with six disjoint nuclei-like disks.
inline std::pair<multistar::Image, multistar::LabelStack> synth_fixture() {
  const multistar::Dims d{96, 96};
  multistar::Image image{multistar::ScalarMap(d, 12.0), 255.0};
  multistar::LabelStack labels(d);
  const int centers[6][2] = {{20, 18}, {22, 50}, {18, 78}, {64, 22}, {70, 52}, {66, 80}};
  const double radii[6] = {9.0, 11.0, 8.0, 12.0, 10.0, 9.5};
  for (int i = 0; i < 6; ++i) {
    const auto bits = oracle::disk(d, centers[i][0], centers[i][1], radii[i]);
    labels.add(multistar::Mask::from_bitmap(d, bits));
    for (std::size_t k = 0; k < bits.size(); ++k) {
      if (bits[k]) image.values.values()[k] = 90.0 + 20.0 * i;
    }
  }
  return {std::move(image), std::move(labels)};
}

}  // namespace fixtures

#endif  // MULTISTAR_TESTS_FIXTURES_HPP_
