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

#include "multistar/synth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "multistar/rng.hpp"

namespace multistar {

void SynthConfig::validate() const {
  if (!(min_overlap_fraction >= 0.0 && min_overlap_fraction < 1.0)) {
    throw InputError("min_overlap_fraction must lie in [0, 1)");
  }
  if (max_attempts <= 0) throw InputError("max_attempts must be positive");
  if (min_copies < 1 || max_copies < min_copies) throw InputError("copy count range is empty");
  if (!(shift_fraction >= 0.0 && shift_fraction <= 1.0)) throw InputError("shift_fraction must lie in [0, 1]");
}

double overlap_fraction(const LabelStack& labels) {
  const Grid<int> cov = labels.coverage();
  std::size_t covered = 0;
  std::size_t shared = 0;
  for (int v : cov.values()) {
    covered += v >= 1 ? 1 : 0;
    shared += v >= 2 ? 1 : 0;
  }
  return covered == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(covered);
}

namespace {

// An object cut out of its bounding box: membership plus intensities.
struct Patch {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> bits;
  std::vector<double> values;

  std::size_t idx(int r, int c) const { return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c); }
};

Patch cut(const Image& image, const Mask& m) {
  const Box& b = m.box();
  Patch p{b.rows(), b.cols(), {}, {}};
  p.bits.resize(static_cast<std::size_t>(p.rows) * static_cast<std::size_t>(p.cols));
  p.values.resize(p.bits.size());
  for (int r = 0; r < p.rows; ++r) {
    for (int c = 0; c < p.cols; ++c) {
      if (m.contains(b.row0 + r, b.col0 + c)) {
        p.bits[p.idx(r, c)] = 1;
        p.values[p.idx(r, c)] = image.values.at(b.row0 + r, b.col0 + c);
      }
    }
  }
  return p;
}

Patch flip_cols(const Patch& p) {
  Patch q = p;
  for (int r = 0; r < p.rows; ++r) {
    for (int c = 0; c < p.cols; ++c) {
      q.bits[q.idx(r, c)] = p.bits[p.idx(r, p.cols - 1 - c)];
      q.values[q.idx(r, c)] = p.values[p.idx(r, p.cols - 1 - c)];
    }
  }
  return q;
}

Patch flip_rows(const Patch& p) {
  Patch q = p;
  for (int r = 0; r < p.rows; ++r) {
    for (int c = 0; c < p.cols; ++c) {
      q.bits[q.idx(r, c)] = p.bits[p.idx(p.rows - 1 - r, c)];
      q.values[q.idx(r, c)] = p.values[p.idx(p.rows - 1 - r, c)];
    }
  }
  return q;
}

// Quarter turn counter-clockwise as displayed (rows down, cols right).
Patch rotate90(const Patch& p) {
  Patch q{p.cols, p.rows, std::vector<std::uint8_t>(p.bits.size()), std::vector<double>(p.values.size())};
  for (int r = 0; r < q.rows; ++r) {
    for (int c = 0; c < q.cols; ++c) {
      q.bits[q.idx(r, c)] = p.bits[p.idx(c, p.cols - 1 - r)];
      q.values[q.idx(r, c)] = p.values[p.idx(c, p.cols - 1 - r)];
    }
  }
  return q;
}

}  // namespace

SynthResult synthesize(const Image& image, const LabelStack& labels, const SynthConfig& cfg) {
  cfg.validate();
  const Dims dims = labels.dims();
  if (image.values.dims() != dims) {
    throw InputError("image grid " + std::to_string(image.values.height()) + "x" +
                     std::to_string(image.values.width()) + " does not match label grid " +
                     std::to_string(dims.height) + "x" + std::to_string(dims.width));
  }

  Grid<int> cov = labels.coverage();
  std::size_t covered = 0;
  std::size_t shared = 0;
  for (int v : cov.values()) {
    if (v >= 2) throw InputError("synthesis input instances must be pairwise disjoint");
    covered += v >= 1 ? 1 : 0;
  }

  SynthResult out{image, labels, 0.0, 0, 0};
  auto fraction = [&] { return covered == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(covered); };

  Rng rng(cfg.seed);
  const int max_dy = static_cast<int>(std::floor(cfg.shift_fraction * dims.height));
  const int max_dx = static_cast<int>(std::floor(cfg.shift_fraction * dims.width));

  while (fraction() < cfg.min_overlap_fraction) {
    if (labels.empty() || out.attempts_used >= cfg.max_attempts) {
      std::ostringstream msg;
      msg << "overlap fraction " << fraction() << " below required " << cfg.min_overlap_fraction << " after "
          << out.attempts_used << " attempts";
      throw ConstraintError(msg.str(), fraction());
    }
    const std::size_t src = rng.below(labels.size());
    const int n_copies = static_cast<int>(rng.between(cfg.min_copies, cfg.max_copies));
    const Patch base = cut(image, labels[src]);
    const Box& src_box = labels[src].box();

    for (int copy = 0; copy < n_copies && fraction() < cfg.min_overlap_fraction; ++copy) {
      bool placed = false;
      while (!placed && out.attempts_used < cfg.max_attempts) {
        ++out.attempts_used;
        Patch p = base;
        if (cfg.allow_flips) {
          if (rng.coin()) p = flip_cols(p);
          if (rng.coin()) p = flip_rows(p);
        }
        if (cfg.allow_rotations) {
          const auto turns = rng.below(4);
          for (std::uint64_t t = 0; t < turns; ++t) p = rotate90(p);
        }
        const int dy = static_cast<int>(rng.between(-max_dy, max_dy));
        const int dx = static_cast<int>(rng.between(-max_dx, max_dx));
        // Keep the patch centered on the source's box center before shifting.
        const int row0 = src_box.row0 + (src_box.rows() - p.rows) / 2 + dy;
        const int col0 = src_box.col0 + (src_box.cols() - p.cols) / 2 + dx;

        const Box target = Box{row0, col0, row0 + p.rows, col0 + p.cols}.intersect(Box{0, 0, dims.height, dims.width});
        if (target.empty()) continue;
        std::vector<std::uint8_t> local(static_cast<std::size_t>(target.rows()) * static_cast<std::size_t>(target.cols()), 0);
        bool touches = false;
        for (int r = target.row0; r < target.row1; ++r) {
          for (int c = target.col0; c < target.col1; ++c) {
            if (!p.bits[p.idx(r - row0, c - col0)]) continue;
            local[static_cast<std::size_t>(r - target.row0) * static_cast<std::size_t>(target.cols()) +
                  static_cast<std::size_t>(c - target.col0)] = 1;
            touches = touches || cov.at(r, c) > 0;
          }
        }
        Mask mask = Mask::from_box(dims, target, local);
        if (mask.empty() || !touches) continue;

        for (int r = target.row0; r < target.row1; ++r) {
          for (int c = target.col0; c < target.col1; ++c) {
            if (!mask.contains(r, c)) continue;
            int& n = cov.at(r, c);
            if (n == 0) ++covered;
            if (n == 1) ++shared;
            ++n;
            double& v = out.image.values.at(r, c);
            v += p.values[p.idx(r - row0, c - col0)];
            if (cfg.saturate) v = std::clamp(v, 0.0, image.max_value);
          }
        }
        out.labels.add(std::move(mask));
        ++out.copies_added;
        placed = true;
      }
      if (!placed) break;
    }
  }
  out.overlap_fraction = fraction();
  return out;
}

}  // namespace multistar
