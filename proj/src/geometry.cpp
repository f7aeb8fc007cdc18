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

#include "multistar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace multistar {

namespace {

void require_same_dims(const Mask& a, const Mask& b) {
  if (a.dims() != b.dims()) {
    throw InputError("mask dimension mismatch: " + std::to_string(a.dims().height) + "x" +
                     std::to_string(a.dims().width) + " vs " + std::to_string(b.dims().height) + "x" +
                     std::to_string(b.dims().width));
  }
}

}  // namespace

Box Box::intersect(const Box& o) const {
  Box r{std::max(row0, o.row0), std::max(col0, o.col0), std::min(row1, o.row1), std::min(col1, o.col1)};
  return r.empty() ? Box{} : r;
}

Box Box::unite(const Box& o) const {
  if (empty()) return o;
  if (o.empty()) return *this;
  return {std::min(row0, o.row0), std::min(col0, o.col0), std::max(row1, o.row1), std::max(col1, o.col1)};
}

RayConfig::RayConfig(int n_rays) : n_rays_(n_rays) {
  if (n_rays < 3) throw InputError("n_rays must be at least 3, got " + std::to_string(n_rays));
  row_steps_.resize(static_cast<std::size_t>(n_rays));
  col_steps_.resize(static_cast<std::size_t>(n_rays));
  for (int k = 0; k < n_rays; ++k) {
    const double theta = angle(k);
    row_steps_[static_cast<std::size_t>(k)] = -std::sin(theta);
    col_steps_[static_cast<std::size_t>(k)] = std::cos(theta);
  }
}

double RayConfig::angle(int k) const { return step() * k; }

double RayConfig::step() const { return 2.0 * std::numbers::pi / n_rays_; }

void StarPolygon::validate(const RayConfig& rays) const {
  if (static_cast<int>(radii.size()) != rays.n_rays()) {
    throw InputError("polygon has " + std::to_string(radii.size()) + " radii, expected " +
                     std::to_string(rays.n_rays()));
  }
  for (double r : radii) {
    if (!std::isfinite(r) || r < 0.0) throw InputError("polygon radii must be finite and non-negative");
  }
  if (!(score >= 0.0 && score <= 1.0)) throw InputError("polygon score must lie in [0, 1]");
}

Mask::Mask(Dims dims) : dims_(dims) {
  if (dims.height <= 0 || dims.width <= 0) throw InputError("mask dimensions must be positive");
}

Mask Mask::from_bitmap(Dims dims, std::span<const std::uint8_t> bitmap) {
  if (bitmap.size() != dims.pixels()) throw InputError("bitmap size does not match mask dims");
  return from_box(dims, Box{0, 0, dims.height, dims.width}, bitmap);
}

Mask Mask::from_box(Dims dims, Box box, std::span<const std::uint8_t> local) {
  Mask m(dims);
  if (box.empty()) return m;
  if (box.row0 < 0 || box.col0 < 0 || box.row1 > dims.height || box.col1 > dims.width) {
    throw InputError("mask box exceeds grid");
  }
  if (local.size() != static_cast<std::size_t>(box.rows()) * static_cast<std::size_t>(box.cols())) {
    throw InputError("mask box payload size mismatch");
  }
  // Tighten to the members' bounding box.
  Box tight{box.row1, box.col1, box.row0, box.col0};
  std::size_t area = 0;
  for (int r = 0; r < box.rows(); ++r) {
    for (int c = 0; c < box.cols(); ++c) {
      if (local[static_cast<std::size_t>(r) * static_cast<std::size_t>(box.cols()) + static_cast<std::size_t>(c)]) {
        ++area;
        tight.row0 = std::min(tight.row0, box.row0 + r);
        tight.row1 = std::max(tight.row1, box.row0 + r + 1);
        tight.col0 = std::min(tight.col0, box.col0 + c);
        tight.col1 = std::max(tight.col1, box.col0 + c + 1);
      }
    }
  }
  if (area == 0) return m;
  m.box_ = tight;
  m.area_ = area;
  m.bits_.assign(static_cast<std::size_t>(tight.rows()) * static_cast<std::size_t>(tight.cols()), 0);
  for (int r = tight.row0; r < tight.row1; ++r) {
    for (int c = tight.col0; c < tight.col1; ++c) {
      const auto src = static_cast<std::size_t>(r - box.row0) * static_cast<std::size_t>(box.cols()) +
                       static_cast<std::size_t>(c - box.col0);
      const auto dst = static_cast<std::size_t>(r - tight.row0) * static_cast<std::size_t>(tight.cols()) +
                       static_cast<std::size_t>(c - tight.col0);
      m.bits_[dst] = local[src] ? 1 : 0;
    }
  }
  return m;
}

std::vector<std::uint8_t> Mask::to_bitmap() const {
  std::vector<std::uint8_t> out(dims_.pixels(), 0);
  for (int r = box_.row0; r < box_.row1; ++r) {
    for (int c = box_.col0; c < box_.col1; ++c) {
      if (contains(r, c)) out[static_cast<std::size_t>(r) * static_cast<std::size_t>(dims_.width) + static_cast<std::size_t>(c)] = 1;
    }
  }
  return out;
}

std::vector<Pixel> Mask::pixels() const {
  std::vector<Pixel> out;
  out.reserve(area_);
  for (int r = box_.row0; r < box_.row1; ++r) {
    for (int c = box_.col0; c < box_.col1; ++c) {
      if (contains(r, c)) out.push_back({r, c});
    }
  }
  return out;
}

bool operator==(const Mask& a, const Mask& b) {
  return a.dims_ == b.dims_ && a.area_ == b.area_ && a.box_ == b.box_ && a.bits_ == b.bits_;
}

void require_probability_map(const ScalarMap& map, const char* name) {
  for (double v : map.values()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InputError(std::string(name) + " contains a value outside [0, 1]");
    }
  }
}

namespace {

// Distance, ray sector and in-sector fraction for every offset within
// `reach` of a center. Rasterizing thousands of proposals per image makes
// the per-pixel atan2 the dominant cost otherwise.
struct PolarTable {
  int n_rays = 0;
  int reach = -1;
  std::vector<double> dist;
  std::vector<double> frac;
  std::vector<int> ray;

  std::size_t index(int dr, int dc) const {
    const int side = 2 * reach + 1;
    return static_cast<std::size_t>(dr + reach) * static_cast<std::size_t>(side) + static_cast<std::size_t>(dc + reach);
  }
};

const PolarTable& polar_table(int n_rays, int reach) {
  thread_local PolarTable table;
  if (table.n_rays == n_rays && table.reach >= reach) return table;
  table.n_rays = n_rays;
  table.reach = reach;
  const int R = table.reach;
  const std::size_t side = static_cast<std::size_t>(2 * R + 1);
  table.dist.assign(side * side, 0.0);
  table.frac.assign(side * side, 0.0);
  table.ray.assign(side * side, 0);
  const double step = 2.0 * std::numbers::pi / n_rays;
  for (int dr = -R; dr <= R; ++dr) {
    for (int dc = -R; dc <= R; ++dc) {
      const std::size_t i = table.index(dr, dc);
      table.dist[i] = std::sqrt(double(dr) * dr + double(dc) * dc);
      double phi = std::atan2(-double(dr), double(dc));
      if (phi < 0.0) phi += 2.0 * std::numbers::pi;
      const double pos = phi / step;
      int k = static_cast<int>(std::floor(pos));
      if (k >= n_rays) k = n_rays - 1;
      table.ray[i] = k;
      table.frac[i] = pos - k;
    }
  }
  return table;
}

}  // namespace

Mask rasterize(const StarPolygon& poly, const RayConfig& rays, Dims dims) {
  if (!dims.contains(poly.center.row, poly.center.col)) {
    throw InputError("polygon center (" + std::to_string(poly.center.row) + ", " + std::to_string(poly.center.col) +
                     ") lies outside the " + std::to_string(dims.height) + "x" + std::to_string(dims.width) + " grid");
  }
  if (static_cast<int>(poly.radii.size()) != rays.n_rays()) throw InputError("polygon radius count does not match rays");
  double max_radius = 0.0;
  for (double r : poly.radii) {
    if (!std::isfinite(r) || r < 0.0) throw InputError("polygon radii must be finite and non-negative");
    max_radius = std::max(max_radius, r);
  }

  const int reach = static_cast<int>(std::ceil(max_radius));
  const Box box = Box{poly.center.row - reach, poly.center.col - reach, poly.center.row + reach + 1,
                      poly.center.col + reach + 1}
                      .intersect(Box{0, 0, dims.height, dims.width});
  const int n = rays.n_rays();
  const PolarTable& table = polar_table(n, reach);

  std::vector<std::uint8_t> local(static_cast<std::size_t>(box.rows()) * static_cast<std::size_t>(box.cols()), 0);
  for (int r = box.row0; r < box.row1; ++r) {
    for (int c = box.col0; c < box.col1; ++c) {
      const std::size_t i = table.index(r - poly.center.row, c - poly.center.col);
      const double dist = table.dist[i];
      if (dist > max_radius) continue;
      const int k = table.ray[i];
      const double t = table.frac[i];
      const double r0 = poly.radii[static_cast<std::size_t>(k)];
      const double r1 = poly.radii[static_cast<std::size_t>((k + 1) % n)];
      if (dist <= r0 + t * (r1 - r0)) {
        local[static_cast<std::size_t>(r - box.row0) * static_cast<std::size_t>(box.cols()) +
              static_cast<std::size_t>(c - box.col0)] = 1;
      }
    }
  }
  local[static_cast<std::size_t>(poly.center.row - box.row0) * static_cast<std::size_t>(box.cols()) +
        static_cast<std::size_t>(poly.center.col - box.col0)] = 1;
  return Mask::from_box(dims, box, local);
}

std::size_t intersection_area(const Mask& a, const Mask& b) {
  require_same_dims(a, b);
  const Box box = a.box().intersect(b.box());
  std::size_t n = 0;
  for (int r = box.row0; r < box.row1; ++r) {
    for (int c = box.col0; c < box.col1; ++c) {
      if (a.contains(r, c) && b.contains(r, c)) ++n;
    }
  }
  return n;
}

double pixel_iou(const Mask& a, const Mask& b) {
  const std::size_t inter = intersection_area(a, b);
  const std::size_t uni = a.area() + b.area() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double overlap_aware_intersection(const Mask& a, const Mask& b, const ScalarMap& p_over) {
  require_same_dims(a, b);
  if (p_over.dims() != a.dims()) throw InputError("overlap map dims do not match mask dims");
  const Box box = a.box().intersect(b.box());
  double sum = 0.0;
  for (int r = box.row0; r < box.row1; ++r) {
    for (int c = box.col0; c < box.col1; ++c) {
      if (!(a.contains(r, c) && b.contains(r, c))) continue;
      const double v = p_over.at(r, c);
      if (!(v >= 0.0 && v <= 1.0)) throw InputError("overlap probability outside [0, 1]");
      sum += 1.0 - v;
    }
  }
  return sum;
}

double overlap_aware_iou(const Mask& a, const Mask& b, const ScalarMap& p_over, UnionMode union_mode) {
  const double inter = overlap_aware_intersection(a, b, p_over);
  double uni = 0.0;
  if (union_mode == UnionMode::kPixelUnion) {
    uni = static_cast<double>(a.area() + b.area() - intersection_area(a, b));
  } else {
    uni = static_cast<double>(a.area() + b.area()) - inter;
  }
  return uni <= 0.0 ? 0.0 : inter / uni;
}

double dice(const Mask& a, const Mask& b) {
  const std::size_t inter = intersection_area(a, b);
  const std::size_t total = a.area() + b.area();
  return total == 0 ? 0.0 : 2.0 * static_cast<double>(inter) / static_cast<double>(total);
}

}  // namespace multistar
