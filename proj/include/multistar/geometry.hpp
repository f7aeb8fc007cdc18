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

#ifndef MULTISTAR_GEOMETRY_HPP_
#define MULTISTAR_GEOMETRY_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "multistar/error.hpp"

namespace multistar {

struct Dims {
  int height = 0;
  int width = 0;

  std::size_t pixels() const { return static_cast<std::size_t>(height) * static_cast<std::size_t>(width); }
  bool contains(int row, int col) const { return row >= 0 && col >= 0 && row < height && col < width; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

struct Pixel {
  int row = 0;
  int col = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Half-open pixel rectangle [row0, row1) x [col0, col1).
struct Box {
  int row0 = 0;
  int col0 = 0;
  int row1 = 0;
  int col1 = 0;

  bool empty() const { return row1 <= row0 || col1 <= col0; }
  int rows() const { return empty() ? 0 : row1 - row0; }
  int cols() const { return empty() ? 0 : col1 - col0; }
  Box intersect(const Box& o) const;
  Box unite(const Box& o) const;
  friend bool operator==(const Box&, const Box&) = default;
};

/// R equiangular ray directions. Angle k is 2*pi*k/R measured from the +col
/// axis, counter-clockwise on screen (so +row, which points down, is at
/// 3*pi/2). The unit step for ray k is (row, col) = (-sin, cos).
class RayConfig {
 public:
  explicit RayConfig(int n_rays = 32);

  int n_rays() const { return n_rays_; }
  double angle(int k) const;
  double step() const;
  double row_step(int k) const { return row_steps_[static_cast<std::size_t>(k)]; }
  double col_step(int k) const { return col_steps_[static_cast<std::size_t>(k)]; }

 private:
  int n_rays_;
  std::vector<double> row_steps_;
  std::vector<double> col_steps_;
};

struct StarPolygon {
  Pixel center;
  std::vector<double> radii;
  double score = 0.0;

  /// Throws InputError unless radii match the ray count and are finite and
  /// non-negative, and the score lies in [0, 1].
  void validate(const RayConfig& rays) const;
};

/// Binary pixel set on a grid. Storage covers only the tight bounding box of
/// the member pixels, so masks of small objects on large grids stay cheap.
class Mask {
 public:
  Mask() = default;
  explicit Mask(Dims dims);

  /// Full-grid row-major bitmap; non-zero entries are members.
  static Mask from_bitmap(Dims dims, std::span<const std::uint8_t> bitmap);
  /// Bitmap restricted to `box` (row-major over the box); box must lie in dims.
  static Mask from_box(Dims dims, Box box, std::span<const std::uint8_t> local);

  Dims dims() const { return dims_; }
  const Box& box() const { return box_; }
  std::size_t area() const { return area_; }
  bool empty() const { return area_ == 0; }

  bool contains(int row, int col) const {
    if (row < box_.row0 || row >= box_.row1 || col < box_.col0 || col >= box_.col1) return false;
    return bits_[static_cast<std::size_t>(row - box_.row0) * static_cast<std::size_t>(box_.cols()) +
                 static_cast<std::size_t>(col - box_.col0)] != 0;
  }
  bool contains(Pixel p) const { return contains(p.row, p.col); }

  std::vector<std::uint8_t> to_bitmap() const;
  std::vector<Pixel> pixels() const;

  friend bool operator==(const Mask& a, const Mask& b);

 private:
  Dims dims_;
  Box box_;
  std::vector<std::uint8_t> bits_;
  std::size_t area_ = 0;
};

/// Dense row-major per-pixel values.
template <class T>
class Grid {
 public:
  Grid() = default;
  explicit Grid(Dims dims, T fill = T{}) : dims_(dims), values_(dims.pixels(), fill) {}
  Grid(Dims dims, std::vector<T> values) : dims_(dims), values_(std::move(values)) {
    if (values_.size() != dims_.pixels()) throw InputError("grid value count does not match dims");
  }

  Dims dims() const { return dims_; }
  int height() const { return dims_.height; }
  int width() const { return dims_.width; }

  T& at(int row, int col) { return values_[index(row, col)]; }
  const T& at(int row, int col) const { return values_[index(row, col)]; }
  T& operator[](Pixel p) { return at(p.row, p.col); }
  const T& operator[](Pixel p) const { return at(p.row, p.col); }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(dims_.width) + static_cast<std::size_t>(col);
  }

  Dims dims_;
  std::vector<T> values_;
};

using ScalarMap = Grid<double>;

/// Throws InputError if any value lies outside [0, 1] or is not finite.
void require_probability_map(const ScalarMap& map, const char* name);

/// Star-polygon membership: pixel q belongs iff |q - center| <= r(phi(q)),
/// with r linearly interpolated in angle between the two adjacent rays. The
/// center pixel is always a member; the result is clipped to the grid.
Mask rasterize(const StarPolygon& poly, const RayConfig& rays, Dims dims);

std::size_t intersection_area(const Mask& a, const Mask& b);

double pixel_iou(const Mask& a, const Mask& b);

/// Sum over A&B of (1 - p_over): the intersection with predicted overlap
/// discounted.
double overlap_aware_intersection(const Mask& a, const Mask& b, const ScalarMap& p_over);

enum class UnionMode {
  kPixelUnion,  ///< |A u B|
  kDiscounted,  ///< |A| + |B| - I, with I the overlap-aware intersection
};

double overlap_aware_iou(const Mask& a, const Mask& b, const ScalarMap& p_over,
                         UnionMode union_mode = UnionMode::kPixelUnion);

double dice(const Mask& a, const Mask& b);

}  // namespace multistar

#endif  // MULTISTAR_GEOMETRY_HPP_
