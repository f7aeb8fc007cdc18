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

#include "multistar/groundtruth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace multistar {

LabelStack::LabelStack(Dims dims, std::vector<Mask> instances) : dims_(dims) {
  instances_.reserve(instances.size());
  for (auto& m : instances) add(std::move(m));
}

void LabelStack::add(Mask m) {
  if (m.dims() != dims_) {
    throw InputError("instance grid " + std::to_string(m.dims().height) + "x" + std::to_string(m.dims().width) +
                     " does not match stack grid " + std::to_string(dims_.height) + "x" +
                     std::to_string(dims_.width));
  }
  if (m.empty()) throw InputError("label stack instances must be nonempty");
  instances_.push_back(std::move(m));
}

Grid<int> LabelStack::coverage() const {
  Grid<int> cov(dims_, 0);
  for (const auto& m : instances_) {
    const Box& b = m.box();
    for (int r = b.row0; r < b.row1; ++r) {
      for (int c = b.col0; c < b.col1; ++c) {
        if (m.contains(r, c)) ++cov.at(r, c);
      }
    }
  }
  return cov;
}

DistanceMap::DistanceMap(Dims dims, int n_rays)
    : dims_(dims), n_rays_(n_rays), values_(dims.pixels() * static_cast<std::size_t>(n_rays), 0.0) {}

DistanceMap::DistanceMap(Dims dims, int n_rays, std::vector<double> values)
    : dims_(dims), n_rays_(n_rays), values_(std::move(values)) {
  if (values_.size() != dims.pixels() * static_cast<std::size_t>(n_rays)) {
    throw InputError("distance map payload does not match " + std::to_string(dims.height) + "x" +
                     std::to_string(dims.width) + "x" + std::to_string(n_rays));
  }
}

namespace {

constexpr double kFar = 1e20;

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher); f holds squared
// distances, d receives the transformed values.
void squared_distance_1d(std::span<const double> f, std::span<double> d, std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  v.assign(static_cast<std::size_t>(n), 0);
  z.assign(static_cast<std::size_t>(n) + 1, 0.0);
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = 0.0;
    while (true) {
      const int p = v[static_cast<std::size_t>(k)];
      s = ((f[static_cast<std::size_t>(q)] + double(q) * q) - (f[static_cast<std::size_t>(p)] + double(p) * p)) /
          (2.0 * q - 2.0 * p);
      if (s <= z[static_cast<std::size_t>(k)] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(k) + 1] < q) ++k;
    const int p = v[static_cast<std::size_t>(k)];
    d[static_cast<std::size_t>(q)] = double(q - p) * (q - p) + f[static_cast<std::size_t>(p)];
  }
}

}  // namespace

ScalarMap euclidean_distance_transform(const Mask& m) {
  const Dims dims = m.dims();
  ScalarMap out(dims, 0.0);
  if (m.empty()) return out;

  // The nearest non-member of any member lies within one pixel of the
  // bounding box: clamping a background pixel onto the grown box moves it
  // closer without making it a member.
  const Box& b = m.box();
  Box work = Box{b.row0 - 1, b.col0 - 1, b.row1 + 1, b.col1 + 1}.intersect(Box{0, 0, dims.height, dims.width});
  const bool has_background = m.area() < static_cast<std::size_t>(work.rows()) * static_cast<std::size_t>(work.cols());
  if (!has_background) work = Box{b.row0 - 1, b.col0 - 1, b.row1 + 1, b.col1 + 1};

  const int rows = work.rows();
  const int cols = work.cols();
  std::vector<double> sq(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      sq[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)] =
          m.contains(work.row0 + r, work.col0 + c) ? kFar : 0.0;
    }
  }

  std::vector<int> v;
  std::vector<double> z;
  std::vector<double> f(static_cast<std::size_t>(std::max(rows, cols)));
  std::vector<double> d(f.size());
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) f[static_cast<std::size_t>(r)] = sq[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)];
    squared_distance_1d(std::span(f).first(static_cast<std::size_t>(rows)), std::span(d).first(static_cast<std::size_t>(rows)), v, z);
    for (int r = 0; r < rows; ++r) sq[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)] = d[static_cast<std::size_t>(r)];
  }
  for (int r = 0; r < rows; ++r) {
    auto row = std::span(sq).subspan(static_cast<std::size_t>(r) * static_cast<std::size_t>(cols), static_cast<std::size_t>(cols));
    std::copy(row.begin(), row.end(), f.begin());
    squared_distance_1d(std::span(f).first(static_cast<std::size_t>(cols)), row, v, z);
  }

  for (int r = b.row0; r < b.row1; ++r) {
    for (int c = b.col0; c < b.col1; ++c) {
      if (!m.contains(r, c)) continue;
      const double s = sq[static_cast<std::size_t>(r - work.row0) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c - work.col0)];
      out.at(r, c) = std::sqrt(s);
    }
  }
  return out;
}

ObjectProbability object_probability_map(const LabelStack& labels) {
  const Grid<int> cov = labels.coverage();
  ObjectProbability out{ScalarMap(labels.dims(), 0.0), ValidMask(labels.dims(), 1)};
  for (const Mask& m : labels.instances()) {
    const ScalarMap edt = euclidean_distance_transform(m);
    const Box& b = m.box();
    double peak = 0.0;
    for (int r = b.row0; r < b.row1; ++r) {
      for (int c = b.col0; c < b.col1; ++c) peak = std::max(peak, edt.at(r, c));
    }
    for (int r = b.row0; r < b.row1; ++r) {
      for (int c = b.col0; c < b.col1; ++c) {
        if (!m.contains(r, c) || cov.at(r, c) != 1) continue;
        out.p_obj.at(r, c) = edt.at(r, c) / peak;
      }
    }
  }
  for (int r = 0; r < labels.dims().height; ++r) {
    for (int c = 0; c < labels.dims().width; ++c) {
      if (cov.at(r, c) >= 2) out.valid.at(r, c) = 0;
    }
  }
  return out;
}

ScalarMap overlap_probability_map(const LabelStack& labels) {
  const Grid<int> cov = labels.coverage();
  ScalarMap out(labels.dims(), 0.0);
  for (int r = 0; r < labels.dims().height; ++r) {
    for (int c = 0; c < labels.dims().width; ++c) {
      if (cov.at(r, c) >= 2) out.at(r, c) = 1.0;
    }
  }
  return out;
}

std::vector<double> star_distances_at(const Mask& m, Pixel p, const RayConfig& rays) {
  if (!m.contains(p)) {
    throw InputError("star distances requested at (" + std::to_string(p.row) + ", " + std::to_string(p.col) +
                     "), which is not inside the mask");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kCornerTol = 1e-9;
  std::vector<double> out(static_cast<std::size_t>(rays.n_rays()));
  for (int k = 0; k < rays.n_rays(); ++k) {
    const double dr = rays.row_step(k);
    const double dc = rays.col_step(k);
    // Walk the unit cells pierced by the ray; t_row / t_col are the ray
    // parameters of the next horizontal / vertical cell edge.
    const int step_r = dr > 0 ? 1 : -1;
    const int step_c = dc > 0 ? 1 : -1;
    double t_row = std::abs(dr) < 1e-12 ? kInf : 0.5 / std::abs(dr);
    double t_col = std::abs(dc) < 1e-12 ? kInf : 0.5 / std::abs(dc);
    const double dt_row = std::abs(dr) < 1e-12 ? kInf : 1.0 / std::abs(dr);
    const double dt_col = std::abs(dc) < 1e-12 ? kInf : 1.0 / std::abs(dc);
    int r = p.row;
    int c = p.col;
    double t = 0.0;
    while (m.contains(r, c)) {
      if (std::isfinite(t_row) && std::isfinite(t_col) &&
          std::abs(t_row - t_col) <= kCornerTol * std::max(1.0, t_row)) {
        // Through a cell corner: the side cells are only touched at a point.
        t = t_row;
        r += step_r;
        c += step_c;
        t_row += dt_row;
        t_col += dt_col;
      } else if (t_row < t_col) {
        t = t_row;
        r += step_r;
        t_row += dt_row;
      } else {
        t = t_col;
        c += step_c;
        t_col += dt_col;
      }
    }
    out[static_cast<std::size_t>(k)] = t;
  }
  return out;
}

StarDistances star_distances_map(const LabelStack& labels, const RayConfig& rays) {
  const Dims dims = labels.dims();
  const Grid<int> cov = labels.coverage();
  StarDistances out{DistanceMap(dims, rays.n_rays()), ValidMask(dims, 0)};
  for (const Mask& m : labels.instances()) {
    const Box& b = m.box();
    for (int r = b.row0; r < b.row1; ++r) {
      for (int c = b.col0; c < b.col1; ++c) {
        if (!m.contains(r, c) || cov.at(r, c) != 1) continue;
        const auto d = star_distances_at(m, {r, c}, rays);
        std::copy(d.begin(), d.end(), out.dists.rays_at(r, c).begin());
        out.valid.at(r, c) = 1;
      }
    }
  }
  return out;
}

GroundTruthMaps make_ground_truth(const LabelStack& labels, const RayConfig& rays) {
  ObjectProbability obj = object_probability_map(labels);
  StarDistances dist = star_distances_map(labels, rays);
  return GroundTruthMaps{std::move(obj.p_obj), overlap_probability_map(labels), std::move(dist.dists),
                         std::move(obj.valid)};
}

}  // namespace multistar
