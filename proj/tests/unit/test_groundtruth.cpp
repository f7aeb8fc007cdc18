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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "multistar/groundtruth.hpp"
#include "multistar/rng.hpp"
#include "../fixtures.hpp"
#include "../oracles.hpp"

using namespace multistar;

namespace {

// Reference for a single ray: sample the ray densely and report where the
// nearest-pixel lookup first leaves the mask. Agrees with the cell walk to
// within the sampling step.
double sampled_exit(const Mask& m, Pixel p, double dr, double dc) {
  constexpr double kStep = 1e-3;
  for (int i = 1;; ++i) {
    const double t = i * kStep;
    const int r = int(std::floor(p.row + t * dr + 0.5));
    const int c = int(std::floor(p.col + t * dc + 0.5));
    if (!m.contains(r, c)) return t;
  }
}

}  // namespace

TEST_CASE("label stack rejects empty and foreign instances") {
  const Dims d{5, 5};
  LabelStack s(d);
  CHECK_THROWS_AS(s.add(Mask(d)), InputError);
  CHECK_THROWS_AS(s.add(Mask::from_bitmap(Dims{4, 5}, oracle::rect(Dims{4, 5}, 0, 0, 1, 1))), InputError);
  s.add(Mask::from_bitmap(d, oracle::rect(d, 0, 0, 2, 2)));
  CHECK(s.size() == 1);
}

TEST_CASE("EDT examples") {
  const Dims d{7, 7};
  CHECK(euclidean_distance_transform(Mask(d)) == ScalarMap(d, 0.0));

  const ScalarMap sq = euclidean_distance_transform(Mask::from_bitmap(d, oracle::rect(d, 1, 1, 6, 6)));
  CHECK(sq.at(3, 3) == 3.0);
  CHECK(sq.at(1, 1) == 1.0);
  CHECK(sq.at(0, 0) == 0.0);

  const ScalarMap one = euclidean_distance_transform(Mask::from_bitmap(d, oracle::rect(d, 2, 4, 3, 5)));
  CHECK(one.at(2, 4) == 1.0);
}

TEST_CASE("EDT of a grid-filling mask measures to the ring outside the grid") {
  const Dims d{4, 6};
  const ScalarMap e = euclidean_distance_transform(Mask::from_bitmap(d, oracle::rect(d, 0, 0, 4, 6)));
  CHECK(e.at(0, 0) == 1.0);
  CHECK(e.at(1, 2) == 2.0);
  CHECK(e.at(2, 3) == 2.0);
}

TEST_CASE("EDT equals exhaustive search") {
  Rng rng(3);
  for (int i = 0; i < 30; ++i) {
    const Dims d{int(rng.between(4, 24)), int(rng.between(4, 24))};
    auto bits = fixtures::random_blob_bitmap(rng, d);
    const auto ref = oracle::edt(d, bits);
    const ScalarMap got = euclidean_distance_transform(Mask::from_bitmap(d, bits));
    for (std::size_t k = 0; k < ref.size(); ++k) CHECK(got.values()[k] == doctest::Approx(ref[k]).epsilon(1e-12));
  }
}

TEST_CASE("object probability") {
  const Dims d{15, 15};
  SUBCASE("single pixel") {
    const LabelStack s(d, {Mask::from_bitmap(d, oracle::rect(d, 3, 3, 4, 4))});
    const auto op = object_probability_map(s);
    CHECK(op.p_obj.at(3, 3) == 1.0);
    double total = 0.0;
    for (double v : op.p_obj.values()) total += v;
    CHECK(total == 1.0);
  }
  SUBCASE("disk peaks at the center and falls off along rays") {
    const LabelStack s(d, {Mask::from_bitmap(d, oracle::disk(d, 7, 7, 5.0))});
    const auto op = object_probability_map(s);
    CHECK(op.p_obj.at(7, 7) == 1.0);
    for (int k = 1; k <= 5; ++k) {
      CHECK(op.p_obj.at(7, 7 + k) <= op.p_obj.at(7, 7 + k - 1));
      CHECK(op.p_obj.at(7 - k, 7) <= op.p_obj.at(7 - k + 1, 7));
    }
    for (double v : op.p_obj.values()) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  SUBCASE("coincident instances are all overlap") {
    const auto bits = oracle::disk(d, 7, 7, 4.0);
    const LabelStack s(d, {Mask::from_bitmap(d, bits), Mask::from_bitmap(d, bits)});
    const auto op = object_probability_map(s);
    CHECK(op.p_obj == ScalarMap(d, 0.0));
    for (std::size_t k = 0; k < bits.size(); ++k) CHECK(op.valid.values()[k] == (bits[k] ? 0 : 1));
  }
}

TEST_CASE("overlap probability is the coverage indicator") {
  const Dims d{16, 16};
  CHECK(overlap_probability_map(LabelStack(d)) == ScalarMap(d, 0.0));

  SUBCASE("two masks sharing one pixel") {
    const LabelStack s(d, {Mask::from_bitmap(d, oracle::rect(d, 0, 0, 3, 3)),
                           Mask::from_bitmap(d, oracle::rect(d, 2, 2, 5, 5))});
    const ScalarMap p = overlap_probability_map(s);
    double total = 0.0;
    for (double v : p.values()) total += v;
    CHECK(total == 1.0);
    CHECK(p.at(2, 2) == 1.0);
  }
  SUBCASE("random stacks against counting") {
    Rng rng(21);
    for (int i = 0; i < 10; ++i) {
      std::vector<oracle::Bitmap> bits;
      LabelStack s(d);
      const int k = int(rng.between(0, 4));
      for (int j = 0; j < k; ++j) {
        bits.push_back(fixtures::random_blob_bitmap(rng, d));
        if (oracle::count(bits.back()) == 0) {
          bits.pop_back();
          continue;
        }
        s.add(Mask::from_bitmap(d, bits.back()));
      }
      const auto cov = oracle::coverage(bits, d.pixels());
      const ScalarMap p = overlap_probability_map(s);
      for (std::size_t q = 0; q < cov.size(); ++q) CHECK(p.values()[q] == (cov[q] >= 2 ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("star distances of small shapes") {
  const Dims d{15, 15};
  const RayConfig rays(32);
  SUBCASE("a lone pixel exits its own cell") {
    const Mask m = Mask::from_bitmap(d, oracle::rect(d, 7, 7, 8, 8));
    const auto dist = star_distances_at(m, {7, 7}, rays);
    for (int k = 0; k < 32; ++k) {
      CHECK(dist[std::size_t(k)] >= 0.5 - 1e-12);
      CHECK(dist[std::size_t(k)] <= std::sqrt(0.5) + 1e-12);
    }
    CHECK(dist[0] == doctest::Approx(0.5));
    CHECK(dist[4] == doctest::Approx(std::sqrt(0.5)));
  }
  SUBCASE("disk of radius 4 stays within a pixel of the radius") {
    const Mask m = Mask::from_bitmap(d, oracle::disk(d, 7, 7, 4.0));
    const auto dist = star_distances_at(m, {7, 7}, rays);
    for (double v : dist) {
      CHECK(v >= 3.0);
      CHECK(v <= 5.0);
    }
    CHECK(dist[0] == doctest::Approx(4.5));
    CHECK(dist[8] == doctest::Approx(4.5));
  }
  SUBCASE("grid edge stops the ray") {
    const Mask m = Mask::from_bitmap(d, oracle::rect(d, 0, 0, 15, 15));
    CHECK(star_distances_at(m, {0, 3}, rays)[8] == doctest::Approx(0.5));
  }
  CHECK_THROWS_AS(star_distances_at(Mask::from_bitmap(d, oracle::rect(d, 0, 0, 2, 2)), {5, 5}, rays), InputError);
}

TEST_CASE("star distances agree with dense ray sampling") {
  const Dims d{32, 32};
  Rng rng(8);
  const RayConfig rays(16);
  for (int i = 0; i < 8; ++i) {
    const Mask m = Mask::from_bitmap(d, fixtures::random_blob_bitmap(rng, d));
    for (std::size_t j = 0; j < m.pixels().size(); j += 37) {
      const Pixel p = m.pixels()[j];
      const auto dist = star_distances_at(m, p, rays);
      for (int k = 0; k < rays.n_rays(); ++k) {
        CHECK(std::abs(dist[std::size_t(k)] - sampled_exit(m, p, rays.row_step(k), rays.col_step(k))) <= 2e-3);
      }
    }
  }
}

TEST_CASE("star distance map") {
  const Dims d{20, 20};
  const RayConfig rays(8);
  SUBCASE("empty stack") {
    const auto sd = star_distances_map(LabelStack(d), rays);
    CHECK(sd.valid == ValidMask(d, 0));
    for (double v : sd.dists.values()) CHECK(v == 0.0);
  }
  SUBCASE("one disk matches the per-pixel query") {
    const Mask m = Mask::from_bitmap(d, oracle::disk(d, 9, 10, 6.0));
    const auto sd = star_distances_map(LabelStack(d, {m}), rays);
    for (int r = 0; r < d.height; ++r) {
      for (int c = 0; c < d.width; ++c) {
        CHECK(sd.valid.at(r, c) == (m.contains(r, c) ? 1 : 0));
        if (!m.contains(r, c)) continue;
        const auto ref = star_distances_at(m, {r, c}, rays);
        const auto got = sd.dists.rays_at(r, c);
        CHECK(std::equal(ref.begin(), ref.end(), got.begin()));
      }
    }
  }
  SUBCASE("overlapping squares") {
    const Mask a = Mask::from_bitmap(d, oracle::rect(d, 2, 2, 10, 10));
    const Mask b = Mask::from_bitmap(d, oracle::rect(d, 6, 6, 14, 14));
    const auto sd = star_distances_map(LabelStack(d, {a, b}), rays);
    CHECK(sd.valid.at(7, 7) == 0);
    CHECK(sd.dists.at(7, 7, 0) == 0.0);
    const auto ref = star_distances_at(a, {3, 3}, rays);
    CHECK(std::equal(ref.begin(), ref.end(), sd.dists.rays_at(3, 3).begin()));
    const auto ref_b = star_distances_at(b, {12, 12}, rays);
    CHECK(std::equal(ref_b.begin(), ref_b.end(), sd.dists.rays_at(12, 12).begin()));
  }
}

TEST_CASE("ground truth composition") {
  const Dims d{24, 24};
  const RayConfig rays(8);
  SUBCASE("single disk") {
    const auto gt = make_ground_truth(LabelStack(d, {Mask::from_bitmap(d, oracle::disk(d, 12, 12, 5.0))}), rays);
    CHECK(gt.p_over == ScalarMap(d, 0.0));
    CHECK(*std::max_element(gt.p_obj.values().begin(), gt.p_obj.values().end()) == 1.0);
  }
  SUBCASE("overlapping pair") {
    const auto ba = oracle::disk(d, 10, 9, 5.0);
    const auto bb = oracle::disk(d, 12, 15, 5.0);
    const auto gt = make_ground_truth(LabelStack(d, {Mask::from_bitmap(d, ba), Mask::from_bitmap(d, bb)}), rays);
    for (std::size_t k = 0; k < ba.size(); ++k) {
      const bool over = ba[k] && bb[k];
      CHECK(gt.valid.values()[k] == (over ? 0 : 1));
      CHECK(gt.p_over.values()[k] == (over ? 1.0 : 0.0));
      if (!ba[k] && !bb[k]) CHECK(gt.p_obj.values()[k] == 0.0);
    }
  }
}
