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

// numpy-facing wrappers over the C++ core. Arrays are copied in and out;
// masks travel as (K, H, W) uint8 stacks.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "multistar/error.hpp"
#include "multistar/geometry.hpp"
#include "multistar/groundtruth.hpp"
#include "multistar/inference.hpp"
#include "multistar/io.hpp"
#include "multistar/losses.hpp"
#include "multistar/metrics.hpp"
#include "multistar/synth.hpp"

namespace py = pybind11;
using namespace multistar;

namespace {

using F64 = py::array_t<double, py::array::c_style | py::array::forcecast>;
using U8 = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

Dims dims_2d(const py::buffer_info& b, const char* what) {
  if (b.ndim != 2) throw InputError(std::string(what) + " must be 2-D");
  return Dims{static_cast<int>(b.shape[0]), static_cast<int>(b.shape[1])};
}

ScalarMap to_map(const F64& a, const char* what) {
  const auto b = a.request();
  const Dims d = dims_2d(b, what);
  const auto* p = static_cast<const double*>(b.ptr);
  return ScalarMap(d, std::vector<double>(p, p + d.pixels()));
}

F64 from_map(const ScalarMap& m) {
  F64 out({m.height(), m.width()});
  std::memcpy(out.mutable_data(), m.values().data(), m.values().size() * sizeof(double));
  return out;
}

Mask to_mask(const U8& a, const char* what) {
  const auto b = a.request();
  const Dims d = dims_2d(b, what);
  return Mask::from_bitmap(d, std::span(static_cast<const std::uint8_t*>(b.ptr), d.pixels()));
}

LabelStack to_stack(const U8& a, const char* what) {
  const auto b = a.request();
  if (b.ndim != 3) throw InputError(std::string(what) + " must be a (K, H, W) stack");
  const Dims d{static_cast<int>(b.shape[1]), static_cast<int>(b.shape[2])};
  LabelStack out(d);
  const auto* p = static_cast<const std::uint8_t*>(b.ptr);
  for (py::ssize_t k = 0; k < b.shape[0]; ++k) {
    Mask m = Mask::from_bitmap(d, std::span(p + static_cast<std::size_t>(k) * d.pixels(), d.pixels()));
    if (!m.empty()) out.add(std::move(m));
  }
  return out;
}

U8 from_stack(const LabelStack& s) {
  const Dims d = s.dims();
  U8 out({static_cast<py::ssize_t>(s.size()), static_cast<py::ssize_t>(d.height), static_cast<py::ssize_t>(d.width)});
  auto* p = out.mutable_data();
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto bits = s[k].to_bitmap();
    std::memcpy(p + k * d.pixels(), bits.data(), bits.size());
  }
  return out;
}

DistanceMap to_dist(const F64& a) {
  const auto b = a.request();
  if (b.ndim != 3) throw InputError("star distances must be (H, W, R)");
  const Dims d{static_cast<int>(b.shape[0]), static_cast<int>(b.shape[1])};
  const auto* p = static_cast<const double*>(b.ptr);
  const int n = static_cast<int>(b.shape[2]);
  return DistanceMap(d, n, std::vector<double>(p, p + d.pixels() * static_cast<std::size_t>(n)));
}

F64 from_dist(const DistanceMap& m) {
  F64 out({m.dims().height, m.dims().width, m.n_rays()});
  std::memcpy(out.mutable_data(), m.values().data(), m.values().size() * sizeof(double));
  return out;
}

py::dict ground_truth(const U8& labels, int n_rays) {
  const auto gt = make_ground_truth(to_stack(labels, "labels"), RayConfig(n_rays));
  py::dict out;
  out["p_obj"] = from_map(gt.p_obj);
  out["p_over"] = from_map(gt.p_over);
  out["dist"] = from_dist(gt.star_dists);
  U8 valid({gt.valid.height(), gt.valid.width()});
  std::memcpy(valid.mutable_data(), gt.valid.values().data(), gt.valid.values().size());
  out["valid"] = valid;
  return out;
}

py::list segment_maps(const F64& p_obj, const F64& p_over, const F64& dist, double rho, double nu, bool plain_iou,
                      const std::string& score, const std::string& union_mode, std::size_t max_proposals) {
  PredictionMaps maps{to_map(p_obj, "p_obj"), to_map(p_over, "p_over"), to_dist(dist)};
  InferenceConfig cfg;
  cfg.rho = rho;
  cfg.nu = nu;
  cfg.rays = RayConfig(maps.star_dists.n_rays());
  cfg.max_proposals = max_proposals;
  cfg.iou_mode = plain_iou ? IouMode::kPlain : IouMode::kOverlapAware;
  if (score != "weight" && score != "obj") throw InputError("score must be 'weight' or 'obj'");
  cfg.score_mode = score == "obj" ? ScoreMode::kObject : ScoreMode::kWeight;
  if (union_mode != "pixel" && union_mode != "discounted") throw InputError("union must be 'pixel' or 'discounted'");
  cfg.union_mode = union_mode == "discounted" ? UnionMode::kDiscounted : UnionMode::kPixelUnion;

  const SegmentationResult res = segment(maps, cfg);
  py::list out;
  for (const Instance& inst : res.instances) {
    py::dict rec;
    rec["score"] = inst.score;
    rec["center"] = py::make_tuple(inst.polygon.center.row, inst.polygon.center.col);
    rec["radii"] = inst.polygon.radii;
    U8 mask({res.dims.height, res.dims.width});
    const auto bits = inst.mask.to_bitmap();
    std::memcpy(mask.mutable_data(), bits.data(), bits.size());
    rec["mask"] = mask;
    out.append(rec);
  }
  return out;
}

py::dict evaluate(const U8& preds, const U8& gts, const std::vector<double>& taus) {
  const ImageMetrics m = evaluate_image(to_stack(preds, "preds"), to_stack(gts, "gts"), taus);
  py::dict ap;
  for (const auto& [tau, v] : m.ap) ap[py::float_(tau)] = v;
  py::dict out;
  out["dc"] = m.challenge.dc;
  out["tp_p"] = m.challenge.tp_p;
  out["fp_p"] = m.challenge.fp_p;
  out["fn_o"] = m.challenge.fn_o;
  out["matched"] = m.challenge.matched;
  out["ap"] = ap;
  return out;
}

py::tuple synthesize_scene(const F64& image, const U8& labels, double max_value, double min_overlap, std::uint64_t seed,
                           int max_attempts, bool saturate) {
  SynthConfig cfg;
  cfg.min_overlap_fraction = min_overlap;
  cfg.seed = seed;
  cfg.max_attempts = max_attempts;
  cfg.saturate = saturate;
  const SynthResult r = synthesize(Image{to_map(image, "image"), max_value}, to_stack(labels, "labels"), cfg);
  return py::make_tuple(from_map(r.image.values), from_stack(r.labels), r.overlap_fraction);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Overlap-aware star-convex instance segmentation core";
  m.attr("__version__") = kVersion;

  static py::exception<ConstraintError> constraint_error(m, "ConstraintError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConstraintError& e) {
      py::set_error(constraint_error, e.what());
    } catch (const InputError& e) {
      py::set_error(PyExc_ValueError, e.what());
    }
  });

  m.def("ground_truth", &ground_truth, py::arg("labels"), py::arg("n_rays") = 32,
        "Object probability, overlap probability, star distances and validity from a (K, H, W) stack.");
  m.def("segment", &segment_maps, py::arg("p_obj"), py::arg("p_over"), py::arg("dist"), py::kw_only(),
        py::arg("rho"), py::arg("nu"), py::arg("plain_iou") = false, py::arg("score") = "weight",
        py::arg("union") = "pixel", py::arg("max_proposals") = 10000);
  m.def("evaluate", &evaluate, py::arg("preds"), py::arg("gts"),
        py::arg("taus") = std::vector<double>{0.4, 0.5, 0.6, 0.7, 0.8});
  m.def("synthesize", &synthesize_scene, py::arg("image"), py::arg("labels"), py::kw_only(),
        py::arg("max_value") = 255.0, py::arg("min_overlap") = 0.15, py::arg("seed") = 0, py::arg("max_attempts") = 200,
        py::arg("saturate") = true);
  m.def("overlap_fraction", [](const U8& labels) { return overlap_fraction(to_stack(labels, "labels")); });

  m.def("edt", [](const U8& mask) { return from_map(euclidean_distance_transform(to_mask(mask, "mask"))); });
  m.def(
      "rasterize",
      [](std::pair<int, int> center, std::vector<double> radii, std::pair<int, int> shape) {
        const RayConfig rays(static_cast<int>(radii.size()));
        const Mask mk = rasterize(StarPolygon{{center.first, center.second}, std::move(radii), 1.0}, rays,
                                  Dims{shape.first, shape.second});
        U8 out({shape.first, shape.second});
        const auto bits = mk.to_bitmap();
        std::memcpy(out.mutable_data(), bits.data(), bits.size());
        return out;
      },
      py::arg("center"), py::arg("radii"), py::arg("shape"));
  m.def("star_distances", [](const U8& mask, std::pair<int, int> p, int n_rays) {
    return star_distances_at(to_mask(mask, "mask"), Pixel{p.first, p.second}, RayConfig(n_rays));
  }, py::arg("mask"), py::arg("pixel"), py::arg("n_rays") = 32);
  m.def("pixel_iou", [](const U8& a, const U8& b) { return pixel_iou(to_mask(a, "a"), to_mask(b, "b")); });
  m.def("dice", [](const U8& a, const U8& b) { return dice(to_mask(a, "a"), to_mask(b, "b")); });
  m.def("overlap_aware_iou", [](const U8& a, const U8& b, const F64& p_over) {
    return overlap_aware_iou(to_mask(a, "a"), to_mask(b, "b"), to_map(p_over, "p_over"));
  });
  m.def("multitask_loss", [](double l_over, double l_obj, double l_dist, std::tuple<double, double, double> s) {
    return multitask_loss(l_over, l_obj, l_dist, {std::get<0>(s), std::get<1>(s), std::get<2>(s)});
  }, py::arg("l_over"), py::arg("l_obj"), py::arg("l_dist"), py::arg("sigma") = std::make_tuple(1.0, 1.0, 1.0));
}
