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

#include "multistar/io.hpp"

#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace multistar::io {

using nlohmann::json;

namespace {

std::string dims_str(const std::vector<std::size_t>& shape) {
  std::string s;
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "x" : "") + std::to_string(shape[i]);
  return s.empty() ? "scalar" : s;
}

Dims dims_of(std::size_t h, std::size_t w, const std::string& origin) {
  if (h == 0 || w == 0) throw InputError(origin + ": grid dimensions must be positive");
  return Dims{static_cast<int>(h), static_cast<int>(w)};
}

std::string tau_key(double tau) {
  std::ostringstream s;
  s.precision(12);
  s << tau;
  return s.str();
}

json summary_json(const Summary& s) { return json{{"mean", s.mean}, {"std", s.std}}; }

}  // namespace

LabelStack labels_from_array(const npy::ArrayFile& a, const std::string& origin) {
  if (a.dtype == npy::DType::kFloat32) {
    throw InputError(origin + ": label arrays must be integer typed (got <f4)");
  }
  const std::vector<double> v = a.to_doubles();
  if (a.shape.size() == 3) {
    const Dims dims = dims_of(a.shape[1], a.shape[2], origin);
    LabelStack out(dims);
    std::vector<std::uint8_t> bits(dims.pixels());
    for (std::size_t k = 0; k < a.shape[0]; ++k) {
      for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = v[k * bits.size() + i] != 0.0 ? 1 : 0;
      Mask m = Mask::from_bitmap(dims, bits);
      if (m.empty()) {
        std::cerr << "warning: " << origin << ": instance " << k << " is empty and was dropped\n";
        continue;
      }
      out.add(std::move(m));
    }
    return out;
  }
  if (a.shape.size() == 2) {
    const Dims dims = dims_of(a.shape[0], a.shape[1], origin);
    std::set<long> ids;
    for (double x : v) {
      if (x > 0) ids.insert(static_cast<long>(x));
    }
    LabelStack out(dims);
    std::vector<std::uint8_t> bits(dims.pixels());
    for (long id : ids) {
      for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = static_cast<long>(v[i]) == id ? 1 : 0;
      out.add(Mask::from_bitmap(dims, bits));
    }
    return out;
  }
  throw InputError(origin + ": labels must be a 2D label image or a 3D instance stack, got shape " +
                   dims_str(a.shape));
}

npy::ArrayFile labels_to_array(const LabelStack& labels) {
  const Dims d = labels.dims();
  npy::ArrayFile a{npy::DType::kUInt8,
                   {labels.size(), static_cast<std::size_t>(d.height), static_cast<std::size_t>(d.width)},
                   {}};
  a.payload.reserve(labels.size() * d.pixels());
  for (const Mask& m : labels.instances()) {
    const auto bits = m.to_bitmap();
    a.payload.insert(a.payload.end(), bits.begin(), bits.end());
  }
  return a;
}

LabelStack load_labels(const std::filesystem::path& path) {
  return labels_from_array(npy::read_array(path), path.string());
}

void save_labels(const std::filesystem::path& path, const LabelStack& labels) {
  npy::write_array(path, labels_to_array(labels));
}

ScalarMap load_scalar_map(const std::filesystem::path& path) {
  const auto a = npy::read_array(path);
  if (a.shape.size() != 2) throw InputError(path.string() + ": expected a 2D map, got shape " + dims_str(a.shape));
  return ScalarMap(dims_of(a.shape[0], a.shape[1], path.string()), a.to_doubles());
}

void save_scalar_map(const std::filesystem::path& path, const ScalarMap& map) {
  const std::vector<double> v(map.values().begin(), map.values().end());
  npy::write_array(path, npy::ArrayFile::from_doubles(
                             npy::DType::kFloat32,
                             {static_cast<std::size_t>(map.height()), static_cast<std::size_t>(map.width())}, v));
}

DistanceMap load_distance_map(const std::filesystem::path& path) {
  const auto a = npy::read_array(path);
  if (a.shape.size() != 3) {
    throw InputError(path.string() + ": expected an HxWxR distance map, got shape " + dims_str(a.shape));
  }
  return DistanceMap(dims_of(a.shape[0], a.shape[1], path.string()), static_cast<int>(a.shape[2]), a.to_doubles());
}

void save_distance_map(const std::filesystem::path& path, const DistanceMap& map) {
  const std::vector<double> v(map.values().begin(), map.values().end());
  npy::write_array(path, npy::ArrayFile::from_doubles(npy::DType::kFloat32,
                                                      {static_cast<std::size_t>(map.dims().height),
                                                       static_cast<std::size_t>(map.dims().width),
                                                       static_cast<std::size_t>(map.n_rays())},
                                                      v));
}

ValidMask load_valid_mask(const std::filesystem::path& path) {
  const auto a = npy::read_array(path);
  if (a.shape.size() != 2) throw InputError(path.string() + ": expected a 2D mask, got shape " + dims_str(a.shape));
  const auto v = a.to_doubles();
  std::vector<std::uint8_t> bits(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) bits[i] = v[i] != 0.0 ? 1 : 0;
  return ValidMask(dims_of(a.shape[0], a.shape[1], path.string()), std::move(bits));
}

void save_valid_mask(const std::filesystem::path& path, const ValidMask& mask) {
  npy::ArrayFile a{npy::DType::kUInt8,
                   {static_cast<std::size_t>(mask.height()), static_cast<std::size_t>(mask.width())},
                   std::vector<std::uint8_t>(mask.values().begin(), mask.values().end())};
  npy::write_array(path, a);
}

Image load_image(const std::filesystem::path& path, npy::DType* dtype) {
  const auto a = npy::read_array(path);
  if (a.shape.size() != 2) throw InputError(path.string() + ": expected a 2D image, got shape " + dims_str(a.shape));
  if (dtype) *dtype = a.dtype;
  const double max_value = a.dtype == npy::DType::kUInt8 ? 255.0 : a.dtype == npy::DType::kUInt16 ? 65535.0 : 1.0;
  return Image{ScalarMap(dims_of(a.shape[0], a.shape[1], path.string()), a.to_doubles()), max_value};
}

void save_image(const std::filesystem::path& path, const Image& image, npy::DType dtype) {
  const std::vector<double> v(image.values.values().begin(), image.values.values().end());
  npy::write_array(path, npy::ArrayFile::from_doubles(dtype,
                                                      {static_cast<std::size_t>(image.values.height()),
                                                       static_cast<std::size_t>(image.values.width())},
                                                      v));
}

void save_ground_truth(const std::filesystem::path& dir, const GroundTruthMaps& gt) {
  std::filesystem::create_directories(dir);
  save_scalar_map(dir / "p_obj.npy", gt.p_obj);
  save_scalar_map(dir / "p_over.npy", gt.p_over);
  save_distance_map(dir / "dist.npy", gt.star_dists);
  save_valid_mask(dir / "valid.npy", gt.valid);
}

GroundTruthMaps load_ground_truth(const std::filesystem::path& dir) {
  GroundTruthMaps gt{load_scalar_map(dir / "p_obj.npy"), load_scalar_map(dir / "p_over.npy"),
                     load_distance_map(dir / "dist.npy"), load_valid_mask(dir / "valid.npy")};
  const Dims d = gt.p_obj.dims();
  if (gt.p_over.dims() != d || gt.star_dists.dims() != d || gt.valid.dims() != d) {
    throw InputError(dir.string() + ": ground-truth arrays have mismatched grids");
  }
  return gt;
}

PredictionMaps load_prediction(const std::filesystem::path& obj, const std::filesystem::path& over,
                               const std::filesystem::path& dist) {
  PredictionMaps maps{load_scalar_map(obj), load_scalar_map(over), load_distance_map(dist)};
  const Dims d = maps.p_obj.dims();
  auto fmt = [](const std::filesystem::path& p, Dims x) {
    return p.string() + " (" + std::to_string(x.height) + "x" + std::to_string(x.width) + ")";
  };
  if (maps.p_over.dims() != d || maps.star_dists.dims() != d) {
    throw InputError("prediction grids differ: " + fmt(obj, d) + ", " + fmt(over, maps.p_over.dims()) + ", " +
                     fmt(dist, maps.star_dists.dims()));
  }
  return maps;
}

Rle rle_encode(const Mask& m) {
  Rle out;
  const Box& b = m.box();
  const auto width = static_cast<std::size_t>(m.dims().width);
  for (int r = b.row0; r < b.row1; ++r) {
    int c = b.col0;
    while (c < b.col1) {
      if (!m.contains(r, c)) {
        ++c;
        continue;
      }
      const int start = c;
      while (c < b.col1 && m.contains(r, c)) ++c;
      const std::size_t flat = static_cast<std::size_t>(r) * width + static_cast<std::size_t>(start);
      // Runs continue across row ends in the flattened grid.
      if (!out.empty() && out.back().first + out.back().second == flat) {
        out.back().second += static_cast<std::size_t>(c - start);
      } else {
        out.emplace_back(flat, static_cast<std::size_t>(c - start));
      }
    }
  }
  return out;
}

Mask rle_decode(Dims dims, const Rle& rle) {
  std::vector<std::uint8_t> bits(dims.pixels(), 0);
  for (const auto& [start, len] : rle) {
    if (start + len > bits.size() || start + len < start) {
      throw InputError("run (" + std::to_string(start) + ", " + std::to_string(len) + ") exceeds the " +
                       std::to_string(dims.height) + "x" + std::to_string(dims.width) + " grid");
    }
    std::fill(bits.begin() + static_cast<std::ptrdiff_t>(start), bits.begin() + static_cast<std::ptrdiff_t>(start + len), 1);
  }
  return Mask::from_bitmap(dims, bits);
}

LabelStack SegmentationDocument::to_labels() const {
  LabelStack out(dims);
  for (const auto& inst : instances) {
    if (!inst.mask.empty()) out.add(inst.mask);
  }
  return out;
}

SegmentationDocument make_document(const SegmentationResult& result, const InferenceConfig& cfg) {
  SegmentationDocument doc;
  doc.dims = result.dims;
  doc.config.rho = cfg.rho;
  doc.config.nu = cfg.nu;
  doc.config.n_rays = cfg.rays.n_rays();
  doc.config.iou = cfg.iou_mode == IouMode::kPlain ? "plain" : "overlap_aware";
  doc.config.score = cfg.score_mode == ScoreMode::kObject ? "obj" : "weight";
  doc.instances = result.instances;
  return doc;
}

std::string to_json(const SegmentationDocument& doc) {
  json j;
  j["version"] = doc.version;
  j["height"] = doc.dims.height;
  j["width"] = doc.dims.width;
  j["config"] = json{{"rho", doc.config.rho},
                     {"nu", doc.config.nu},
                     {"n_rays", doc.config.n_rays},
                     {"seed", doc.config.seed ? json(*doc.config.seed) : json(nullptr)},
                     {"iou", doc.config.iou},
                     {"score", doc.config.score}};
  j["instances"] = json::array();
  for (const auto& inst : doc.instances) {
    json runs = json::array();
    for (const auto& [s, l] : rle_encode(inst.mask)) runs.push_back({s, l});
    j["instances"].push_back(json{{"score", inst.score},
                                  {"center", {inst.polygon.center.row, inst.polygon.center.col}},
                                  {"radii", inst.polygon.radii},
                                  {"rle", std::move(runs)}});
  }
  return j.dump(2) + "\n";
}

SegmentationDocument segmentation_from_json(const std::string& text) {
  SegmentationDocument doc;
  try {
    const json j = json::parse(text);
    doc.version = j.at("version").get<std::string>();
    doc.dims = dims_of(j.at("height").get<std::size_t>(), j.at("width").get<std::size_t>(), "segmentation");
    const json& cfg = j.at("config");
    doc.config.rho = cfg.at("rho").get<double>();
    doc.config.nu = cfg.at("nu").get<double>();
    doc.config.n_rays = cfg.at("n_rays").get<int>();
    if (cfg.contains("seed") && !cfg.at("seed").is_null()) doc.config.seed = cfg.at("seed").get<std::uint64_t>();
    doc.config.iou = cfg.value("iou", std::string("overlap_aware"));
    doc.config.score = cfg.value("score", std::string("weight"));
    for (const json& rec : j.at("instances")) {
      Instance inst;
      inst.score = rec.at("score").get<double>();
      inst.polygon.score = inst.score;
      const auto center = rec.at("center").get<std::vector<int>>();
      if (center.size() != 2) throw InputError("instance center must have two coordinates");
      inst.polygon.center = {center[0], center[1]};
      inst.polygon.radii = rec.at("radii").get<std::vector<double>>();
      Rle rle;
      for (const json& run : rec.at("rle")) rle.emplace_back(run.at(0).get<std::size_t>(), run.at(1).get<std::size_t>());
      inst.mask = rle_decode(doc.dims, rle);
      if (!doc.instances.empty() && inst.score > doc.instances.back().score) {
        throw InputError("segmentation records must be sorted by score, descending");
      }
      doc.instances.push_back(std::move(inst));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed segmentation document: ") + e.what());
  }
  return doc;
}

std::string metrics_to_json(const MetricsReport& report, const std::vector<ImageRef>& refs,
                            const std::vector<double>& taus) {
  json j;
  j["version"] = kVersion;
  j["config"] = json{{"taus", taus}, {"dice_match_threshold", kChallengeDiceThreshold}};
  j["images"] = json::array();
  for (std::size_t i = 0; i < report.images.size(); ++i) {
    const auto& im = report.images[i];
    json ap = json::object();
    for (const auto& [tau, v] : im.ap) ap[tau_key(tau)] = v;
    json rec{{"dc", im.challenge.dc},
             {"tp_p", im.challenge.tp_p},
             {"fp_p", im.challenge.fp_p},
             {"fn_o", im.challenge.fn_o},
             {"matched", im.challenge.matched},
             {"ap", std::move(ap)}};
    if (i < refs.size()) {
      rec["pred"] = refs[i].pred;
      rec["gt"] = refs[i].gt;
    }
    j["images"].push_back(std::move(rec));
  }
  json ap = json::object();
  for (const auto& [tau, s] : report.ap) ap[tau_key(tau)] = summary_json(s);
  j["aggregate"] = json{{"dc", summary_json(report.dc)},
                        {"tp_p", summary_json(report.tp_p)},
                        {"fp_p", summary_json(report.fp_p)},
                        {"fn_o", summary_json(report.fn_o)},
                        {"ap", std::move(ap)}};
  return j.dump(2) + "\n";
}

std::string loss_to_json(const LossReport& report, const TaskUncertainties& sig) {
  json j{{"version", kVersion},
         {"config", {{"sigma", {sig.sigma_over, sig.sigma_obj, sig.sigma_dist}}}},
         {"l_over", report.l_over},
         {"l_obj", report.l_obj},
         {"l_dist", report.l_dist},
         {"combined", report.combined},
         {"pixels", {{"over", report.n_over}, {"obj", report.n_obj}, {"dist", report.n_dist}}}};
  return j.dump(2) + "\n";
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open for reading");
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError(path.string() + ": cannot open for writing");
  out << text;
}

}  // namespace multistar::io
