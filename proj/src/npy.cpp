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

#include "multistar/npy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <regex>

namespace multistar::npy {

namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;
constexpr std::size_t kAlign = 64;
// numpy reserves room for the leading axis to grow to this many digits.
constexpr std::size_t kGrowthAxisDigits = 21;

static_assert(std::endian::native == std::endian::little, "payload handling assumes a little-endian host");

std::string shape_repr(const std::vector<std::size_t>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  if (shape.size() == 1) s += ",";
  return s + ")";
}

}  // namespace

std::size_t item_size(DType t) {
  switch (t) {
    case DType::kUInt8:
      return 1;
    case DType::kUInt16:
      return 2;
    case DType::kFloat32:
      return 4;
  }
  return 0;
}

std::string descr(DType t) {
  switch (t) {
    case DType::kUInt8:
      return "|u1";
    case DType::kUInt16:
      return "<u2";
    case DType::kFloat32:
      return "<f4";
  }
  return "";
}

std::size_t ArrayFile::count() const {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::vector<double> ArrayFile::to_doubles() const {
  const std::size_t n = count();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (dtype) {
      case DType::kUInt8:
        out[i] = payload[i];
        break;
      case DType::kUInt16: {
        std::uint16_t v;
        std::memcpy(&v, payload.data() + 2 * i, 2);
        out[i] = v;
        break;
      }
      case DType::kFloat32: {
        float v;
        std::memcpy(&v, payload.data() + 4 * i, 4);
        out[i] = v;
        break;
      }
    }
  }
  return out;
}

ArrayFile ArrayFile::from_doubles(DType dtype, std::vector<std::size_t> shape, const std::vector<double>& values) {
  ArrayFile a{dtype, std::move(shape), {}};
  if (a.count() != values.size()) throw InputError("array shape does not match value count");
  a.payload.resize(values.size() * item_size(dtype));
  for (std::size_t i = 0; i < values.size(); ++i) {
    switch (dtype) {
      case DType::kUInt8: {
        a.payload[i] = static_cast<std::uint8_t>(std::clamp(std::lround(values[i]), 0L, 255L));
        break;
      }
      case DType::kUInt16: {
        const auto v = static_cast<std::uint16_t>(std::clamp(std::lround(values[i]), 0L, 65535L));
        std::memcpy(a.payload.data() + 2 * i, &v, 2);
        break;
      }
      case DType::kFloat32: {
        const auto v = static_cast<float>(values[i]);
        std::memcpy(a.payload.data() + 4 * i, &v, 4);
        break;
      }
    }
  }
  return a;
}

ArrayFile parse(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
  if (bytes.size() < kMagicLen + 2 || std::memcmp(bytes.data(), kMagic, kMagicLen) != 0) {
    throw NpyError(ErrorKind::kBadMagic, origin + ": not a .npy file (bad magic string)");
  }
  const int major = bytes[6];
  std::size_t header_len = 0;
  std::size_t header_start = 0;
  if (major == 1) {
    if (bytes.size() < 10) throw NpyError(ErrorKind::kTruncated, origin + ": truncated header length");
    header_len = bytes[8] | (std::size_t(bytes[9]) << 8);
    header_start = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) throw NpyError(ErrorKind::kTruncated, origin + ": truncated header length");
    header_len = bytes[8] | (std::size_t(bytes[9]) << 8) | (std::size_t(bytes[10]) << 16) | (std::size_t(bytes[11]) << 24);
    header_start = 12;
  } else {
    throw NpyError(ErrorKind::kUnsupportedVersion,
                   origin + ": unsupported .npy version " + std::to_string(major) + "." + std::to_string(bytes[7]));
  }
  if (bytes.size() < header_start + header_len) throw NpyError(ErrorKind::kTruncated, origin + ": truncated header");
  const std::string header(bytes.begin() + static_cast<std::ptrdiff_t>(header_start),
                           bytes.begin() + static_cast<std::ptrdiff_t>(header_start + header_len));

  std::smatch m;
  static const std::regex descr_re(R"('descr'\s*:\s*'([^']*)')");
  static const std::regex fortran_re(R"('fortran_order'\s*:\s*(True|False))");
  static const std::regex shape_re(R"('shape'\s*:\s*\(([^)]*)\))");
  if (!std::regex_search(header, m, descr_re)) throw NpyError(ErrorKind::kMalformedHeader, origin + ": header lacks 'descr'");
  const std::string d = m[1];
  if (!std::regex_search(header, m, fortran_re)) {
    throw NpyError(ErrorKind::kMalformedHeader, origin + ": header lacks 'fortran_order'");
  }
  if (m[1] == "True") {
    throw NpyError(ErrorKind::kFortranOrder, origin + ": fortran_order arrays are not supported");
  }
  if (!std::regex_search(header, m, shape_re)) throw NpyError(ErrorKind::kMalformedHeader, origin + ": header lacks 'shape'");
  std::vector<std::size_t> shape;
  {
    const std::string dims = m[1];
    static const std::regex num_re(R"(\d+)");
    for (auto it = std::sregex_iterator(dims.begin(), dims.end(), num_re); it != std::sregex_iterator(); ++it) {
      shape.push_back(std::stoull(it->str()));
    }
  }

  DType dtype;
  if (d == "|u1" || d == "<u1" || d == "u1" || d == "|b1") {
    dtype = DType::kUInt8;
  } else if (d == "<u2") {
    dtype = DType::kUInt16;
  } else if (d == "<f4") {
    dtype = DType::kFloat32;
  } else {
    throw NpyError(ErrorKind::kUnsupportedDtype, origin + ": unsupported dtype '" + d + "' (expected |u1, <u2 or <f4)");
  }

  ArrayFile a{dtype, std::move(shape), {}};
  const std::size_t need = a.count() * item_size(dtype);
  const std::size_t offset = header_start + header_len;
  if (bytes.size() - offset < need) {
    throw NpyError(ErrorKind::kTruncated, origin + ": payload has " + std::to_string(bytes.size() - offset) +
                                              " bytes, shape requires " + std::to_string(need));
  }
  a.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                   bytes.begin() + static_cast<std::ptrdiff_t>(offset + need));
  if (d == "|b1") {
    for (auto& b : a.payload) b = b ? 1 : 0;
  }
  return a;
}

std::vector<std::uint8_t> serialize(const ArrayFile& array) {
  if (array.payload.size() != array.count() * item_size(array.dtype)) {
    throw InputError("array payload size does not match its shape");
  }
  std::string header = "{'descr': '" + descr(array.dtype) + "', 'fortran_order': False, 'shape': " +
                       shape_repr(array.shape) + ", }";
  if (!array.shape.empty()) {
    const std::size_t digits = std::to_string(array.shape.front()).size();
    if (digits < kGrowthAxisDigits) header.append(kGrowthAxisDigits - digits, ' ');
  }
  const std::size_t hlen = header.size() + 1;
  // magic, two version bytes and the little-endian header length.
  const std::size_t pad = kAlign - ((kMagicLen + 2 + 2 + hlen) % kAlign);
  header.append(pad, ' ');
  header.push_back('\n');
  if (header.size() > std::numeric_limits<std::uint16_t>::max()) throw InputError("npy header too large");

  std::vector<std::uint8_t> out(kMagic, kMagic + kMagicLen);
  out.push_back(1);
  out.push_back(0);
  out.push_back(static_cast<std::uint8_t>(header.size() & 0xff));
  out.push_back(static_cast<std::uint8_t>(header.size() >> 8));
  out.insert(out.end(), header.begin(), header.end());
  out.insert(out.end(), array.payload.begin(), array.payload.end());
  return out;
}

ArrayFile read_array(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NpyError(ErrorKind::kIo, path.string() + ": cannot open for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(bytes, path.string());
}

void write_array(const std::filesystem::path& path, const ArrayFile& array) {
  const auto bytes = serialize(array);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw NpyError(ErrorKind::kIo, path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw NpyError(ErrorKind::kIo, path.string() + ": write failed");
}

}  // namespace multistar::npy
