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

#ifndef MULTISTAR_NPY_HPP_
#define MULTISTAR_NPY_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "multistar/error.hpp"

namespace multistar::npy {

enum class DType { kUInt8, kUInt16, kFloat32 };

std::size_t item_size(DType t);
/// Descriptor string as written in the header ("|u1", "<u2", "<f4").
std::string descr(DType t);

enum class ErrorKind {
  kIo,
  kBadMagic,
  kUnsupportedVersion,
  kMalformedHeader,
  kUnsupportedDtype,
  kFortranOrder,
  kTruncated,
};

class NpyError : public InputError {
 public:
  NpyError(ErrorKind kind, const std::string& what) : InputError(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A dense C-order array: dtype, shape, and the raw little-endian payload.
struct ArrayFile {
  DType dtype = DType::kFloat32;
  std::vector<std::size_t> shape;
  std::vector<std::uint8_t> payload;

  std::size_t count() const;
  std::vector<double> to_doubles() const;
  /// Integer dtypes round to nearest and clamp to their range.
  static ArrayFile from_doubles(DType dtype, std::vector<std::size_t> shape, const std::vector<double>& values);

  friend bool operator==(const ArrayFile&, const ArrayFile&) = default;
};

/// Parses the .npy format (versions 1.0 to 3.0). Boolean "|b1" arrays load
/// as uint8.
ArrayFile parse(const std::vector<std::uint8_t>& bytes, const std::string& origin = "<memory>");
/// Serializes as version 1.0 with the same header layout numpy emits.
std::vector<std::uint8_t> serialize(const ArrayFile& array);

ArrayFile read_array(const std::filesystem::path& path);
void write_array(const std::filesystem::path& path, const ArrayFile& array);

}  // namespace multistar::npy

#endif  // MULTISTAR_NPY_HPP_
