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

#ifndef MULTISTAR_ERROR_HPP_
#define MULTISTAR_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace multistar {

/// Raised when a caller violates an operation's preconditions (bad dims,
/// out-of-range probabilities, malformed files).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a generator cannot satisfy a requested constraint within its
/// attempt budget. Carries the best value reached.
class ConstraintError : public std::runtime_error {
 public:
  ConstraintError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace multistar

#endif  // MULTISTAR_ERROR_HPP_
