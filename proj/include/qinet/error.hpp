// Copyright 2026 The qinet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QINET_ERROR_HPP
#define QINET_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qinet {

// Raised for any input that violates an operation's precondition: malformed
// trees, reports listing non-children, parameters outside their domain.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A bounded search ran to its cap without finding a witness.
class SearchExhausted : public std::runtime_error {
 public:
  SearchExhausted(const std::string& what, double value_at_cap)
      : std::runtime_error(what), value_at_cap_(value_at_cap) {}

  double value_at_cap() const noexcept { return value_at_cap_; }

 private:
  double value_at_cap_;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InputError(message);
}

}  // namespace detail
}  // namespace qinet

#endif  // QINET_ERROR_HPP
