// Copyright 2026 The dpmon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPMON_DIAGNOSTICS_HPP
#define DPMON_DIAGNOSTICS_HPP

#include <stdexcept>
#include <string>

namespace dpmon {

// All user-facing failures. `code` is a stable machine-readable tag
// ("SyntaxError", "IllegalCycle", "PacingMismatch", ...); position fields
// are valid when >= 0 and refer to the source text of the specification.
class SpecError : public std::runtime_error {
 public:
  SpecError(std::string code, const std::string& message, int line = -1,
            int column = -1, int token_index = -1)
      : std::runtime_error(format(code, message, line, column)),
        code_(std::move(code)),
        line_(line),
        column_(column),
        token_index_(token_index) {}

  const std::string& code() const { return code_; }
  int line() const { return line_; }
  int column() const { return column_; }
  int token_index() const { return token_index_; }

 private:
  static std::string format(const std::string& code, const std::string& message,
                            int line, int column) {
    if (line < 0) return code + ": " + message;
    return code + " at " + std::to_string(line) + ":" + std::to_string(column) +
           ": " + message;
  }

  std::string code_;
  int line_, column_, token_index_;
};

}  // namespace dpmon

#endif  // DPMON_DIAGNOSTICS_HPP
