// Copyright 2026 The lneflow Authors. All Rights Reserved.
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

#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>

namespace lneflow {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

/// Writes a comma-separated row followed by '\n'.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void header(std::initializer_list<std::string_view> names);
  CsvWriter& field(double v);
  CsvWriter& field(long long v);
  CsvWriter& field(std::string_view v);
  void end_row();

 private:
  std::ostream& os_;
  bool first_ = true;
};

}  // namespace lneflow
