// Copyright 2026 The Axonfield Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS-IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AXONFIELD_CSV_HPP
#define AXONFIELD_CSV_HPP

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "axonfield/constants.hpp"

namespace axonfield {

/// Comma-separated output, '.' decimal, 17 significant digits so doubles
/// round-trip exactly. Header row mandatory.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("cannot open for writing: " + path);
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (k) out_ << ',';
      out_ << header[k];
    }
    out_ << '\n';
    columns_ = header.size();
  }

  void row(std::initializer_list<double> values) {
    if (values.size() != columns_)
      throw ConfigError("csv row width does not match the header");
    char buf[32];
    std::size_t k = 0;
    for (double v : values) {
      if (k++) out_ << ',';
      std::snprintf(buf, sizeof buf, "%.16e", v);
      out_ << buf;
    }
    out_ << '\n';
  }

  /// Leading string cell followed by numeric cells.
  void row(const std::string& label, std::initializer_list<double> values) {
    if (values.size() + 1 != columns_)
      throw ConfigError("csv row width does not match the header");
    out_ << label;
    char buf[32];
    for (double v : values) {
      std::snprintf(buf, sizeof buf, "%.16e", v);
      out_ << ',' << buf;
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
  std::size_t columns_ = 0;
};

}  // namespace axonfield

#endif  // AXONFIELD_CSV_HPP
