// Copyright 2026 The mbsarma Authors
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

#ifndef MBSARMA_TOOLS_CLI_CSV_HPP_
#define MBSARMA_TOOLS_CLI_CSV_HPP_

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mbsarma::cli {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws ParseError when the column is missing.
  std::size_t column(const std::string& name) const;
  Eigen::VectorXd numeric_column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

// Formats with 6 significant digits, or 17 when full is set.
std::string format_number(double value, bool full);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header, bool full);
  CsvWriter& cell(const std::string& text);
  CsvWriter& cell(double value);
  CsvWriter& cell(long long value);
  void end_row();

  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

 private:
  std::FILE* file_;
  bool full_;
  bool first_ = true;
};

}  // namespace mbsarma::cli

#endif  // MBSARMA_TOOLS_CLI_CSV_HPP_
